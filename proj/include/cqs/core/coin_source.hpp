#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <random>
#include <stdexcept>
#include <vector>

namespace cqs {

// One boolean per sampling event: false keeps even (0-based) positions,
// true keeps odd ones. Two sketches fed identical streams and identical
// coin sequences evolve bitwise identically.
class CoinSource {
public:
    virtual ~CoinSource() = default;
    virtual bool next() = 0;
};

class SeededCoins final : public CoinSource {
public:
    explicit SeededCoins(std::uint64_t seed) : rng_(seed) {}
    bool next() override { return (rng_() & 1u) != 0; }

private:
    std::mt19937_64 rng_;
};

// A fixed, explicitly provided sequence. Shared by every consumer in a
// derandomized run; consumption order is the propagation order.
class InjectedCoins final : public CoinSource {
public:
    explicit InjectedCoins(std::vector<bool> seq) : seq_(std::move(seq)) {}

    bool next() override {
        std::lock_guard<std::mutex> lk(mu_);
        if (pos_ >= seq_.size()) throw std::runtime_error("injected coin sequence exhausted");
        return seq_[pos_++];
    }

    std::size_t consumed() const {
        std::lock_guard<std::mutex> lk(mu_);
        return pos_;
    }

private:
    mutable std::mutex mu_;
    std::vector<bool> seq_;
    std::size_t pos_ = 0;
};

}  // namespace cqs
