#pragma once

#include <atomic>
#include <cstdint>

namespace cqs::atomics {

// Sequentially consistent single-word cells. Everything cross-thread in the
// sketch flows through these (or through DcasCell below), so all threads
// observe one total modification order.

class AtomicCounter {
public:
    explicit AtomicCounter(std::uint64_t init = 0) : v_(init) {}

    std::uint64_t load() const { return v_.load(std::memory_order_seq_cst); }
    void store(std::uint64_t x) { v_.store(x, std::memory_order_seq_cst); }

    // Returns the prior value.
    std::uint64_t faa(std::uint64_t delta) {
        return v_.fetch_add(delta, std::memory_order_seq_cst);
    }

    bool cas(std::uint64_t expected, std::uint64_t desired) {
        return v_.compare_exchange_strong(expected, desired, std::memory_order_seq_cst);
    }

private:
    std::atomic<std::uint64_t> v_;
};

}  // namespace cqs::atomics
