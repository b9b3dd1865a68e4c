#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cqs/core/coin_source.hpp"
#include "cqs/core/types.hpp"

namespace cqs {

// Single-threaded hierarchy-of-arrays sketch: a base buffer of up to 2k
// elements plus levels 1,2,... each holding 0 or k sorted elements, an
// element at level i standing for 2^i stream elements. Doubles as the
// derandomized oracle for the concurrent sketch.
class SequentialSketch {
public:
    SequentialSketch(std::uint32_t k, std::unique_ptr<CoinSource> coins,
                     std::uint32_t max_level = 31);

    void update(value_type x);
    value_type query(double phi) const;  // throws on empty sketch

    std::uint64_t size() const { return n_; }
    std::uint32_t k() const { return k_; }

    const std::vector<value_type>& base() const { return base_; }
    // level(i) for i >= 1; empty vector when the level is empty.
    const std::vector<value_type>& level(std::uint32_t i) const;
    std::uint32_t top_level() const { return static_cast<std::uint32_t>(levels_.size()) - 1; }

    // Sum over all held samples of their weights; equals size() always.
    std::uint64_t represented_weight() const;

private:
    void compact_base();

    std::uint32_t k_;
    std::uint32_t max_level_;
    std::unique_ptr<CoinSource> coins_;
    std::vector<value_type> base_;                   // unsorted, <= 2k
    std::vector<std::vector<value_type>> levels_;    // [0] unused; [i>=1] sorted, 0 or k
    std::uint64_t n_ = 0;
};

}  // namespace cqs
