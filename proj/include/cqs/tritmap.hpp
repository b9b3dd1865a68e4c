#pragma once

#include <cstdint>
#include <string>

#include "cqs/core/types.hpp"

namespace cqs {

// Base-3 packed per-level state. Trit i of the word describes level i:
// 0 = empty (or content excluded from the samples view), 1 = holds k
// elements, 2 = holds 2k elements (a batch in propagation). All legal
// transitions are strictly positive word deltas, so the word is a
// monotonically increasing integer — the property the snapshot validation
// leans on. With up to 32 trits the word stays below 3^32 < 2^62.
namespace tritmap {

using Word = std::uint64_t;

inline constexpr std::uint32_t kMaxLevelLimit = 31;  // trits 0..31

constexpr Word pow3(std::uint32_t i) {
    Word p = 1;
    for (std::uint32_t j = 0; j < i; ++j) p *= 3;
    return p;
}

inline std::uint32_t trit(Word w, std::uint32_t i) {
    if (i > kMaxLevelLimit) throw std::invalid_argument("tritmap: level index out of range");
    return static_cast<std::uint32_t>((w / pow3(i)) % 3);
}

// levels[0]: bottom trit 0 -> 2 (a 2k batch lands at level 0).
constexpr Word delta_batch() { return 2; }

// trits [l, l+1]: [2,1] -> [0,2]  (merge into a full next level).
constexpr Word delta_promote_full(std::uint32_t l) { return pow3(l); }

// trits [l, l+1]: [2,0] -> [0,1]  (k sampled elements into an empty level).
constexpr Word delta_promote_empty(std::uint32_t l) { return pow3(l); }

// Number of stream elements the map accounts for:
// sum over i of [t_i=1]*k*2^i + [t_i=2]*2k*2^i.
std::uint64_t stream_size(Word w, std::uint32_t k, std::uint32_t max_level = kMaxLevelLimit);

// Most-significant trit first, e.g. "00202"; at least min_digits trits.
std::string to_string(Word w, std::uint32_t min_digits = 1);

// Builds a word from trits listed least-significant (level 0) first.
Word from_trits(std::initializer_list<std::uint32_t> trits);

}  // namespace tritmap
}  // namespace cqs
