#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cqs/core/types.hpp"

namespace cqs {

// Keeps either the even (coin=false) or odd (coin=true) 0-based positions of a
// sorted, even-length array. Output is sorted and half the length.
std::vector<value_type> sample_odd_or_even(std::span<const value_type> sorted, bool coin);

// Two-way merge of sorted inputs into their sorted multiset union.
std::vector<value_type> merge_sorted(std::span<const value_type> a, std::span<const value_type> b);

// Index-parallel variants used when instrumented ids ride along with values.
void sample_odd_or_even_ids(std::span<const std::uint64_t> ids, bool coin,
                            std::vector<std::uint64_t>& out);
void merge_sorted_ids(std::span<const value_type> a, std::span<const std::uint64_t> a_ids,
                      std::span<const value_type> b, std::span<const std::uint64_t> b_ids,
                      std::vector<std::uint64_t>& out_ids);

}  // namespace cqs
