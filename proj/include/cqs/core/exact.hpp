#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cqs/core/types.hpp"

namespace cqs {

// Brute-force ground truth used by tests and the bench CLI.

// Number of elements strictly smaller than x.
std::uint64_t exact_rank(std::span<const value_type> stream, value_type x);

// The element bracketing floor(phi * n) under the exclusive-prefix-weight
// convention (phi = 0 yields the minimum). Throws on an empty stream.
value_type exact_quantile(std::span<const value_type> stream, double phi);

// Sorted-copy oracle for repeated rank/quantile probes over one stream.
class ExactOracle {
public:
    explicit ExactOracle(std::span<const value_type> stream);

    std::uint64_t rank(value_type x) const;
    value_type quantile(double phi) const;
    std::uint64_t size() const { return sorted_.size(); }

private:
    std::vector<value_type> sorted_;
};

}  // namespace cqs
