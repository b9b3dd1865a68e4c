#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cqs {

// Stream element. Any totally ordered numeric would do; the library is
// concrete over double (NaN is not a valid element).
using value_type = double;

// A summary point and the number of stream elements it stands for.
// An element living at level i carries weight 2^i.
struct WeightedSample {
    value_type value;
    std::uint64_t weight;
    std::uint32_t level;
};

// Thrown when a runtime check of a structural contract fails.
// The CLI maps this to exit code 2.
struct invariant_violation : std::logic_error {
    explicit invariant_violation(const std::string& what) : std::logic_error(what) {}
};

// Thrown when a sketch runs out of levels; callers are expected to size
// max_level so that n <= 2k * (2^(max_level+1) - 1).
struct capacity_exceeded : std::runtime_error {
    explicit capacity_exceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cqs
