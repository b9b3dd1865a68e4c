#pragma once

#include <cstdint>

namespace cqs::analysis {

// Closed-form bounds on holes per 2k batch under the uniform stochastic
// scheduler model: the shared buffer splits into 2k/b regions, region j
// written by thread T_j, raced against the owner T_O reading the buffer.
// Worst case has T_j unstarted when T_O finishes reserving; ignoring other
// threads, each of the pair moves next with probability 1/2.
//
// All binomials and dyadic powers are evaluated as exact rationals and only
// converted to double at the end.

// Probability that the owner first reads a hole at slot i+1 of region j:
// (1/2)^(jb+2i+1) * C(jb+2i, i).  Requires 0 <= i <= b-1, j >= 1.
double pi_bound(std::uint32_t i, std::uint32_t j, std::uint32_t b);

// P[at least one hole in region j] <= sum over i of pi_bound.
double p_bound(std::uint32_t j, std::uint32_t b);

// E[holes in region j] <= b^2 * C((j+2)b - 2, b-1) * (1/2)^((j+2)b - 1).
double eh_region_bound(std::uint32_t j, std::uint32_t b);

// E[total holes per batch] <= sum over the 2k/b regions; <= 2.8 always.
double eh_total_bound(std::uint32_t b, std::uint32_t k);

struct HoleSimResult {
    double mean;           // holes per batch
    double ci95;           // 95% confidence half-width
    std::uint64_t trials;
};

// Monte-Carlo realization of the same worst-case model: per trial and
// region, a fair-coin race between the owner (b writes, (j-1)b prior reads,
// then the region's b reads) and the region's writer (b writes). A hole
// lands at slot s when the owner's read of s precedes the writer's write.
HoleSimResult simulate_holes(std::uint32_t b, std::uint32_t regions, std::uint64_t trials,
                             std::uint64_t seed);

}  // namespace cqs::analysis
