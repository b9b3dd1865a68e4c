#pragma once

#include <cstdint>

namespace cqs::analysis {

// Buffering/staleness error model for the concurrent sketch.
struct RelaxationModel {
    std::uint32_t k = 4096;       // summary size
    std::uint32_t nodes = 1;      // S
    std::uint32_t threads = 8;    // N update threads
    std::uint32_t b = 16;         // local buffer size
    double epsilon_c = 0.01;      // sequential sketch PAC epsilon
    double delta_c = 0.01;        // sequential sketch PAC delta
    double epsilon_prime = 0.0;   // staleness fraction (the configured rho)
    std::uint64_t n = 0;          // stream size
};

// r = 4kS + (N - S) b. Throws if N < S.
std::uint64_t relaxation(const RelaxationModel& m);

// eps_r = eps_c + (r/n)(1 - eps_c); a query answers within eps_r * n ranks.
// The relaxation denominator is the stream size n.
double epsilon_relaxed(const RelaxationModel& m);

// The same formula over an explicit relaxation count.
double epsilon_relaxed_for(double epsilon_c, std::uint64_t r, std::uint64_t n);

// eps = eps_r + eps'; adds the staleness allowance of serving queries from
// a cached snapshot no older than a (1 + eps') factor of the stream.
double epsilon_total(const RelaxationModel& m);

}  // namespace cqs::analysis
