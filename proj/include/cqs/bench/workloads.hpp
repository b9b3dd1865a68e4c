#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cqs/analysis/holes.hpp"
#include "cqs/sketch/config.hpp"

namespace cqs::bench {

enum class Mode { update_only, query_only, mixed };
enum class Dist { uniform, normal };

Mode mode_from_string(const std::string& s);
Dist dist_from_string(const std::string& s);

struct WorkloadSpec {
    Mode mode = Mode::update_only;
    std::uint32_t update_threads = 1;
    std::uint32_t query_threads = 0;
    std::uint32_t nodes = 1;
    std::uint64_t stream_size = 1'000'000;
    std::uint64_t prefill_size = 0;
    std::uint32_t k = 4096;
    std::uint32_t b = 16;
    double rho = 0.05;
    Dist dist = Dist::uniform;
    std::uint64_t seed = 1;
    std::uint32_t runs = 15;  // averaging window
    bool pin_threads = true;
    bool instrument = false;

    void validate() const;
    SketchConfig sketch_config() const;
};

// Deterministic per-thread substreams: thread t of T draws its contiguous
// block from an RNG keyed by (seed, t); the union is a fixed multiset.
std::vector<std::vector<value_type>> make_streams(const WorkloadSpec& spec,
                                                  std::uint64_t total,
                                                  std::uint32_t threads,
                                                  std::uint64_t salt = 0);

struct ThroughputRow {
    std::string run;  // "0".."r-1" or "avg"
    double elapsed_s = 0;
    double update_ops_s = 0;
    double query_ops_s = 0;
    std::uint64_t queries = 0;
    double miss_rate = 0;
    std::uint64_t holes = 0;
    std::uint64_t batches = 0;
};

// Executes `spec.runs` timed runs plus an aggregate row (the mean).
std::vector<ThroughputRow> run_throughput(const WorkloadSpec& spec);

struct AccuracyRow {
    double phi;
    value_type estimate;
    value_type exact;
    double rank_error;  // |R(estimate) - phi*n| / n
};

// Concurrent ingest, quiesce, then a phi grid against the brute-force
// oracle over the full generated stream.
std::vector<AccuracyRow> run_accuracy(const WorkloadSpec& spec,
                                      const std::vector<double>& phis);

struct StderrRow {
    double phi;
    double stderr_value;  // std of the normalized rank across runs
};

std::vector<StderrRow> run_stderr(const WorkloadSpec& spec, std::uint32_t runs,
                                  const std::vector<double>& phis);

struct HolesRow {
    std::uint32_t b;
    std::uint32_t regions;
    double simulated_mean;
    double simulated_ci95;
    double closed_form_bound;
    double instrumented_mean;  // holes per batch measured end to end; NaN if off
};

HolesRow run_holes(const WorkloadSpec& spec, std::uint64_t trials, bool end_to_end);

// 99-point grid 0.01..0.99.
std::vector<double> default_phi_grid();

}  // namespace cqs::bench
