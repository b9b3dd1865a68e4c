#include "cqs/bench/workloads.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include "cqs/core/exact.hpp"
#include "cqs/sketch/concurrent_sketch.hpp"

#if defined(__linux__)
#include <pthread.h>
#include <sched.h>
#endif

namespace cqs::bench {

namespace {

std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

void pin_to_core(std::uint32_t index) {
#if defined(__linux__)
    unsigned cores = std::thread::hardware_concurrency();
    if (cores == 0) return;
    cpu_set_t set;
    CPU_ZERO(&set);
    CPU_SET(index % cores, &set);
    pthread_setaffinity_np(pthread_self(), sizeof(set), &set);  // best effort
#else
    (void)index;
#endif
}

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Mode mode_from_string(const std::string& s) {
    if (s == "update-only") return Mode::update_only;
    if (s == "query-only") return Mode::query_only;
    if (s == "mixed") return Mode::mixed;
    throw std::invalid_argument("unknown mode: " + s);
}

Dist dist_from_string(const std::string& s) {
    if (s == "uniform") return Dist::uniform;
    if (s == "normal") return Dist::normal;
    throw std::invalid_argument("unknown distribution: " + s);
}

void WorkloadSpec::validate() const {
    sketch_config().validate();
    if (mode != Mode::update_only && query_threads == 0)
        throw std::invalid_argument("query workloads need query_threads > 0");
    if (mode == Mode::query_only && prefill_size == 0)
        throw std::invalid_argument("query-only workloads need prefill_size > 0");
    if (runs == 0) throw std::invalid_argument("runs must be >= 1");
}

SketchConfig WorkloadSpec::sketch_config() const {
    SketchConfig cfg;
    cfg.k = k;
    cfg.b = b;
    cfg.nodes = nodes;
    cfg.update_threads = update_threads;
    cfg.rho = rho;
    cfg.seed = seed;
    cfg.instrument = instrument;
    return cfg;
}

std::vector<std::vector<value_type>> make_streams(const WorkloadSpec& spec,
                                                  std::uint64_t total,
                                                  std::uint32_t threads,
                                                  std::uint64_t salt) {
    std::vector<std::vector<value_type>> out(threads);
    const std::uint64_t per = total / threads;
    const std::uint64_t extra = total % threads;
    for (std::uint32_t t = 0; t < threads; ++t) {
        std::uint64_t count = per + (t < extra ? 1 : 0);
        std::mt19937_64 rng(mix(spec.seed ^ salt) ^ mix(t + 0x1234));
        auto& v = out[t];
        v.reserve(count);
        if (spec.dist == Dist::uniform) {
            std::uniform_real_distribution<double> d(0.0, 1.0);
            for (std::uint64_t i = 0; i < count; ++i) v.push_back(d(rng));
        } else {
            std::normal_distribution<double> d(0.0, 1.0);
            for (std::uint64_t i = 0; i < count; ++i) v.push_back(d(rng));
        }
    }
    return out;
}

namespace {

// Feeds the per-thread streams through the sketch; returns wall seconds.
double ingest(ConcurrentSketch& sketch, const std::vector<std::vector<value_type>>& streams,
              bool pin) {
    const auto threads = static_cast<std::uint32_t>(streams.size());
    std::barrier sync(threads + 1);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::uint32_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            if (pin) pin_to_core(t);
            auto& up = sketch.updater(t);
            sync.arrive_and_wait();
            for (value_type x : streams[t]) up.put(x);
        });
    }
    sync.arrive_and_wait();
    auto t0 = std::chrono::steady_clock::now();
    for (auto& th : pool) th.join();
    return elapsed_seconds(t0);
}

struct QueryStats {
    std::uint64_t queries = 0;
    std::uint64_t misses = 0;
    double elapsed_s = 0;
};

// Runs query threads until `stop` flips (mixed) or each thread finishes
// `per_thread` queries (query-only).
QueryStats run_queries(ConcurrentSketch& sketch, std::uint32_t threads, double rho,
                       std::uint64_t per_thread, std::atomic<bool>* stop,
                       std::uint64_t seed, bool pin, std::uint32_t pin_base) {
    std::atomic<std::uint64_t> queries{0}, misses{0};
    std::barrier sync(threads + 1);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::uint32_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            if (pin) pin_to_core(pin_base + t);
            auto handle = sketch.query_handle(rho);
            std::mt19937_64 rng(mix(seed) ^ mix(t + 0xabcd));
            std::uniform_real_distribution<double> d(0.0, 1.0);
            sync.arrive_and_wait();
            std::uint64_t done = 0;
            while (stop ? !stop->load(std::memory_order_relaxed) : done < per_thread) {
                try {
                    (void)handle.query(d(rng));
                } catch (const std::runtime_error&) {
                    // nothing propagated yet; keep polling
                    std::this_thread::yield();
                    continue;
                }
                ++done;
                if (stop && per_thread && done >= per_thread) break;
            }
            queries.fetch_add(handle.queries(), std::memory_order_relaxed);
            misses.fetch_add(handle.misses(), std::memory_order_relaxed);
        });
    }
    sync.arrive_and_wait();
    auto t0 = std::chrono::steady_clock::now();
    for (auto& th : pool) th.join();
    QueryStats qs;
    qs.elapsed_s = elapsed_seconds(t0);
    qs.queries = queries.load();
    qs.misses = misses.load();
    return qs;
}

ThroughputRow run_once(const WorkloadSpec& spec, std::uint32_t run_index) {
    WorkloadSpec local = spec;
    local.seed = mix(spec.seed) + run_index;

    ThroughputRow row;
    row.run = std::to_string(run_index);

    ConcurrentSketch sketch(local.sketch_config());

    if (local.prefill_size > 0) {
        auto pre = make_streams(local, local.prefill_size, local.update_threads, 0x9999);
        ingest(sketch, pre, false);
    }

    switch (local.mode) {
        case Mode::update_only: {
            auto streams = make_streams(local, local.stream_size, local.update_threads);
            row.elapsed_s = ingest(sketch, streams, local.pin_threads);
            row.update_ops_s = static_cast<double>(local.stream_size) / row.elapsed_s;
            break;
        }
        case Mode::query_only: {
            const std::uint64_t per_thread = local.stream_size / local.query_threads;
            auto qs = run_queries(sketch, local.query_threads, local.rho, per_thread,
                                  nullptr, local.seed, local.pin_threads, 0);
            row.elapsed_s = qs.elapsed_s;
            row.queries = qs.queries;
            row.query_ops_s = static_cast<double>(qs.queries) / qs.elapsed_s;
            row.miss_rate = qs.queries ? static_cast<double>(qs.misses) /
                                             static_cast<double>(qs.queries)
                                       : 0.0;
            break;
        }
        case Mode::mixed: {
            auto streams = make_streams(local, local.stream_size, local.update_threads);
            std::atomic<bool> stop{false};
            std::atomic<std::uint64_t> queries{0}, misses{0};
            double query_elapsed = 0;
            std::thread query_master([&] {
                auto qs = run_queries(sketch, local.query_threads, local.rho, 0, &stop,
                                      local.seed, local.pin_threads, local.update_threads);
                queries = qs.queries;
                misses = qs.misses;
                query_elapsed = qs.elapsed_s;
            });
            row.elapsed_s = ingest(sketch, streams, local.pin_threads);
            stop.store(true);
            query_master.join();
            row.update_ops_s = static_cast<double>(local.stream_size) / row.elapsed_s;
            row.queries = queries.load();
            row.query_ops_s = static_cast<double>(queries.load()) / query_elapsed;
            row.miss_rate = queries.load() ? static_cast<double>(misses.load()) /
                                                 static_cast<double>(queries.load())
                                           : 0.0;
            break;
        }
    }

    auto audit = sketch.audit();
    if (!audit.conserved)
        throw invariant_violation("post-run audit: ingest count not conserved");
    row.holes = audit.holes;
    row.batches = audit.batches;
    return row;
}

}  // namespace

std::vector<ThroughputRow> run_throughput(const WorkloadSpec& spec) {
    spec.validate();
    unsigned hw = std::thread::hardware_concurrency();
    if (hw && spec.update_threads + spec.query_threads > hw)
        std::fprintf(stderr,
                     "warning: %u worker threads exceed %u hardware threads\n",
                     spec.update_threads + spec.query_threads, hw);
    std::vector<ThroughputRow> rows;
    rows.reserve(spec.runs + 1);
    for (std::uint32_t r = 0; r < spec.runs; ++r) rows.push_back(run_once(spec, r));

    ThroughputRow avg;
    avg.run = "avg";
    for (const auto& r : rows) {
        avg.elapsed_s += r.elapsed_s;
        avg.update_ops_s += r.update_ops_s;
        avg.query_ops_s += r.query_ops_s;
        avg.queries += r.queries;
        avg.miss_rate += r.miss_rate;
        avg.holes += r.holes;
        avg.batches += r.batches;
    }
    const auto n = static_cast<double>(spec.runs);
    avg.elapsed_s /= n;
    avg.update_ops_s /= n;
    avg.query_ops_s /= n;
    avg.miss_rate /= n;
    rows.push_back(avg);
    return rows;
}

std::vector<AccuracyRow> run_accuracy(const WorkloadSpec& spec,
                                      const std::vector<double>& phis) {
    WorkloadSpec local = spec;
    local.mode = Mode::update_only;
    local.sketch_config().validate();

    auto streams = make_streams(local, local.stream_size, local.update_threads);
    std::vector<value_type> whole;
    whole.reserve(local.stream_size);
    for (const auto& s : streams) whole.insert(whole.end(), s.begin(), s.end());
    ExactOracle oracle(whole);

    ConcurrentSketch sketch(local.sketch_config());
    ingest(sketch, streams, local.pin_threads);

    auto handle = sketch.query_handle(0.0);  // quiescent, always fresh
    const auto n = static_cast<double>(whole.size());
    std::vector<AccuracyRow> rows;
    rows.reserve(phis.size());
    for (double phi : phis) {
        AccuracyRow row;
        row.phi = phi;
        row.estimate = handle.query(phi);
        row.exact = oracle.quantile(phi);
        const double est_rank = static_cast<double>(oracle.rank(row.estimate));
        row.rank_error = std::abs(est_rank - std::floor(phi * n)) / n;
        rows.push_back(row);
    }
    return rows;
}

std::vector<StderrRow> run_stderr(const WorkloadSpec& spec, std::uint32_t runs,
                                  const std::vector<double>& phis) {
    if (runs < 2) throw std::invalid_argument("run_stderr: runs >= 2");
    std::vector<double> sum(phis.size(), 0.0), sumsq(phis.size(), 0.0);

    for (std::uint32_t r = 0; r < runs; ++r) {
        WorkloadSpec local = spec;
        local.seed = mix(spec.seed + 17 * r + 1);
        auto streams = make_streams(local, local.stream_size, local.update_threads);
        std::vector<value_type> whole;
        whole.reserve(local.stream_size);
        for (const auto& s : streams) whole.insert(whole.end(), s.begin(), s.end());
        ExactOracle oracle(whole);

        ConcurrentSketch sketch(local.sketch_config());
        ingest(sketch, streams, false);
        auto handle = sketch.query_handle(0.0);
        const auto n = static_cast<double>(whole.size());
        for (std::size_t i = 0; i < phis.size(); ++i) {
            const double nr =
                static_cast<double>(oracle.rank(handle.query(phis[i]))) / n;
            sum[i] += nr;
            sumsq[i] += nr * nr;
        }
    }

    std::vector<StderrRow> rows;
    rows.reserve(phis.size());
    for (std::size_t i = 0; i < phis.size(); ++i) {
        const double mean = sum[i] / runs;
        double var = sumsq[i] / runs - mean * mean;
        if (var < 0) var = 0;
        rows.push_back({phis[i], std::sqrt(var)});
    }
    return rows;
}

HolesRow run_holes(const WorkloadSpec& spec, std::uint64_t trials, bool end_to_end) {
    HolesRow row;
    row.b = spec.b;
    row.regions = static_cast<std::uint32_t>(2ull * spec.k / spec.b);
    auto sim = analysis::simulate_holes(spec.b, row.regions, trials, spec.seed);
    row.simulated_mean = sim.mean;
    row.simulated_ci95 = sim.ci95;
    row.closed_form_bound = analysis::eh_total_bound(spec.b, spec.k);
    row.instrumented_mean = std::numeric_limits<double>::quiet_NaN();

    if (end_to_end) {
        WorkloadSpec local = spec;
        local.instrument = true;
        ConcurrentSketch sketch(local.sketch_config());
        auto streams = make_streams(local, local.stream_size, local.update_threads);
        ingest(sketch, streams, local.pin_threads);
        auto audit = sketch.audit();
        row.instrumented_mean =
            audit.batches ? static_cast<double>(audit.holes) /
                                static_cast<double>(audit.batches)
                          : 0.0;
    }
    return row;
}

std::vector<double> default_phi_grid() {
    std::vector<double> phis;
    phis.reserve(99);
    for (int i = 1; i <= 99; ++i) phis.push_back(i / 100.0);
    return phis;
}

}  // namespace cqs::bench
