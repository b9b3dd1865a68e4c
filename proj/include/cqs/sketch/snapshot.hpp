#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cqs/core/estimator.hpp"
#include "cqs/sketch/level_hierarchy.hpp"

namespace cqs {

// A consistent view of the level hierarchy: deep-copied level contents
// validated by two tritmap reads of equal stream size, reconstructed from
// the top down so every element is counted exactly once. Immutable; safe to
// cache across queries and share between threads.
class Snapshot {
public:
    struct Entry {
        std::uint32_t level;
        std::vector<value_type> values;
        std::vector<std::uint64_t> ids;
    };

    Snapshot(std::vector<Entry> entries, std::uint64_t represented, tritmap::Word my_trit);

    value_type estimate(double phi) const { return estimator_.quantile(phi); }

    std::uint64_t represented_size() const { return represented_; }
    tritmap::Word my_trit() const { return my_trit_; }
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
    std::uint64_t represented_;
    tritmap::Word my_trit_;
    WeightedEstimator estimator_;
};

// Double-collect: read tritmap, read levels 0..MAX ascending, read tritmap
// again; retry until both reads account for the same stream size. Then walk
// the collected levels descending, keeping a level only while it still fits
// in the unaccounted remainder. The result always sums exactly to the
// validated size (anything else throws invariant_violation).
std::shared_ptr<const Snapshot> collect_snapshot(const LevelHierarchy& h,
                                                 std::uint64_t* retries_out = nullptr);

// Per-query-thread handle: caches the latest snapshot and serves from it
// while the stream has not outgrown it by more than a (1 + rho) factor.
class QueryHandle {
public:
    QueryHandle(const LevelHierarchy& h, double rho) : h_(&h), rho_(rho) {}

    value_type query(double phi);

    std::uint64_t queries() const { return queries_; }
    std::uint64_t misses() const { return misses_; }
    std::uint64_t collect_retries() const { return collect_retries_; }
    std::shared_ptr<const Snapshot> cached() const { return cache_; }

private:
    const LevelHierarchy* h_;
    double rho_;
    std::shared_ptr<const Snapshot> cache_;
    std::uint64_t queries_ = 0;
    std::uint64_t misses_ = 0;
    std::uint64_t collect_retries_ = 0;
};

}  // namespace cqs
