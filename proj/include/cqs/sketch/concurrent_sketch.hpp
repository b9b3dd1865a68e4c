#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "cqs/atomics/dcas.hpp"
#include "cqs/atomics/reclaim.hpp"
#include "cqs/core/coin_source.hpp"
#include "cqs/sketch/config.hpp"
#include "cqs/sketch/gather_sort.hpp"
#include "cqs/sketch/level_hierarchy.hpp"
#include "cqs/sketch/snapshot.hpp"

namespace cqs {

// The concurrent quantiles sketch. N registered update threads ingest
// through thread-local buffers and node-local gather/sort units; the thread
// whose reservation fills a shared buffer owns that 2k batch and drives it
// through the level hierarchy. Any number of query threads read via
// QueryHandle concurrently with updates.
//
// A query reflects all but at most relaxation_bound() of the updates that
// returned before it (elements still sitting in local buffers or partially
// filled shared buffers).
class ConcurrentSketch {
public:
    explicit ConcurrentSketch(SketchConfig cfg);

    ConcurrentSketch(const ConcurrentSketch&) = delete;
    ConcurrentSketch& operator=(const ConcurrentSketch&) = delete;

    // One per registered update thread; handles are single-owner.
    class Updater {
    public:
        void put(value_type x);

        std::uint64_t puts() const { return puts_; }
        std::uint64_t batches_owned() const { return batches_owned_; }
        std::uint64_t holes_observed() const { return holes_; }
        std::uint64_t buffered_locally() const { return local_.size(); }

    private:
        friend class ConcurrentSketch;
        Updater(ConcurrentSketch& owner, std::uint32_t thread_index);

        void flush_local();
        void own_window(std::uint32_t buf, std::uint64_t window);

        ConcurrentSketch& owner_;
        std::uint32_t node_;
        std::vector<value_type> local_;
        std::shared_ptr<CoinSource> coins_;
        std::uint64_t puts_ = 0;
        std::uint64_t batches_owned_ = 0;
        std::uint64_t holes_ = 0;
    };

    Updater& updater(std::uint32_t thread_index) { return *updaters_[thread_index]; }

    // Per query thread; rho defaults to the configured freshness.
    QueryHandle query_handle() const { return QueryHandle(hierarchy_, cfg_.rho); }
    QueryHandle query_handle(double rho) const { return QueryHandle(hierarchy_, rho); }

    const SketchConfig& config() const { return cfg_; }
    LevelHierarchy& hierarchy() { return hierarchy_; }
    const LevelHierarchy& hierarchy() const { return hierarchy_; }

    // Elements accounted by the level hierarchy (propagated batches).
    std::uint64_t propagated_size() const { return hierarchy_.stream_size(); }

    // r = 4kS + (N - S) b.
    std::uint64_t relaxation_bound() const {
        return 4ull * cfg_.k * cfg_.nodes +
               static_cast<std::uint64_t>(cfg_.update_threads - cfg_.nodes) * cfg_.b;
    }

    struct Audit {
        std::uint64_t updates_returned;
        std::uint64_t propagated;
        std::uint64_t buffered_local;
        std::uint64_t buffered_shared;
        std::uint64_t holes;
        std::uint64_t batches;
        bool conserved;  // propagated + buffered == updates_returned
    };

    // Quiescent-only (no in-flight updates).
    Audit audit() const;

    // Quiescent-only: forces pending retirements through their grace period.
    void drain_reclaimer() { reclaimer_.drain(); }

private:
    SketchConfig cfg_;
    atomics::Reclaimer reclaimer_;
    atomics::DcasDomain domain_;
    LevelHierarchy hierarchy_;
    std::vector<std::unique_ptr<GatherSortUnit>> units_;
    std::vector<std::unique_ptr<Updater>> updaters_;
    std::shared_ptr<InjectedCoins> shared_coins_;  // injected mode only
    std::atomic<std::uint64_t> id_counter_{0};     // instrumented batch ids
};

}  // namespace cqs
