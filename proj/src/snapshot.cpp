#include "cqs/sketch/snapshot.hpp"

#include <stdexcept>

namespace cqs {

namespace {

std::vector<WeightedSample> to_samples(const std::vector<Snapshot::Entry>& entries) {
    std::vector<WeightedSample> s;
    std::size_t total = 0;
    for (const auto& e : entries) total += e.values.size();
    s.reserve(total);
    for (const auto& e : entries) {
        const std::uint64_t w = 1ull << e.level;
        for (value_type v : e.values) s.push_back({v, w, e.level});
    }
    return s;
}

}  // namespace

Snapshot::Snapshot(std::vector<Entry> entries, std::uint64_t represented,
                   tritmap::Word my_trit)
    : entries_(std::move(entries)),
      represented_(represented),
      my_trit_(my_trit),
      estimator_(to_samples(entries_)) {}

std::shared_ptr<const Snapshot> collect_snapshot(const LevelHierarchy& h,
                                                 std::uint64_t* retries_out) {
    const std::uint32_t k = h.k();
    const std::uint32_t max_level = h.max_level();
    auto& reclaimer = const_cast<LevelHierarchy&>(h).reclaimer();
    auto& domain = const_cast<LevelHierarchy&>(h).domain();
    std::uint64_t retries = 0;

    for (;;) {
        // One guard spans the validated read set and the deep copy, so every
        // collected array outlives its use here even if retired meanwhile.
        auto g = reclaimer.guard();

        tritmap::Word tm1 = h.tritmap_word();
        std::vector<atomics::Word> raws(max_level + 1);
        for (std::uint32_t i = 0; i <= max_level; ++i) raws[i] = h.level_raw(i);  // ascending
        tritmap::Word tm2 = h.tritmap_word();

        const std::uint64_t target = tritmap::stream_size(tm1, k, max_level);
        if (target != tritmap::stream_size(tm2, k, max_level)) {
            ++retries;
            continue;
        }

        // Reconstruct top-down; levels propagate upward, so anything already
        // represented higher up no longer fits in the remainder.
        std::vector<Snapshot::Entry> entries;
        tritmap::Word my_trit = 0;
        std::uint64_t acc = 0;
        for (std::uint32_t ii = max_level + 1; ii-- > 0 && acc < target;) {
            const LevelArray* p = level_ref::ptr(raws[ii]);
            if (!p) continue;
            check_alive(p);
            const std::uint64_t weight = 1ull << ii;
            const std::uint64_t represents = p->size() * weight;
            if (represents == 0 || acc + represents > target) continue;
            entries.push_back({ii, p->values, p->ids});
            acc += represents;
            my_trit += tritmap::pow3(ii) * (p->size() / k);
        }

        if (acc != target)
            throw invariant_violation("snapshot: collected size differs from tritmap size");
        if (retries_out) *retries_out = retries;
        return std::make_shared<Snapshot>(std::move(entries), target, my_trit);
    }
}

value_type QueryHandle::query(double phi) {
    ++queries_;
    const std::uint64_t current = h_->stream_size();
    if (current == 0) throw std::runtime_error("no data");
    if (cache_) {
        const double limit = (1.0 + rho_) * static_cast<double>(cache_->represented_size());
        if (static_cast<double>(current) <= limit) return cache_->estimate(phi);
    }
    std::uint64_t retries = 0;
    cache_ = collect_snapshot(*h_, &retries);
    collect_retries_ += retries;
    ++misses_;
    return cache_->estimate(phi);
}

}  // namespace cqs
