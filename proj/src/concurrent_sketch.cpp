#include "cqs/sketch/concurrent_sketch.hpp"

#include <algorithm>

#include "cqs/atomics/backoff.hpp"

namespace cqs {

namespace {
// splitmix64: decorrelates per-thread coin streams from one seed
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

SketchConfig validated(SketchConfig cfg) {
    cfg.validate();
    return cfg;
}
}  // namespace

ConcurrentSketch::ConcurrentSketch(SketchConfig cfg)
    : cfg_(validated(std::move(cfg))),
      reclaimer_(atomics::Reclaimer::Config{cfg_.poison_reclaim, 256}),
      domain_(reclaimer_, cfg_.dcas_mode),
      hierarchy_(cfg_, reclaimer_, domain_) {
    if (cfg_.coin_mode == CoinMode::injected)
        shared_coins_ = std::make_shared<InjectedCoins>(cfg_.injected_coins);
    units_.reserve(cfg_.nodes);
    for (std::uint32_t s = 0; s < cfg_.nodes; ++s)
        units_.push_back(
            std::make_unique<GatherSortUnit>(cfg_.k, cfg_.instrument, cfg_.slot_default));
    updaters_.reserve(cfg_.update_threads);
    for (std::uint32_t t = 0; t < cfg_.update_threads; ++t)
        updaters_.emplace_back(new Updater(*this, t));
}

ConcurrentSketch::Updater::Updater(ConcurrentSketch& owner, std::uint32_t thread_index)
    : owner_(owner), node_(owner.cfg_.node_of(thread_index)) {
    local_.reserve(owner.cfg_.b);
    if (owner.cfg_.coin_mode == CoinMode::injected)
        coins_ = owner.shared_coins_;
    else
        coins_ = std::make_shared<SeededCoins>(mix(owner.cfg_.seed) ^ mix(thread_index + 1));
}

void ConcurrentSketch::Updater::put(value_type x) {
    local_.push_back(x);  // linearization point of the update
    ++puts_;
    if (local_.size() >= owner_.cfg_.b) flush_local();
}

void ConcurrentSketch::Updater::flush_local() {
    const std::uint32_t b = owner_.cfg_.b;
    const std::uint64_t two_k = 2ull * owner_.cfg_.k;
    GatherSortUnit& unit = *owner_.units_[node_];
    std::sort(local_.begin(), local_.end());

    std::uint32_t buf = 0;
    atomics::Backoff bo;
    for (;;) {
        auto res = unit.reserve(buf, b);
        if (res.offset < two_k) {
            const auto& hooks = owner_.cfg_.hooks;
            if (hooks && hooks->after_reserve) hooks->after_reserve(node_, buf, res.offset);
            unit.write_slots(buf, res.offset, res.window, local_.data(), b);
            if (res.offset + b == two_k) own_window(buf, res.window);
            local_.clear();
            return;
        }
        buf ^= 1;  // other buffer; spins while both are full and unreset
        bo.pause();
    }
}

void ConcurrentSketch::Updater::own_window(std::uint32_t buf, std::uint64_t window) {
    GatherSortUnit& unit = *owner_.units_[node_];
    std::uint64_t holes = 0;
    std::vector<value_type> values = unit.collect(buf, window, &holes);
    holes_ += holes;
    std::sort(values.begin(), values.end());

    auto batch = std::make_unique<LevelArray>();
    batch->level = 0;
    batch->values = std::move(values);
    if (owner_.cfg_.instrument) {
        const std::uint64_t base =
            owner_.id_counter_.fetch_add(batch->values.size(), std::memory_order_relaxed);
        batch->ids.resize(batch->values.size());
        for (std::size_t i = 0; i < batch->ids.size(); ++i) batch->ids[i] = base + i;
    }

    atomics::Word mine = owner_.hierarchy_.insert_batch(std::move(batch));
    unit.reset(buf, window);  // release threads spinning on this buffer
    ++batches_owned_;
    owner_.hierarchy_.propagate(0, mine, *coins_);
}

ConcurrentSketch::Audit ConcurrentSketch::audit() const {
    Audit a{};
    for (const auto& u : updaters_) {
        a.updates_returned += u->puts();
        a.buffered_local += u->buffered_locally();
        a.holes += u->holes_observed();
        a.batches += u->batches_owned();
    }
    for (const auto& unit : units_) a.buffered_shared += unit->buffered_now();
    a.propagated = propagated_size();
    a.conserved = a.propagated + a.buffered_local + a.buffered_shared == a.updates_returned;
    return a;
}

}  // namespace cqs
