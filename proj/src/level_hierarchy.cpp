#include "cqs/sketch/level_hierarchy.hpp"

#include <algorithm>

#include "cqs/atomics/backoff.hpp"
#include "cqs/core/sampling.hpp"

namespace cqs {

std::atomic<std::uint64_t>& poison_detections() {
    static std::atomic<std::uint64_t> n{0};
    return n;
}

namespace {
void delete_level_array(void* p) { delete static_cast<LevelArray*>(p); }
}  // namespace

LevelHierarchy::LevelHierarchy(const SketchConfig& cfg, atomics::Reclaimer& reclaimer,
                               atomics::DcasDomain& domain)
    : cfg_(cfg), reclaimer_(reclaimer), domain_(domain) {
    levels_.reserve(cfg_.max_level + 1);
    for (std::uint32_t i = 0; i <= cfg_.max_level; ++i) levels_.emplace_back(0);
}

LevelHierarchy::~LevelHierarchy() {
    // Quiescent teardown: unlink whatever is still installed.
    for (auto& cell : levels_) {
        atomics::Word raw = domain_.read(cell);
        if (LevelArray* p = level_ref::ptr(raw)) delete p;
    }
}

atomics::Word LevelHierarchy::insert_batch(std::unique_ptr<LevelArray> batch) {
    atomics::Backoff bo;
    for (;;) {
        auto g = reclaimer_.guard();
        tritmap::Word tw = trit_enc::decode(domain_.read(tritmap_cell_));
        if (tritmap::trit(tw, 0) != 0) {
            bo.pause();
            continue;
        }
        atomics::Word cur = domain_.read(levels_[0]);
        if (!level_ref::is_null(cur)) {  // prior owner's clear still pending
            bo.pause();
            continue;
        }
        atomics::Word next = level_ref::swing(cur, batch.get());
        if (domain_.dcas(levels_[0], cur, next, tritmap_cell_, trit_enc::encode(tw),
                         trit_enc::encode(tw + tritmap::delta_batch()))) {
            batch.release();  // the cell owns it now
            if (cfg_.hooks && cfg_.hooks->after_batch_dcas) cfg_.hooks->after_batch_dcas();
            return next;
        }
        bo.pause();
    }
}

void LevelHierarchy::propagate(std::uint32_t level, atomics::Word mine, CoinSource& coins) {
    const std::uint32_t k = cfg_.k;
    std::uint32_t l = level;
    const LevelArray* arr = level_ref::ptr(mine);  // owned by this propagation

    for (;;) {
        if (l >= cfg_.max_level)
            throw capacity_exceeded("level hierarchy full; raise max_level");
        if (!arr || arr->size() != 2ull * k)
            throw invariant_violation("propagate: owned level must hold 2k elements");

        const bool coin = coins.next();
        std::vector<value_type> sampled = sample_odd_or_even(arr->values, coin);
        std::vector<std::uint64_t> sampled_ids;
        if (!arr->ids.empty()) sample_odd_or_even_ids(arr->ids, coin, sampled_ids);

        atomics::Backoff bo;
        for (;;) {
            auto g = reclaimer_.guard();
            tritmap::Word tw = trit_enc::decode(domain_.read(tritmap_cell_));
            std::uint32_t next_state = tritmap::trit(tw, l + 1);

            if (next_state == 2) {  // next level occupied by another batch
                bo.pause();
                continue;
            }

            atomics::Word cur = domain_.read(levels_[l + 1]);
            const LevelArray* cur_p = level_ref::ptr(cur);

            if (next_state == 1) {
                if (!cur_p || cur_p->size() != k) {
                    bo.pause();  // stale view of the pair; re-read
                    continue;
                }
                check_alive(cur_p);
                auto merged = std::make_unique<LevelArray>();
                merged->level = l + 1;
                merged->values = merge_sorted(sampled, cur_p->values);
                if (!sampled_ids.empty() || !cur_p->ids.empty())
                    merge_sorted_ids(sampled, sampled_ids, cur_p->values, cur_p->ids,
                                     merged->ids);
                atomics::Word next = level_ref::swing(cur, merged.get());
                if (domain_.dcas(levels_[l + 1], cur, next, tritmap_cell_,
                                 trit_enc::encode(tw),
                                 trit_enc::encode(tw + tritmap::delta_promote_full(l)))) {
                    const LevelArray* published = merged.release();
                    if (cfg_.hooks && cfg_.hooks->after_promote_dcas)
                        cfg_.hooks->after_promote_dcas(l);
                    clear_level(l, mine);
                    reclaimer_.retire(const_cast<LevelArray*>(cur_p), delete_level_array,
                                      LevelArray::poison_hook);
                    if (cfg_.hooks && cfg_.hooks->after_clear) cfg_.hooks->after_clear(l);
                    mine = next;
                    arr = published;
                    ++l;
                    break;  // keep propagating the merged 2k array
                }
                // never published; fall through to retry
            } else {  // next_state == 0: next level empty
                if (!level_ref::is_null(cur)) {
                    bo.pause();  // its clear is still pending
                    continue;
                }
                auto fresh = std::make_unique<LevelArray>();
                fresh->level = l + 1;
                fresh->values = sampled;  // keep `sampled` for retries
                fresh->ids = sampled_ids;
                atomics::Word next = level_ref::swing(cur, fresh.get());
                if (domain_.dcas(levels_[l + 1], cur, next, tritmap_cell_,
                                 trit_enc::encode(tw),
                                 trit_enc::encode(tw + tritmap::delta_promote_empty(l)))) {
                    fresh.release();
                    if (cfg_.hooks && cfg_.hooks->after_promote_dcas)
                        cfg_.hooks->after_promote_dcas(l);
                    clear_level(l, mine);
                    if (cfg_.hooks && cfg_.hooks->after_clear) cfg_.hooks->after_clear(l);
                    return;  // reached an empty level; batch fully propagated
                }
            }
            bo.pause();
        }
    }
}

void LevelHierarchy::clear_level(std::uint32_t level, atomics::Word mine) {
    auto g = reclaimer_.guard();
    atomics::Word cleared = level_ref::swing(mine, nullptr);
    if (!domain_.cas(levels_[level], mine, cleared))
        throw invariant_violation("clear_level: cell no longer holds the owned array");
    reclaimer_.retire(level_ref::ptr(mine), delete_level_array, LevelArray::poison_hook);
}

tritmap::Word LevelHierarchy::tritmap_word() const {
    auto g = const_cast<atomics::Reclaimer&>(reclaimer_).guard();
    return trit_enc::decode(domain_.read(tritmap_cell_));
}

atomics::Word LevelHierarchy::level_raw(std::uint32_t i) const {
    auto g = const_cast<atomics::Reclaimer&>(reclaimer_).guard();
    return domain_.read(levels_[i]);
}

std::uint64_t LevelHierarchy::stream_size() const {
    return tritmap::stream_size(tritmap_word(), cfg_.k, cfg_.max_level);
}

std::vector<std::vector<value_type>> LevelHierarchy::level_contents() const {
    auto g = const_cast<atomics::Reclaimer&>(reclaimer_).guard();
    std::vector<std::vector<value_type>> out;
    tritmap::Word tw = trit_enc::decode(domain_.read(tritmap_cell_));
    for (std::uint32_t i = 0; i <= cfg_.max_level; ++i) {
        if (tritmap::trit(tw, i) == 0) {
            out.emplace_back();
            continue;
        }
        const LevelArray* p = level_ref::ptr(domain_.read(levels_[i]));
        check_alive(p);
        out.push_back(p ? p->values : std::vector<value_type>{});
    }
    while (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

std::string LevelHierarchy::tritmap_string() const {
    return tritmap::to_string(tritmap_word(), cfg_.max_level + 1);
}

bool LevelHierarchy::coherent_at_quiescence() const {
    auto g = const_cast<atomics::Reclaimer&>(reclaimer_).guard();
    tritmap::Word tw = trit_enc::decode(domain_.read(tritmap_cell_));
    for (std::uint32_t i = 0; i <= cfg_.max_level; ++i) {
        const LevelArray* p = level_ref::ptr(domain_.read(levels_[i]));
        switch (tritmap::trit(tw, i)) {
            case 0:
                if (p != nullptr) return false;  // clears are done at quiescence
                break;
            case 1:
                if (!p || p->size() != cfg_.k) return false;
                break;
            case 2:
                if (!p || p->size() != 2ull * cfg_.k) return false;
                break;
        }
    }
    return true;
}

}  // namespace cqs
