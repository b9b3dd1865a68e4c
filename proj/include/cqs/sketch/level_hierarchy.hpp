#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cqs/atomics/dcas.hpp"
#include "cqs/atomics/reclaim.hpp"
#include "cqs/core/coin_source.hpp"
#include "cqs/sketch/config.hpp"
#include "cqs/sketch/level_array.hpp"

namespace cqs {

// The shared sketch state: one dcas cell per level holding a packed
// LevelArray reference, plus the tritmap cell. Every transition couples a
// level swing with the matching tritmap delta in a single dcas, so the
// tritmap always represents the sketch (trit 1 <=> k elements, 2 <=> 2k).
// Levels are cleared lazily after their content moved up; a trit-0 cell may
// briefly keep its stale array, which the snapshot construction excludes by
// size accounting.
class LevelHierarchy {
public:
    LevelHierarchy(const SketchConfig& cfg, atomics::Reclaimer& reclaimer,
                   atomics::DcasDomain& domain);
    ~LevelHierarchy();

    LevelHierarchy(const LevelHierarchy&) = delete;
    LevelHierarchy& operator=(const LevelHierarchy&) = delete;

    // Stage 2. Spins until level 0 is free (bottom trit 0 and cell cleared),
    // then installs the 2k batch and flips the trit to 2. Returns the packed
    // word now in levels[0]; the caller owns the batch's propagation.
    atomics::Word insert_batch(std::unique_ptr<LevelArray> batch);

    // Stage 3. Drives the 2k array owned at `level` (installed word `mine`)
    // upward until its survivors land in an empty level. One coin per
    // sampling event, drawn in propagation order.
    void propagate(std::uint32_t level, atomics::Word mine, CoinSource& coins);

    // Guarded reads (usable concurrently with anything).
    tritmap::Word tritmap_word() const;
    atomics::Word level_raw(std::uint32_t i) const;
    std::uint64_t stream_size() const;

    const LevelArray* ptr_of(atomics::Word raw) const { return level_ref::ptr(raw); }

    std::uint32_t k() const { return cfg_.k; }
    std::uint32_t max_level() const { return cfg_.max_level; }
    atomics::DcasDomain& domain() { return domain_; }
    atomics::Reclaimer& reclaimer() { return reclaimer_; }

    // Debug dump for golden tests: per-level value copies (index 0..top with
    // content), taken with guarded reads.
    std::vector<std::vector<value_type>> level_contents() const;
    std::string tritmap_string() const;

    // Quiescent-only structural check: every trit matches its cell.
    bool coherent_at_quiescence() const;

private:
    void clear_level(std::uint32_t level, atomics::Word mine);

    SketchConfig cfg_;
    atomics::Reclaimer& reclaimer_;
    atomics::DcasDomain& domain_;
    std::vector<atomics::DcasCell> levels_;
    atomics::DcasCell tritmap_cell_;
};

}  // namespace cqs
