#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#include "cqs/atomics/dcas.hpp"
#include "cqs/core/types.hpp"

namespace cqs {

// Immutable sorted array installed into a level cell. Never mutated after
// publication; replaced by swinging the cell's packed reference and retired
// through the grace-period contract. `ids` parallels `values` only in
// instrumented runs (one unique id per batch instance).
struct LevelArray {
    static constexpr std::uint32_t kAliveMagic = 0x51A17EEDu;
    static constexpr std::uint32_t kPoisonMagic = 0xDEADBEEFu;

    std::uint32_t magic = kAliveMagic;
    std::uint32_t level = 0;
    std::vector<value_type> values;
    std::vector<std::uint64_t> ids;

    std::size_t size() const { return values.size(); }
    bool alive() const { return magic == kAliveMagic; }

    static void poison_hook(void* p) {
        static_cast<LevelArray*>(p)->magic = kPoisonMagic;
    }
};

// Counts reads that hit a poisoned array; any nonzero value is a
// reclamation bug surfaced by the poison-mode stress tests.
std::atomic<std::uint64_t>& poison_detections();

// Checks liveness on the instrumented read paths.
inline void check_alive(const LevelArray* a) {
    if (a && !a->alive()) poison_detections().fetch_add(1, std::memory_order_relaxed);
}

// Level cells pack (version << 48 | pointer) into one dcas word. The version
// bumps on every swing, so an expected value can never match a recycled
// address (ABA). Pointers must be 4-byte aligned (heap allocations are) and
// canonical user-space addresses; both are asserted at pack time.
namespace level_ref {

using Word = atomics::Word;

inline constexpr Word kPtrMask = 0x0000FFFFFFFFFFFFull;
inline constexpr int kVersionShift = 48;

inline Word pack(const LevelArray* p, std::uint16_t version) {
    auto raw = reinterpret_cast<Word>(p);
    if ((raw & ~kPtrMask) != 0 || (raw & 0x3) != 0)
        throw invariant_violation("level_ref: pointer not packable");
    return (static_cast<Word>(version) << kVersionShift) | raw;
}

inline LevelArray* ptr(Word w) {
    return reinterpret_cast<LevelArray*>(w & kPtrMask);
}

inline std::uint16_t version(Word w) {
    return static_cast<std::uint16_t>(w >> kVersionShift);
}

inline bool is_null(Word w) { return (w & kPtrMask) == 0; }

// The replacement word for the same cell: next version, new pointer.
inline Word swing(Word current, const LevelArray* next) {
    return pack(next, static_cast<std::uint16_t>(version(current) + 1));
}

}  // namespace level_ref

// The tritmap word is stored shifted left by two so committed cell values
// keep the dcas tag bits clear.
namespace trit_enc {

inline atomics::Word encode(tritmap::Word w) { return w << 2; }
inline tritmap::Word decode(atomics::Word cell) { return cell >> 2; }

}  // namespace trit_enc

}  // namespace cqs
