#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>

#include "cqs/atomics/reclaim.hpp"

namespace cqs::atomics {

// Software double-compare-double-swap over two word-sized cells, plus a
// wait-free read coherent with in-flight operations.
//
// The descriptor engine is the classic two-phase construction built from
// single-word CAS: an operation conditionally installs its descriptor into
// both cells (in address order, each install gated on the descriptor still
// being undecided), flips its status exactly once, then writes the outcome
// values back. Any thread that bumps into a descriptor helps it finish, so
// dcas is lock-free; read() resolves a descriptor's logical value from its
// status in a bounded number of loads, so it is wait-free.
//
// Word encoding contract: committed values must have their two low bits
// clear — those bits distinguish the two descriptor kinds. Callers pack
// pointers (8-byte aligned) or left-shifted integers.
//
// A mutex-based fallback with the identical interface is selectable per
// domain for debugging.

using Word = std::uint64_t;

enum class DcasMode { descriptor, locked };

class DcasCell {
public:
    explicit DcasCell(Word init = 0) : v_(init) {}
    DcasCell(const DcasCell&) = delete;
    DcasCell& operator=(const DcasCell&) = delete;
    DcasCell(DcasCell&& o) noexcept : v_(o.v_.load(std::memory_order_relaxed)) {}

private:
    friend class DcasDomain;
    std::atomic<Word> v_;
};

class DcasDomain {
public:
    DcasDomain(Reclaimer& reclaimer, DcasMode mode = DcasMode::descriptor)
        : reclaimer_(reclaimer), mode_(mode) {}

    DcasDomain(const DcasDomain&) = delete;
    DcasDomain& operator=(const DcasDomain&) = delete;

    // Atomically { if (a == ea && b == eb) { a = na; b = nb; return true; }
    //              return false; }
    // The caller must hold a Reclaimer::Guard and pass distinct cells.
    bool dcas(DcasCell& a, Word ea, Word na, DcasCell& b, Word eb, Word nb);

    // Returns a value that was logically present at some point during the
    // call: a committed word, or the expected/new side of an in-flight dcas
    // depending on its decision — never a descriptor. Caller holds a Guard.
    Word read(const DcasCell& c) const;

    // Single-cell CAS that cooperates with in-flight descriptors (helps them
    // finish instead of failing on their physical presence). Returns false
    // only if the cell's logical value differs from `expected`.
    // The caller must hold a Reclaimer::Guard.
    bool cas(DcasCell& c, Word expected, Word desired);

    DcasMode mode() const { return mode_; }

private:
    enum Status : std::uint32_t { kUndecided = 0, kSucceeded = 1, kFailed = 2 };

    struct Descriptor {
        std::atomic<Status> status{kUndecided};
        std::atomic<Word>* addr[2];
        Word exp[2];
        Word val[2];

        Word exp_for(const std::atomic<Word>* a) const { return exp[a == addr[1]]; }
        Word val_for(const std::atomic<Word>* a) const { return val[a == addr[1]]; }
    };

    // Install-attempt record: writes `mark_dcas(owner)` into *addr if the
    // cell holds `exp` and the owner is still undecided.
    struct Installer {
        Descriptor* owner;
        std::atomic<Word>* addr;
        Word exp;
    };

    static constexpr Word kInstallerTag = 0x1;
    static constexpr Word kDescriptorTag = 0x2;
    static constexpr Word kTagMask = 0x3;

    static bool is_installer(Word w) { return (w & kTagMask) == kInstallerTag; }
    static bool is_descriptor(Word w) { return (w & kTagMask) == kDescriptorTag; }
    static Word mark(const Installer* p) {
        return reinterpret_cast<Word>(p) | kInstallerTag;
    }
    static Word mark(const Descriptor* p) {
        return reinterpret_cast<Word>(p) | kDescriptorTag;
    }
    static Installer* as_installer(Word w) {
        return reinterpret_cast<Installer*>(w & ~kTagMask);
    }
    static Descriptor* as_descriptor(Word w) {
        return reinterpret_cast<Descriptor*>(w & ~kTagMask);
    }

    Word install(Descriptor* owner, std::atomic<Word>* addr, Word exp) const;
    static void finish_install(Installer* ins);
    bool help(Descriptor* d) const;

    bool dcas_locked(DcasCell& a, Word ea, Word na, DcasCell& b, Word eb, Word nb);

    Reclaimer& reclaimer_;
    DcasMode mode_;
    mutable std::mutex lock_;  // locked mode only
};

}  // namespace cqs::atomics
