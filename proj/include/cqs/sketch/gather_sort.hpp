#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "cqs/atomics/cell.hpp"
#include "cqs/sketch/config.hpp"

namespace cqs {

// Stage 1 of ingestion: a node-local pair of 2k-slot shared buffers filled
// by F&A slot reservation. Threads copy their sorted b-element local buffers
// into reserved slots with plain per-slot atomic stores — deliberately not
// as one atomic block; the owner of a window (the thread whose reservation
// ends exactly at 2k) may therefore copy stale slots. Those are the holes
// the analysis module prices.
//
// Each index cell packs (window_seq << 48 | offset). A reservation learns
// its window atomically with its offset; resetting the index advances the
// window with offset zero. Offsets overshoot 2k while a full buffer waits
// for its owner — harmless, the window reset rewinds them.
class GatherSortUnit {
public:
    static constexpr int kOffsetBits = 48;
    static constexpr std::uint64_t kOffsetMask = (1ull << kOffsetBits) - 1;

    GatherSortUnit(std::uint32_t k, bool instrument, value_type slot_default)
        : capacity_(2ull * k), instrument_(instrument) {
        for (auto& b : bufs_) {
            b.slots = std::make_unique<std::atomic<value_type>[]>(capacity_);
            for (std::uint64_t i = 0; i < capacity_; ++i)
                b.slots[i].store(slot_default, std::memory_order_relaxed);
            if (instrument_) {
                b.tags = std::make_unique<std::atomic<std::uint64_t>[]>(capacity_);
                for (std::uint64_t i = 0; i < capacity_; ++i)
                    b.tags[i].store(~0ull, std::memory_order_relaxed);
            }
        }
    }

    struct Reservation {
        std::uint64_t offset;
        std::uint64_t window;
    };

    Reservation reserve(std::uint32_t buf, std::uint32_t b) {
        std::uint64_t word = bufs_[buf].index.faa(b);
        return {word & kOffsetMask, word >> kOffsetBits};
    }

    void write_slots(std::uint32_t buf, std::uint64_t offset, std::uint64_t window,
                     const value_type* src, std::uint32_t n) {
        Buffer& bb = bufs_[buf];
        for (std::uint32_t i = 0; i < n; ++i) {
            bb.slots[offset + i].store(src[i], std::memory_order_relaxed);
            if (instrument_) bb.tags[offset + i].store(window, std::memory_order_release);
        }
    }

    // The owner's pass: reads every slot once, in ascending order. In
    // instrumented runs a slot whose tag lags the window is a hole (the
    // writer had not landed yet); the stale value is taken regardless.
    std::vector<value_type> collect(std::uint32_t buf, std::uint64_t window,
                                    std::uint64_t* holes_out) const {
        const Buffer& bb = bufs_[buf];
        std::vector<value_type> out(capacity_);
        std::uint64_t holes = 0;
        for (std::uint64_t i = 0; i < capacity_; ++i) {
            if (instrument_ && bb.tags[i].load(std::memory_order_acquire) != window) ++holes;
            out[i] = bb.slots[i].load(std::memory_order_relaxed);
        }
        if (holes_out) *holes_out = instrument_ ? holes : 0;
        return out;
    }

    // Owner-only, after its batch landed: opens the next window.
    void reset(std::uint32_t buf, std::uint64_t window) {
        bufs_[buf].index.store((window + 1) << kOffsetBits);
    }

    std::uint64_t capacity() const { return capacity_; }

    // Elements sitting in partial windows; meaningful at quiescence.
    std::uint64_t buffered_now() const {
        std::uint64_t total = 0;
        for (const auto& b : bufs_) {
            std::uint64_t off = b.index.load() & kOffsetMask;
            total += off < capacity_ ? off : capacity_;
        }
        return total;
    }

    std::uint64_t window_of(std::uint32_t buf) const {
        return bufs_[buf].index.load() >> kOffsetBits;
    }

private:
    struct alignas(64) Buffer {
        std::unique_ptr<std::atomic<value_type>[]> slots;
        std::unique_ptr<std::atomic<std::uint64_t>[]> tags;  // instrumented only
        atomics::AtomicCounter index{0};
    };

    std::uint64_t capacity_;
    bool instrument_;
    Buffer bufs_[2];
};

}  // namespace cqs
