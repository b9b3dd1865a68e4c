#pragma once

#include <array>
#include <atomic>
#include <cassert>
#include <cstdint>
#include <mutex>
#include <unordered_map>
#include <vector>

namespace cqs::atomics {

// 3-epoch reclamation. Readers pin the global epoch for the duration of a
// Guard; an object retired under epoch e is handed to its deleter only once
// the global epoch has advanced two steps past e, i.e. after every reader
// that could have observed it has left its critical section. Guards are
// reentrant so an operation may nest freely (update -> dcas -> read).
//
// Each thread disposes only its own limbo buckets (at retire() time or at a
// quiescent drain()), so no locks sit on the retire path.
//
// Poison mode is a test instrument: instead of freeing, the reclaimer calls
// the object's poison hook and quarantines the storage until drain() or
// destruction. A reader that observes a poisoned object proves a
// grace-period bug; nothing is ever handed back to the allocator while a
// stale pointer could still dereference it.
class Reclaimer {
public:
    static constexpr unsigned kMaxThreads = 512;
    static constexpr unsigned kBuckets = 3;

    struct Config {
        bool poison = false;
        std::size_t flip_threshold = 256;  // retired nodes before trying to advance
    };

    explicit Reclaimer(Config cfg)
        : cfg_(cfg), id_(next_id().fetch_add(1, std::memory_order_relaxed)) {}
    Reclaimer() : Reclaimer(Config{}) {}

    // Must run at a quiescent point (no concurrent guards or retires).
    ~Reclaimer() {
        drain();
        unsigned n = nthreads_.load(std::memory_order_acquire);
        for (unsigned i = 0; i < n; ++i) delete slots_[i];
    }

    Reclaimer(const Reclaimer&) = delete;
    Reclaimer& operator=(const Reclaimer&) = delete;

private:
    struct Slot;

public:
    class Guard {
    public:
        explicit Guard(Reclaimer& r) : slot_(r.self()) {
            if (slot_->depth++ == 0)
                slot_->epoch.store(r.epoch_.load(std::memory_order_seq_cst),
                                   std::memory_order_seq_cst);
        }
        ~Guard() {
            if (--slot_->depth == 0) slot_->epoch.store(kQuiescent, std::memory_order_seq_cst);
        }
        Guard(const Guard&) = delete;
        Guard& operator=(const Guard&) = delete;

    private:
        Slot* slot_;
    };

    Guard guard() { return Guard(*this); }

    void retire(void* p, void (*del)(void*), void (*poison)(void*) = nullptr) {
        Slot* s = self();
        unsigned e = epoch_.load(std::memory_order_seq_cst);
        Bucket& b = s->buckets[e % kBuckets];
        if (b.epoch != e) {
            // A bucket reused e -> e+3 is at least two grace periods old.
            dispose(b.items);
            b.epoch = e;
        }
        b.items.push_back({p, del, poison});
        if (++s->since_flip >= cfg_.flip_threshold) {
            s->since_flip = 0;
            try_advance();
            collect(s);
        }
    }

    template <class T>
    void retire(T* p) {
        retire(
            p, [](void* q) { delete static_cast<T*>(q); }, nullptr);
    }

    // Quiescent-only: forces everything pending through its grace period.
    void drain() {
        for (unsigned i = 0; i < kBuckets + 1; ++i) try_advance();
        unsigned n = nthreads_.load(std::memory_order_acquire);
        unsigned cur = epoch_.load(std::memory_order_seq_cst);
        for (unsigned i = 0; i < n; ++i) {
            Slot* s = slots_[i];
            if (!s) continue;
            for (Bucket& b : s->buckets) {
                if (b.items.empty()) continue;
                if (b.epoch + 2 <= cur) dispose(b.items);
            }
        }
        if (cfg_.poison) {
            std::lock_guard<std::mutex> lk(quarantine_mu_);
            for (auto& r : quarantine_) r.del(r.p);
            quarantine_.clear();
        }
    }

    bool poison_mode() const { return cfg_.poison; }

private:
    static constexpr unsigned kQuiescent = ~0u;

    struct Retired {
        void* p;
        void (*del)(void*);
        void (*poison)(void*);
    };

    struct Bucket {
        unsigned epoch = 0;
        std::vector<Retired> items;
    };

    struct Slot {
        std::atomic<unsigned> epoch{kQuiescent};
        unsigned depth = 0;
        std::size_t since_flip = 0;
        std::array<Bucket, kBuckets> buckets;
    };

    static std::atomic<std::uint64_t>& next_id() {
        static std::atomic<std::uint64_t> id{1};
        return id;
    }

    Slot* self() {
        struct CacheEntry {
            std::uint64_t id = 0;
            Slot* slot = nullptr;
        };
        thread_local std::array<CacheEntry, 4> cache{};
        thread_local std::unordered_map<std::uint64_t, Slot*> overflow;
        for (auto& ce : cache)
            if (ce.id == id_) return ce.slot;
        if (auto it = overflow.find(id_); it != overflow.end()) return it->second;
        Slot* s = register_thread();
        for (auto& ce : cache) {
            if (ce.id == 0) {
                ce = {id_, s};
                return s;
            }
        }
        overflow.emplace(id_, s);
        return s;
    }

    Slot* register_thread() {
        unsigned idx = nthreads_.fetch_add(1, std::memory_order_acq_rel);
        assert(idx < kMaxThreads && "Reclaimer: raise kMaxThreads");
        Slot* s = new Slot;
        slots_[idx] = s;
        return s;
    }

    void try_advance() {
        unsigned cur = epoch_.load(std::memory_order_seq_cst);
        unsigned n = nthreads_.load(std::memory_order_acquire);
        for (unsigned i = 0; i < n; ++i) {
            Slot* t = slots_[i];
            if (t && t->epoch.load(std::memory_order_seq_cst) == cur) return;
        }
        epoch_.compare_exchange_strong(cur, cur + 1, std::memory_order_seq_cst);
    }

    // Frees the calling thread's buckets that are two epochs stale.
    void collect(Slot* s) {
        unsigned cur = epoch_.load(std::memory_order_seq_cst);
        for (Bucket& b : s->buckets) {
            if (!b.items.empty() && b.epoch + 2 <= cur) dispose(b.items);
        }
    }

    void dispose(std::vector<Retired>& v) {
        if (!cfg_.poison) {
            for (auto& r : v) r.del(r.p);
        } else {
            std::lock_guard<std::mutex> lk(quarantine_mu_);
            for (auto& r : v) {
                if (r.poison) {
                    r.poison(r.p);
                    quarantine_.push_back(r);
                } else {
                    r.del(r.p);
                }
            }
        }
        v.clear();
    }

    Config cfg_;
    std::uint64_t id_;
    std::atomic<unsigned> epoch_{0};
    std::atomic<unsigned> nthreads_{0};
    std::array<Slot*, kMaxThreads> slots_{};
    std::mutex quarantine_mu_;
    std::vector<Retired> quarantine_;
};

}  // namespace cqs::atomics
