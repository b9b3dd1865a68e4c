#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <barrier>
#include <random>
#include <thread>
#include <vector>

#include "cqs/atomics/dcas.hpp"
#include "cqs/atomics/reclaim.hpp"
#include "cqs/sketch/concurrent_sketch.hpp"
#include "cqs/sketch/snapshot.hpp"

using namespace cqs;
using namespace cqs::atomics;

namespace {
constexpr Word V(std::uint64_t x) { return x << 2; }
}  // namespace

TEST_CASE("racing identical dcas operations: exactly one winner per round") {
    Reclaimer rec;
    DcasDomain dom(rec);
    DcasCell a(V(0)), b(V(0));

    const int rounds = 2000;
    for (int r = 0; r < rounds; ++r) {
        const Word ea = V(2 * r), eb = V(2 * r + 1);
        const Word na = V(2 * (r + 1)), nb = V(2 * (r + 1) + 1);
        // (values never recur: each round strictly increases both cells)
        std::atomic<int> winners{0};
        std::barrier sync(3);
        auto racer = [&] {
            auto g = rec.guard();
            sync.arrive_and_wait();
            if (dom.dcas(a, ea, na, b, eb, nb)) winners.fetch_add(1);
        };
        std::thread t1(racer), t2(racer);
        sync.arrive_and_wait();
        t1.join();
        t2.join();
        REQUIRE(winners.load() == 1);
        auto g = rec.guard();
        REQUIRE(dom.read(a) == na);
        REQUIRE(dom.read(b) == nb);
    }
}

TEST_CASE("dcas_read sees only pre or post values, in order") {
    Reclaimer rec;
    DcasDomain dom(rec);
    DcasCell a(V(0)), b(V(1));

    std::atomic<bool> stop{false};
    std::atomic<std::uint64_t> violations{0};
    std::thread reader([&] {
        Word last_a = 0;
        while (!stop.load(std::memory_order_relaxed)) {
            auto g = rec.guard();
            Word va = dom.read(a);
            if ((va & 3) != 0) violations.fetch_add(1);  // leaked descriptor
            if (va < last_a) violations.fetch_add(1);    // went backwards
            last_a = va;
        }
    });

    {
        std::uint64_t cur_a = 0, cur_b = 1;
        for (int i = 0; i < 30000; ++i) {
            auto g = rec.guard();
            REQUIRE(dom.dcas(a, V(cur_a), V(cur_a + 2), b, V(cur_b), V(cur_b + 2)));
            cur_a += 2;
            cur_b += 2;
        }
    }
    stop = true;
    reader.join();
    CHECK(violations.load() == 0);
}

TEST_CASE("a failing dcas is never observable, even mid-install") {
    // The saboteur's first leg matches the live value of `a` (so its
    // descriptor really does get installed there) while its second leg can
    // never match; the operation must fail with no visible effect on either
    // cell at any instant.
    Reclaimer rec;
    DcasDomain dom(rec);
    DcasCell a(V(0)), b(V(1));
    const Word kPoison = V(1ull << 40);

    std::atomic<bool> stop{false};
    std::atomic<std::uint64_t> violations{0};
    std::atomic<std::uint64_t> installs_attempted{0};

    std::thread saboteur([&] {
        while (!stop.load(std::memory_order_relaxed)) {
            auto g = rec.guard();
            Word cur = dom.read(a);
            installs_attempted.fetch_add(1);
            if (dom.dcas(a, cur, kPoison, b, V(2), kPoison + 4))
                violations.fetch_add(1);  // must never commit
        }
    });

    std::thread reader([&] {
        Word last = 0;
        while (!stop.load(std::memory_order_relaxed)) {
            auto g = rec.guard();
            Word va = dom.read(a);
            if (va >= kPoison || (va & 3) != 0 || va < last) violations.fetch_add(1);
            last = va;
        }
    });

    {
        std::uint64_t cur_a = 0, cur_b = 1;
        for (int i = 0; i < 20000; ++i) {
            auto g = rec.guard();
            // the writer may retry: the saboteur never changes the cells, so
            // only its transient descriptors can make an attempt fail spuriously
            while (!dom.dcas(a, V(cur_a), V(cur_a + 2), b, V(cur_b), V(cur_b + 2))) {
            }
            cur_a += 2;
            cur_b += 2;
        }
    }
    stop = true;
    saboteur.join();
    reader.join();
    CHECK(violations.load() == 0);
    CHECK(installs_attempted.load() > 0);
}

TEST_CASE("multi-thread ingest conserves every element") {
    SketchConfig cfg;
    cfg.k = 64;
    cfg.b = 8;
    cfg.nodes = 2;
    cfg.update_threads = 4;
    cfg.instrument = true;
    ConcurrentSketch sk(cfg);

    const std::uint64_t per_thread = 50000;
    std::vector<std::thread> pool;
    for (std::uint32_t t = 0; t < cfg.update_threads; ++t)
        pool.emplace_back([&, t] {
            std::mt19937_64 rng(t + 1);
            std::uniform_real_distribution<double> d(0.0, 1.0);
            for (std::uint64_t i = 0; i < per_thread; ++i) sk.updater(t).put(d(rng));
        });
    for (auto& th : pool) th.join();

    auto audit = sk.audit();
    CHECK(audit.updates_returned == per_thread * cfg.update_threads);
    CHECK(audit.conserved);
    CHECK(sk.hierarchy().coherent_at_quiescence());

    // at quiescence the unpropagated remainder is within the relaxation bound
    const std::uint64_t missing = audit.updates_returned - audit.propagated;
    CHECK(missing <= sk.relaxation_bound());
}

TEST_CASE("snapshots under update pressure stay exact and duplicate-free") {
    SketchConfig cfg;
    cfg.k = 64;
    cfg.b = 8;
    cfg.update_threads = 2;
    cfg.instrument = true;
    ConcurrentSketch sk(cfg);

    std::atomic<bool> stop{false};
    std::vector<std::thread> writers;
    for (std::uint32_t t = 0; t < cfg.update_threads; ++t)
        writers.emplace_back([&, t] {
            std::mt19937_64 rng(t + 7);
            std::uniform_real_distribution<double> d(0.0, 1.0);
            while (!stop.load(std::memory_order_relaxed)) sk.updater(t).put(d(rng));
        });

    std::atomic<std::uint64_t> collected{0};
    std::vector<std::thread> readers;
    for (int q = 0; q < 2; ++q)
        readers.emplace_back([&] {
            std::vector<std::uint64_t> ids;
            while (collected.load() < 400) {
                std::shared_ptr<const Snapshot> snap;
                try {
                    snap = collect_snapshot(sk.hierarchy());  // throws if inexact
                } catch (const std::runtime_error&) {
                    continue;
                }
                ids.clear();
                for (const auto& e : snap->entries())
                    ids.insert(ids.end(), e.ids.begin(), e.ids.end());
                std::sort(ids.begin(), ids.end());
                REQUIRE(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
                collected.fetch_add(1);
            }
        });

    for (auto& th : readers) th.join();
    stop = true;
    for (auto& th : writers) th.join();
    CHECK(collected.load() >= 400);
}

TEST_CASE("poison-mode reclamation: readers never touch a reclaimed array") {
    SketchConfig cfg;
    cfg.k = 32;
    cfg.b = 4;
    cfg.update_threads = 2;
    cfg.poison_reclaim = true;
    ConcurrentSketch sk(cfg);

    const auto before = poison_detections().load();
    std::atomic<bool> stop{false};
    std::vector<std::thread> writers;
    for (std::uint32_t t = 0; t < 2; ++t)
        writers.emplace_back([&, t] {
            std::mt19937_64 rng(t + 3);
            std::uniform_real_distribution<double> d(0.0, 1.0);
            while (!stop.load(std::memory_order_relaxed)) sk.updater(t).put(d(rng));
        });
    std::thread reader([&] {
        auto handle = sk.query_handle(0.01);
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> d(0.0, 1.0);
        for (int i = 0; i < 20000;) {
            try {
                (void)handle.query(d(rng));
                ++i;
            } catch (const std::runtime_error&) {
            }
        }
    });
    reader.join();
    stop = true;
    for (auto& th : writers) th.join();
    sk.drain_reclaimer();
    CHECK(poison_detections().load() == before);
}

TEST_CASE("locked dcas mode drives the full sketch identically") {
    SketchConfig cfg;
    cfg.k = 16;
    cfg.b = 2;
    cfg.update_threads = 2;
    cfg.dcas_mode = DcasMode::locked;
    ConcurrentSketch sk(cfg);
    std::vector<std::thread> pool;
    for (std::uint32_t t = 0; t < 2; ++t)
        pool.emplace_back([&, t] {
            for (int i = 0; i < 20000; ++i) sk.updater(t).put(i);
        });
    for (auto& th : pool) th.join();
    CHECK(sk.audit().conserved);
    CHECK(sk.hierarchy().coherent_at_quiescence());
}
