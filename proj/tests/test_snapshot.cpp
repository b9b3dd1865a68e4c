#include <doctest.h>

#include <algorithm>
#include <memory>
#include <semaphore>
#include <thread>

#include "cqs/sketch/concurrent_sketch.hpp"
#include "cqs/sketch/snapshot.hpp"

using namespace cqs;

namespace {

SketchConfig cfg_k2() {
    SketchConfig cfg;
    cfg.k = 2;
    cfg.b = 1;
    cfg.update_threads = 2;
    cfg.coin_mode = CoinMode::injected;
    cfg.injected_coins = std::vector<bool>(64, false);
    return cfg;
}

}  // namespace

TEST_CASE("snapshot estimate applies the bracket rule") {
    SUBCASE("single level 0") {
        std::vector<Snapshot::Entry> e;
        e.push_back({0, {1, 2, 3, 4}, {}});
        Snapshot s(std::move(e), 4, tritmap::from_trits({2}));
        CHECK(s.estimate(0.5) == 3);
        CHECK(s.estimate(0.0) == 1);
    }
    SUBCASE("weighted level 1") {
        std::vector<Snapshot::Entry> e;
        e.push_back({1, {10, 20}, {}});
        Snapshot s(std::move(e), 4, tritmap::from_trits({0, 1}));
        CHECK(s.estimate(0.9) == 20);
    }
    SUBCASE("empty snapshot") {
        Snapshot s({}, 0, 0);
        CHECK_THROWS(s.estimate(0.5));
    }
}

TEST_CASE("query on an empty sketch reports no data") {
    ConcurrentSketch sk(cfg_k2());
    auto handle = sk.query_handle(0.0);
    CHECK_THROWS_WITH_AS(handle.query(0.5), "no data", std::runtime_error);
}

TEST_CASE("quiescent snapshot covers exactly the propagated stream") {
    SketchConfig cfg = cfg_k2();
    cfg.update_threads = 1;
    ConcurrentSketch sk(cfg);
    for (int i = 0; i < 12; ++i) sk.updater(0).put(i);  // 3 windows of 4

    auto snap = collect_snapshot(sk.hierarchy());
    CHECK(snap->represented_size() == 12);
    CHECK(snap->represented_size() ==
          tritmap::stream_size(snap->my_trit(), cfg.k));
}

// Freezes a propagation so the hierarchy shows trits [0,1,2]: level 1 holds
// k fresh survivors, level 2 holds a 2k batch still owned by a paused
// propagation. The snapshot must pick levels 2 and 1 (sizes 2k,k => 10k) and
// ignore everything stale below.
TEST_CASE("snapshot of a mid-propagation state counts each element once") {
    const std::uint32_t k = 2;
    static thread_local bool is_x = false;
    std::binary_semaphore x_paused(0), x_resume(0);

    SketchConfig cfg = cfg_k2();
    cfg.instrument = true;
    cfg.hooks = std::make_shared<TestHooks>();
    cfg.hooks->after_clear = [&](std::uint32_t level) {
        if (is_x && level == 1) {  // freeze right after clearing level 1
            x_paused.release();
            x_resume.acquire();
        }
    };

    ConcurrentSketch sk(cfg);

    // three windows: trits become [0,1,1]
    for (int w = 0; w < 3; ++w)
        for (int i = 0; i < 4; ++i) sk.updater(0).put(w * 10 + i);
    REQUIRE(tritmap::to_string(sk.hierarchy().tritmap_word(), 3) == "110");

    // window 4 cascades to level 2 and freezes after clear(1): trits [0,0,2]
    std::thread X([&] {
        is_x = true;
        for (int i = 0; i < 4; ++i) sk.updater(0).put(100 + i);
    });
    x_paused.acquire();
    REQUIRE(tritmap::to_string(sk.hierarchy().tritmap_word(), 3) == "200");

    // window 5 promotes into the emptied level 1: trits [0,1,2]
    for (int i = 0; i < 4; ++i) sk.updater(1).put(200 + i);
    REQUIRE(tritmap::to_string(sk.hierarchy().tritmap_word(), 3) == "210");

    auto snap = collect_snapshot(sk.hierarchy());
    CHECK(snap->represented_size() == 10 * k);  // 5 windows of 2k
    REQUIRE(snap->entries().size() == 2);
    CHECK(snap->entries()[0].level == 2);
    CHECK(snap->entries()[0].values.size() == 2 * k);
    CHECK(snap->entries()[1].level == 1);
    CHECK(snap->entries()[1].values.size() == k);

    // instrumented ids: nothing is represented twice
    std::vector<std::uint64_t> ids;
    for (const auto& e : snap->entries())
        ids.insert(ids.end(), e.ids.begin(), e.ids.end());
    std::sort(ids.begin(), ids.end());
    CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());

    x_resume.release();
    X.join();
    CHECK(sk.audit().conserved);
    CHECK(sk.hierarchy().coherent_at_quiescence());
}

TEST_CASE("freshness threshold controls cache reuse") {
    SketchConfig cfg = cfg_k2();
    cfg.update_threads = 1;
    ConcurrentSketch sk(cfg);
    for (int i = 0; i < 4; ++i) sk.updater(0).put(i);  // one window: size 4

    auto handle = sk.query_handle(0.05);
    (void)handle.query(0.5);
    CHECK(handle.misses() == 1);
    (void)handle.query(0.9);  // same stream size: ratio 1 <= 1.05
    CHECK(handle.misses() == 1);

    for (int i = 0; i < 4; ++i) sk.updater(0).put(10 + i);  // size 8 > 4 * 1.05
    (void)handle.query(0.5);
    CHECK(handle.misses() == 2);

    // rho = 0 serves from cache only while nothing new propagated
    auto strict = sk.query_handle(0.0);
    (void)strict.query(0.5);
    (void)strict.query(0.5);
    CHECK(strict.misses() == 1);  // sizes equal: cache is exact

    for (int i = 0; i < 4; ++i) sk.updater(0).put(20 + i);
    (void)strict.query(0.5);
    CHECK(strict.misses() == 2);
}

TEST_CASE("a cached answer is a pure function of the cached snapshot") {
    SketchConfig cfg = cfg_k2();
    cfg.update_threads = 1;
    cfg.rho = 10.0;  // effectively never refresh
    ConcurrentSketch sk(cfg);
    for (int i = 0; i < 8; ++i) sk.updater(0).put(i);

    auto handle = sk.query_handle(10.0);
    auto first = handle.query(0.5);
    auto cached_snapshot = handle.cached();
    for (int i = 0; i < 16; ++i) sk.updater(0).put(100 + i);
    CHECK(handle.query(0.5) == first);  // still the cached view
    CHECK(handle.cached() == cached_snapshot);
    CHECK(handle.query(0.5) == cached_snapshot->estimate(0.5));
}
