#include <doctest.h>

#include <atomic>
#include <chrono>
#include <memory>
#include <random>
#include <semaphore>
#include <string>
#include <thread>

#include "cqs/core/sequential_sketch.hpp"
#include "cqs/sketch/concurrent_sketch.hpp"

using namespace cqs;

namespace {

SketchConfig small_cfg(std::uint32_t k, std::vector<bool> coins) {
    SketchConfig cfg;
    cfg.k = k;
    cfg.b = 1;
    cfg.update_threads = 1;
    cfg.coin_mode = CoinMode::injected;
    cfg.injected_coins = std::move(coins);
    return cfg;
}

std::string trits(const ConcurrentSketch& sk, std::uint32_t digits) {
    return tritmap::to_string(sk.hierarchy().tritmap_word(), digits);
}

}  // namespace

TEST_CASE("batch insert into the empty hierarchy") {
    ConcurrentSketch sk(small_cfg(2, {false}));
    auto& up = sk.updater(0);
    for (value_type x : {3.0, 1.0, 4.0, 2.0}) up.put(x);
    // the batch propagated immediately: level 1 holds the k survivors
    CHECK(trits(sk, 2) == "10");
    auto levels = sk.hierarchy().level_contents();
    REQUIRE(levels.size() == 2);
    CHECK(levels[0].empty());
    CHECK(levels[1] == std::vector<value_type>{1, 3});  // even positions of [1,2,3,4]
    CHECK(sk.propagated_size() == 4);
}

TEST_CASE("full-level merge cascades upward") {
    ConcurrentSketch sk(small_cfg(2, {false, false, false}));
    auto& up = sk.updater(0);
    for (value_type x : {4.0, 1.0, 3.0, 2.0, 8.0, 5.0, 7.0, 6.0}) up.put(x);
    // exactly the sequential cascade: level 2 = sample(merge(sample(w2), sample(w1)))
    CHECK(trits(sk, 3) == "100");
    auto levels = sk.hierarchy().level_contents();
    REQUIRE(levels.size() == 3);
    CHECK(levels[1].empty());
    CHECK(levels[2] == std::vector<value_type>{1, 5});
    CHECK(sk.hierarchy().coherent_at_quiescence());
}

TEST_CASE("single-threaded derandomized run equals the sequential sketch") {
    const std::uint32_t k = 16;
    const std::size_t n = 4096;
    std::vector<bool> toss;
    std::mt19937_64 rng(5);
    for (std::size_t i = 0; i < n; ++i) toss.push_back(rng() & 1);

    ConcurrentSketch conc(small_cfg(k, toss));
    SequentialSketch seq(k, std::make_unique<InjectedCoins>(toss));

    std::mt19937_64 data(9);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const value_type x = d(data);
        conc.updater(0).put(x);
        seq.update(x);
        if (i % (2 * k) == 0) {
            auto levels = conc.hierarchy().level_contents();
            for (std::uint32_t l = 1; l < levels.size(); ++l)
                REQUIRE(levels[l] == seq.level(l));
            REQUIRE(conc.propagated_size() == seq.size());
        }
    }
    // queries agree in the quiescent derandomized state
    for (int i = 1; i < 20; ++i) {
        double phi = i / 20.0;
        auto handle = conc.query_handle(0.0);
        REQUIRE(handle.query(phi) == seq.query(phi));
    }
}

// The two-owner interleaving of the propagation figure: batch i climbs two
// levels while batch i+1 sits inserted at level 0, blocked first by the
// trit, then by the uncleared level, and finally promotes into the emptied
// level 1.
TEST_CASE("scripted two-owner propagation interleaving") {
    const std::uint32_t k = 2;

    static thread_local int who = 0;  // 1 = owner(i) thread, 2 = owner(i+1) thread
    std::binary_semaphore x_paused(0), x_resume(0);
    std::binary_semaphore y_inserted(0);
    std::atomic<bool> y_done{false};

    SketchConfig cfg = small_cfg(k, std::vector<bool>(64, false));
    cfg.update_threads = 2;
    cfg.hooks = std::make_shared<TestHooks>();
    // owner(i) pauses after every promote DCAS and after every clear
    cfg.hooks->after_promote_dcas = [&](std::uint32_t) {
        if (who == 1) {
            x_paused.release();
            x_resume.acquire();
        }
    };
    cfg.hooks->after_clear = [&](std::uint32_t) {
        if (who == 1) {
            x_paused.release();
            x_resume.acquire();
        }
    };
    cfg.hooks->after_batch_dcas = [&] {
        if (who == 2) y_inserted.release();
    };

    ConcurrentSketch sk(cfg);

    // Pre-state: levels 1 and 2 both hold k elements (trits [0,1,1]).
    for (int w = 0; w < 3; ++w)
        for (int i = 0; i < 4; ++i) sk.updater(0).put(w * 10 + i);
    REQUIRE(trits(sk, 3) == "110");

    // owner(i): one full window; will pause inside its propagation.
    std::thread X([&] {
        who = 1;
        for (int i = 0; i < 4; ++i) sk.updater(0).put(100 + i);
    });

    // (a)+(b): batch i lands at level 0 and merges into full level 1
    x_paused.acquire();  // X paused after promote dcas at level 0
    CHECK(trits(sk, 3) == "120");
    CHECK_FALSE(level_ref::is_null(sk.hierarchy().level_raw(0)));  // not yet cleared

    // (c): owner(i) clears level 0
    x_resume.release();
    x_paused.acquire();  // paused after clear(0)
    CHECK(trits(sk, 3) == "120");
    CHECK(level_ref::is_null(sk.hierarchy().level_raw(0)));

    // (d): owner(i+1) inserts its batch; its propagation blocks on trit 1 = 2
    std::thread Y([&] {
        who = 2;
        for (int i = 0; i < 4; ++i) sk.updater(1).put(200 + i);
        y_done.store(true);
    });
    y_inserted.acquire();
    CHECK(trits(sk, 3) == "122");
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    CHECK_FALSE(y_done.load());  // blocked behind batch i

    // (e): owner(i) merges level 1 into level 2; level 1 not yet cleared, so
    // batch i+1 stays blocked even though trit 1 is now 0
    x_resume.release();
    x_paused.acquire();  // after promote dcas at level 1
    CHECK(trits(sk, 3) == "202");
    CHECK_FALSE(level_ref::is_null(sk.hierarchy().level_raw(1)));
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    CHECK_FALSE(y_done.load());

    // (f): owner(i) clears level 1 — batch i+1 may land there the same instant
    x_resume.release();
    x_paused.acquire();  // after clear(1)

    // (g): owner(i+1) promotes into the emptied level 1 while owner(i)
    // still drives level 2 upward.
    x_resume.release();  // X enters propagate(2)
    Y.join();
    CHECK(y_done.load());
    CHECK(tritmap::trit(sk.hierarchy().tritmap_word(), 1) == 1);  // batch i+1 landed

    x_paused.acquire();  // X after promote dcas at level 2
    x_resume.release();
    x_paused.acquire();  // X after clear(2)
    x_resume.release();
    X.join();
    CHECK(sk.propagated_size() == 5 * 4);
    CHECK(sk.audit().conserved);
    CHECK(sk.hierarchy().coherent_at_quiescence());
}
