#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "cqs/atomics/dcas.hpp"
#include "cqs/core/types.hpp"
#include "cqs/tritmap.hpp"

namespace cqs {

// Pause points used by scripted-scheduler tests to freeze a thread between
// protocol steps. All default to no-ops and cost one branch when unset.
struct TestHooks {
    std::function<void(std::uint32_t node, std::uint32_t buf, std::uint64_t offset)>
        after_reserve;                                      // before the slot copy
    std::function<void()> after_batch_dcas;                 // before the index reset
    std::function<void(std::uint32_t level)> after_promote_dcas;  // before the clear
    std::function<void(std::uint32_t level)> after_clear;
};

enum class CoinMode {
    seeded,    // per-update-thread PRNG streams derived from `seed`
    injected,  // one shared explicit sequence (derandomized runs)
};

struct SketchConfig {
    std::uint32_t k = 1024;        // per-level summary size; level 0 takes 2k
    std::uint32_t b = 16;          // thread-local buffer size; must divide 2k
    std::uint32_t nodes = 1;       // S: number of gather/sort units
    std::uint32_t update_threads = 1;  // N: registered updaters
    std::uint32_t max_level = tritmap::kMaxLevelLimit;
    double rho = 0.0;              // query freshness threshold
    std::uint64_t seed = 1;
    CoinMode coin_mode = CoinMode::seeded;
    std::vector<bool> injected_coins;  // used when coin_mode == injected

    atomics::DcasMode dcas_mode = atomics::DcasMode::descriptor;
    bool instrument = false;  // window tags, hole counters, element ids
    bool poison_reclaim = false;

    value_type slot_default = 0.0;  // pre-fill value of shared buffer slots

    std::shared_ptr<TestHooks> hooks;

    void validate() const {
        if (k == 0) throw std::invalid_argument("k must be positive");
        if (b == 0 || (2ull * k) % b != 0)
            throw std::invalid_argument("b must be positive and divide 2k");
        if (nodes == 0) throw std::invalid_argument("nodes must be positive");
        if (update_threads < nodes)
            throw std::invalid_argument("update_threads must be >= nodes");
        if (max_level > tritmap::kMaxLevelLimit)
            throw std::invalid_argument("max_level exceeds tritmap capacity");
        if (rho < 0.0) throw std::invalid_argument("rho must be >= 0");
    }

    // Threads fill nodes in contiguous blocks.
    std::uint32_t node_of(std::uint32_t thread_index) const {
        std::uint32_t per = (update_threads + nodes - 1) / nodes;
        std::uint32_t nd = thread_index / per;
        return nd < nodes ? nd : nodes - 1;
    }

    // Largest stream the level hierarchy can absorb.
    std::uint64_t capacity() const {
        return 2ull * k * ((1ull << (max_level + 1)) - 1);
    }
};

}  // namespace cqs
