#pragma once

#include <cstdint>
#include <thread>

namespace cqs::atomics {

// Bounded exponential backoff for protocol spin loops; yields once the
// pause budget is exhausted so a descheduled owner can run.
class Backoff {
public:
    void pause() {
        if (spins_ < kMaxSpins) {
            for (std::uint32_t i = 0; i < spins_; ++i) cpu_relax();
            spins_ <<= 1;
        } else {
            std::this_thread::yield();
        }
    }

    void reset() { spins_ = 1; }

private:
    static constexpr std::uint32_t kMaxSpins = 1024;

    static void cpu_relax() {
#if defined(__x86_64__) || defined(__i386__)
        __builtin_ia32_pause();
#else
        std::this_thread::yield();
#endif
    }

    std::uint32_t spins_ = 1;
};

}  // namespace cqs::atomics
