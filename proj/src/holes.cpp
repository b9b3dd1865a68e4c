#include "cqs/analysis/holes.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

namespace cqs::analysis {

namespace mp = boost::multiprecision;

namespace {

mp::cpp_int binomial(std::uint64_t n, std::uint64_t r) {
    if (r > n) return 0;
    if (r > n - r) r = n - r;
    mp::cpp_int acc = 1;
    for (std::uint64_t i = 1; i <= r; ++i) {
        acc *= (n - r + i);
        acc /= i;
    }
    return acc;
}

// numerator / 2^shift as a double, exact until the final conversion
double dyadic(const mp::cpp_int& numerator, std::uint64_t shift) {
    mp::cpp_rational q(numerator, mp::cpp_int(1) << shift);
    return q.convert_to<double>();
}

}  // namespace

double pi_bound(std::uint32_t i, std::uint32_t j, std::uint32_t b) {
    if (j < 1) throw std::invalid_argument("pi_bound: j >= 1 required");
    if (b < 1 || i >= b) throw std::invalid_argument("pi_bound: need 0 <= i <= b-1");
    const std::uint64_t jb = static_cast<std::uint64_t>(j) * b;
    return dyadic(binomial(jb + 2ull * i, i), jb + 2ull * i + 1);
}

double p_bound(std::uint32_t j, std::uint32_t b) {
    if (j < 1) throw std::invalid_argument("p_bound: j >= 1 required");
    const std::uint64_t jb = static_cast<std::uint64_t>(j) * b;
    // sum_i C(jb+2i, i) * 2^(2(b-1-i)) over the common denominator 2^(jb+2b-1)
    mp::cpp_int num = 0;
    for (std::uint32_t i = 0; i < b; ++i)
        num += binomial(jb + 2ull * i, i) << (2ull * (b - 1 - i));
    return dyadic(num, jb + 2ull * b - 1);
}

double eh_region_bound(std::uint32_t j, std::uint32_t b) {
    if (j < 1 || b < 1) throw std::invalid_argument("eh_region_bound: j, b >= 1 required");
    const std::uint64_t n = (static_cast<std::uint64_t>(j) + 2) * b;
    return dyadic(mp::cpp_int(b) * b * binomial(n - 2, b - 1), n - 1);
}

double eh_total_bound(std::uint32_t b, std::uint32_t k) {
    if (b == 0 || (2ull * k) % b != 0)
        throw std::invalid_argument("eh_total_bound: b must divide 2k");
    const std::uint64_t regions = 2ull * k / b;
    double total = 0.0;
    for (std::uint64_t j = 1; j <= regions; ++j) {
        double term = eh_region_bound(static_cast<std::uint32_t>(j), b);
        total += term;
        if (term < 1e-18) break;  // geometric tail, numerically spent
    }
    if (!(total <= 2.8))
        throw std::logic_error("eh_total_bound: exceeded the 2.8 ceiling");
    return total;
}

HoleSimResult simulate_holes(std::uint32_t b, std::uint32_t regions, std::uint64_t trials,
                             std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("simulate_holes: trials >= 1");
    if (b < 1 || regions < 1) throw std::invalid_argument("simulate_holes: b, regions >= 1");

    std::mt19937_64 rng(seed);
    std::uint64_t bits = 0;
    std::uint32_t bits_left = 0;
    auto coin = [&]() -> bool {  // true: the owner steps; false: the writer
        if (bits_left == 0) {
            bits = rng();
            bits_left = 64;
        }
        bool v = bits & 1;
        bits >>= 1;
        --bits_left;
        return v;
    };

    double sum = 0.0, sumsq = 0.0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::uint64_t batch_holes = 0;
        for (std::uint32_t j = 1; j <= regions; ++j) {
            // owner step o enters region j after jb prior steps; its read of
            // slot s is owner step jb+s. Writer step s writes slot s.
            const std::uint64_t lead = static_cast<std::uint64_t>(j) * b;
            std::uint64_t o = 0, w = 0;
            while (w < b && o < lead + b) {
                if (coin()) {
                    ++o;
                    if (o > lead && w < o - lead) ++batch_holes;  // read slot o-lead unwritten
                } else {
                    ++w;
                }
            }
        }
        sum += static_cast<double>(batch_holes);
        sumsq += static_cast<double>(batch_holes) * static_cast<double>(batch_holes);
    }

    const double mean = sum / static_cast<double>(trials);
    double var = sumsq / static_cast<double>(trials) - mean * mean;
    if (var < 0) var = 0;
    const double ci = 1.96 * std::sqrt(var / static_cast<double>(trials));
    return {mean, ci, trials};
}

}  // namespace cqs::analysis
