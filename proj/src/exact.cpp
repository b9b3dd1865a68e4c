#include "cqs/core/exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cqs {

std::uint64_t exact_rank(std::span<const value_type> stream, value_type x) {
    std::uint64_t r = 0;
    for (value_type v : stream)
        if (v < x) ++r;
    return r;
}

namespace {

value_type quantile_of_sorted(std::span<const value_type> sorted, double phi) {
    if (sorted.empty()) throw std::invalid_argument("empty stream");
    if (phi < 0.0 || phi > 1.0) throw std::invalid_argument("phi out of [0,1]");
    auto n = static_cast<std::uint64_t>(sorted.size());
    auto target = static_cast<std::uint64_t>(std::floor(phi * static_cast<double>(n)));
    if (target >= n) target = n - 1;
    return sorted[target];
}

}  // namespace

value_type exact_quantile(std::span<const value_type> stream, double phi) {
    std::vector<value_type> sorted(stream.begin(), stream.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_of_sorted(sorted, phi);
}

ExactOracle::ExactOracle(std::span<const value_type> stream)
    : sorted_(stream.begin(), stream.end()) {
    std::sort(sorted_.begin(), sorted_.end());
}

std::uint64_t ExactOracle::rank(value_type x) const {
    return static_cast<std::uint64_t>(
        std::lower_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin());
}

value_type ExactOracle::quantile(double phi) const {
    return quantile_of_sorted(sorted_, phi);
}

}  // namespace cqs
