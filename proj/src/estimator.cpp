#include "cqs/core/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cqs {

WeightedEstimator::WeightedEstimator(std::vector<WeightedSample> samples)
    : samples_(std::move(samples)) {
    std::stable_sort(samples_.begin(), samples_.end(),
                     [](const WeightedSample& a, const WeightedSample& b) {
                         if (a.value != b.value) return a.value < b.value;
                         return a.level < b.level;
                     });
    prefix_.resize(samples_.size());
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        prefix_[i] = acc;
        acc += samples_[i].weight;
    }
    total_weight_ = acc;
}

value_type WeightedEstimator::quantile(double phi) const {
    if (samples_.empty()) throw std::invalid_argument("empty sketch");
    if (phi < 0.0 || phi > 1.0) throw std::invalid_argument("phi out of [0,1]");
    auto target =
        static_cast<std::uint64_t>(std::floor(phi * static_cast<double>(total_weight_)));
    // last j with prefix_[j] <= target
    auto it = std::upper_bound(prefix_.begin(), prefix_.end(), target);
    std::size_t j = static_cast<std::size_t>(it - prefix_.begin());
    if (j == 0) throw invariant_violation("estimator: prefix[0] must be 0");
    return samples_[j - 1].value;
}

}  // namespace cqs
