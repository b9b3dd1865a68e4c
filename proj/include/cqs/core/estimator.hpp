#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cqs/core/types.hpp"

namespace cqs {

// Weighted bracket rule shared by the sequential query and the snapshot
// estimator. W(x_i) is the *exclusive* prefix sum of weights in the list
// sorted by (value, level): the answer is the last x_j with
// W(x_j) <= floor(phi * n). phi = 0 therefore returns the minimum.
class WeightedEstimator {
public:
    // Takes ownership of the samples; sorts them by (value, level).
    explicit WeightedEstimator(std::vector<WeightedSample> samples);

    value_type quantile(double phi) const;
    std::uint64_t total_weight() const { return total_weight_; }
    bool empty() const { return samples_.empty(); }

private:
    std::vector<WeightedSample> samples_;
    std::vector<std::uint64_t> prefix_;  // exclusive prefix weights
    std::uint64_t total_weight_ = 0;
};

}  // namespace cqs
