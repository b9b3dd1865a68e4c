#include "cqs/core/sequential_sketch.hpp"

#include <algorithm>
#include <stdexcept>

#include "cqs/core/estimator.hpp"
#include "cqs/core/sampling.hpp"

namespace cqs {

SequentialSketch::SequentialSketch(std::uint32_t k, std::unique_ptr<CoinSource> coins,
                                   std::uint32_t max_level)
    : k_(k), max_level_(max_level), coins_(std::move(coins)) {
    if (k_ == 0) throw std::invalid_argument("k must be positive");
    if (!coins_) throw std::invalid_argument("coin source required");
    base_.reserve(2 * k_);
    levels_.resize(1);  // index 0 is the base, kept separately
}

void SequentialSketch::update(value_type x) {
    base_.push_back(x);
    ++n_;
    if (base_.size() == 2ull * k_) compact_base();
}

void SequentialSketch::compact_base() {
    std::sort(base_.begin(), base_.end());
    std::vector<value_type> carry = sample_odd_or_even(base_, coins_->next());
    base_.clear();

    std::uint32_t l = 1;
    for (;;) {
        if (l > max_level_) throw capacity_exceeded("sequential sketch out of levels");
        if (levels_.size() <= l) levels_.resize(l + 1);
        if (levels_[l].empty()) {
            levels_[l] = std::move(carry);
            return;
        }
        auto merged = merge_sorted(carry, levels_[l]);
        levels_[l].clear();
        carry = sample_odd_or_even(merged, coins_->next());
        ++l;
    }
}

value_type SequentialSketch::query(double phi) const {
    if (n_ == 0) throw std::invalid_argument("empty sketch");
    std::vector<WeightedSample> samples;
    samples.reserve(base_.size() + levels_.size() * k_);
    for (value_type v : base_) samples.push_back({v, 1, 0});
    for (std::uint32_t i = 1; i < levels_.size(); ++i) {
        const std::uint64_t w = 1ull << i;
        for (value_type v : levels_[i]) samples.push_back({v, w, i});
    }
    return WeightedEstimator(std::move(samples)).quantile(phi);
}

const std::vector<value_type>& SequentialSketch::level(std::uint32_t i) const {
    static const std::vector<value_type> kEmpty;
    if (i == 0 || i >= levels_.size()) return kEmpty;
    return levels_[i];
}

std::uint64_t SequentialSketch::represented_weight() const {
    std::uint64_t w = base_.size();
    for (std::uint32_t i = 1; i < levels_.size(); ++i)
        w += static_cast<std::uint64_t>(levels_[i].size()) << i;
    return w;
}

}  // namespace cqs
