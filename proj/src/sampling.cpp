#include "cqs/core/sampling.hpp"

#include <algorithm>
#include <stdexcept>

namespace cqs {

std::vector<value_type> sample_odd_or_even(std::span<const value_type> sorted, bool coin) {
    if (sorted.size() % 2 != 0) throw std::invalid_argument("sample_odd_or_even: odd-length input");
    std::vector<value_type> out;
    out.reserve(sorted.size() / 2);
    for (std::size_t i = coin ? 1 : 0; i < sorted.size(); i += 2) out.push_back(sorted[i]);
    return out;
}

std::vector<value_type> merge_sorted(std::span<const value_type> a, std::span<const value_type> b) {
    std::vector<value_type> out(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), out.begin());
    return out;
}

void sample_odd_or_even_ids(std::span<const std::uint64_t> ids, bool coin,
                            std::vector<std::uint64_t>& out) {
    out.clear();
    out.reserve(ids.size() / 2);
    for (std::size_t i = coin ? 1 : 0; i < ids.size(); i += 2) out.push_back(ids[i]);
}

void merge_sorted_ids(std::span<const value_type> a, std::span<const std::uint64_t> a_ids,
                      std::span<const value_type> b, std::span<const std::uint64_t> b_ids,
                      std::vector<std::uint64_t>& out_ids) {
    out_ids.clear();
    out_ids.reserve(a.size() + b.size());
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (b[j] < a[i]) out_ids.push_back(b_ids[j++]);
        else out_ids.push_back(a_ids[i++]);
    }
    while (i < a.size()) out_ids.push_back(a_ids[i++]);
    while (j < b.size()) out_ids.push_back(b_ids[j++]);
}

}  // namespace cqs
