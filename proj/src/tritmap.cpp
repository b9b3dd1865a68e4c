#include "cqs/tritmap.hpp"

#include <algorithm>

namespace cqs::tritmap {

std::uint64_t stream_size(Word w, std::uint32_t k, std::uint32_t max_level) {
    std::uint64_t total = 0;
    std::uint64_t weight = 1;
    for (std::uint32_t i = 0; i <= max_level && w != 0; ++i) {
        switch (w % 3) {
            case 1: total += weight * k; break;
            case 2: total += weight * 2 * k; break;
            default: break;
        }
        w /= 3;
        weight <<= 1;
    }
    return total;
}

std::string to_string(Word w, std::uint32_t min_digits) {
    std::string s;
    while (w != 0) {
        s.push_back(static_cast<char>('0' + (w % 3)));
        w /= 3;
    }
    while (s.size() < min_digits) s.push_back('0');
    std::reverse(s.begin(), s.end());
    return s;
}

Word from_trits(std::initializer_list<std::uint32_t> trits) {
    Word w = 0;
    Word p = 1;
    for (std::uint32_t t : trits) {
        w += t * p;
        p *= 3;
    }
    return w;
}

}  // namespace cqs::tritmap
