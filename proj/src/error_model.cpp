#include "cqs/analysis/error_model.hpp"

#include <stdexcept>

namespace cqs::analysis {

std::uint64_t relaxation(const RelaxationModel& m) {
    if (m.threads < m.nodes || m.nodes < 1)
        throw std::invalid_argument("relaxation: need N >= S >= 1");
    return 4ull * m.k * m.nodes +
           static_cast<std::uint64_t>(m.threads - m.nodes) * m.b;
}

double epsilon_relaxed(const RelaxationModel& m) {
    return epsilon_relaxed_for(m.epsilon_c, relaxation(m), m.n);
}

double epsilon_relaxed_for(double epsilon_c, std::uint64_t r, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("epsilon_relaxed: n > 0 required");
    return epsilon_c +
           (static_cast<double>(r) / static_cast<double>(n)) * (1.0 - epsilon_c);
}

double epsilon_total(const RelaxationModel& m) {
    return epsilon_relaxed(m) + m.epsilon_prime;
}

}  // namespace cqs::analysis
