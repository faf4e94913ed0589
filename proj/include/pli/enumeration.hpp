#pragma once

// Literal composition-sum evaluation of the PLI. Cost grows as C(n-1, m-1),
// so this exists to cross-check the dynamic-programming evaluator.

#include <cstdint>
#include <string>
#include <vector>

#include "pli/error.hpp"
#include "pli/profile.hpp"

namespace pli {

struct enumeration_result {
  double probability;
  std::uint64_t term_count;
};

inline constexpr std::uint64_t default_term_budget = 10'000'000;

// C(n, k) saturating at UINT64_MAX.
inline std::uint64_t binomial_saturating(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    c = c * (n - k + i) / i;
    if (c > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(c);
}

namespace detail {

// Walks every tuple (x_j..x_{m-1}) with total <= budget_left. `weight` is the
// product of p_i^{x_i} chosen so far.
inline void enumerate_compositions(std::span<const double> p, std::size_t j, std::size_t budget_left,
                                   double weight, double& sum, std::uint64_t& terms) {
  if (j + 1 == p.size()) {
    for (std::size_t x = 0; x <= budget_left; ++x) {
      sum += weight;
      ++terms;
      weight *= p[j];
    }
    return;
  }
  for (std::size_t x = 0; x <= budget_left; ++x) {
    enumerate_compositions(p, j + 1, budget_left - x, weight, sum, terms);
    weight *= p[j];
  }
}

}  // namespace detail

inline enumeration_result pli_enumeration_oracle(const dependence_profile& profile, std::size_t n,
                                                 std::uint64_t term_budget = default_term_budget) {
  const std::size_t m = profile.classes();
  if (n < m) throw validation_error("enumeration requires n >= m (n=" + std::to_string(n) + ", m=" + std::to_string(m) + ")");
  const std::uint64_t bound = binomial_saturating(n - 1, m - 1);
  if (bound > term_budget)
    throw resource_error("enumeration needs C(" + std::to_string(n - 1) + ", " + std::to_string(m - 1) +
                         ") = " + (bound == UINT64_MAX ? std::string(">2^64") : std::to_string(bound)) +
                         " terms, budget is " + std::to_string(term_budget));

  const auto p = profile.values();
  double base = 1.0;
  for (double v : p) base *= 1.0 - v;

  double sum = 0.0;
  std::uint64_t terms = 0;
  detail::enumerate_compositions(p, 0, n - m, 1.0, sum, terms);
  return {base * sum, terms};
}

}  // namespace pli
