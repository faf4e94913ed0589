#pragma once

// Probability of obtaining m linearly independent votes from n classifiers,
// and the ensemble-size solvers built on it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pli/error.hpp"
#include "pli/profile.hpp"

namespace pli {

struct curve_point {
  std::size_t n;
  double pli;
};

using pli_curve = std::vector<curve_point>;

struct sizing_request {
  double threshold = 0.9999;
  std::size_t max_n = 4096;

  void validate() const {
    if (!(threshold > 0.0 && threshold < 1.0))
      throw validation_error("threshold T must satisfy 0 < T < 1, got " + std::to_string(threshold));
    if (max_n == 0) throw validation_error("max_n must be positive");
  }
};

namespace detail {

// Distribution over span dimension d = 0..m after t votes. State m absorbs.
class span_chain {
 public:
  explicit span_chain(const dependence_profile& profile)
      : profile_(&profile), q_(profile.classes() + 1, 0.0), next_(q_.size(), 0.0) {
    q_[0] = 1.0;
  }

  void step() {
    const std::size_t m = profile_->classes();
    std::fill(next_.begin(), next_.end(), 0.0);
    next_[m] = q_[m];
    for (std::size_t d = 0; d < m; ++d) {
      if (q_[d] == 0.0) continue;
      const double stay = profile_->at(d);
      next_[d] += q_[d] * stay;
      next_[d + 1] += q_[d] * (1.0 - stay);
    }
    q_.swap(next_);
    ++steps_;
  }

  std::size_t steps() const noexcept { return steps_; }
  double full_rank() const noexcept { return q_.back(); }

 private:
  const dependence_profile* profile_;
  std::vector<double> q_;
  std::vector<double> next_;
  std::size_t steps_ = 0;
};

// Running value of (1-p)^{m-1} * sum_{k=0}^{K} C(k+m-2, m-2) p^k with
// compensated summation. Each term is a negative-binomial mass, so the ratio
// update never overflows.
class uniform_series {
 public:
  uniform_series(double p, std::size_t classes) : p_(p), classes_(classes) {
    term_ = std::pow(1.0 - p, static_cast<double>(classes - 1));
  }

  // Adds the term for the current k and advances k.
  double add_next() {
    const double y = term_;
    const double t = sum_ + y;
    if (std::abs(sum_) >= std::abs(y))
      comp_ += (sum_ - t) + y;
    else
      comp_ += (y - t) + sum_;
    sum_ = t;
    const double kk = static_cast<double>(k_);
    const double ratio = (kk + static_cast<double>(classes_) - 1.0) / (kk + 1.0);
    term_ = term_ * ratio * p_;
    ++k_;
    return value();
  }

  double value() const noexcept { return std::clamp(sum_ + comp_, 0.0, 1.0); }

 private:
  double p_;
  std::size_t classes_;
  double term_;
  double sum_ = 0.0;
  double comp_ = 0.0;
  std::size_t k_ = 0;
};

inline void check_uniform_args(double p, std::size_t classes) {
  if (!(p >= 0.0 && p <= 1.0)) throw validation_error("p = " + std::to_string(p) + " is outside [0, 1]");
  if (classes < 2) throw validation_error("class count m must be >= 2");
}

}  // namespace detail

// Exact PLI by dynamic programming over span dimension; O(n*m).
inline double pli_exact(const dependence_profile& profile, std::size_t n) {
  detail::span_chain chain(profile);
  for (std::size_t t = 0; t < n; ++t) chain.step();
  return std::clamp(chain.full_rank(), 0.0, 1.0);
}

// PLI for every n in [first, last] in a single pass.
inline pli_curve pli_exact_curve(const dependence_profile& profile, std::size_t first, std::size_t last) {
  if (first > last) throw validation_error("empty n range");
  pli_curve out;
  out.reserve(last - first + 1);
  detail::span_chain chain(profile);
  while (chain.steps() < first) chain.step();
  for (std::size_t n = first;; ++n) {
    out.push_back({n, std::clamp(chain.full_rank(), 0.0, 1.0)});
    if (n == last) break;
    chain.step();
  }
  return out;
}

// PLI when every p_l equals p, via the binomial-weighted finite sum. Two
// classes use 1 - p^(n-1) directly.
inline double pli_uniform(double p, std::size_t classes, std::size_t n) {
  detail::check_uniform_args(p, classes);
  if (n < classes) return 0.0;
  if (classes == 2) return 1.0 - std::pow(p, static_cast<double>(n - 1));
  detail::uniform_series series(p, classes);
  double v = 0.0;
  for (std::size_t k = 0; k <= n - classes; ++k) v = series.add_next();
  return v;
}

inline pli_curve pli_uniform_curve(double p, std::size_t classes, std::size_t first, std::size_t last) {
  detail::check_uniform_args(p, classes);
  if (first > last) throw validation_error("empty n range");
  pli_curve out;
  out.reserve(last - first + 1);
  detail::uniform_series series(p, classes);
  double v = 0.0;
  for (std::size_t n = classes; n < first; ++n) v = series.add_next();
  for (std::size_t n = first; n <= last; ++n) {
    if (n >= classes) v = series.add_next();
    if (classes == 2 && n >= 2) v = 1.0 - std::pow(p, static_cast<double>(n - 1));
    out.push_back({n, n < classes ? 0.0 : v});
  }
  return out;
}

struct monte_carlo_estimate {
  double estimate;
  double std_error;
};

// Simulates the dimension-growth process `trials` times.
inline monte_carlo_estimate pli_monte_carlo(const dependence_profile& profile, std::size_t n,
                                            std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw validation_error("trials must be >= 1");
  const std::size_t m = profile.classes();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t hits = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::size_t d = 0;
    for (std::size_t step = 0; step < n && d < m; ++step) {
      if (d == 0 || unit(rng) >= profile.at(d)) ++d;
    }
    if (d == m) ++hits;
  }
  const double est = static_cast<double>(hits) / static_cast<double>(trials);
  return {est, std::sqrt(est * (1.0 - est) / static_cast<double>(trials))};
}

// Smallest n with pli_exact >= T; nullopt when no n <= max_n qualifies.
inline std::optional<std::size_t> solve_inc(const dependence_profile& profile, const sizing_request& req) {
  req.validate();
  if (profile.has_certain_dependence()) return std::nullopt;
  detail::span_chain chain(profile);
  while (chain.steps() < req.max_n) {
    chain.step();
    if (chain.full_rank() >= req.threshold) return chain.steps();
  }
  return std::nullopt;
}

// Smallest n with pli_uniform(p, m, n) >= T.
inline std::optional<std::size_t> solve_sinc(double p, std::size_t classes, const sizing_request& req) {
  detail::check_uniform_args(p, classes);
  req.validate();
  if (p >= 1.0) return std::nullopt;
  detail::uniform_series series(p, classes);
  for (std::size_t n = classes; n <= req.max_n; ++n) {
    if (series.add_next() >= req.threshold) return n;
  }
  return std::nullopt;
}

}  // namespace pli
