#pragma once

#include <cmath>
#include <cstdlib>
#include <map>
#include <span>
#include <string>

#include "pli/error.hpp"

namespace pli::eval {

// Correlation is undefined when either input has zero variance.
class undefined_correlation : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

inline double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw validation_error("correlation inputs differ in length");
  if (x.size() < 2) throw validation_error("correlation needs at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw undefined_correlation("correlation undefined: an input is constant");
  const double r = sxy / std::sqrt(sxx * syy);
  return std::max(-1.0, std::min(1.0, r));
}

// Grid element closest to target; ties go to the smaller size.
inline std::size_t nearest_tested_size(double target, std::span<const std::size_t> grid) {
  if (grid.empty()) throw validation_error("size grid is empty");
  std::size_t best = grid[0];
  double best_gap = std::abs(static_cast<double>(best) - target);
  for (std::size_t g : grid) {
    const double gap = std::abs(static_cast<double>(g) - target);
    if (gap < best_gap || (gap == best_gap && g < best)) {
      best = g;
      best_gap = gap;
    }
  }
  return best;
}

inline double percent_of_max(const std::map<std::size_t, double>& accuracy_by_size, std::size_t size) {
  const auto it = accuracy_by_size.find(size);
  if (it == accuracy_by_size.end()) throw validation_error("no accuracy recorded for n=" + std::to_string(size));
  double best = 0.0;
  for (const auto& [n, acc] : accuracy_by_size) best = std::max(best, acc);
  if (!(best > 0.0)) throw validation_error("maximum accuracy must be positive");
  return 100.0 * it->second / best;
}

}  // namespace pli::eval
