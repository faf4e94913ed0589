#pragma once

#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pli/error.hpp"

namespace pli {

// Probabilities p_1..p_{m-1}: p_l is the chance that a new vote falls inside
// the span of l existing independent votes. Index l-1 holds p_l.
class dependence_profile {
 public:
  dependence_profile(std::size_t classes, std::vector<double> p) : classes_(classes), p_(std::move(p)) {
    if (classes_ < 2) throw validation_error("class count m must be >= 2, got " + std::to_string(classes_));
    if (p_.size() != classes_ - 1)
      throw validation_error("profile for m=" + std::to_string(classes_) + " needs " +
                             std::to_string(classes_ - 1) + " entries, got " + std::to_string(p_.size()));
    for (std::size_t i = 0; i < p_.size(); ++i) {
      if (!(p_[i] >= 0.0 && p_[i] <= 1.0))
        throw validation_error("p_" + std::to_string(i + 1) + " = " + std::to_string(p_[i]) +
                               " is outside [0, 1]");
    }
  }

  static dependence_profile uniform(std::size_t classes, double p) {
    if (classes < 2) throw validation_error("class count m must be >= 2");
    return dependence_profile(classes, std::vector<double>(classes - 1, p));
  }

  std::size_t classes() const noexcept { return classes_; }

  // p_l for l in [1, m-1]; p_0 is 0 because a normalized vote is never zero.
  double at(std::size_t l) const noexcept { return l == 0 ? 0.0 : p_[l - 1]; }

  std::span<const double> values() const noexcept { return p_; }

  bool has_certain_dependence() const noexcept {
    for (double v : p_)
      if (v >= 1.0) return true;
    return false;
  }

  double mean() const noexcept { return std::accumulate(p_.begin(), p_.end(), 0.0) / static_cast<double>(p_.size()); }

  friend bool operator==(const dependence_profile&, const dependence_profile&) = default;

 private:
  std::size_t classes_;
  std::vector<double> p_;
};

}  // namespace pli
