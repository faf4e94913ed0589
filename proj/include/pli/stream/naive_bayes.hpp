#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "pli/stream/instance.hpp"
#include "pli/vote_algebra.hpp"

namespace pli::stream {

// Welford running mean and variance.
struct running_moments {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    count += 1.0;
    const double delta = x - mean;
    mean += delta / count;
    m2 += delta * (x - mean);
  }

  double variance() const noexcept { return count > 1.0 ? m2 / (count - 1.0) : 0.0; }
};

// Incremental Gaussian naive Bayes.
class naive_bayes {
 public:
  static constexpr double variance_floor = 1e-9;

  naive_bayes(std::size_t classes, std::size_t features)
      : classes_(classes), features_(features), class_counts_(classes, 0.0), moments_(classes * features) {}

  void partial_fit(const stream_instance& inst) {
    class_counts_[inst.label] += 1.0;
    total_ += 1.0;
    auto* row = &moments_[inst.label * features_];
    for (std::size_t f = 0; f < features_; ++f) row[f].add(inst.features[f]);
  }

  vote_vector predict_scores(std::span<const double> x) const {
    if (total_ == 0.0) return vote_vector::uniform(classes_);
    std::vector<double> log_post(classes_, -std::numeric_limits<double>::infinity());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes_; ++c) {
      if (class_counts_[c] == 0.0) continue;
      double lp = std::log(class_counts_[c] / total_);
      const auto* row = &moments_[c * features_];
      for (std::size_t f = 0; f < features_; ++f) {
        const double var = std::max(row[f].variance(), variance_floor);
        const double d = x[f] - row[f].mean;
        lp -= 0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
      }
      log_post[c] = lp;
      best = std::max(best, lp);
    }
    std::vector<double> post(classes_, 0.0);
    for (std::size_t c = 0; c < classes_; ++c)
      if (class_counts_[c] > 0.0) post[c] = std::exp(log_post[c] - best);
    return normalize_vote_or_uniform(post);
  }

  std::size_t classes() const noexcept { return classes_; }

 private:
  std::size_t classes_;
  std::size_t features_;
  std::vector<double> class_counts_;
  double total_ = 0.0;
  std::vector<running_moments> moments_;
};

}  // namespace pli::stream
