#pragma once

// Incremental decision tree that splits a leaf once the Hoeffding bound says
// the best split beats the runner-up with high confidence. Numeric features
// are summarized per class by Gaussian estimators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "pli/stream/instance.hpp"
#include "pli/vote_algebra.hpp"

namespace pli::stream {

struct hoeffding_options {
  double grace_period = 200.0;
  double split_confidence = 1e-7;  // delta
  double tie_threshold = 0.05;     // tau
  std::size_t candidate_thresholds = 10;
  // A split must send at least this fraction of the weight to two branches.
  double min_branch_fraction = 0.01;
};

inline double hoeffding_bound(double range, double confidence, double n) {
  return std::sqrt(range * range * std::log(1.0 / confidence) / (2.0 * n));
}

inline double entropy(std::span<const double> dist) {
  double total = 0.0;
  for (double v : dist) total += v;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (double v : dist)
    if (v > 0.0) h -= (v / total) * std::log2(v / total);
  return h;
}

class gaussian_estimator {
 public:
  void add(double x) noexcept {
    weight_ += 1.0;
    const double delta = x - mean_;
    mean_ += delta / weight_;
    m2_ += delta * (x - mean_);
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }

  double weight() const noexcept { return weight_; }
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }
  double stddev() const noexcept { return weight_ > 1.0 ? std::sqrt(m2_ / (weight_ - 1.0)) : 0.0; }

  // Estimated weight of observations <= t.
  double weight_at_or_below(double t) const noexcept {
    if (weight_ == 0.0 || t < min_) return 0.0;
    if (t >= max_) return weight_;
    const double sd = stddev();
    if (sd <= 0.0) return t >= mean_ ? weight_ : 0.0;
    return weight_ * 0.5 * std::erfc(-(t - mean_) / (sd * std::numbers::sqrt2));
  }

 private:
  double weight_ = 0.0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = std::numeric_limits<double>::infinity();
  double max_ = -std::numeric_limits<double>::infinity();
};

class hoeffding_tree {
 public:
  hoeffding_tree(std::size_t classes, std::size_t features, hoeffding_options opts = {})
      : classes_(classes), features_(features), opts_(opts) {
    nodes_.push_back(node{});
    nodes_[0].leaf = new_leaf(std::vector<double>(classes_, 0.0));
  }

  void partial_fit(const stream_instance& inst) {
    const std::size_t id = leaf_index_for(inst.features);
    leaf_stats& leaf = leaves_[nodes_[id].leaf];
    leaf.class_weights[inst.label] += 1.0;
    for (std::size_t f = 0; f < features_; ++f) leaf.observers[f * classes_ + inst.label].add(inst.features[f]);
    leaf.seen_since_eval += 1.0;
    if (leaf.seen_since_eval >= opts_.grace_period) {
      leaf.seen_since_eval = 0.0;
      attempt_split(id);
    }
  }

  vote_vector predict_scores(std::span<const double> x) const {
    const auto& w = leaves_[nodes_[leaf_index_for(x)].leaf].class_weights;
    return normalize_vote_or_uniform(w);
  }

  std::size_t leaf_count() const noexcept { return live_leaves_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t classes() const noexcept { return classes_; }

 private:
  static constexpr std::uint32_t no_child = std::numeric_limits<std::uint32_t>::max();

  struct node {
    std::size_t feature = 0;
    double threshold = 0.0;
    std::uint32_t left = no_child;
    std::uint32_t right = no_child;
    std::size_t leaf = 0;
    bool is_leaf() const noexcept { return left == no_child; }
  };

  struct leaf_stats {
    std::vector<double> class_weights;
    std::vector<gaussian_estimator> observers;  // [feature * classes + class]
    double seen_since_eval = 0.0;
  };

  struct split_candidate {
    double merit = -std::numeric_limits<double>::infinity();
    std::size_t feature = 0;
    double threshold = 0.0;
    std::vector<double> left;
    std::vector<double> right;
  };

  std::size_t new_leaf(std::vector<double> weights) {
    leaves_.push_back({std::move(weights), std::vector<gaussian_estimator>(features_ * classes_), 0.0});
    ++live_leaves_;
    return leaves_.size() - 1;
  }

  std::size_t leaf_index_for(std::span<const double> x) const {
    std::size_t id = 0;
    while (!nodes_[id].is_leaf()) id = x[nodes_[id].feature] <= nodes_[id].threshold ? nodes_[id].left : nodes_[id].right;
    return id;
  }

  // Branch distributions come from the estimators alone: weight a leaf
  // inherited from its parent's split was never observed per feature.
  split_candidate best_split_for(const leaf_stats& leaf, std::size_t feature) const {
    split_candidate best;
    best.feature = feature;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    const auto* obs = &leaf.observers[feature * classes_];
    std::vector<double> observed(classes_);
    double total = 0.0;
    for (std::size_t c = 0; c < classes_; ++c) {
      observed[c] = obs[c].weight();
      total += observed[c];
      if (obs[c].weight() == 0.0) continue;
      lo = std::min(lo, obs[c].min());
      hi = std::max(hi, obs[c].max());
    }
    if (!(hi > lo)) return best;
    const double parent_entropy = entropy(observed);
    std::vector<double> left(classes_), right(classes_);
    const double step = (hi - lo) / static_cast<double>(opts_.candidate_thresholds + 1);
    for (std::size_t i = 1; i <= opts_.candidate_thresholds; ++i) {
      const double t = lo + step * static_cast<double>(i);
      double wl = 0.0;
      for (std::size_t c = 0; c < classes_; ++c) {
        left[c] = obs[c].weight_at_or_below(t);
        right[c] = observed[c] - left[c];
        if (right[c] < 0.0) right[c] = 0.0;
        wl += left[c];
      }
      const double wr = total - wl;
      if (wl < opts_.min_branch_fraction * total || wr < opts_.min_branch_fraction * total) continue;
      const double merit = parent_entropy - (wl / total) * entropy(left) - (wr / total) * entropy(right);
      if (merit > best.merit) {
        best.merit = merit;
        best.threshold = t;
        best.left = left;
        best.right = right;
      }
    }
    return best;
  }

  void attempt_split(std::size_t id) {
    const leaf_stats& leaf = leaves_[nodes_[id].leaf];
    std::size_t populated = 0;
    double total = 0.0;
    for (double w : leaf.class_weights) {
      if (w > 0.0) ++populated;
      total += w;
    }
    if (populated < 2) return;

    split_candidate best;
    double second = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < features_; ++f) {
      auto cand = best_split_for(leaf, f);
      if (cand.merit > best.merit) {
        second = std::max(second, best.merit);
        best = std::move(cand);
      } else {
        second = std::max(second, cand.merit);
      }
    }
    if (!(best.merit > 0.0)) return;
    // A lone valid candidate is compared against not splitting.
    if (second == -std::numeric_limits<double>::infinity()) second = 0.0;
    // Merit range covers only the classes present at this leaf.
    const double range = std::log2(static_cast<double>(std::max<std::size_t>(populated, 2)));
    const double eps = hoeffding_bound(range, opts_.split_confidence, total);
    if (best.merit - second > eps || eps < opts_.tie_threshold) split(id, std::move(best));
  }

  void split(std::size_t id, split_candidate cand) {
    const std::size_t old_leaf = nodes_[id].leaf;
    leaves_[old_leaf] = leaf_stats{};
    --live_leaves_;
    const std::size_t left_leaf = new_leaf(std::move(cand.left));
    const std::size_t right_leaf = new_leaf(std::move(cand.right));
    node l, r;
    l.leaf = left_leaf;
    r.leaf = right_leaf;
    nodes_.push_back(l);
    nodes_.push_back(r);
    nodes_[id].feature = cand.feature;
    nodes_[id].threshold = cand.threshold;
    nodes_[id].left = static_cast<std::uint32_t>(nodes_.size() - 2);
    nodes_[id].right = static_cast<std::uint32_t>(nodes_.size() - 1);
  }

  std::size_t classes_;
  std::size_t features_;
  hoeffding_options opts_;
  std::vector<node> nodes_;
  std::vector<leaf_stats> leaves_;
  std::size_t live_leaves_ = 0;
};

}  // namespace pli::stream
