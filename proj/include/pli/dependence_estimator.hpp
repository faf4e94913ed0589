#pragma once

// Empirical estimation of the dependence profile from per-instance vote
// matrices: each matrix is replayed row by row, and every row appended to a
// span of dimension d in [1, m) counts as one attempt at d, and as a
// dependence event when the rank does not grow.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "pli/error.hpp"
#include "pli/profile.hpp"
#include "pli/vote_algebra.hpp"

namespace pli {

// Index d-1 holds the counts for span dimension d (d = 1..m-1).
struct rank_counters {
  std::size_t classes = 0;
  std::vector<std::uint64_t> dependent;
  std::vector<std::uint64_t> total;

  rank_counters() = default;
  explicit rank_counters(std::size_t m) : classes(m), dependent(m - 1, 0), total(m - 1, 0) {
    if (m < 2) throw validation_error("class count m must be >= 2");
  }

  rank_counters& operator+=(const rank_counters& other) {
    if (other.classes != classes) throw validation_error("cannot merge counters with different m");
    for (std::size_t i = 0; i < total.size(); ++i) {
      dependent[i] += other.dependent[i];
      total[i] += other.total[i];
    }
    return *this;
  }

  friend bool operator==(const rank_counters&, const rank_counters&) = default;
};

struct estimator_options {
  double tolerance = default_rank_tolerance;
  // Replay rows in a random order per instance instead of ensemble order.
  bool shuffle_rows = false;
  std::uint64_t shuffle_seed = 0;
};

// Replays one instance's votes; returns true when the span reached m.
inline bool update_counters(rank_counters& counters, const vote_matrix& votes,
                            double tol = default_rank_tolerance, std::span<const std::size_t> order = {}) {
  const std::size_t m = counters.classes;
  if (votes.cols() != m)
    throw validation_error("vote width " + std::to_string(votes.cols()) + " does not match m=" + std::to_string(m));
  incremental_basis basis(m, tol);
  const std::size_t rows = votes.rows();
  for (std::size_t i = 0; i < rows; ++i) {
    const std::size_t d = basis.rank();
    const bool grew = basis.insert(votes.row(order.empty() ? i : order[i]));
    if (d >= 1) {
      ++counters.total[d - 1];
      if (!grew) ++counters.dependent[d - 1];
    }
    if (basis.rank() == m) return true;
  }
  return false;
}

// Dependent/total per dimension; dimensions never attempted yield 1.0.
inline dependence_profile finalize_p(const rank_counters& counters) {
  std::vector<double> p(counters.classes - 1, 1.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (counters.dependent[i] > counters.total[i]) throw validation_error("dependent count exceeds total");
    if (counters.total[i] > 0)
      p[i] = static_cast<double>(counters.dependent[i]) / static_cast<double>(counters.total[i]);
  }
  return dependence_profile(counters.classes, std::move(p));
}

struct estimation_report {
  dependence_profile profile;
  rank_counters counters;
  std::uint64_t instances_seen = 0;
  std::uint64_t full_rank_instances = 0;

  double full_rank_fraction() const noexcept {
    return instances_seen == 0 ? 0.0 : static_cast<double>(full_rank_instances) / static_cast<double>(instances_seen);
  }
};

// Streaming accumulator; feed matrices with add(), read with report().
class dependence_estimator {
 public:
  explicit dependence_estimator(std::size_t classes, estimator_options opts = {})
      : counters_(classes), opts_(opts), rng_(opts.shuffle_seed) {}

  void add(const vote_matrix& votes) {
    bool full = false;
    if (opts_.shuffle_rows) {
      order_.resize(votes.rows());
      std::iota(order_.begin(), order_.end(), std::size_t{0});
      std::shuffle(order_.begin(), order_.end(), rng_);
      full = update_counters(counters_, votes, opts_.tolerance, order_);
    } else {
      full = update_counters(counters_, votes, opts_.tolerance);
    }
    ++instances_;
    if (full) ++full_rank_;
  }

  void merge(const dependence_estimator& other) {
    counters_ += other.counters_;
    instances_ += other.instances_;
    full_rank_ += other.full_rank_;
  }

  std::uint64_t instances_seen() const noexcept { return instances_; }
  const rank_counters& counters() const noexcept { return counters_; }

  estimation_report report() const {
    if (instances_ == 0) throw validation_error("no vote matrices were observed");
    return {finalize_p(counters_), counters_, instances_, full_rank_};
  }

 private:
  rank_counters counters_;
  estimator_options opts_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> order_;
  std::uint64_t instances_ = 0;
  std::uint64_t full_rank_ = 0;
};

template <typename Range>
estimation_report estimate_p(const Range& instance_votes, estimator_options opts = {}) {
  auto it = std::begin(instance_votes);
  if (it == std::end(instance_votes)) throw validation_error("vote stream is empty");
  dependence_estimator est(static_cast<const vote_matrix&>(*it).cols(), opts);
  for (; it != std::end(instance_votes); ++it) est.add(*it);
  return est.report();
}

}  // namespace pli
