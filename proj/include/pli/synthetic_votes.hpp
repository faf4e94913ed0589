#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "pli/profile.hpp"
#include "pli/vote_algebra.hpp"

namespace pli {

// Draws vote matrices whose rank growth follows a known dependence profile:
// the i-th vote is dependent on the current d-dimensional span with
// probability p_d, exactly. Dependent votes are random convex combinations
// of the independent votes so far; independent votes put half their mass on
// a fresh class and stay normalized.
class branching_vote_source {
 public:
  branching_vote_source(dependence_profile profile, std::size_t ensemble_size, std::uint64_t seed)
      : profile_(std::move(profile)), n_(ensemble_size), rng_(seed) {}

  vote_matrix next() {
    const std::size_t m = profile_.classes();
    std::vector<std::size_t> classes(m);
    for (std::size_t j = 0; j < m; ++j) classes[j] = j;
    std::shuffle(classes.begin(), classes.end(), rng_);

    vote_matrix out;
    std::vector<std::vector<double>> independent;
    std::vector<double> row(m);
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t d = independent.size();
      const bool dependent = d == m || (d > 0 && unit_(rng_) < profile_.at(d));
      if (dependent) {
        mix(independent, row);
      } else {
        if (d == 0) {
          std::fill(row.begin(), row.end(), 0.0);
        } else {
          mix(independent, row);
          for (double& v : row) v *= 0.5;
        }
        row[classes[d]] += d == 0 ? 1.0 : 0.5;
        independent.push_back(row);
      }
      out.append_row(row);
    }
    return out;
  }

  const dependence_profile& profile() const noexcept { return profile_; }
  std::size_t ensemble_size() const noexcept { return n_; }

 private:
  void mix(const std::vector<std::vector<double>>& basis, std::vector<double>& row) {
    std::fill(row.begin(), row.end(), 0.0);
    double total = 0.0;
    std::vector<double> w(basis.size());
    for (double& x : w) {
      x = exp_(rng_) + 1e-3;
      total += x;
    }
    for (std::size_t b = 0; b < basis.size(); ++b)
      for (std::size_t j = 0; j < row.size(); ++j) row[j] += (w[b] / total) * basis[b][j];
  }

  dependence_profile profile_;
  std::size_t n_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::exponential_distribution<double> exp_{1.0};
};

}  // namespace pli
