#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "pli/error.hpp"

namespace pli {

inline constexpr double default_rank_tolerance = 1e-9;

class degenerate_vote : public validation_error {
 public:
  using validation_error::validation_error;
};

// Dense row-major matrix. A vote matrix has one row per classifier and one
// column per class.
class dense_matrix {
 public:
  dense_matrix() = default;
  dense_matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}
  dense_matrix(std::initializer_list<std::initializer_list<double>> rows) {
    for (const auto& r : rows) append_row(std::vector<double>(r));
  }

  static dense_matrix from_rows(const std::vector<std::vector<double>>& rows) {
    dense_matrix out;
    for (const auto& r : rows) out.append_row(r);
    return out;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0; }

  double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

  void append_row(std::span<const double> values) {
    if (rows_ == 0 && cols_ == 0) cols_ = values.size();
    if (values.size() != cols_)
      throw validation_error("row width " + std::to_string(values.size()) + " does not match " +
                             std::to_string(cols_));
    data_.insert(data_.end(), values.begin(), values.end());
    ++rows_;
  }
  void append_row(const std::vector<double>& values) { append_row(std::span<const double>(values)); }

  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

  friend bool operator==(const dense_matrix&, const dense_matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using vote_matrix = dense_matrix;
using weight_vector = std::vector<double>;

// Non-negative class scores summing to one.
class vote_vector {
 public:
  vote_vector() = default;

  static vote_vector from_normalized(std::vector<double> scores) {
    double s = 0.0;
    for (double v : scores) {
      if (!(v >= 0.0)) throw validation_error("vote scores must be non-negative");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-9) throw validation_error("vote scores sum to " + std::to_string(s) + ", not 1");
    vote_vector out;
    out.scores_ = std::move(scores);
    return out;
  }

  static vote_vector uniform(std::size_t classes) {
    vote_vector out;
    out.scores_.assign(classes, 1.0 / static_cast<double>(classes));
    return out;
  }

  static vote_vector one_hot(std::size_t classes, std::size_t index) {
    vote_vector out;
    out.scores_.assign(classes, 0.0);
    out.scores_.at(index) = 1.0;
    return out;
  }

  std::size_t size() const noexcept { return scores_.size(); }
  double operator[](std::size_t i) const noexcept { return scores_[i]; }
  std::span<const double> scores() const noexcept { return scores_; }
  operator std::span<const double>() const noexcept { return scores_; }

 private:
  std::vector<double> scores_;
};

struct ideal_vector {
  std::size_t true_class;
  std::size_t classes;

  double operator[](std::size_t j) const noexcept { return j == true_class ? 1.0 : 0.0; }
};

// Index of the largest entry; ties go to the lowest index.
inline std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

inline vote_vector normalize_vote(std::span<const double> raw) {
  if (raw.size() < 2) throw validation_error("a vote needs at least 2 classes");
  double sum = 0.0;
  for (double v : raw) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw validation_error("raw vote scores must be finite and non-negative");
    sum += v;
  }
  if (sum <= 0.0) throw degenerate_vote("all-zero vote cannot be normalized");
  std::vector<double> out(raw.begin(), raw.end());
  for (double& v : out) v /= sum;
  return vote_vector::from_normalized(std::move(out));
}

// Same as normalize_vote, but an all-zero input becomes the uniform vote.
inline vote_vector normalize_vote_or_uniform(std::span<const double> raw) {
  try {
    return normalize_vote(raw);
  } catch (const degenerate_vote&) {
    return vote_vector::uniform(raw.size());
  }
}

// Row space built one row at a time. Stored rows are kept reduced against
// earlier pivots so a new row is tested in O(rank * cols).
class incremental_basis {
 public:
  explicit incremental_basis(std::size_t cols, double tol = default_rank_tolerance) : cols_(cols), tol_(tol) {
    scratch_.resize(cols);
  }

  // Returns true when `row` raised the rank.
  bool insert(std::span<const double> row) {
    if (row.size() != cols_) throw validation_error("row width does not match basis width");
    for (double v : row) scale_ = std::max(scale_, std::abs(v));
    std::copy(row.begin(), row.end(), scratch_.begin());
    for (std::size_t b = 0; b < pivots_.size(); ++b) {
      const std::size_t pc = pivots_[b];
      const double f = scratch_[pc];
      if (f == 0.0) continue;
      const double* basis_row = basis_.data() + b * cols_;
      for (std::size_t c = 0; c < cols_; ++c) scratch_[c] -= f * basis_row[c];
      scratch_[pc] = 0.0;
    }
    std::size_t best = 0;
    double best_abs = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) {
      if (std::abs(scratch_[c]) > best_abs) {
        best_abs = std::abs(scratch_[c]);
        best = c;
      }
    }
    if (!(best_abs > tol_ * scale_)) return false;
    const double piv = scratch_[best];
    for (double& v : scratch_) v /= piv;
    scratch_[best] = 1.0;
    // Keep earlier rows clear of the new pivot column.
    for (std::size_t b = 0; b < pivots_.size(); ++b) {
      double* basis_row = basis_.data() + b * cols_;
      const double f = basis_row[best];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < cols_; ++c) basis_row[c] -= f * scratch_[c];
      basis_row[best] = 0.0;
    }
    basis_.insert(basis_.end(), scratch_.begin(), scratch_.end());
    pivots_.push_back(best);
    return true;
  }

  std::size_t rank() const noexcept { return pivots_.size(); }
  std::size_t cols() const noexcept { return cols_; }

  void clear() noexcept {
    basis_.clear();
    pivots_.clear();
    scale_ = 0.0;
  }

 private:
  std::size_t cols_;
  double tol_;
  double scale_ = 0.0;
  std::vector<double> basis_;
  std::vector<std::size_t> pivots_;
  std::vector<double> scratch_;
};

// Rank by row elimination with partial pivoting. A pivot counts when its
// magnitude exceeds tol times the largest absolute entry of the input.
inline std::size_t matrix_rank(const dense_matrix& matrix, double tol = default_rank_tolerance) {
  if (matrix.empty()) throw validation_error("rank of an empty matrix");
  const double threshold = tol * matrix.max_abs();
  dense_matrix a = matrix;
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < rows; ++c) {
    std::size_t piv = rank;
    for (std::size_t r = rank + 1; r < rows; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    if (!(std::abs(a(piv, c)) > threshold)) continue;
    if (piv != rank)
      for (std::size_t k = 0; k < cols; ++k) std::swap(a(piv, k), a(rank, k));
    for (std::size_t r = rank + 1; r < rows; ++r) {
      const double f = a(r, c) / a(rank, c);
      if (f == 0.0) continue;
      for (std::size_t k = c; k < cols; ++k) a(r, k) -= f * a(rank, k);
    }
    ++rank;
  }
  return rank;
}

// Solves the square system A x = b by Gaussian elimination with partial
// pivoting plus one refinement step. Throws numerical_error when a pivot
// falls below tol * max|A|.
inline std::vector<double> solve_dense(const dense_matrix& lhs, std::span<const double> rhs,
                                       double tol = 1e-14) {
  const std::size_t n = lhs.rows();
  if (lhs.cols() != n || rhs.size() != n) throw validation_error("solve_dense needs a square system");
  const double threshold = tol * lhs.max_abs();
  dense_matrix lu = lhs;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(lu(r, c)) > std::abs(lu(piv, c))) piv = r;
    if (!(std::abs(lu(piv, c)) > threshold)) throw numerical_error("singular system in column " + std::to_string(c));
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(lu(piv, k), lu(c, k));
      std::swap(perm[piv], perm[c]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = lu(r, c) / lu(c, c);
      lu(r, c) = f;
      for (std::size_t k = c + 1; k < n; ++k) lu(r, k) -= f * lu(c, k);
    }
  }
  auto back_solve = [&](std::span<const double> b) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[perm[i]];
      for (std::size_t k = 0; k < i; ++k) s -= lu(i, k) * y[k];
      y[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = y[i];
      for (std::size_t k = i + 1; k < n; ++k) s -= lu(i, k) * y[k];
      y[i] = s / lu(i, i);
    }
    return y;
  };
  std::vector<double> x = back_solve(rhs);
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rhs[i];
    for (std::size_t k = 0; k < n; ++k) s -= lhs(i, k) * x[k];
    residual[i] = s;
  }
  const std::vector<double> dx = back_solve(residual);
  for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];
  return x;
}

// Weights W (sum 1) with sum_i W_i S_i equal to the ideal vector. The first m
// independent rows in row order carry the solution; every other row gets 0.
inline weight_vector exact_ideal_weights(const vote_matrix& votes, const ideal_vector& ideal,
                                         double tol = default_rank_tolerance) {
  const std::size_t m = votes.cols();
  if (ideal.classes != m || ideal.true_class >= m) throw validation_error("ideal vector does not match vote width");
  if (votes.rows() < m)
    throw representational_deficiency("need at least m=" + std::to_string(m) + " votes, got " +
                                      std::to_string(votes.rows()));
  incremental_basis basis(m, tol);
  std::vector<std::size_t> chosen;
  for (std::size_t r = 0; r < votes.rows() && chosen.size() < m; ++r)
    if (basis.insert(votes.row(r))) chosen.push_back(r);
  if (chosen.size() < m)
    throw representational_deficiency("votes span only " + std::to_string(chosen.size()) + " of " +
                                      std::to_string(m) + " dimensions");

  // Columns of the system are the chosen vote vectors.
  dense_matrix system(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) system(j, i) = votes(chosen[i], j);
  std::vector<double> target(m);
  for (std::size_t j = 0; j < m; ++j) target[j] = ideal[j];

  std::vector<double> solved;
  try {
    solved = solve_dense(system, target);
  } catch (const numerical_error& e) {
    throw representational_deficiency(std::string("independent votes are numerically singular: ") + e.what());
  }
  weight_vector weights(votes.rows(), 0.0);
  for (std::size_t i = 0; i < m; ++i) weights[chosen[i]] = solved[i];
  return weights;
}

struct combined_vote {
  std::vector<double> aggregate;
  std::size_t predicted_class;
};

inline combined_vote combine_votes(const vote_matrix& votes, std::span<const double> weights) {
  if (weights.size() != votes.rows())
    throw validation_error("weight count " + std::to_string(weights.size()) + " does not match " +
                           std::to_string(votes.rows()) + " votes");
  std::vector<double> agg(votes.cols(), 0.0);
  for (std::size_t i = 0; i < votes.rows(); ++i) {
    const auto r = votes.row(i);
    for (std::size_t j = 0; j < agg.size(); ++j) agg[j] += weights[i] * r[j];
  }
  const std::size_t cls = argmax(agg);
  return {std::move(agg), cls};
}

}  // namespace pli
