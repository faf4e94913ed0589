#pragma once

// Online ensembles over a homogeneous base learner. Members are trained by
// online bagging (each instance is replayed k ~ Poisson(lambda) times per
// member). Votes are combined either by unweighted majority over member
// argmax votes, or by geometric weights fitted by least squares over a
// sliding window of recent (votes, true class) pairs.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pli/error.hpp"
#include "pli/stream/instance.hpp"
#include "pli/vote_algebra.hpp"

namespace pli::stream {

template <typename L>
concept base_learner = requires(L learner, const L& clearner, const stream_instance& inst, std::span<const double> x) {
  learner.partial_fit(inst);
  { clearner.predict_scores(x) } -> std::convertible_to<vote_vector>;
};

enum class combiner { majority, geometric };

inline std::string to_string(combiner c) { return c == combiner::majority ? "ozabag" : "goowe"; }

struct ensemble_options {
  combiner mode = combiner::majority;
  double poisson_lambda = 1.0;
  std::size_t window_capacity = 100;
  double ridge = 1e-8;
};

struct ensemble_prediction {
  vote_matrix votes;
  std::size_t predicted_class = 0;
};

// Fixed-capacity FIFO of (vote matrix, true class) with the normal-equation
// sums A_ij = sum_k <S_i, S_j> and d_i = sum_k S_i[o_k] kept current.
class vote_window {
 public:
  vote_window(std::size_t members, std::size_t capacity)
      : members_(members), capacity_(capacity), gram_(members, members), target_(members, 0.0) {
    if (capacity_ == 0) throw validation_error("window capacity must be positive");
  }

  void push(const vote_matrix& votes, std::size_t true_class) {
    if (entries_.size() < capacity_) {
      entries_.push_back({votes, true_class});
      accumulate(entries_.back(), 1.0);
    } else {
      accumulate(entries_[head_], -1.0);
      entries_[head_] = {votes, true_class};
      accumulate(entries_[head_], 1.0);
      head_ = (head_ + 1) % capacity_;
      // Rebuild once per full cycle so add/subtract drift stays bounded.
      if (head_ == 0) rebuild();
    }
  }

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const dense_matrix& gram() const noexcept { return gram_; }
  const std::vector<double>& target() const noexcept { return target_; }

 private:
  struct entry {
    vote_matrix votes;
    std::size_t true_class;
  };

  void accumulate(const entry& e, double sign) {
    for (std::size_t i = 0; i < members_; ++i) {
      const auto si = e.votes.row(i);
      target_[i] += sign * si[e.true_class];
      for (std::size_t j = i; j < members_; ++j) {
        const auto sj = e.votes.row(j);
        double dot = 0.0;
        for (std::size_t c = 0; c < si.size(); ++c) dot += si[c] * sj[c];
        gram_(i, j) += sign * dot;
        if (j != i) gram_(j, i) = gram_(i, j);
      }
    }
  }

  void rebuild() {
    gram_ = dense_matrix(members_, members_);
    std::fill(target_.begin(), target_.end(), 0.0);
    for (const auto& e : entries_) accumulate(e, 1.0);
  }

  std::size_t members_;
  std::size_t capacity_;
  std::vector<entry> entries_;
  std::size_t head_ = 0;
  dense_matrix gram_;
  std::vector<double> target_;
};

template <base_learner Learner>
class ensemble_model {
 public:
  ensemble_model(std::size_t size, const Learner& prototype, std::size_t classes, ensemble_options opts = {})
      : classes_(classes),
        opts_(opts),
        members_(size, prototype),
        weights_(size, size == 0 ? 0.0 : 1.0 / static_cast<double>(size)),
        window_(size, opts.window_capacity) {
    if (size == 0) throw validation_error("ensemble needs at least one member");
    if (!(opts_.poisson_lambda >= 0.0)) throw validation_error("Poisson lambda must be non-negative");
  }

  // Collects every member's vote and combines them.
  ensemble_prediction predict(std::span<const double> features) const {
    ensemble_prediction out;
    for (const auto& m : members_) out.votes.append_row(m.predict_scores(features).scores());
    if (opts_.mode == combiner::majority) {
      std::vector<double> tally(classes_, 0.0);
      for (std::size_t i = 0; i < out.votes.rows(); ++i) tally[argmax(out.votes.row(i))] += 1.0;
      out.predicted_class = argmax(tally);
    } else {
      out.predicted_class = combine_votes(out.votes, weights_).predicted_class;
    }
    return out;
  }

  // Trains each member k ~ Poisson(lambda) times on the instance.
  template <typename Rng>
  void oza_update(const stream_instance& inst, Rng& rng) {
    std::poisson_distribution<int> poisson(opts_.poisson_lambda);
    for (auto& m : members_) {
      const int k = opts_.poisson_lambda > 0.0 ? poisson(rng) : 0;
      for (int r = 0; r < k; ++r) m.partial_fit(inst);
      training_events_ += static_cast<std::uint64_t>(k);
    }
  }

  // Adds the instance's pre-training votes to the window and refits weights.
  void observe(const vote_matrix& votes, std::size_t true_class) {
    window_.push(votes, true_class);
    goowe_update_weights();
  }

  // Least-squares geometric weights over the window. Keeps the previous
  // weights when the ridge-regularized system is still singular.
  const weight_vector& goowe_update_weights() {
    if (window_.empty()) throw validation_error("weight window is empty");
    dense_matrix lhs = window_.gram();
    for (std::size_t i = 0; i < lhs.rows(); ++i) lhs(i, i) += opts_.ridge;
    try {
      auto w = solve_dense(lhs, window_.target());
      bool finite = true;
      for (double x : w) finite = finite && std::isfinite(x);
      if (finite)
        weights_ = std::move(w);
      else
        ++weight_fallbacks_;
    } catch (const numerical_error&) {
      ++weight_fallbacks_;
    }
    return weights_;
  }

  // Prequential training step: geometric mode refits weights from the votes
  // that were just used to predict, then every member is bagged.
  template <typename Rng>
  void learn(const stream_instance& inst, const ensemble_prediction& last, Rng& rng) {
    if (opts_.mode == combiner::geometric) observe(last.votes, inst.label);
    oza_update(inst, rng);
  }

  std::size_t size() const noexcept { return members_.size(); }
  std::size_t classes() const noexcept { return classes_; }
  combiner mode() const noexcept { return opts_.mode; }
  const weight_vector& weights() const noexcept { return weights_; }
  const std::vector<Learner>& members() const noexcept { return members_; }
  std::vector<Learner>& members() noexcept { return members_; }
  std::uint64_t training_events() const noexcept { return training_events_; }
  std::uint64_t weight_fallbacks() const noexcept { return weight_fallbacks_; }
  const vote_window& window() const noexcept { return window_; }

 private:
  std::size_t classes_;
  ensemble_options opts_;
  std::vector<Learner> members_;
  weight_vector weights_;
  vote_window window_;
  std::uint64_t training_events_ = 0;
  std::uint64_t weight_fallbacks_ = 0;
};

}  // namespace pli::stream
