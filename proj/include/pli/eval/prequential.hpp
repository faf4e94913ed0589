#pragma once

// Interleaved test-then-train evaluation.

#include <cstdint>
#include <utility>
#include <vector>

#include "pli/error.hpp"
#include "pli/stream/instance.hpp"
#include "pli/vote_algebra.hpp"

namespace pli::eval {

struct prequential_record {
  std::uint64_t instances = 0;
  std::uint64_t correct = 0;
  double accuracy = 0.0;
  // (index of the last instance in the window, accuracy within the window)
  std::vector<std::pair<std::uint64_t, double>> windowed_accuracies;
};

inline constexpr std::size_t default_accuracy_window = 1000;

// Model must provide predict(features) -> {votes, predicted_class} and
// learn(instance, prediction, rng). Every vote matrix is handed to `sink`
// before the model trains on the instance.
template <typename Model, typename Rng, typename VoteSink>
prequential_record prequential_run(stream::instance_stream& stream, Model& model, std::size_t limit, Rng& rng,
                                   VoteSink&& sink, std::size_t window = default_accuracy_window) {
  if (limit == 0) throw validation_error("prequential limit must be positive");
  if (window == 0) throw validation_error("accuracy window must be positive");
  prequential_record rec;
  std::uint64_t window_correct = 0;
  std::uint64_t window_count = 0;
  while (rec.instances < limit) {
    auto inst = stream.next();
    if (!inst) break;
    const auto pred = model.predict(inst->features);
    const bool hit = pred.predicted_class == inst->label;
    ++rec.instances;
    if (hit) {
      ++rec.correct;
      ++window_correct;
    }
    ++window_count;
    sink(static_cast<const vote_matrix&>(pred.votes), *inst);
    model.learn(*inst, pred, rng);
    if (window_count == window) {
      rec.windowed_accuracies.emplace_back(rec.instances, static_cast<double>(window_correct) / static_cast<double>(window));
      window_correct = 0;
      window_count = 0;
    }
  }
  if (rec.instances == 0) throw validation_error("stream produced no instances");
  if (window_count > 0)
    rec.windowed_accuracies.emplace_back(rec.instances,
                                         static_cast<double>(window_correct) / static_cast<double>(window_count));
  rec.accuracy = static_cast<double>(rec.correct) / static_cast<double>(rec.instances);
  return rec;
}

template <typename Model, typename Rng>
prequential_record prequential_run(stream::instance_stream& stream, Model& model, std::size_t limit, Rng& rng) {
  return prequential_run(stream, model, limit, rng, [](const vote_matrix&, const stream::stream_instance&) {});
}

}  // namespace pli::eval
