#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pli/error.hpp"
#include "pli/stream/instance.hpp"

namespace pli::stream {

struct rbf_config {
  std::size_t classes = 4;
  std::size_t features = 20;
  std::size_t centroids = 50;
  std::uint64_t seed = 1;
  std::size_t instance_count = 100'000;
  // Centroid coordinates are drawn uniformly from [0, centroid_box).
  double centroid_box = 24.0;
  // Standard deviation of the offset along every feature.
  double offset_scale = 1.0;

  void validate() const {
    if (classes < 2) throw validation_error("RBF stream needs at least 2 classes");
    if (features == 0 || centroids == 0 || instance_count == 0)
      throw validation_error("RBF feature, centroid and instance counts must be positive");
    if (centroids < classes)
      throw validation_error("RBF stream needs at least one centroid per class (" + std::to_string(centroids) +
                             " < " + std::to_string(classes) + ")");
    if (!(centroid_box > 0.0) || !(offset_scale > 0.0)) throw validation_error("RBF scales must be positive");
  }
};

// Random radial-basis-function stream: each instance picks a centroid
// uniformly and adds an isotropic Gaussian offset. Centroid classes are
// assigned round-robin.
class rbf_generator final : public instance_stream {
 public:
  explicit rbf_generator(rbf_config config) : config_(config), rng_(config.seed) {
    config_.validate();
    std::uniform_real_distribution<double> coord(0.0, config_.centroid_box);
    centers_.resize(config_.centroids * config_.features);
    for (double& c : centers_) c = coord(rng_);
  }

  std::optional<stream_instance> next() override {
    if (emitted_ >= config_.instance_count) return std::nullopt;
    ++emitted_;
    const std::size_t k = pick_(rng_);
    stream_instance out;
    out.label = centroid_class(k);
    out.features.resize(config_.features);
    for (std::size_t f = 0; f < config_.features; ++f)
      out.features[f] = centers_[k * config_.features + f] + config_.offset_scale * gauss_(rng_);
    return out;
  }

  std::size_t classes() const override { return config_.classes; }
  std::size_t feature_count() const override { return config_.features; }

  std::size_t centroid_class(std::size_t centroid) const noexcept { return centroid % config_.classes; }
  const rbf_config& config() const noexcept { return config_; }

 private:
  rbf_config config_;
  std::mt19937_64 rng_;
  std::vector<double> centers_;
  std::uniform_int_distribution<std::size_t> pick_{0, config_.centroids - 1};
  std::normal_distribution<double> gauss_{0.0, 1.0};
  std::size_t emitted_ = 0;
};

}  // namespace pli::stream
