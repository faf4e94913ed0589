#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

namespace pli::stream {

struct stream_instance {
  std::vector<double> features;
  std::size_t label = 0;
};

// Pull-based source of labeled instances.
class instance_stream {
 public:
  virtual ~instance_stream() = default;
  virtual std::optional<stream_instance> next() = 0;
  virtual std::size_t classes() const = 0;
  virtual std::size_t feature_count() const = 0;
};

// Replays a fixed instance list. Copies share the underlying instances.
class memory_stream final : public instance_stream {
 public:
  memory_stream(std::vector<stream_instance> instances, std::size_t classes, std::size_t features)
      : instances_(std::make_shared<const std::vector<stream_instance>>(std::move(instances))),
        classes_(classes),
        features_(features) {}

  std::optional<stream_instance> next() override {
    if (pos_ >= instances_->size()) return std::nullopt;
    return (*instances_)[pos_++];
  }
  std::size_t classes() const override { return classes_; }
  std::size_t feature_count() const override { return features_; }

  void rewind() noexcept { pos_ = 0; }
  std::size_t size() const noexcept { return instances_->size(); }
  const std::vector<stream_instance>& instances() const noexcept { return *instances_; }

 private:
  std::shared_ptr<const std::vector<stream_instance>> instances_;
  std::size_t classes_;
  std::size_t features_;
  std::size_t pos_ = 0;
};

}  // namespace pli::stream
