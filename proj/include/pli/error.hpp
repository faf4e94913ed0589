#pragma once

#include <stdexcept>
#include <string>

namespace pli {

// Bad input: malformed profile, out-of-range probability, shape mismatch.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation would exceed its configured work budget.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical failure (singular system that cannot be recovered).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fewer than m independent votes: no exact weight vector exists.
class representational_deficiency : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

// Dataset or vote-dump file could not be parsed.
class ingestion_error : public validation_error {
 public:
  ingestion_error(const std::string& what, std::size_t line)
      : validation_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ingestion_error(const std::string& what) : validation_error(what), line_(0) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace pli
