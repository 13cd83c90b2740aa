#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hessmc {

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorCategory {
  invalid_argument = 2,
  numerical = 3,
  io = 4,
  config = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class NotPositiveDefinite : public Error {
 public:
  explicit NotPositiveDefinite(std::size_t index)
      : Error(ErrorCategory::numerical,
              "matrix is not positive definite (pivot " +
                  std::to_string(index) + ")"),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class ConvergenceFailure : public Error {
 public:
  explicit ConvergenceFailure(const std::string& what)
      : Error(ErrorCategory::numerical, what) {}
};

class NonPositiveParameter : public Error {
 public:
  explicit NonPositiveParameter(const std::string& name)
      : Error(ErrorCategory::invalid_argument,
              "parameter '" + name + "' must be positive") {}
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error(ErrorCategory::invalid_argument,
              "dimension mismatch: expected " + std::to_string(expected) +
                  ", got " + std::to_string(got)) {}
};

class OutOfSupport : public Error {
 public:
  explicit OutOfSupport(std::size_t index)
      : Error(ErrorCategory::invalid_argument,
              "point outside the target support at component " +
                  std::to_string(index)),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class ForwardSolveFailure : public Error {
 public:
  explicit ForwardSolveFailure(std::size_t step)
      : Error(ErrorCategory::numerical,
              "forward linear solve failed at time step " +
                  std::to_string(step)),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class PointOutsideDomain : public Error {
 public:
  explicit PointOutsideDomain(std::size_t index)
      : Error(ErrorCategory::invalid_argument,
              "observation point " + std::to_string(index) +
                  " lies outside the domain"),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

class ModeUnsupported : public Error {
 public:
  explicit ModeUnsupported(const std::string& what)
      : Error(ErrorCategory::invalid_argument, what) {}
};

class HessianUnavailable : public Error {
 public:
  explicit HessianUnavailable(const std::string& what)
      : Error(ErrorCategory::invalid_argument, what) {}
};

class RankOutOfRange : public Error {
 public:
  RankOutOfRange(std::size_t rank, std::size_t n)
      : Error(ErrorCategory::invalid_argument,
              "rank " + std::to_string(rank) + " outside [1, " +
                  std::to_string(n) + "]") {}
};

class ConstantSeries : public Error {
 public:
  ConstantSeries()
      : Error(ErrorCategory::invalid_argument,
              "series is constant; autocorrelation undefined") {}
};

class TooFewSamples : public Error {
 public:
  TooFewSamples(std::size_t got, std::size_t needed)
      : Error(ErrorCategory::invalid_argument,
              "need at least " + std::to_string(needed) + " samples, got " +
                  std::to_string(got)) {}
};

class OutOfSupportStart : public Error {
 public:
  OutOfSupportStart()
      : Error(ErrorCategory::invalid_argument,
              "starting point lies outside the target support") {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace hessmc
