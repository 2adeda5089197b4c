#pragma once

#include <stdexcept>
#include <string>

namespace knotnet {

// Bad input or a plan that does not meet its preconditions. CLI exit code 1.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A computation that could not be carried out numerically. CLI exit code 2.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class RankDeficient : public NumericError {
 public:
  RankDeficient(int rank, int needed)
      : NumericError("linear-output system has rank " + std::to_string(rank) + ", need " +
                     std::to_string(needed)),
        rank_(rank) {}
  int rank() const { return rank_; }

 private:
  int rank_;
};

class PerturbationBreaksRegion : public NumericError {
 public:
  using NumericError::NumericError;
};

class NotContinuous : public NumericError {
 public:
  using NumericError::NumericError;
};

class PlanInvalid : public ValidationError {
 public:
  PlanInvalid(std::string condition, const std::string& detail)
      : ValidationError("plan violates condition " + condition + ": " + detail),
        condition_(std::move(condition)) {}
  const std::string& condition() const { return condition_; }

 private:
  std::string condition_;
};

class InconsistentBoundary : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TargetNotRealizable : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class FlipOutsideOrderTree : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConstantTargets : public ValidationError {
 public:
  ConstantTargets() : ValidationError("targets are constant; relative error undefined") {}
};

}  // namespace knotnet
