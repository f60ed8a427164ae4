#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdepth {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// ===== Errors =====
//
// Every failure surfaces as an exception carrying a category; the CLI maps
// categories to exit codes (validation -> 2, numeric -> 3, io -> 4).

enum class ErrorCategory { validation, numeric, io };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error(ErrorCategory::validation, message) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& message)
      : Error(ErrorCategory::numeric, message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message)
      : Error(ErrorCategory::io, message) {}
};

class NotSymmetricError final : public NumericError {
  using NumericError::NumericError;
};

class NotPositiveDefiniteError final : public NumericError {
  using NumericError::NumericError;
};

class RankDeficientError final : public NumericError {
  using NumericError::NumericError;
};

class InsideBallError final : public NumericError {
  using NumericError::NumericError;
};

class DimensionMismatchError final : public NumericError {
  using NumericError::NumericError;
};

class ParseError final : public IoError {
  using IoError::IoError;
};

class RaggedRowsError final : public IoError {
  using IoError::IoError;
};

class EmptyDatasetError final : public IoError {
  using IoError::IoError;
};

// ===== Core value types =====

// Strict slab counts for a unit direction v: p_in = #{|v.y| < 1},
// p_out = #{|v.y| > 1}. Points on the slab boundary belong to neither.
struct SlabCounts {
  int p_in = 0;
  int p_out = 0;
};

// Result of a depth computation. depth is the integer count convention;
// witness is a unit direction attaining the reported minimum when one was
// scored; evaluations counts tangent directions actually scored.
struct DepthResult {
  int depth = 0;
  std::optional<Vector> witness;
  std::uint64_t evaluations = 0;
};

// Orthonormal pair spanning a 2-D subspace (the plane the tangent search
// projects into).
struct OrthoBasis2D {
  Vector alpha1;
  Vector alpha2;
};

// Dataset after standardization y_i = R (x_i - mu): the depth of (sigma, mu)
// w.r.t. x equals the depth of (I, 0) w.r.t. y. Points with ||y|| <= 1 sit
// inside every slab {|u.y| <= 1}, so engines only enumerate outside points
// and carry inside_count as a bulk contribution.
struct StandardizedSample {
  int d = 0;
  std::vector<Vector> y;
  std::vector<int> outside_idx;
  int inside_count = 0;
};

}  // namespace sdepth
