#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace uqsd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class ErrorCode {
  NotHermitian,
  NonUnitDiagonal,
  OverlapOutOfRange,
  LinearlyDependent,
  NumericalBreakdown,
  DimensionMismatch,
  UnknownLabel,
  InvalidOmega,
  InvalidTheta,
  GroupingError,
  InconsistentStaging,
  ZeroInput,
  NonFiniteObjective,
  InvalidRange,
  ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

namespace tol {
// Linear independence gate: smallest Gram eigenvalue must exceed this times n.
inline constexpr double kPositivity = 1e-9;
// Triangular-construction diagonal floor.
inline constexpr double kBreakdown = 1e-8;
inline constexpr double kHermitian = 1e-12;
inline constexpr double kCompleteness = 1e-10;
inline constexpr double kEigenvalue = -1e-10;
inline constexpr double kZeroCondition = 1e-10;
}  // namespace tol

}  // namespace uqsd
