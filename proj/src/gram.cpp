#include "uqsd/gram.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace uqsd {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NonUnitDiagonal: return "NonUnitDiagonal";
    case ErrorCode::OverlapOutOfRange: return "OverlapOutOfRange";
    case ErrorCode::LinearlyDependent: return "LinearlyDependent";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::InvalidOmega: return "InvalidOmega";
    case ErrorCode::InvalidTheta: return "InvalidTheta";
    case ErrorCode::GroupingError: return "GroupingError";
    case ErrorCode::InconsistentStaging: return "InconsistentStaging";
    case ErrorCode::ZeroInput: return "ZeroInput";
    case ErrorCode::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

GramMatrix validate_gram(const Matrix& raw) {
  const auto n = raw.rows();
  if (n != raw.cols() || n < 2) {
    throw Error(ErrorCode::DimensionMismatch,
                "overlap matrix must be square with n >= 2");
  }
  const double herm = (raw - raw.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol::kHermitian) {
    throw Error(ErrorCode::NotHermitian,
                "overlap matrix is not Hermitian (residual " + std::to_string(herm) + ")");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(raw(i, i) - Complex(1.0, 0.0)) > tol::kHermitian) {
      throw Error(ErrorCode::NonUnitDiagonal,
                  "diagonal entry " + std::to_string(i + 1) + " is not 1");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && std::abs(raw(i, j)) >= 1.0) {
        throw Error(ErrorCode::OverlapOutOfRange,
                    "|o_" + std::to_string(i + 1) + std::to_string(j + 1) + "| >= 1");
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(raw, Eigen::EigenvaluesOnly);
  const double lambda_min = es.eigenvalues().minCoeff();
  if (lambda_min <= tol::kPositivity * static_cast<double>(n)) {
    throw Error(ErrorCode::LinearlyDependent,
                "smallest eigenvalue " + std::to_string(lambda_min) +
                    " is below the independence gate");
  }
  return GramMatrix{raw};
}

GramDerived gram_derived(const GramMatrix& o) {
  const int n = o.n();
  Eigen::LLT<Matrix> llt(o.o);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::LinearlyDependent, "Cholesky factorization failed");
  }
  double det = 1.0;
  const Matrix l = llt.matrixL();
  for (int j = 0; j < n; ++j) {
    if (l(j, j).real() <= 1e-12) {
      throw Error(ErrorCode::LinearlyDependent, "singular Cholesky pivot");
    }
    det *= l(j, j).real() * l(j, j).real();
  }

  GramDerived d;
  d.determinant = det;
  d.adjugate = det * llt.solve(Matrix::Identity(n, n));
  d.t = RealVector(n);
  for (int j = 0; j < n; ++j) d.t(j) = std::sqrt(det / d.adjugate(j, j).real());
  d.recip_gram = Matrix(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      d.recip_gram(i, j) = d.adjugate(i, j) /
                           std::sqrt(d.adjugate(i, i).real() * d.adjugate(j, j).real());
    }
    d.recip_gram(i, i) = 1.0;
  }
  return d;
}

std::pair<Matrix, double> adjugate_det(const GramMatrix& o) {
  GramDerived d = gram_derived(o);
  return {std::move(d.adjugate), d.determinant};
}

RealVector reciprocal_norms(const GramMatrix& o) { return gram_derived(o).t; }

Matrix reciprocal_gram(const GramMatrix& o) { return gram_derived(o).recip_gram; }

}  // namespace uqsd
