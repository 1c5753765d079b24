#pragma once

#include <utility>

#include "uqsd/types.hpp"

namespace uqsd {

/// Hermitian unit-diagonal overlap matrix of a linearly independent state set.
struct GramMatrix {
  Matrix o;

  int n() const { return static_cast<int>(o.rows()); }
};

/// Everything derivable from the overlaps alone: adjugate, determinant,
/// reciprocal norms t_j and the reciprocal-state overlap matrix.
struct GramDerived {
  Matrix adjugate;
  double determinant = 0.0;
  RealVector t;
  Matrix recip_gram;
};

/// Checks Hermiticity, unit diagonal, |o_ij| < 1 off the diagonal and strict
/// positive definiteness. Throws Error on violation, returns the matrix
/// unchanged otherwise.
GramMatrix validate_gram(const Matrix& raw);

/// Adjugate A with O * A = det(O) * I, and the (real, positive) determinant.
/// Computed through a Cholesky factorization, not cofactor expansion.
std::pair<Matrix, double> adjugate_det(const GramMatrix& o);

/// t_j = sqrt(det(O) / a_jj), the overlap of each state with its reciprocal.
RealVector reciprocal_norms(const GramMatrix& o);

/// Overlap matrix of the reciprocal states: a_ij / sqrt(a_ii a_jj).
Matrix reciprocal_gram(const GramMatrix& o);

/// One-pass computation of all of the above.
GramDerived gram_derived(const GramMatrix& o);

}  // namespace uqsd
