#pragma once

#include "uqsd/gram.hpp"
#include "uqsd/types.hpp"

namespace uqsd {

/// Double-triangle basis: an orthonormal frame {e_j} in which the reciprocal
/// states form a lower-triangular coefficient matrix and the input states an
/// upper-triangular one. Rows hold bra coordinates, c_ij = <Psi_i|e_j>, so
/// that C C^H reproduces the Gram matrix entrywise.
struct DtrBasis {
  int n = 0;
  Matrix c_perp;  // lower triangular, rows = reciprocal states, real positive diagonal
  Matrix e_mat;   // (C_perp)^-1, rows = basis vectors in the reciprocal frame
  Matrix c;       // upper triangular, rows = input states
  RealVector t;   // reciprocal norms carried from the Gram data

  /// Ket coordinate column of state i in the {e_j} frame.
  Vector state_ket(int i) const { return c.row(i).adjoint(); }
  /// Ket coordinate column of reciprocal state i.
  Vector reciprocal_ket(int i) const { return c_perp.row(i).adjoint(); }

  /// All state kets as columns (lower triangular).
  Matrix state_kets() const { return c.adjoint(); }
  /// All reciprocal kets as columns (upper triangular).
  Matrix reciprocal_kets() const { return c_perp.adjoint(); }
};

/// Sequential construction of the basis: reciprocal state 1 is e_1, each later
/// reciprocal keeps its pairwise overlaps and unit norm, states follow from
/// the reciprocal-norm relation. Throws NumericalBreakdown if a diagonal
/// coefficient collapses.
DtrBasis build_dtr(const GramMatrix& o);

struct StateVectors {
  Matrix states;       // rows = input state amplitude vectors
  Matrix reciprocals;  // rows = reciprocal state amplitude vectors
};

StateVectors state_vectors(const DtrBasis& b);

}  // namespace uqsd
