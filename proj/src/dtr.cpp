#include "uqsd/dtr.hpp"

#include <cmath>

namespace uqsd {

DtrBasis build_dtr(const GramMatrix& o) {
  const int n = o.n();
  const GramDerived d = gram_derived(o);

  // Row-by-row triangular factorization of the reciprocal overlaps:
  // row j is fixed by matching <Psi_perp_i|Psi_perp_j> for i < j and unit norm.
  Matrix c_perp = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      Complex acc = d.recip_gram(i, j);
      for (int m = 0; m < j; ++m) acc -= c_perp(i, m) * std::conj(c_perp(j, m));
      c_perp(i, j) = acc / c_perp(j, j).real();
    }
    double diag_sq = 1.0;
    for (int m = 0; m < i; ++m) diag_sq -= std::norm(c_perp(i, m));
    if (diag_sq < tol::kBreakdown * tol::kBreakdown) {
      throw Error(ErrorCode::NumericalBreakdown,
                  "triangular diagonal collapsed at row " + std::to_string(i + 1));
    }
    c_perp(i, i) = std::sqrt(diag_sq);
  }

  DtrBasis b;
  b.n = n;
  b.c_perp = c_perp;
  b.t = d.t;
  b.e_mat = c_perp.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
  b.c = d.t.asDiagonal() * b.e_mat.adjoint();
  // The strict lower triangle of c is zero by construction; make it exact.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) b.c(i, j) = 0.0;
  return b;
}

StateVectors state_vectors(const DtrBasis& b) { return {b.c, b.c_perp}; }

}  // namespace uqsd
