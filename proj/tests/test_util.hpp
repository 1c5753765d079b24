#pragma once

#include <random>

#include "uqsd/gram.hpp"

namespace uqsd::test {

/// Random valid overlap matrix: Gram of n random unit vectors, rejected until
/// comfortably positive definite.
inline Matrix random_gram(std::mt19937_64& rng, int n, bool complex_entries = true) {
  std::normal_distribution<double> g;
  for (;;) {
    Matrix v(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        v(i, j) = Complex(g(rng), complex_entries ? g(rng) : 0.0);
      }
    }
    v.colwise().normalize();
    Matrix o = v.adjoint() * v;
    o = ((o + o.adjoint()) / 2.0).eval();
    for (int i = 0; i < n; ++i) o(i, i) = 1.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(o, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() > 1e-4) return o;
  }
}

inline RealVector random_priors(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  RealVector p(n);
  for (int i = 0; i < n; ++i) p(i) = u(rng);
  p /= p.sum();
  return p;
}

}  // namespace uqsd::test
