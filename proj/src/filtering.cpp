#include "uqsd/filtering.hpp"

#include <cmath>

namespace uqsd {

const char* to_string(Regime r) {
  switch (r) {
    case Regime::A: return "A (omega = 0)";
    case Regime::B: return "B (interior)";
    case Regime::C: return "C (omega = pi/2)";
  }
  return "?";
}

std::vector<int> filtering_groups(int n) {
  std::vector<int> g(n, 1);
  g[0] = 0;
  return g;
}

FilterDesign filter_povms(const Ensemble& ens, double omega) {
  if (!std::isfinite(omega)) throw Error(ErrorCode::InvalidOmega, "omega is not finite");
  const int n = ens.n();
  const double s2 = std::sin(omega) * std::sin(omega);
  const Vector perp1 = ens.dtr.reciprocal_ket(0);
  const Vector psi1 = ens.dtr.state_ket(0);

  const Matrix e1 = s2 * (perp1 * perp1.adjoint());
  const double t1 = ens.dtr.t(0);
  const double u = 1.0 - t1 * t1 * s2;
  Matrix e0 = Matrix::Zero(n, n);
  if (u > 1e-14) {  // u = 0 only when state 1 is orthogonal to the rest and fully detected
    const Vector w = psi1 - e1 * psi1;
    const Vector fv = w / std::sqrt(u);
    e0 = fv * fv.adjoint();
  }
  const Matrix e2 = Matrix::Identity(n, n) - e1 - e0;

  FilterDesign d;
  d.omega = omega;
  d.povms.elements = {{OutcomeLabel::group(0), e1},
                      {OutcomeLabel::group(1), e2},
                      {OutcomeLabel::fail(), e0}};
  d.failure = filter_failure(ens, omega);
  return d;
}

double filter_failure(const Ensemble& ens, double omega) {
  const int n = ens.n();
  const double t1 = ens.dtr.t(0);
  const double u = 1.0 - t1 * t1 * std::sin(omega) * std::sin(omega);
  double b = 0.0;
  for (int k = 1; k < n; ++k) b += ens.priors(k) * std::norm(ens.gram.o(0, k));
  if (u <= 1e-14) return ens.priors(0) * u;  // b = 0 whenever u can reach 0
  return ens.priors(0) * u + b / u;
}

RegimeResult optimal_filter(const Ensemble& ens) {
  const int n = ens.n();
  const double eta1 = ens.priors(0);
  const double t1 = ens.dtr.t(0);
  const double t1sq = t1 * t1;
  double b = 0.0;
  for (int k = 1; k < n; ++k) b += ens.priors(k) * std::norm(ens.gram.o(0, k));

  RegimeResult r;
  if (b == 0.0) {  // state 1 orthogonal to the rest: perfect filtering
    r.regime = Regime::B;
    r.omega_opt = M_PI / 2.0;
    r.f_opt = 0.0;
    r.design = filter_povms(ens, r.omega_opt);
    return r;
  }
  const double s = std::sqrt(b / eta1);
  if (s > 1.0) {
    r.regime = Regime::A;
    r.omega_opt = 0.0;
    r.f_opt = eta1 + b;
  } else if (s >= 1.0 - t1sq) {
    r.regime = Regime::B;
    r.omega_opt = std::asin(std::sqrt((1.0 - s) / t1sq));
    r.f_opt = 2.0 * std::sqrt(eta1 * b);
  } else {
    r.regime = Regime::C;
    r.omega_opt = M_PI / 2.0;
    r.f_opt = eta1 * (1.0 - t1sq) + b / (1.0 - t1sq);
  }
  r.design = filter_povms(ens, r.omega_opt);
  return r;
}

FilterDesign two_state_design(const Ensemble& ens, double omega) {
  if (ens.n() != 2) throw Error(ErrorCode::DimensionMismatch, "two-state design needs n = 2");
  if (!std::isfinite(omega)) throw Error(ErrorCode::InvalidOmega, "omega is not finite");
  const double s2 = std::sin(omega) * std::sin(omega);
  const double c2 = std::cos(omega) * std::cos(omega);
  const double o12sq = std::norm(ens.gram.o(0, 1));

  const Vector perp1 = ens.dtr.reciprocal_ket(0);
  const Vector perp2 = ens.dtr.reciprocal_ket(1);
  const Vector psi1 = ens.dtr.state_ket(0);

  const Matrix e1 = s2 * (perp1 * perp1.adjoint());
  const double denom2 = c2 + s2 * o12sq;
  const double coeff2 = denom2 > 1e-300 ? c2 / denom2 : 1.0;
  const Matrix e2 = coeff2 * (perp2 * perp2.adjoint());
  const double t1 = std::sqrt(1.0 - o12sq);
  const double u = 1.0 - t1 * t1 * s2;
  Matrix e0 = Matrix::Zero(2, 2);
  if (u > 1e-14) {
    const Vector num = psi1 - (t1 * s2) * perp1;
    e0 = (num * num.adjoint()) / u;
  }

  FilterDesign d;
  d.omega = omega;
  d.povms.elements = {{OutcomeLabel::identify(0), e1},
                      {OutcomeLabel::identify(1), e2},
                      {OutcomeLabel::fail(), e0}};
  d.failure = filter_failure(ens, omega);
  return d;
}

ScalarRegime two_state_closed(double eta1, double eta2, double mod) {
  if (mod == 0.0 || eta1 + eta2 == 0.0) {  // orthogonal or weightless pair
    return {Regime::B, M_PI / 2.0, 0.0};
  }
  const double ratio = std::sqrt(eta2 / eta1);
  if (ratio > 1.0 / mod) {
    return {Regime::A, 0.0, eta1 + eta2 * mod * mod};
  }
  if (ratio >= mod) {
    const double omega = std::asin(std::sqrt((1.0 - ratio * mod) / (1.0 - mod * mod)));
    return {Regime::B, omega, 2.0 * std::sqrt(eta1 * eta2) * mod};
  }
  return {Regime::C, M_PI / 2.0, eta1 * mod * mod + eta2};
}

RegimeResult two_state_optimal(const Ensemble& ens) {
  if (ens.n() != 2) throw Error(ErrorCode::DimensionMismatch, "two-state optimum needs n = 2");
  const ScalarRegime sr =
      two_state_closed(ens.priors(0), ens.priors(1), std::abs(ens.gram.o(0, 1)));
  RegimeResult r;
  r.regime = sr.regime;
  r.omega_opt = sr.omega_opt;
  r.f_opt = sr.f_opt;
  r.design = two_state_design(ens, r.omega_opt);
  return r;
}

}  // namespace uqsd
