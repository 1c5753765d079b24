#include "uqsd/strategies.hpp"

#include <cmath>
#include <set>

#include "uqsd/optimizer.hpp"

namespace uqsd {

namespace {

constexpr double kTiny = 1e-14;

Matrix outer(const Vector& v) { return v * v.adjoint(); }

Complex clamp_overlap(Complex o) {
  const double m = std::abs(o);
  return m > 1.0 ? o / m : o;
}

double two_state_filter_failure(double eta1, double eta2, double mod, double omega) {
  const double u = 1.0 - (1.0 - mod * mod) * std::sin(omega) * std::sin(omega);
  if (u <= kTiny) return eta1 * u;
  return eta1 * u + eta2 * mod * mod / u;
}

}  // namespace

// ---------------------------------------------------------------------------
// background filtering
// ---------------------------------------------------------------------------

BackgroundReduction background_reduction(const Ensemble& ens) {
  if (ens.n() != 3) throw Error(ErrorCode::DimensionMismatch, "background filtering needs n = 3");
  const Matrix& o = ens.gram.o;
  BackgroundReduction r;
  r.o12_eff = (o(0, 1) - o(0, 2) * o(2, 1)) /
              std::sqrt((1.0 - std::norm(o(2, 0))) * (1.0 - std::norm(o(2, 1))));
  r.o12_eff = clamp_overlap(r.o12_eff);
  r.eta1_eff = ens.priors(0) * (1.0 - std::norm(o(2, 0)));
  r.eta2_eff = ens.priors(1) * (1.0 - std::norm(o(2, 1)));
  r.f2_const = ens.priors(0) * std::norm(o(2, 0)) + ens.priors(1) * std::norm(o(2, 1)) +
               ens.priors(2);
  return r;
}

double background_failure(const Ensemble& ens, double omega) {
  const BackgroundReduction r = background_reduction(ens);
  return r.f2_const +
         two_state_filter_failure(r.eta1_eff, r.eta2_eff, std::abs(r.o12_eff), omega);
}

StrategyResult background_filter(const Ensemble& ens, double omega) {
  if (!std::isfinite(omega)) throw Error(ErrorCode::InvalidOmega, "omega");
  const BackgroundReduction red = background_reduction(ens);
  const double s2 = std::sin(omega) * std::sin(omega);
  const double c2 = std::cos(omega) * std::cos(omega);

  const Vector perp1 = ens.dtr.reciprocal_ket(0);
  const Vector perp2 = ens.dtr.reciprocal_ket(1);
  const Vector psi1 = ens.dtr.state_ket(0);
  const Vector f2v = ens.dtr.state_ket(2);  // the background rail

  const Vector d1v = -std::sin(omega) * perp1;
  const Matrix e1 = outer(d1v);

  const double denom2 = c2 + s2 * std::norm(red.o12_eff);
  const Matrix e2 = (denom2 > 1e-300 ? c2 / denom2 : 1.0) * outer(perp2);

  const Complex d1 = d1v.dot(psi1);
  const Complex f12 = f2v.dot(psi1);
  const double den = 1.0 - std::norm(f12) - std::norm(d1);
  Vector f1v = Vector::Zero(3);
  if (den > kTiny) f1v = (psi1 - d1v * d1 - f2v * f12) / std::sqrt(den);
  const Matrix e0 = outer(f1v) + outer(f2v);

  StrategyResult res;
  res.params = {{"omega", omega}};
  res.f_opt = background_failure(ens, omega);
  res.povms.elements = {{OutcomeLabel::identify(0), e1},
                        {OutcomeLabel::identify(1), e2},
                        {OutcomeLabel::fail(), e0}};
  res.ensemble = ens;
  res.state_order = {0, 1, 2};

  res.plan.n_signal = 3;
  res.plan.state_kets = ens.dtr.state_kets();
  FilterStage st;
  st.filtered_state = 0;
  st.signature_rail = 0;
  st.omega = omega;
  st.null_rails = {1};
  st.detector = OutcomeLabel::identify(0);
  res.plan.stages = {st};
  res.plan.terminal_ports = {{1, OutcomeLabel::identify(1)}, {2, OutcomeLabel::fail()}};
  return res;
}

StrategyResult background_optimal(const Ensemble& ens) {
  const BackgroundReduction red = background_reduction(ens);
  const ScalarRegime sr = two_state_closed(red.eta1_eff, red.eta2_eff, std::abs(red.o12_eff));
  StrategyResult res = background_filter(ens, sr.omega_opt);
  res.f_opt = red.f2_const + sr.f_opt;
  res.regime_notes = {std::string("subspace regime ") + to_string(sr.regime)};
  return res;
}

// ---------------------------------------------------------------------------
// Jordan-paired mixtures
// ---------------------------------------------------------------------------

StrategyResult jordan_design(const JordanSpec& spec) {
  const int k = static_cast<int>(spec.thetas.size());
  if (k < 1) throw Error(ErrorCode::InvalidTheta, "need at least one sector");
  if (spec.priors.size() != 2 * k) {
    throw Error(ErrorCode::DimensionMismatch, "priors must have one entry per state");
  }
  for (double th : spec.thetas) {
    if (!std::isfinite(th) || th <= 0.0 || th > M_PI / 2.0 + 1e-12) {
      throw Error(ErrorCode::InvalidTheta, "sector angles must lie in (0, pi/2]");
    }
  }

  const int n = 2 * k;
  // Interleaved order (1, K+1, 2, K+2, ...) keeps each sector a 2x2 block.
  Matrix gram = Matrix::Identity(n, n);
  RealVector priors(n);
  std::vector<int> groups(n), order(n);
  for (int i = 0; i < k; ++i) {
    const double c = std::cos(spec.thetas[i]);
    gram(2 * i, 2 * i + 1) = c;
    gram(2 * i + 1, 2 * i) = c;
    priors(2 * i) = spec.priors(i);
    priors(2 * i + 1) = spec.priors(k + i);
    groups[2 * i] = 0;
    groups[2 * i + 1] = 1;
    order[2 * i] = i;
    order[2 * i + 1] = k + i;
  }
  Ensemble ens = make_ensemble(validate_gram(gram).o, priors, groups);

  StrategyResult res;
  res.ensemble = ens;
  res.state_order = order;
  res.plan.n_signal = n;
  res.plan.state_kets = ens.dtr.state_kets();

  Matrix e1 = Matrix::Zero(n, n), e2 = Matrix::Zero(n, n), e0 = Matrix::Zero(n, n);
  double f = 0.0;
  for (int i = 0; i < k; ++i) {
    const double eta_a = spec.priors(i);
    const double eta_b = spec.priors(k + i);
    const double mod = std::cos(spec.thetas[i]);
    const ScalarRegime sr = two_state_closed(eta_a, eta_b, mod);
    f += two_state_filter_failure(eta_a, eta_b, mod, sr.omega_opt);

    Matrix block_gram = Matrix::Identity(2, 2);
    block_gram(0, 1) = mod;
    block_gram(1, 0) = mod;
    const double pair = eta_a + eta_b;
    RealVector block_priors(2);
    block_priors << (pair > 0.0 ? eta_a / pair : 0.5), (pair > 0.0 ? eta_b / pair : 0.5);
    const Ensemble block = make_ensemble(validate_gram(block_gram).o, block_priors);
    const FilterDesign fd = two_state_design(block, sr.omega_opt);
    e1.block(2 * i, 2 * i, 2, 2) += fd.povms.elements[0].op;
    e2.block(2 * i, 2 * i, 2, 2) += fd.povms.elements[1].op;
    e0.block(2 * i, 2 * i, 2, 2) += fd.povms.elements[2].op;

    res.params.emplace_back("omega" + std::to_string(i + 1), sr.omega_opt);
    res.regime_notes.push_back("sector " + std::to_string(i + 1) + " regime " +
                               to_string(sr.regime));

    FilterStage st;
    st.filtered_state = 2 * i;
    st.signature_rail = 2 * i;
    st.omega = sr.omega_opt;
    st.null_rails = {2 * i + 1};
    st.detector = OutcomeLabel::group(0);
    res.plan.stages.push_back(st);
    res.plan.terminal_ports.emplace_back(2 * i + 1, OutcomeLabel::group(1));
  }

  res.f_opt = f;
  res.povms.elements = {{OutcomeLabel::group(0), e1},
                        {OutcomeLabel::group(1), e2},
                        {OutcomeLabel::fail(), e0}};
  return res;
}

// ---------------------------------------------------------------------------
// three pure states by successive filtering
// ---------------------------------------------------------------------------

double three_state_failure(const Ensemble& ens, double omega1, double omega2) {
  const Matrix& o = ens.gram.o;
  const RealVector& eta = ens.priors;
  const double t1 = ens.dtr.t(0);
  const double u = 1.0 - t1 * t1 * std::sin(omega1) * std::sin(omega1);

  double f1;
  Complex f21(0.0), f31(0.0);
  if (u <= kTiny) {
    f1 = eta(0) * u;  // o_1k = 0 whenever u can vanish
  } else {
    const double b = eta(1) * std::norm(o(0, 1)) + eta(2) * std::norm(o(0, 2));
    f1 = eta(0) * u + b / u;
    f21 = o(0, 1) / std::sqrt(u);
    f31 = o(0, 2) / std::sqrt(u);
  }

  const double r2 = std::max(1.0 - std::norm(f21), 0.0);
  const double r3 = std::max(1.0 - std::norm(f31), 0.0);
  Complex o23p(0.0);
  if (r2 > kTiny && r3 > kTiny) {
    o23p = clamp_overlap((o(1, 2) - std::conj(f21) * f31) / std::sqrt(r2 * r3));
  }
  const double f2 =
      two_state_filter_failure(eta(1) * r2, eta(2) * r3, std::abs(o23p), omega2);
  return f1 + f2;
}

StrategyResult three_state_design(const Ensemble& ens, double omega1, double omega2) {
  if (ens.n() != 3) throw Error(ErrorCode::DimensionMismatch, "three-state design needs n = 3");
  if (!std::isfinite(omega1) || !std::isfinite(omega2)) {
    throw Error(ErrorCode::InvalidOmega, "omega");
  }
  const double s1 = std::sin(omega1), c1 = std::cos(omega1);
  const double t1 = ens.dtr.t(0);

  const Vector perp1 = ens.dtr.reciprocal_ket(0);
  const Vector perp2 = ens.dtr.reciprocal_ket(1);
  const Vector psi1 = ens.dtr.state_ket(0);
  const Vector psi2 = ens.dtr.state_ket(1);

  const Vector d1v = -s1 * perp1;
  const Matrix e1 = outer(d1v);

  const double u = 1.0 - t1 * t1 * s1 * s1;
  Vector f1v = Vector::Zero(3);
  if (u > kTiny) f1v = (psi1 - d1v * d1v.dot(psi1)) / std::sqrt(u);

  const double operp12 = std::abs(gram_derived(ens.gram).recip_gram(0, 1));
  const double denom = std::sqrt(c1 * c1 + s1 * s1 * operp12 * operp12);
  const double coeff = denom > 1e-150 ? c1 * std::sin(omega2) / denom : std::sin(omega2);
  const Vector d2v = coeff * perp2;
  const Matrix e2 = outer(d2v);

  const Complex d22 = d2v.dot(psi2);
  const Complex f21 = f1v.dot(psi2);
  const double den2 = 1.0 - std::norm(d22) - std::norm(f21);
  Vector f2v = Vector::Zero(3);
  if (den2 > kTiny) f2v = (psi2 - d2v * d22 - f1v * f21) / std::sqrt(den2);

  const Matrix e0 = outer(f1v) + outer(f2v);
  const Matrix e3 = Matrix::Identity(3, 3) - e1 - e2 - e0;

  StrategyResult res;
  res.params = {{"omega1", omega1}, {"omega2", omega2}};
  res.f_opt = three_state_failure(ens, omega1, omega2);
  res.povms.elements = {{OutcomeLabel::identify(0), e1},
                        {OutcomeLabel::identify(1), e2},
                        {OutcomeLabel::identify(2), e3},
                        {OutcomeLabel::fail(), e0}};
  res.ensemble = ens;
  res.state_order = {0, 1, 2};

  res.plan.n_signal = 3;
  res.plan.state_kets = ens.dtr.state_kets();
  FilterStage st1{0, 0, omega1, {1, 2}, OutcomeLabel::identify(0)};
  FilterStage st2{1, 1, omega2, {2}, OutcomeLabel::identify(1)};
  res.plan.stages = {st1, st2};
  res.plan.terminal_ports = {{2, OutcomeLabel::identify(2)}};
  return res;
}

StrategyResult three_state_optimal(const Ensemble& ens) {
  ScanSpec spec;
  spec.dims = 2;
  spec.ranges = {std::pair{0.0, M_PI / 2.0}, std::pair{0.0, M_PI / 2.0}};
  spec.objective = [&ens](const std::array<double, 2>& p) {
    return three_state_failure(ens, p[0], p[1]);
  };
  const ScanResult r = minimize(spec);
  StrategyResult res = three_state_design(ens, r.params[0], r.params[1]);
  res.f_opt = r.value;
  return res;
}

SymmetricThreeState symmetric_three_state(double s1, double s2) {
  if (!(s1 > 0.0 && s2 > 0.0 && s1 * s1 < s2 && s2 < 1.0)) {
    throw Error(ErrorCode::InvalidRange, "symmetric case needs 0 < s1^2 < s2 < 1");
  }
  const double t1sq = 1.0 - 2.0 * s1 * s1 / (1.0 + s2);
  SymmetricThreeState r;
  r.f_branch1 = 2.0 / 3.0 * (2.0 * s1 - s2);
  r.f_branch2 = (s1 * s1 / s2 + 2.0 * s2) / 3.0;
  if (s1 >= 2.0 * s2) {
    r.branch = 1;
    r.f_opt = r.f_branch1;
    r.sin2_omega1 = (1.0 - 2.0 * s1) / t1sq;
  } else {
    r.branch = 2;
    r.f_opt = r.f_branch2;
    r.sin2_omega1 = (1.0 - s1 * s1 / s2) / t1sq;
  }
  return r;
}

// ---------------------------------------------------------------------------
// two mixtures of two states each
// ---------------------------------------------------------------------------

namespace {

void check_four_state(const Ensemble& ens) {
  if (ens.n() != 4) throw Error(ErrorCode::DimensionMismatch, "mixture design needs n = 4");
  const std::vector<int> want{0, 0, 1, 1};
  if (ens.group_of != want) {
    throw Error(ErrorCode::GroupingError, "mixture design needs groups {1,2} / {3,4}");
  }
}

struct FourStateChain {
  Complex f11, f31, f41;
  double u = 0.0, r1 = 0.0, r3 = 0.0, r4 = 0.0;
  double d11_sq = 0.0, c11p_sq = 0.0;
  Complex o13p, o14p;
};

FourStateChain four_state_chain(const Ensemble& ens, double omega1) {
  const Matrix& o = ens.gram.o;
  // Ket coefficients of the two filtered states on the first two rails.
  const Complex c11 = std::conj(ens.dtr.c(0, 0));
  const Complex c12 = std::conj(ens.dtr.c(0, 1));
  const Complex c22 = std::conj(ens.dtr.c(1, 1));
  const double s1sq = std::sin(omega1) * std::sin(omega1);

  FourStateChain ch;
  ch.u = 1.0 - std::norm(c22) * s1sq;
  if (ch.u > kTiny) {
    const double sq = std::sqrt(ch.u);
    ch.f11 = (o(1, 0) - std::conj(c22) * c12 * s1sq) / sq;
    ch.f31 = o(1, 2) / sq;
    ch.f41 = o(1, 3) / sq;
  }
  ch.d11_sq = std::norm(c12) * s1sq;
  ch.r1 = 1.0 - std::norm(ch.f11) - ch.d11_sq;  // >= t_1^2 since rail 1 is untouched
  ch.r3 = std::max(1.0 - std::norm(ch.f31), 0.0);
  ch.r4 = std::max(1.0 - std::norm(ch.f41), 0.0);
  ch.c11p_sq = std::norm(c11) / ch.r1;
  if (ch.r3 > kTiny) {
    ch.o13p = clamp_overlap((o(0, 2) - std::conj(ch.f11) * ch.f31) / std::sqrt(ch.r1 * ch.r3));
  }
  if (ch.r4 > kTiny) {
    ch.o14p = clamp_overlap((o(0, 3) - std::conj(ch.f11) * ch.f41) / std::sqrt(ch.r1 * ch.r4));
  }
  return ch;
}

}  // namespace

double four_state_failure(const Ensemble& ens, double omega1, double omega2) {
  const RealVector& eta = ens.priors;
  const FourStateChain ch = four_state_chain(ens, omega1);

  const double f1 = eta(0) * std::norm(ch.f11) + eta(1) * ch.u +
                    eta(2) * std::norm(ch.f31) + eta(3) * std::norm(ch.f41);

  const double v = 1.0 - ch.c11p_sq * std::sin(omega2) * std::sin(omega2);
  const double num =
      eta(2) * ch.r3 * std::norm(ch.o13p) + eta(3) * ch.r4 * std::norm(ch.o14p);
  const double f2 = eta(0) * ch.r1 * v + (v > kTiny ? num / v : 0.0);
  return f1 + f2;
}

StrategyResult four_state_mixture_design(const Ensemble& ens, double omega1, double omega2) {
  check_four_state(ens);
  if (!std::isfinite(omega1) || !std::isfinite(omega2)) {
    throw Error(ErrorCode::InvalidOmega, "omega");
  }
  const Vector psi1 = ens.dtr.state_ket(0);
  const Vector psi2 = ens.dtr.state_ket(1);
  Vector e1v = Vector::Zero(4), e2v = Vector::Zero(4);
  e1v(0) = 1.0;
  e2v(1) = 1.0;

  const Vector d1v = -std::sin(omega1) * e2v;
  const Vector d2v = -std::sin(omega2) * e1v;

  const Complex d21 = d1v.dot(psi2);
  const double den1 = 1.0 - std::norm(d21);
  Vector f1v = Vector::Zero(4);
  if (den1 > kTiny) f1v = (psi2 - d1v * d21) / std::sqrt(den1);

  const Complex f11 = f1v.dot(psi1);
  const Complex d11 = d1v.dot(psi1);
  const Complex d12 = d2v.dot(psi1);
  const double den2 = 1.0 - std::norm(f11) - std::norm(d11) - std::norm(d12);
  Vector f2v = Vector::Zero(4);
  if (den2 > kTiny) {
    f2v = (psi1 - d1v * d11 - d2v * d12 - f1v * f11) / std::sqrt(den2);
  }

  const Matrix e_group1 = outer(d1v) + outer(d2v);
  const Matrix e_fail = outer(f1v) + outer(f2v);
  const Matrix e_group2 = Matrix::Identity(4, 4) - e_group1 - e_fail;

  StrategyResult res;
  res.params = {{"omega1", omega1}, {"omega2", omega2}};
  res.f_opt = four_state_failure(ens, omega1, omega2);
  res.povms.elements = {{OutcomeLabel::group(0), e_group1},
                        {OutcomeLabel::group(1), e_group2},
                        {OutcomeLabel::fail(), e_fail}};
  res.ensemble = ens;
  res.state_order = {0, 1, 2, 3};

  res.plan.n_signal = 4;
  res.plan.state_kets = ens.dtr.state_kets();
  FilterStage st1{1, 1, omega1, {2, 3}, OutcomeLabel::group(0)};
  FilterStage st2{0, 0, omega2, {2, 3}, OutcomeLabel::group(0)};
  res.plan.stages = {st1, st2};
  res.plan.terminal_ports = {{2, OutcomeLabel::group(1)}, {3, OutcomeLabel::group(1)}};
  return res;
}

StrategyResult four_state_optimal(const Ensemble& ens) {
  check_four_state(ens);
  ScanSpec spec;
  spec.dims = 2;
  spec.ranges = {std::pair{0.0, M_PI / 2.0}, std::pair{0.0, M_PI / 2.0}};
  spec.objective = [&ens](const std::array<double, 2>& p) {
    return four_state_failure(ens, p[0], p[1]);
  };
  const ScanResult r = minimize(spec);
  StrategyResult res = four_state_mixture_design(ens, r.params[0], r.params[1]);
  res.f_opt = r.value;
  return res;
}

// ---------------------------------------------------------------------------
// coherent-state application
// ---------------------------------------------------------------------------

GramMatrix bb84_gram(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw Error(ErrorCode::InvalidRange, "mean photon number must be positive");
  }
  const double a = std::sqrt(mu);
  const std::array<Complex, 4> amp{Complex(a, 0), Complex(-a, 0), Complex(0, a),
                                   Complex(0, -a)};
  Matrix o(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      o(i, j) = std::exp(std::conj(amp[i]) * amp[j] - mu);
    }
  }
  return validate_gram(o);
}

double bb84_analytic(double mu) {
  return std::exp(-mu) * (std::abs(std::cos(mu)) + std::abs(std::sin(mu)));
}

std::vector<Bb84Point> bb84_curve(const std::vector<double>& mus) {
  std::vector<Bb84Point> curve;
  curve.reserve(mus.size());
  RealVector priors(4);
  priors << 0.25, 0.25, 0.25, 0.25;
  for (double mu : mus) {
    const Ensemble ens = make_ensemble(bb84_gram(mu).o, priors, {0, 0, 1, 1});
    const StrategyResult r = four_state_optimal(ens);
    curve.push_back({mu, r.f_opt, bb84_analytic(mu), r.params[0].second, r.params[1].second});
  }
  return curve;
}

// ---------------------------------------------------------------------------
// generic staged pipeline
// ---------------------------------------------------------------------------

namespace {

struct PipelineContext {
  Ensemble internal;
  NetworkPlan base_plan;
  std::vector<int> order;  // internal -> caller index
  int n_targets = 0;
};

PipelineContext pipeline_context(const Ensemble& ens, const PipelineSpec& spec) {
  const int n = ens.n();
  const int t = static_cast<int>(spec.stages.size());
  if (t < 1) throw Error(ErrorCode::InconsistentStaging, "pipeline needs at least one stage");

  std::set<int> targets, bg;
  for (const auto& st : spec.stages) {
    if (st.target < 0 || st.target >= n) {
      throw Error(ErrorCode::InconsistentStaging, "stage target out of range");
    }
    if (!targets.insert(st.target).second) {
      throw Error(ErrorCode::InconsistentStaging,
                  "target " + std::to_string(st.target + 1) + " already consumed");
    }
  }
  for (const auto& st : spec.stages) {
    for (int b : st.background) {
      if (b < 0 || b >= n) throw Error(ErrorCode::InconsistentStaging, "background out of range");
      if (targets.count(b)) {
        throw Error(ErrorCode::InconsistentStaging,
                    "state " + std::to_string(b + 1) + " is both target and background");
      }
      bg.insert(b);
    }
  }

  std::vector<int> order;
  for (const auto& st : spec.stages) order.push_back(st.target);
  std::vector<int> rest;
  for (int j = 0; j < n; ++j) {
    if (!targets.count(j) && !bg.count(j)) rest.push_back(j);
  }
  if (rest.empty()) {
    throw Error(ErrorCode::InconsistentStaging, "no states left for the residual outcome");
  }
  order.insert(order.end(), rest.begin(), rest.end());
  order.insert(order.end(), bg.begin(), bg.end());

  Matrix gram(n, n);
  RealVector priors(n);
  std::vector<int> groups(n);
  for (int i = 0; i < n; ++i) {
    priors(i) = ens.priors(order[i]);
    for (int j = 0; j < n; ++j) gram(i, j) = ens.gram.o(order[i], order[j]);
    groups[i] = i < t ? i : (i < t + static_cast<int>(rest.size()) ? t : t + 1);
  }

  PipelineContext ctx;
  ctx.internal = make_ensemble(validate_gram(gram).o, priors, groups);
  ctx.order = order;
  ctx.n_targets = t;

  const int active = n - static_cast<int>(bg.size());
  ctx.base_plan.n_signal = n;
  ctx.base_plan.state_kets = ctx.internal.dtr.state_kets();
  for (int s = 0; s < t; ++s) {
    FilterStage st;
    st.filtered_state = s;
    st.signature_rail = s;
    st.omega = 0.0;
    for (int r = s + 1; r < active; ++r) st.null_rails.push_back(r);
    st.detector = OutcomeLabel::identify(s);
    ctx.base_plan.stages.push_back(st);
  }
  const OutcomeLabel rest_label =
      rest.size() == 1 ? OutcomeLabel::identify(t) : OutcomeLabel::group(t);
  for (int r = t; r < active; ++r) ctx.base_plan.terminal_ports.emplace_back(r, rest_label);
  for (int r = active; r < n; ++r) {
    ctx.base_plan.terminal_ports.emplace_back(r, OutcomeLabel::fail());
  }
  return ctx;
}

double context_failure(const PipelineContext& ctx, const std::vector<double>& omegas) {
  NetworkPlan plan = ctx.base_plan;
  for (std::size_t s = 0; s < plan.stages.size(); ++s) plan.stages[s].omega = omegas[s];
  const OpticalNetwork net = synthesize_plan(plan);
  double f = 0.0;
  for (int j = 0; j < ctx.internal.n(); ++j) {
    const Vector out = propagate(net, plan, j);
    for (const auto& [rail, label] : net.ports) {
      if (label == OutcomeLabel::fail()) f += ctx.internal.priors(j) * std::norm(out(rail));
    }
  }
  return f;
}

}  // namespace

double pipeline_failure(const Ensemble& ens, const PipelineSpec& spec,
                        const std::vector<double>& omegas) {
  const PipelineContext ctx = pipeline_context(ens, spec);
  if (omegas.size() != spec.stages.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one omega per stage");
  }
  return context_failure(ctx, omegas);
}

StrategyResult composed_pipeline(const Ensemble& ens, const PipelineSpec& spec,
                                 const std::vector<double>& omegas) {
  const PipelineContext ctx = pipeline_context(ens, spec);
  if (omegas.size() != spec.stages.size()) {
    throw Error(ErrorCode::DimensionMismatch, "one omega per stage");
  }
  NetworkPlan plan = ctx.base_plan;
  for (std::size_t s = 0; s < plan.stages.size(); ++s) plan.stages[s].omega = omegas[s];
  const OpticalNetwork net = synthesize_plan(plan);

  StrategyResult res;
  for (std::size_t s = 0; s < omegas.size(); ++s) {
    res.params.emplace_back("omega" + std::to_string(s + 1), omegas[s]);
  }
  res.f_opt = context_failure(ctx, omegas);
  res.povms = extract_povms(net);
  res.ensemble = ctx.internal;
  res.state_order = ctx.order;
  res.plan = plan;
  for (int s = 0; s < ctx.n_targets; ++s) {
    res.regime_notes.push_back("stage " + std::to_string(s + 1) + " filters state " +
                               std::to_string(ctx.order[s] + 1));
  }
  return res;
}

StrategyResult composed_pipeline_optimal(const Ensemble& ens, const PipelineSpec& spec) {
  const PipelineContext ctx = pipeline_context(ens, spec);
  const int t = static_cast<int>(spec.stages.size());
  std::vector<double> omegas(t, M_PI / 4.0);
  // Coordinate descent: the per-stage surfaces are smooth and low-dimensional.
  for (int sweep = 0; sweep < 3; ++sweep) {
    for (int axis = 0; axis < t; ++axis) {
      ScanSpec sspec;
      sspec.dims = 1;
      sspec.ranges[0] = {0.0, M_PI / 2.0};
      sspec.coarse_points[0] = 256;
      sspec.objective = [&](const std::array<double, 2>& p) {
        std::vector<double> w = omegas;
        w[axis] = p[0];
        return context_failure(ctx, w);
      };
      omegas[axis] = minimize(sspec).params[0];
    }
  }
  return composed_pipeline(ens, spec, omegas);
}

}  // namespace uqsd
