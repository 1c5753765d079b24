// Acceptance suite: each numbered criterion runs standalone and prints one
// PASS/FAIL line (plus supporting data). Invoke with the criterion number.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <vector>

#include "test_util.hpp"
#include "uqsd/optimizer.hpp"
#include "uqsd/problem.hpp"
#include "uqsd/strategies.hpp"

using namespace uqsd;

namespace {

struct Criterion {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes.push_back(what);
    }
  }
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  static const clock::time_point start = clock::now();
  return std::chrono::duration<double>(clock::now() - start).count();
}

Ensemble two_state_ensemble(double eta1, Complex o12) {
  Matrix o(2, 2);
  o << 1.0, o12, std::conj(o12), 1.0;
  RealVector p(2);
  p << eta1, 1.0 - eta1;
  return make_ensemble(o, p);
}

double scan_filter_min(const Ensemble& ens, double* omega = nullptr) {
  ScanSpec spec;
  spec.ranges[0] = {0.0, M_PI / 2.0};
  spec.objective = [&](const std::array<double, 2>& p) {
    return filter_failure(ens, p[0]);
  };
  const ScanResult r = minimize(spec);
  if (omega) *omega = r.params[0];
  return r.value;
}

// --- criterion 1: two-state closed forms vs scan+refine --------------------
bool criterion1() {
  Criterion c;
  const double t0 = now_seconds();
  double worst = 0.0;
  for (int ie = 0; ie < 20; ++ie) {
    const double eta1 = 0.025 + 0.95 * ie / 19.0;
    for (int im = 0; im < 20; ++im) {
      const double mod = 0.045 + 0.91 * im / 19.0;
      for (int ip = 0; ip < 9; ++ip) {
        const double phase = 2.0 * M_PI * ip / 9.0;
        const Ensemble ens =
            two_state_ensemble(eta1, mod * std::exp(Complex(0.0, phase)));
        const double closed = two_state_optimal(ens).f_opt;
        const double scanned = scan_filter_min(ens);
        worst = std::max(worst, std::abs(closed - scanned));
      }
    }
  }
  const double dt = now_seconds() - t0;
  c.require(worst <= 1e-7, "max |closed - scan| = " + format_num(worst));
  c.require(dt < 30.0, "runtime " + format_num(dt) + " s exceeds 30 s");
  std::printf("  3600 grid points, max deviation %.3g, %.2f s\n", worst, dt);
  for (const auto& n : c.notes) std::printf("  ! %s\n", n.c_str());
  return c.ok;
}

// --- criterion 2: three-state filtering closed forms ------------------------
bool criterion2() {
  Criterion c;
  const double t0 = now_seconds();
  std::mt19937_64 rng(202408102);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const Ensemble ens = make_ensemble(test::random_gram(rng, 3),
                                       test::random_priors(rng, 3), filtering_groups(3));
    const RegimeResult r = optimal_filter(ens);
    const double scanned = scan_filter_min(ens);
    worst = std::max(worst, std::abs(r.f_opt - scanned));

    // Regime assignment must match the thresholds on S.
    const double eta1 = ens.priors(0);
    const double a = ens.priors(1) * std::norm(ens.gram.o(0, 1)) +
                     ens.priors(2) * std::norm(ens.gram.o(0, 2));
    const double s = std::sqrt(a / eta1);
    const double t1sq = ens.dtr.t(0) * ens.dtr.t(0);
    Regime expect = Regime::B;
    if (s > 1.0) expect = Regime::A;
    else if (s < 1.0 - t1sq) expect = Regime::C;
    c.require(r.regime == expect, "regime mismatch at instance " + std::to_string(rep));
  }
  const double dt = now_seconds() - t0;
  c.require(worst <= 1e-7, "max |closed - scan| = " + format_num(worst));
  c.require(dt < 60.0, "runtime " + format_num(dt) + " s exceeds 60 s");
  std::printf("  200 instances, max deviation %.3g, %.2f s\n", worst, dt);
  for (const auto& n : c.notes) std::printf("  ! %s\n", n.c_str());
  return c.ok;
}

// --- criterion 3: symmetric three-state closed forms -----------------------
bool criterion3() {
  Criterion c;
  double worst = 0.0;
  int tested = 0;
  for (int i = 1; i <= 15; ++i) {
    for (int j = 1; j <= 15; ++j) {
      const double s1 = i / 16.0;
      const double s2 = j / 16.0;
      if (!(s1 * s1 < s2)) continue;
      const double det = 1.0 - 2.0 * s1 * s1 - s2 * s2 + 2.0 * s1 * s1 * s2;
      if (det <= 1e-6) continue;
      Matrix o(3, 3);
      o << 1.0, s1, s1, s1, 1.0, s2, s1, s2, 1.0;
      Eigen::SelfAdjointEigenSolver<Matrix> es(o, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < 1e-6) continue;
      ++tested;

      const Ensemble ens = make_ensemble(o, RealVector::Constant(3, 1.0 / 3.0));
      const StrategyResult scan = three_state_optimal(ens);
      const SymmetricThreeState closed = symmetric_three_state(s1, s2);
      worst = std::max(worst, std::abs(scan.f_opt - closed.f_opt));
      c.require(scan.f_opt >= closed.f_opt - 1e-6,
                "scan beat the closed form at s1 = " + format_num(s1) +
                    ", s2 = " + format_num(s2));
    }
  }
  c.require(worst <= 1e-4, "max |scan - closed| = " + format_num(worst));

  const SymmetricThreeState pin = symmetric_three_state(0.3, 0.5);
  const Ensemble pin_ens = make_ensemble(
      [] {
        Matrix o(3, 3);
        o << 1.0, 0.3, 0.3, 0.3, 1.0, 0.5, 0.3, 0.5, 1.0;
        return o;
      }(),
      RealVector::Constant(3, 1.0 / 3.0));
  const double pin_scan = three_state_optimal(pin_ens).f_opt;
  c.require(std::abs(pin.f_opt - 0.39333333333) < 1e-9, "pinned closed form moved");
  c.require(std::abs(pin_scan - pin.f_opt) < 1e-4,
            "pinned point scan deviates by " + format_num(std::abs(pin_scan - pin.f_opt)));
  std::printf("  %d grid points with s1^2 < s2, max deviation %.3g\n", tested, worst);
  for (const auto& n : c.notes) std::printf("  ! %s\n", n.c_str());
  return c.ok;
}

// --- criterion 4: coherent-state curve --------------------------------------
bool criterion4() {
  Criterion c;
  const double t0 = now_seconds();
  std::vector<double> mus(30);
  for (int i = 0; i < 30; ++i) mus[i] = 0.1 + (3.0 - 0.1) * i / 29.0;
  const std::vector<Bb84Point> curve = bb84_curve(mus);

  std::vector<double> gaps;
  std::printf("  mu      f_scanned    f_analytic   rel_gap   omega1   omega2\n");
  for (const Bb84Point& p : curve) {
    const double gap = (p.f_scanned - p.f_analytic) / p.f_analytic;
    gaps.push_back(gap);
    std::printf("  %-7.3f %-12.8f %-12.8f %-9.5f %-8.5f %-8.5f\n", p.mu, p.f_scanned,
                p.f_analytic, gap, p.omega1, p.omega2);
    c.require(p.f_scanned >= p.f_analytic - 1e-6,
              "scan beat the analytic optimum at mu = " + format_num(p.mu));
    c.require(gap <= 0.10, "relative gap " + format_num(gap) + " > 10% at mu = " +
                               format_num(p.mu));
  }
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[14] + sorted[15]);
  c.require(median <= 0.03, "median gap " + format_num(median) + " > 3%");
  const double dt = now_seconds() - t0;
  c.require(dt < 600.0, "runtime " + format_num(dt) + " s exceeds 10 min");
  std::printf("  median gap %.4f, max gap %.4f, %.2f s\n", median, sorted.back(), dt);
  for (const auto& n : c.notes) std::printf("  ! %s\n", n.c_str());
  return c.ok;
}

// --- criterion 5: POVM validity suite ---------------------------------------
bool criterion5() {
  Criterion c;
  std::mt19937_64 rng(202408105);
  std::uniform_real_distribution<double> uw(0.0, M_PI / 2.0);

  double worst_completeness = 0.0, worst_eig = 0.0, worst_zero = 0.0;
  auto check = [&](const PovmSet& s, const Ensemble& ens) {
    const ValidityReport v = verify_povm(s);
    const ZeroReport z = zero_conditions(s, ens);
    worst_completeness = std::max(worst_completeness, v.completeness_residual);
    worst_eig = std::min(worst_eig, v.min_eigenvalue);
    worst_zero = std::max(worst_zero, z.max_residual);
  };

  int problems = 0;
  for (int rep = 0; rep < 125; ++rep) {
    {  // n = 2
      const Matrix o = test::random_gram(rng, 2);
      const RealVector pr = test::random_priors(rng, 2);
      const Ensemble filt = make_ensemble(o, pr, filtering_groups(2));
      const Ensemble plain = make_ensemble(o, pr);
      for (int k = 0; k < 16; ++k) check(filter_povms(filt, uw(rng)).povms, filt);
      for (int k = 0; k < 16; ++k) check(two_state_design(plain, uw(rng)).povms, plain);
      ++problems;
    }
    {  // n = 3
      const Matrix o = test::random_gram(rng, 3);
      const RealVector pr = test::random_priors(rng, 3);
      const Ensemble filt = make_ensemble(o, pr, filtering_groups(3));
      const Ensemble plain = make_ensemble(o, pr);
      for (int k = 0; k < 16; ++k) check(filter_povms(filt, uw(rng)).povms, filt);
      for (int k = 0; k < 16; ++k) {
        const StrategyResult r = background_filter(plain, uw(rng));
        check(r.povms, r.ensemble);
      }
      for (int k = 0; k < 16; ++k) {
        const StrategyResult r = three_state_design(plain, uw(rng), uw(rng));
        check(r.povms, r.ensemble);
      }
      ++problems;
    }
    {  // n = 4
      const Matrix o = test::random_gram(rng, 4);
      const RealVector pr = test::random_priors(rng, 4);
      const Ensemble filt = make_ensemble(o, pr, filtering_groups(4));
      const Ensemble mix = make_ensemble(o, pr, {0, 0, 1, 1});
      for (int k = 0; k < 16; ++k) check(filter_povms(filt, uw(rng)).povms, filt);
      for (int k = 0; k < 16; ++k) {
        const StrategyResult r = four_state_mixture_design(mix, uw(rng), uw(rng));
        check(r.povms, r.ensemble);
      }
      const Ensemble plain = make_ensemble(o, pr);
      PipelineSpec spec;
      spec.stages = {{0, {}}, {1, {}}};
      for (int k = 0; k < 16; ++k) {
        const StrategyResult r = composed_pipeline(plain, spec, {uw(rng), uw(rng)});
        check(r.povms, r.ensemble);
      }
      ++problems;
    }
    {  // n = 5
      const Matrix o = test::random_gram(rng, 5);
      const RealVector pr = test::random_priors(rng, 5);
      const Ensemble filt = make_ensemble(o, pr, filtering_groups(5));
      for (int k = 0; k < 16; ++k) check(filter_povms(filt, uw(rng)).povms, filt);
      const Ensemble plain = make_ensemble(o, pr);
      PipelineSpec spec;
      spec.stages = {{0, {}}, {1, {}}, {2, {}}};
      for (int k = 0; k < 16; ++k) {
        const StrategyResult r =
            composed_pipeline(plain, spec, {uw(rng), uw(rng), uw(rng)});
        check(r.povms, r.ensemble);
      }
      ++problems;
    }
  }
  // Jordan problems: random sector data, optimal angles.
  for (int k = 0; k < 16; ++k) {
    std::uniform_int_distribution<int> uk(1, 3);
    const int kk = uk(rng);
    JordanSpec spec;
    std::uniform_real_distribution<double> ut(0.05, M_PI / 2.0);
    for (int i = 0; i < kk; ++i) spec.thetas.push_back(ut(rng));
    spec.priors = test::random_priors(rng, 2 * kk);
    const StrategyResult r = jordan_design(spec);
    check(r.povms, r.ensemble);
  }

  c.require(worst_completeness <= 1e-10,
            "completeness residual " + format_num(worst_completeness));
  c.require(worst_eig >= -1e-10, "min eigenvalue " + format_num(worst_eig));
  c.require(worst_zero <= 1e-10, "zero-condition residual " + format_num(worst_zero));
  std::printf("  %d problem draws: completeness %.3g, min eig %.3g, zero %.3g\n",
              problems, worst_completeness, worst_eig, worst_zero);
  for (const auto& n : c.notes) std::printf("  ! %s\n", n.c_str());
  return c.ok;
}

// --- criterion 6: optics round trip -----------------------------------------
bool criterion6() {
  Criterion c;
  std::mt19937_64 rng(202408106);
  double worst_op = 0.0, worst_unitary = 0.0;

  auto compare = [&](const PovmSet& analytic, const OpticalNetwork& net) {
    const Matrix u = net.transfer();
    worst_unitary = std::max(
        worst_unitary, (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()))
                           .cwiseAbs()
                           .maxCoeff());
    const PovmSet extracted = extract_povms(net);
    for (const auto& ea : extracted.elements) {
      for (const auto& eb : analytic.elements) {
        if (ea.label == eb.label) {
          worst_op = std::max(worst_op, (ea.op - eb.op).cwiseAbs().maxCoeff());
        }
      }
    }
  };

  for (int n : {2, 3}) {
    const Ensemble ens = make_ensemble(test::random_gram(rng, n),
                                       test::random_priors(rng, n), filtering_groups(n));
    for (int i = 0; i < 64; ++i) {
      const double w = M_PI / 2.0 * i / 63.0;
      compare(filter_povms(ens, w).povms, synthesize_filter_network(ens, w));
    }
  }
  {
    const Ensemble ens = make_ensemble(test::random_gram(rng, 3),
                                       test::random_priors(rng, 3));
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        const StrategyResult r =
            three_state_design(ens, M_PI / 2.0 * i / 7.0, M_PI / 2.0 * j / 7.0);
        compare(r.povms, synthesize_staged_network(r));
      }
    }
  }
  {
    const Ensemble ens = make_ensemble(test::random_gram(rng, 4),
                                       RealVector::Constant(4, 0.25), {0, 0, 1, 1});
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        const StrategyResult r =
            four_state_mixture_design(ens, M_PI / 2.0 * i / 7.0, M_PI / 2.0 * j / 7.0);
        compare(r.povms, synthesize_staged_network(r));
      }
    }
  }
  c.require(worst_op <= 1e-10, "operator mismatch " + format_num(worst_op));
  c.require(worst_unitary <= 1e-12, "unitarity residual " + format_num(worst_unitary));
  std::printf("  operator mismatch %.3g, unitarity %.3g\n", worst_op, worst_unitary);
  for (const auto& n : c.notes) std::printf("  ! %s\n", n.c_str());
  return c.ok;
}

// --- criterion 7: Monte Carlo statistics ------------------------------------
bool criterion7() {
  Criterion c;
  const Ensemble ens = two_state_ensemble(0.5, Complex(0.6, 0.0));
  const RegimeResult opt = two_state_optimal(ens);

  NetworkPlan plan;
  plan.n_signal = 2;
  plan.state_kets = ens.dtr.state_kets();
  FilterStage st{0, 0, opt.omega_opt, {1}, OutcomeLabel::identify(0)};
  plan.stages = {st};
  plan.terminal_ports = {{1, OutcomeLabel::identify(1)}};
  const OpticalNetwork net = synthesize_plan(plan);

  const std::uint64_t shots = 100000;
  const MonteCarloResult mc = monte_carlo(net, plan, ens, shots, 20240811);

  const Matrix rho = ens.density();
  for (std::size_t m = 0; m < mc.outcomes.size(); ++m) {
    double prob = 0.0;
    for (const auto& e : opt.design.povms.elements) {
      if (e.label == mc.outcomes[m]) prob += (e.op * rho).trace().real();
    }
    std::uint64_t count = 0;
    for (int j = 0; j < 2; ++j) count += mc.counts[j][m];
    const double freq = static_cast<double>(count) / shots;
    const double sigma = std::sqrt(prob * (1.0 - prob) / shots);
    std::printf("  outcome %-11s freq %.5f analytic %.5f (%.2f sigma)\n",
                mc.outcomes[m].str().c_str(), freq, prob,
                sigma > 0 ? std::abs(freq - prob) / sigma : 0.0);
    c.require(std::abs(freq - prob) <= 4.0 * sigma,
              "outcome " + mc.outcomes[m].str() + " outside 4 sigma");

    // Misidentification counts must be exactly zero.
    if (mc.outcomes[m].kind == OutcomeLabel::Kind::Identify) {
      const int other = 1 - mc.outcomes[m].index;
      c.require(mc.counts[other][m] == 0,
                "forbidden outcome fired for state " + std::to_string(other + 1));
    }
  }
  for (const auto& n : c.notes) std::printf("  ! %s\n", n.c_str());
  return c.ok;
}

// --- criterion 8: Gram and basis algebra ------------------------------------
bool criterion8() {
  Criterion c;
  std::mt19937_64 rng(202408108);
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + rep % 4;
    const GramMatrix g = validate_gram(test::random_gram(rng, n));
    const GramDerived d = gram_derived(g);
    const DtrBasis b = build_dtr(g);

    // Double reciprocity.
    worst = std::max(worst, (gram_derived(validate_gram(d.recip_gram)).recip_gram - g.o)
                                .cwiseAbs()
                                .maxCoeff());
    // Reconstruction on both triangles.
    worst = std::max(worst, (b.c * b.c.adjoint() - g.o).cwiseAbs().maxCoeff());
    worst = std::max(worst,
                     (b.c_perp * b.c_perp.adjoint() - d.recip_gram).cwiseAbs().maxCoeff());
    // Orthogonality of reciprocals against states.
    const Matrix cross = b.c_perp.conjugate() * b.c.transpose();
    worst = std::max(worst,
                     (cross - Matrix(d.t.asDiagonal())).cwiseAbs().maxCoeff());
    // Closed-form t and reciprocal overlaps vs direct inversion.
    const Matrix inv = g.o.inverse();
    for (int j = 0; j < n; ++j) {
      worst = std::max(worst, std::abs(d.t(j) - 1.0 / std::sqrt(inv(j, j).real())));
    }
  }
  c.require(worst <= 1e-10, "algebra residual " + format_num(worst));

  // Low-dimensional fixture formulas at three numeric instantiations each.
  double fixture_worst = 0.0;
  for (int rep = 0; rep < 3; ++rep) {
    {
      const Matrix o = test::random_gram(rng, 2);
      const GramDerived d = gram_derived(validate_gram(o));
      fixture_worst = std::max(fixture_worst,
                               std::abs(d.determinant - (1.0 - std::norm(o(0, 1)))));
      Matrix operp(2, 2);
      operp << 1.0, -o(0, 1), -o(1, 0), 1.0;
      fixture_worst =
          std::max(fixture_worst, (d.recip_gram - operp).cwiseAbs().maxCoeff());
      fixture_worst = std::max(
          fixture_worst, std::abs(d.t(0) - std::sqrt(1.0 - std::norm(o(0, 1)))));
      fixture_worst = std::max(
          fixture_worst, std::abs(d.t(1) - std::sqrt(1.0 - std::norm(o(0, 1)))));
    }
    {
      const Matrix o = test::random_gram(rng, 3);
      const GramDerived d = gram_derived(validate_gram(o));
      const Complex det3 = Complex(1.0) - std::norm(o(0, 1)) - std::norm(o(0, 2)) -
                           std::norm(o(1, 2)) + o(0, 1) * o(1, 2) * o(2, 0) +
                           o(1, 0) * o(0, 2) * o(2, 1);
      fixture_worst = std::max(fixture_worst, std::abs(d.determinant - det3.real()));

      Matrix adj(3, 3);
      adj(0, 0) = Complex(1.0) - std::norm(o(1, 2));
      adj(0, 1) = o(0, 2) * o(2, 1) - o(0, 1);
      adj(0, 2) = o(0, 1) * o(1, 2) - o(0, 2);
      adj(1, 0) = o(1, 2) * o(2, 0) - o(1, 0);
      adj(1, 1) = Complex(1.0) - std::norm(o(0, 2));
      adj(1, 2) = o(1, 0) * o(0, 2) - o(1, 2);
      adj(2, 0) = o(2, 1) * o(1, 0) - o(2, 0);
      adj(2, 1) = o(2, 0) * o(0, 1) - o(2, 1);
      adj(2, 2) = Complex(1.0) - std::norm(o(0, 1));
      fixture_worst =
          std::max(fixture_worst, (d.adjugate - adj).cwiseAbs().maxCoeff());

      for (int j = 0; j < 3; ++j) {
        fixture_worst = std::max(
            fixture_worst,
            std::abs(d.t(j) - std::sqrt(det3.real() / adj(j, j).real())));
      }
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          const Complex expect =
              adj(i, j) / std::sqrt(adj(i, i).real() * adj(j, j).real());
          fixture_worst = std::max(fixture_worst, std::abs(d.recip_gram(i, j) - expect));
        }
      }
    }
  }
  c.require(fixture_worst <= 1e-10, "fixture residual " + format_num(fixture_worst));
  std::printf("  algebra residual %.3g, fixture residual %.3g\n", worst, fixture_worst);
  for (const auto& n : c.notes) std::printf("  ! %s\n", n.c_str());
  return c.ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  if (argc > 1) {
    which.push_back(std::atoi(argv[1]));
  } else {
    for (int i = 1; i <= 8; ++i) which.push_back(i);
  }
  bool all_ok = true;
  for (int i : which) {
    bool ok = false;
    switch (i) {
      case 1: std::printf("criterion 1: two-state closed forms vs scan\n"); ok = criterion1(); break;
      case 2: std::printf("criterion 2: three-state filtering closed forms\n"); ok = criterion2(); break;
      case 3: std::printf("criterion 3: symmetric three-state optimum\n"); ok = criterion3(); break;
      case 4: std::printf("criterion 4: coherent-state curve\n"); ok = criterion4(); break;
      case 5: std::printf("criterion 5: POVM validity suite\n"); ok = criterion5(); break;
      case 6: std::printf("criterion 6: optics round trip\n"); ok = criterion6(); break;
      case 7: std::printf("criterion 7: Monte Carlo statistics\n"); ok = criterion7(); break;
      case 8: std::printf("criterion 8: Gram and basis algebra\n"); ok = criterion8(); break;
      default: std::fprintf(stderr, "unknown criterion %d\n", i); return 2;
    }
    std::printf("criterion %d: %s\n", i, ok ? "PASS" : "FAIL");
    all_ok = all_ok && ok;
  }
  return all_ok ? 0 : 1;
}
