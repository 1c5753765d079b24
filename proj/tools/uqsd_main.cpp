#include <cmath>
#include <iostream>
#include <sstream>
#include <vector>

#include <CLI11.hpp>

#include "uqsd/problem.hpp"

namespace {

using namespace uqsd;

int run_design(const std::string& path, const std::string& out, bool residuals_only) {
  const DesignOutcome d = design_problem(load_problem(path));
  const std::string report = render_report(d, residuals_only);
  if (out.empty()) {
    std::cout << report;
  } else {
    write_atomic(out, report);
  }
  return d.validity.pass && d.zeros.pass ? 0 : 2;
}

int run_simulate(const std::string& path, std::uint64_t shots, std::uint64_t seed,
                 const std::string& out) {
  const DesignOutcome d = design_problem(load_problem(path));
  const OpticalNetwork net = synthesize_staged_network(d.strategy);

  std::ostringstream os;
  os << "shots: " << shots << "\nseed: " << seed << "\n";
  if (shots > 0) {
    const MonteCarloResult mc =
        monte_carlo(net, d.strategy.plan, d.strategy.ensemble, shots, seed);
    os << "state";
    for (const auto& label : mc.outcomes) os << "\t" << label.str();
    os << "\n";
    const Ensemble& ens = d.strategy.ensemble;
    for (int j = 0; j < ens.n(); ++j) {
      os << j + 1;
      for (std::size_t m = 0; m < mc.outcomes.size(); ++m) os << "\t" << mc.counts[j][m];
      os << "\n";
      if (mc.state_totals[j] == 0) continue;
      os << "  empirical/analytic/z:";
      const Vector psi = ens.dtr.state_ket(j);
      for (std::size_t m = 0; m < mc.outcomes.size(); ++m) {
        double prob = 0.0;
        for (const auto& e : d.strategy.povms.elements) {
          if (e.label == mc.outcomes[m]) prob += (psi.adjoint() * e.op * psi)(0).real();
        }
        if (std::abs(prob) < 1e-15) prob = 0.0;
        const double nshots = static_cast<double>(mc.state_totals[j]);
        const double emp = static_cast<double>(mc.counts[j][m]) / nshots;
        const double sigma = std::sqrt(prob * (1.0 - prob) / nshots);
        const double z = sigma > 0.0 ? (emp - prob) / sigma : 0.0;
        os << " " << format_num(emp) << "/" << format_num(prob) << "/" << format_num(z);
      }
      os << "\n";
    }
  }
  if (out.empty()) {
    std::cout << os.str();
  } else {
    write_atomic(out, os.str());
  }
  return 0;
}

int run_bb84(double mu_min, double mu_max, int points, const std::string& out) {
  if (!(0.0 < mu_min && mu_min < mu_max) || points < 2) {
    throw Error(ErrorCode::InvalidRange, "need 0 < mu-min < mu-max and points >= 2");
  }
  std::vector<double> mus(points);
  for (int i = 0; i < points; ++i) {
    mus[i] = mu_min + (mu_max - mu_min) * i / (points - 1);
  }
  std::ostringstream os;
  os << "mu\tf_scanned\tf_analytic\trel_gap\tomega1\tomega2\n";
  for (const Bb84Point& p : bb84_curve(mus)) {
    os << format_num(p.mu) << "\t" << format_num(p.f_scanned) << "\t"
       << format_num(p.f_analytic) << "\t"
       << format_num((p.f_scanned - p.f_analytic) / p.f_analytic) << "\t"
       << format_num(p.omega1) << "\t" << format_num(p.omega2) << "\n";
  }
  if (out.empty()) {
    std::cout << os.str();
  } else {
    write_atomic(out, os.str());
  }
  return 0;
}

int run_emit_network(const std::string& path, const std::string& out) {
  const DesignOutcome d = design_problem(load_problem(path));
  const OpticalNetwork net = synthesize_staged_network(d.strategy);
  const std::string layout = layout_to_string(net);
  if (out.empty()) {
    std::cout << layout;
  } else {
    write_atomic(out, layout);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unambiguous state discrimination designer"};
  app.require_subcommand(1);

  std::string problem_path, out_path;
  std::uint64_t shots = 100000, seed = 1;
  double mu_min = 0.1, mu_max = 3.0;
  int points = 30;

  auto* design = app.add_subcommand("design", "design and verify a strategy");
  design->add_option("problem", problem_path)->required();
  design->add_option("--out", out_path);

  auto* verify = app.add_subcommand("verify", "report validity residuals only");
  verify->add_option("problem", problem_path)->required();
  verify->add_option("--out", out_path);

  auto* simulate = app.add_subcommand("simulate", "count measurement outcomes");
  simulate->add_option("problem", problem_path)->required();
  simulate->add_option("--shots", shots);
  simulate->add_option("--seed", seed);
  simulate->add_option("--out", out_path);

  auto* bb84 = app.add_subcommand("bb84", "failure curve for the coherent-state mixtures");
  bb84->add_option("--mu-min", mu_min);
  bb84->add_option("--mu-max", mu_max);
  bb84->add_option("--points", points);
  bb84->add_option("--out", out_path);

  auto* emit = app.add_subcommand("emit-network", "write the interferometer layout");
  emit->add_option("problem", problem_path)->required();
  emit->add_option("--out", out_path);

  CLI11_PARSE(app, argc, argv);

  try {
    if (design->parsed()) return run_design(problem_path, out_path, false);
    if (verify->parsed()) return run_design(problem_path, out_path, true);
    if (simulate->parsed()) return run_simulate(problem_path, shots, seed, out_path);
    if (bb84->parsed()) return run_bb84(mu_min, mu_max, points, out_path);
    if (emit->parsed()) return run_emit_network(problem_path, out_path);
  } catch (const uqsd::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
