#include "uqsd/optics.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include "uqsd/strategies.hpp"

namespace uqsd {

namespace {

std::string format_g12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

OutcomeLabel parse_label(const std::string& s) {
  if (s == "fail") return OutcomeLabel::fail();
  if (s.rfind("identify-", 0) == 0) return OutcomeLabel::identify(std::stoi(s.substr(9)) - 1);
  if (s.rfind("group-", 0) == 0) return OutcomeLabel::group(std::stoi(s.substr(6)) - 1);
  throw Error(ErrorCode::ParseError, "unknown port label '" + s + "'");
}

void apply_element(const OpticalElement& e, Matrix& amps) {
  if (e.kind == OpticalElement::Kind::PhaseShifter) {
    amps.row(e.rail_a) *= std::exp(Complex(0.0, e.phase));
    return;
  }
  const double s = std::sin(e.angle), c = std::cos(e.angle);
  const Eigen::RowVectorXcd a = amps.row(e.rail_a);
  const Eigen::RowVectorXcd b = amps.row(e.rail_b);
  amps.row(e.rail_a) = -s * a + c * b;
  amps.row(e.rail_b) = c * a + s * b;
}

}  // namespace

Eigen::Matrix2d bs_unitary(double omega) {
  if (!std::isfinite(omega)) throw Error(ErrorCode::InvalidOmega, "beam splitter angle");
  Eigen::Matrix2d u;
  u << -std::sin(omega), std::cos(omega), std::cos(omega), std::sin(omega);
  return u;
}

std::pair<double, double> nulling_angle(Complex c_rail, Complex c_collector) {
  const double mr = std::abs(c_rail), mc = std::abs(c_collector);
  if (mr == 0.0 && mc == 0.0) {
    throw Error(ErrorCode::ZeroInput, "nulling a zero amplitude pair");
  }
  const double omega = std::atan2(mc, mr);
  const double phase = -std::arg(mr > 0.0 ? c_rail : c_collector);
  return {omega, phase};
}

Matrix OpticalNetwork::transfer() const {
  Matrix u = Matrix::Identity(n_rails, n_rails);
  for (const auto& e : elements) apply_element(e, u);
  return u;
}

OpticalNetwork synthesize_plan(const NetworkPlan& plan) {
  const int n = plan.n_signal;
  const int n_states = static_cast<int>(plan.state_kets.cols());
  const int n_rails = n + static_cast<int>(plan.stages.size());

  OpticalNetwork net;
  net.n_signal = n;
  net.n_rails = n_rails;

  Matrix amps = Matrix::Zero(n_rails, n_states);
  amps.topRows(n) = plan.state_kets;

  std::vector<bool> ported(n_rails, false);
  auto assign_port = [&](int rail, OutcomeLabel label) {
    if (ported[rail]) {
      throw Error(ErrorCode::InconsistentStaging,
                  "rail " + std::to_string(rail) + " assigned twice");
    }
    ported[rail] = true;
    net.ports.emplace_back(rail, label);
  };
  auto emit = [&](OpticalElement e) {
    apply_element(e, amps);
    net.elements.push_back(e);
  };

  int stage_no = 0;
  for (const auto& stage : plan.stages) {
    ++stage_no;
    const int anc = n + stage_no - 1;
    const int f = stage.filtered_state;
    if (ported[stage.signature_rail]) {
      throw Error(ErrorCode::InconsistentStaging, "signature rail already consumed");
    }

    const Complex a_sig = amps(stage.signature_rail, f);
    if (std::abs(a_sig) > 0.0 && std::abs(std::arg(a_sig)) > 1e-15) {
      emit({OpticalElement::Kind::PhaseShifter, stage_no, stage.signature_rail, 0, 0.0,
            -std::arg(a_sig)});
    }
    emit({OpticalElement::Kind::BeamSplitter, stage_no, stage.signature_rail, anc,
          stage.omega, 0.0});
    assign_port(stage.signature_rail, stage.detector);

    for (int rail : stage.null_rails) {
      if (ported[rail]) {
        throw Error(ErrorCode::InconsistentStaging, "null rail already consumed");
      }
      const Complex c_rail = amps(rail, f);
      const Complex c_coll = amps(anc, f);
      if (std::abs(c_rail) < 1e-12 && std::abs(c_coll) < 1e-12) {
        // Cascade ran dry: nothing of the filtered state left to null.
        OpticalElement e{OpticalElement::Kind::BeamSplitter, stage_no, rail, anc,
                         M_PI / 2.0, 0.0};
        e.degenerate = true;
        emit(e);
        continue;
      }
      const auto [theta, phi] = nulling_angle(c_rail, c_coll);
      if (std::abs(phi) > 1e-15) {
        emit({OpticalElement::Kind::PhaseShifter, stage_no, rail, 0, 0.0, phi});
      }
      emit({OpticalElement::Kind::BeamSplitter, stage_no, rail, anc, theta, 0.0});
    }
    assign_port(anc, OutcomeLabel::fail());
  }

  for (const auto& [rail, label] : plan.terminal_ports) assign_port(rail, label);
  for (int r = 0; r < n_rails; ++r) {
    if (!ported[r]) {
      throw Error(ErrorCode::InconsistentStaging,
                  "rail " + std::to_string(r) + " has no port");
    }
  }
  return net;
}

OpticalNetwork synthesize_filter_network(const Ensemble& ens, double omega) {
  if (!std::isfinite(omega)) throw Error(ErrorCode::InvalidOmega, "omega");
  NetworkPlan plan;
  plan.n_signal = ens.n();
  plan.state_kets = ens.dtr.state_kets();
  FilterStage st;
  st.filtered_state = 0;
  st.signature_rail = 0;
  st.omega = omega;
  for (int r = 1; r < ens.n(); ++r) st.null_rails.push_back(r);
  st.detector = OutcomeLabel::group(0);
  plan.stages.push_back(st);
  for (int r = 1; r < ens.n(); ++r) {
    plan.terminal_ports.emplace_back(r, OutcomeLabel::group(1));
  }
  return synthesize_plan(plan);
}

OpticalNetwork synthesize_staged_network(const StrategyResult& result) {
  return synthesize_plan(result.plan);
}

Vector propagate_ket(const OpticalNetwork& net, const Vector& ket) {
  if (ket.size() != net.n_signal) {
    throw Error(ErrorCode::DimensionMismatch, "ket does not match signal rails");
  }
  Matrix amps = Matrix::Zero(net.n_rails, 1);
  amps.topRows(net.n_signal) = ket;
  for (const auto& e : net.elements) apply_element(e, amps);
  return amps.col(0);
}

Vector propagate(const OpticalNetwork& net, const NetworkPlan& plan, int state_index) {
  return propagate_ket(net, plan.state_kets.col(state_index));
}

PovmSet extract_povms(const OpticalNetwork& net) {
  const Matrix u = net.transfer();
  PovmSet set;
  std::vector<OutcomeLabel> order;
  std::vector<Matrix> ops;
  for (const auto& [rail, label] : net.ports) {
    const Vector back = u.row(rail).adjoint();  // U^dagger delta_rail
    const Vector pe = back.head(net.n_signal);
    const Matrix op = pe * pe.adjoint();
    bool merged = false;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (order[i] == label) {
        ops[i] += op;
        merged = true;
        break;
      }
    }
    if (!merged) {
      order.push_back(label);
      ops.push_back(op);
    }
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    set.elements.push_back({order[i], ops[i]});
  }
  return set;
}

MonteCarloResult monte_carlo(const OpticalNetwork& net, const NetworkPlan& plan,
                             const Ensemble& ens, std::uint64_t shots, std::uint64_t seed) {
  const int n = ens.n();

  std::vector<OutcomeLabel> outcomes;
  std::vector<int> port_outcome(net.ports.size());
  for (std::size_t p = 0; p < net.ports.size(); ++p) {
    const OutcomeLabel label = net.ports[p].second;
    int idx = -1;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      if (outcomes[i] == label) idx = static_cast<int>(i);
    }
    if (idx < 0) {
      idx = static_cast<int>(outcomes.size());
      outcomes.push_back(label);
    }
    port_outcome[p] = idx;
  }

  // Per-state port probabilities; sub-rounding amplitudes are dark.
  std::vector<std::vector<double>> cdf(n);
  for (int j = 0; j < n; ++j) {
    const Vector out = propagate(net, plan, j);
    double acc = 0.0;
    for (const auto& [rail, label] : net.ports) {
      double p = std::norm(out(rail));
      if (p < 1e-28) p = 0.0;
      acc += p;
      cdf[j].push_back(acc);
    }
    for (double& v : cdf[j]) v /= acc;
  }
  std::vector<double> prior_cdf;
  {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      acc += ens.priors(j);
      prior_cdf.push_back(acc);
    }
    for (double& v : prior_cdf) v /= acc;
  }

  MonteCarloResult res;
  res.outcomes = outcomes;
  res.counts.assign(n, std::vector<std::uint64_t>(outcomes.size(), 0));
  res.state_totals.assign(n, 0);

  std::mt19937_64 gen(seed);
  auto u01 = [&gen]() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  auto pick = [](const std::vector<double>& c, double u) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (u < c[i]) return static_cast<int>(i);
    }
    return static_cast<int>(c.size()) - 1;
  };

  for (std::uint64_t s = 0; s < shots; ++s) {
    const int j = pick(prior_cdf, u01());
    const int p = pick(cdf[j], u01());
    ++res.counts[j][port_outcome[p]];
    ++res.state_totals[j];
  }
  return res;
}

std::string layout_to_string(const OpticalNetwork& net) {
  std::ostringstream os;
  os << "rails\t" << net.n_rails << "\t" << net.n_signal << "\n";
  for (const auto& e : net.elements) {
    if (e.kind == OpticalElement::Kind::BeamSplitter) {
      os << e.stage << "\tBS\t" << e.rail_a << "," << e.rail_b << "\t"
         << format_g12(e.angle) << "\t0";
      if (e.degenerate) os << "\tdegenerate";
      os << "\n";
    } else {
      os << e.stage << "\tPS\t" << e.rail_a << "\t0\t" << format_g12(e.phase) << "\n";
    }
  }
  for (const auto& [rail, label] : net.ports) {
    os << "port\t" << rail << "\t" << label.str() << "\n";
  }
  return os.str();
}

OpticalNetwork layout_from_string(const std::string& text) try {
  OpticalNetwork net;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    std::getline(ls, tok, '\t');
    if (tok == "rails") {
      std::string a, b;
      std::getline(ls, a, '\t');
      std::getline(ls, b, '\t');
      net.n_rails = std::stoi(a);
      net.n_signal = std::stoi(b);
    } else if (tok == "port") {
      std::string rail, label;
      std::getline(ls, rail, '\t');
      std::getline(ls, label, '\t');
      net.ports.emplace_back(std::stoi(rail), parse_label(label));
    } else {
      OpticalElement e;
      e.stage = std::stoi(tok);
      std::string kind, rails, angle, phase, flag;
      std::getline(ls, kind, '\t');
      std::getline(ls, rails, '\t');
      std::getline(ls, angle, '\t');
      std::getline(ls, phase, '\t');
      if (std::getline(ls, flag, '\t')) e.degenerate = (flag == "degenerate");
      if (kind == "BS") {
        e.kind = OpticalElement::Kind::BeamSplitter;
        const auto comma = rails.find(',');
        if (comma == std::string::npos) {
          throw Error(ErrorCode::ParseError, "beam splitter needs two rails");
        }
        e.rail_a = std::stoi(rails.substr(0, comma));
        e.rail_b = std::stoi(rails.substr(comma + 1));
        e.angle = std::stod(angle);
      } else if (kind == "PS") {
        e.kind = OpticalElement::Kind::PhaseShifter;
        e.rail_a = std::stoi(rails);
        e.phase = std::stod(phase);
      } else {
        throw Error(ErrorCode::ParseError, "unknown element kind '" + kind + "'");
      }
      net.elements.push_back(e);
    }
  }
  if (net.n_rails == 0) throw Error(ErrorCode::ParseError, "missing rails header");
  return net;
} catch (const Error&) {
  throw;
} catch (const std::exception& e) {
  throw Error(ErrorCode::ParseError, std::string("bad layout: ") + e.what());
}

}  // namespace uqsd
