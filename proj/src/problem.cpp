#include "uqsd/problem.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace uqsd {

namespace {

using nlohmann::json;

Complex parse_complex(const json& v, const std::string& where) {
  if (v.is_number()) return Complex(v.get<double>(), 0.0);
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return Complex(v[0].get<double>(), v[1].get<double>());
  }
  throw Error(ErrorCode::ParseError, where + ": complex values are numbers or [re, im]");
}

Matrix parse_complex_matrix(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) {
    throw Error(ErrorCode::ParseError, where + ": expected a list of rows");
  }
  const int n = static_cast<int>(rows.size());
  Matrix m(n, static_cast<int>(rows[0].size()));
  for (int i = 0; i < n; ++i) {
    if (!rows[i].is_array() || static_cast<Eigen::Index>(rows[i].size()) != m.cols()) {
      throw Error(ErrorCode::ParseError, where + ": ragged rows");
    }
    for (int j = 0; j < m.cols(); ++j) m(i, j) = parse_complex(rows[i][j], where);
  }
  return m;
}

int parse_state_index(const json& v, int n, const std::string& where) {
  if (!v.is_number_integer()) throw Error(ErrorCode::ParseError, where + ": expected a state index");
  const int idx = v.get<int>() - 1;  // 1-based in files
  if (idx < 0 || idx >= n) throw Error(ErrorCode::ParseError, where + ": state index out of range");
  return idx;
}

}  // namespace

std::string format_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error(ErrorCode::InvalidRange, "cannot write " + tmp);
    os << text;
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw Error(ErrorCode::InvalidRange, "cannot rename into " + path);
  }
}

ProblemFile parse_problem_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }

  ProblemFile p;
  if (!j.contains("strategy") || !j["strategy"].is_string()) {
    throw Error(ErrorCode::ParseError, "missing 'strategy'");
  }
  p.strategy = j["strategy"].get<std::string>();
  const std::vector<std::string> known{"filter",      "two-state",    "background",
                                       "jordan",      "three-state",  "four-mixture",
                                       "pipeline",    "bb84"};
  if (std::find(known.begin(), known.end(), p.strategy) == known.end()) {
    throw Error(ErrorCode::ParseError, "unknown strategy '" + p.strategy + "'");
  }
  if (p.strategy == "bb84") {
    // The coherent-state problem fixes its own states and priors.
    if (j.contains("mu")) p.mu = j["mu"].get<double>();
    p.priors = RealVector::Constant(4, 0.25);
    return p;
  }

  const bool has_states = j.contains("states");
  const bool has_gram = j.contains("gram");
  if (has_states == has_gram) {
    throw Error(ErrorCode::ParseError, "exactly one of 'states' or 'gram' is required");
  }

  int n = 0;
  if (has_gram) {
    p.gram = parse_complex_matrix(j["gram"], "gram");
    n = static_cast<int>(p.gram->rows());
  } else {
    const auto& rows = j["states"];
    if (!rows.is_array() || rows.size() < 2) {
      throw Error(ErrorCode::ParseError, "states: need at least two vectors");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (!row.is_array() || row.empty()) {
        throw Error(ErrorCode::ParseError, "states: each state is a list of amplitudes");
      }
      Vector v(row.size());
      for (std::size_t k = 0; k < row.size(); ++k) v(k) = parse_complex(row[k], "states");
      if (v.norm() == 0.0) throw Error(ErrorCode::ParseError, "states: zero amplitude vector");
      p.states.push_back(v);
    }
    n = static_cast<int>(p.states.size());
    for (const auto& v : p.states) {
      if (v.size() != p.states[0].size()) {
        throw Error(ErrorCode::ParseError, "states: dimensions differ");
      }
    }
  }

  if (!j.contains("priors") || !j["priors"].is_array() ||
      static_cast<int>(j["priors"].size()) != n) {
    throw Error(ErrorCode::ParseError, "'priors' must list one weight per state");
  }
  p.priors = RealVector(n);
  for (int i = 0; i < n; ++i) p.priors(i) = j["priors"][i].get<double>();

  if (j.contains("groups")) {
    const auto& g = j["groups"];
    if (!g.is_object()) throw Error(ErrorCode::ParseError, "'groups' maps state index to group id");
    p.groups.assign(n, -1);
    for (auto it = g.begin(); it != g.end(); ++it) {
      const int state = std::stoi(it.key()) - 1;
      if (state < 0 || state >= n) throw Error(ErrorCode::ParseError, "groups: state out of range");
      p.groups[state] = it.value().get<int>() - 1;
    }
    for (int v : p.groups) {
      if (v < 0) throw Error(ErrorCode::ParseError, "groups: every state needs a group");
    }
  }

  if (p.strategy == "background" && j.contains("background")) {
    p.background_state = parse_state_index(j["background"], n, "background");
  }
  if (p.strategy == "jordan") {
    if (!j.contains("thetas") || !j["thetas"].is_array()) {
      throw Error(ErrorCode::ParseError, "jordan strategy needs 'thetas'");
    }
    for (const auto& th : j["thetas"]) p.thetas.push_back(th.get<double>());
  }
  if (p.strategy == "pipeline") {
    if (!j.contains("stages") || !j["stages"].is_array() || j["stages"].empty()) {
      throw Error(ErrorCode::ParseError, "pipeline strategy needs 'stages'");
    }
    for (const auto& st : j["stages"]) {
      StageSpec stage;
      if (!st.contains("target")) throw Error(ErrorCode::ParseError, "stage needs 'target'");
      stage.target = parse_state_index(st["target"], n, "stages");
      if (st.contains("background")) {
        for (const auto& b : st["background"]) {
          stage.background.push_back(parse_state_index(b, n, "stages"));
        }
      }
      p.pipeline.stages.push_back(stage);
    }
  }
  return p;
}

ProblemFile load_problem(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return parse_problem_text(buf.str());
}

GramMatrix problem_gram(const ProblemFile& p) {
  if (p.gram) return validate_gram(*p.gram);
  const int n = static_cast<int>(p.states.size());
  Matrix o(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      o(i, j) = p.states[i].dot(p.states[j]) / (p.states[i].norm() * p.states[j].norm());
    }
    o(i, i) = 1.0;
  }
  // Symmetrize rounding dust so validation sees an exactly Hermitian matrix.
  o = ((o + o.adjoint()) / 2.0).eval();
  return validate_gram(o);
}

namespace {

StrategyResult wrap_regime(const RegimeResult& r, const Ensemble& ens, bool group_labels) {
  StrategyResult res;
  res.params = {{"omega", r.omega_opt}};
  res.f_opt = r.f_opt;
  res.povms = r.design.povms;
  res.regime_notes = {std::string("regime ") + to_string(r.regime)};
  res.ensemble = ens;
  res.state_order.resize(ens.n());
  for (int i = 0; i < ens.n(); ++i) res.state_order[i] = i;

  res.plan.n_signal = ens.n();
  res.plan.state_kets = ens.dtr.state_kets();
  FilterStage st;
  st.filtered_state = 0;
  st.signature_rail = 0;
  st.omega = r.omega_opt;
  for (int k = 1; k < ens.n(); ++k) st.null_rails.push_back(k);
  st.detector = group_labels ? OutcomeLabel::group(0) : OutcomeLabel::identify(0);
  res.plan.stages = {st};
  for (int k = 1; k < ens.n(); ++k) {
    res.plan.terminal_ports.emplace_back(
        k, group_labels ? OutcomeLabel::group(1) : OutcomeLabel::identify(1));
  }
  return res;
}

}  // namespace

DesignOutcome design_problem(const ProblemFile& p) {
  DesignOutcome out;
  out.problem = p;

  if (p.strategy == "bb84") {
    const Ensemble ens = make_ensemble(bb84_gram(p.mu).o, p.priors, {0, 0, 1, 1});
    out.strategy = four_state_optimal(ens);
  } else {
    const GramMatrix gram = problem_gram(p);
    const int n = gram.n();

    if (p.strategy == "filter") {
      std::vector<int> groups = p.groups.empty() ? filtering_groups(n) : p.groups;
      const Ensemble ens = make_ensemble(gram.o, p.priors, groups);
      out.strategy = wrap_regime(optimal_filter(ens), ens, true);
    } else if (p.strategy == "two-state") {
      const Ensemble ens = make_ensemble(gram.o, p.priors, p.groups);
      out.strategy = wrap_regime(two_state_optimal(ens), ens, false);
    } else if (p.strategy == "background") {
      // Reorder so the designated background state sits last.
      std::vector<int> order;
      for (int i = 0; i < n; ++i) {
        if (i != p.background_state) order.push_back(i);
      }
      order.push_back(p.background_state);
      Matrix og(n, n);
      RealVector priors(n);
      for (int i = 0; i < n; ++i) {
        priors(i) = p.priors(order[i]);
        for (int j = 0; j < n; ++j) og(i, j) = gram.o(order[i], order[j]);
      }
      const Ensemble ens = make_ensemble(og, priors);
      out.strategy = background_optimal(ens);
      out.strategy.state_order = order;
    } else if (p.strategy == "jordan") {
      JordanSpec spec;
      spec.thetas = p.thetas;
      spec.priors = p.priors;
      out.strategy = jordan_design(spec);
    } else if (p.strategy == "three-state") {
      const Ensemble ens = make_ensemble(gram.o, p.priors, p.groups);
      out.strategy = three_state_optimal(ens);
    } else if (p.strategy == "four-mixture") {
      std::vector<int> groups = p.groups.empty() ? std::vector<int>{0, 0, 1, 1} : p.groups;
      const Ensemble ens = make_ensemble(gram.o, p.priors, groups);
      out.strategy = four_state_optimal(ens);
    } else if (p.strategy == "pipeline") {
      const Ensemble ens = make_ensemble(gram.o, p.priors, p.groups);
      out.strategy = composed_pipeline_optimal(ens, p.pipeline);
    } else {
      throw Error(ErrorCode::ParseError, "unknown strategy '" + p.strategy + "'");
    }
  }

  out.derived = gram_derived(out.strategy.ensemble.gram);
  out.validity = verify_povm(out.strategy.povms);
  out.zeros = zero_conditions(out.strategy.povms, out.strategy.ensemble);
  return out;
}

namespace {

void print_matrix(std::ostringstream& os, const Matrix& m, const std::string& indent) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << indent;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      os << "(" << format_num(m(i, j).real()) << ", " << format_num(m(i, j).imag()) << ")";
      if (j + 1 < m.cols()) os << "  ";
    }
    os << "\n";
  }
}

}  // namespace

std::string render_report(const DesignOutcome& d, bool residuals_only) {
  std::ostringstream os;
  const StrategyResult& s = d.strategy;
  const Ensemble& ens = s.ensemble;

  if (!residuals_only) {
    os << "strategy: " << d.problem.strategy << "\n";
    os << "n: " << ens.n() << "\n";
    os << "priors:";
    for (int j = 0; j < ens.n(); ++j) os << " " << format_num(ens.priors(j));
    os << "\n";
    bool permuted = false;
    for (std::size_t i = 0; i < s.state_order.size(); ++i) {
      if (s.state_order[i] != static_cast<int>(i)) permuted = true;
    }
    if (permuted) {
      os << "state order (internal -> input):";
      for (int v : s.state_order) os << " " << v + 1;
      os << "\n";
    }
    os << "gram:\n";
    print_matrix(os, ens.gram.o, "  ");
    os << "det(O) = " << format_num(d.derived.determinant) << "\n";
    os << "t:";
    for (int j = 0; j < ens.n(); ++j) os << " " << format_num(d.derived.t(j));
    os << "\n";
    os << "reciprocal gram:\n";
    print_matrix(os, d.derived.recip_gram, "  ");

    for (const auto& note : s.regime_notes) os << "note: " << note << "\n";
    for (const auto& [name, value] : s.params) {
      os << name << "_opt = " << format_num(value) << "\n";
    }
    os << "F_opt = " << format_num(s.f_opt) << "\n";

    // Operators both in the basis frame and as reciprocal-state coefficients
    // (E = sum_ij M_ij |psi_perp_i><psi_perp_j|).
    const Matrix pinv = Matrix(ens.dtr.reciprocal_kets()).inverse();
    for (const auto& e : s.povms.elements) {
      os << "povm " << e.label.str() << " (basis frame):\n";
      print_matrix(os, e.op, "  ");
      os << "povm " << e.label.str() << " (reciprocal-projector coefficients):\n";
      print_matrix(os, pinv * e.op * pinv.adjoint(), "  ");
    }
  }

  os << "completeness residual = " << format_num(d.validity.completeness_residual) << "\n";
  os << "min eigenvalue = " << format_num(d.validity.min_eigenvalue) << "\n";
  os << "hermiticity residual = " << format_num(d.validity.hermiticity_residual) << "\n";
  os << "max detection eigenvalue = " << format_num(d.validity.max_detection_eigenvalue)
     << "\n";
  os << "zero-condition residual = " << format_num(d.zeros.max_residual) << "\n";
  os << "validity: " << (d.validity.pass && d.zeros.pass ? "PASS" : "FAIL") << "\n";
  return os.str();
}

}  // namespace uqsd
