#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uqsd/strategies.hpp"

namespace uqsd {

/// Parsed problem description: either explicit amplitude vectors or a Gram
/// matrix, priors, optional grouping, a strategy name and its parameters.
struct ProblemFile {
  std::vector<Vector> states;  // empty when the Gram matrix is given directly
  std::optional<Matrix> gram;
  RealVector priors;
  std::vector<int> groups;  // optional, 0-based
  std::string strategy;

  int background_state = 2;     // "background" strategy, 0-based
  std::vector<double> thetas;   // "jordan"
  double mu = 1.0;              // "bb84" single-point design
  PipelineSpec pipeline;        // "pipeline"
};

ProblemFile parse_problem_text(const std::string& text);
ProblemFile load_problem(const std::string& path);

/// Gram matrix of the problem (computed from normalized amplitude vectors when
/// states are given).
GramMatrix problem_gram(const ProblemFile& p);

struct DesignOutcome {
  ProblemFile problem;
  GramDerived derived;
  StrategyResult strategy;
  ValidityReport validity;
  ZeroReport zeros;
};

/// Runs the problem's strategy at its optimum and verifies the result.
DesignOutcome design_problem(const ProblemFile& p);

/// Full design report; `residuals_only` restricts it to the verification part.
std::string render_report(const DesignOutcome& d, bool residuals_only = false);

/// 12-significant-digit formatting used by every emitted number.
std::string format_num(double v);

/// Writes text to path via a temporary file and rename.
void write_atomic(const std::string& path, const std::string& text);

}  // namespace uqsd
