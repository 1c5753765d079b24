#pragma once

#include "uqsd/povm.hpp"

namespace uqsd {

/// One-parameter filtering of state 1 against states 2..N.
struct FilterDesign {
  double omega = 0.0;
  PovmSet povms;
  double failure = 0.0;
};

enum class Regime { A, B, C };  // omega = 0 boundary, interior, omega = pi/2 boundary

const char* to_string(Regime r);

struct RegimeResult {
  Regime regime = Regime::B;
  double omega_opt = 0.0;
  double f_opt = 0.0;
  FilterDesign design;
};

/// Filtering POVMs at a given angle: the detection operator for state 1 is
/// sin^2(omega) times the reciprocal projector, the failure operator is built
/// from the filtered state's residual, the group detector is the complement.
FilterDesign filter_povms(const Ensemble& ens, double omega);

/// Closed-form failure curve of the filtering family.
double filter_failure(const Ensemble& ens, double omega);

/// Closed-form optimum over omega with the three-regime split on
/// S = sqrt(sum_k (eta_k/eta_1) |o_1k|^2). Boundary equalities go to the
/// interior regime.
RegimeResult optimal_filter(const Ensemble& ens);

/// n = 2 specialization with both detection operators explicit.
FilterDesign two_state_design(const Ensemble& ens, double omega);

/// n = 2 closed-form optimum; regimes split on sqrt(eta_2/eta_1) against
/// |o_12| and 1/|o_12|.
RegimeResult two_state_optimal(const Ensemble& ens);

/// Scalar form of the two-state regime pick, reused by composite strategies.
struct ScalarRegime {
  Regime regime = Regime::B;
  double omega_opt = 0.0;
  double f_opt = 0.0;
};
ScalarRegime two_state_closed(double eta1, double eta2, double mod);

/// Group map for filtering state 1 against the rest: {0, 1, 1, ...}.
std::vector<int> filtering_groups(int n);

}  // namespace uqsd
