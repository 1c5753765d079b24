#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "uqsd/povm.hpp"

namespace uqsd {

struct StrategyResult;  // strategies.hpp

/// Four-port beam splitter or phase shifter on labeled rails.
struct OpticalElement {
  enum class Kind { BeamSplitter, PhaseShifter };

  Kind kind = Kind::BeamSplitter;
  int stage = 0;
  int rail_a = 0;           // beam splitter: reflected output; phase shifter: target rail
  int rail_b = 0;           // beam splitter second rail (collector side)
  double angle = 0.0;       // beam splitter angle
  double phase = 0.0;       // phase shifter value
  bool degenerate = false;  // emitted as pass-through because the cascade ran dry
};

/// Cascade of elements on n_rails wires; every output rail carries exactly one
/// detector or failure port.
struct OpticalNetwork {
  int n_rails = 0;
  int n_signal = 0;  // leading rails carry the basis modes, the rest are ancillas
  std::vector<OpticalElement> elements;
  std::vector<std::pair<int, OutcomeLabel>> ports;  // rail -> outcome

  /// Dense transfer matrix, derived on demand.
  Matrix transfer() const;
};

/// Reflection/transmission matrix of one beam splitter.
Eigen::Matrix2d bs_unitary(double omega);

/// Angle and phase that route a phase-aligned amplitude pair (rail, collector)
/// entirely into the collector output, zeroing the reflected one.
std::pair<double, double> nulling_angle(Complex c_rail, Complex c_collector);

/// One filtering stage of a staged design.
struct FilterStage {
  int filtered_state = 0;        // whose residual the cascade nulls
  int signature_rail = 0;        // rail carrying the stage's detector
  double omega = 0.0;            // free beam-splitter angle of the stage
  std::vector<int> null_rails;   // cascade order
  OutcomeLabel detector;         // label of the signature-rail port
};

/// Recipe from which a network is synthesized: state kets drive the nulling
/// angles, stages run in order, remaining rails get terminal labels.
struct NetworkPlan {
  int n_signal = 0;
  Matrix state_kets;  // column j = ket of state j in the {e_j} frame
  std::vector<FilterStage> stages;
  std::vector<std::pair<int, OutcomeLabel>> terminal_ports;
};

OpticalNetwork synthesize_plan(const NetworkPlan& plan);

/// Single-stage filtering network: one ancilla, detector for state 1 on the
/// first rail, group detectors on the nulled rails, failure on the ancilla.
OpticalNetwork synthesize_filter_network(const Ensemble& ens, double omega);

/// Network for a composite strategy (uses the plan the strategy carries).
OpticalNetwork synthesize_staged_network(const StrategyResult& result);

/// Output amplitudes of state `state_index` injected on the signal rails.
Vector propagate(const OpticalNetwork& net, const NetworkPlan& plan, int state_index);

/// Output amplitudes of an arbitrary signal-rail ket.
Vector propagate_ket(const OpticalNetwork& net, const Vector& ket);

/// Pulls every port back through the inverse network and projects onto the
/// signal rails; elements with equal labels are summed.
PovmSet extract_povms(const OpticalNetwork& net);

/// Seedable counting experiment: draws states by prior, ports by |amplitude|^2.
/// Port probabilities below 1e-28 are treated as exactly dark. The stream is
/// a single mt19937_64 seeded directly; doubles come from the top 53 bits.
struct MonteCarloResult {
  std::vector<OutcomeLabel> outcomes;                 // column labels
  std::vector<std::vector<std::uint64_t>> counts;     // [state][outcome]
  std::vector<std::uint64_t> state_totals;
};

MonteCarloResult monte_carlo(const OpticalNetwork& net, const NetworkPlan& plan,
                             const Ensemble& ens, std::uint64_t shots, std::uint64_t seed);

/// Tab-separated layout, one line per element plus port lines. Parse inverts it.
std::string layout_to_string(const OpticalNetwork& net);
OpticalNetwork layout_from_string(const std::string& text);

}  // namespace uqsd
