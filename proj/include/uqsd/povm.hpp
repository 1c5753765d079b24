#pragma once

#include <string>
#include <vector>

#include "uqsd/dtr.hpp"
#include "uqsd/gram.hpp"
#include "uqsd/types.hpp"

namespace uqsd {

/// Measurement outcome semantics. Indices are 0-based internally and printed
/// 1-based.
struct OutcomeLabel {
  enum class Kind { Identify, GroupIdentify, Fail };

  Kind kind = Kind::Fail;
  int index = 0;

  static OutcomeLabel identify(int state) { return {Kind::Identify, state}; }
  static OutcomeLabel group(int g) { return {Kind::GroupIdentify, g}; }
  static OutcomeLabel fail() { return {Kind::Fail, 0}; }

  bool operator==(const OutcomeLabel& other) const {
    return kind == other.kind && (kind == Kind::Fail || index == other.index);
  }

  std::string str() const;
};

struct PovmElement {
  OutcomeLabel label;
  Matrix op;  // Hermitian operator in the {e_j} frame
};

struct PovmSet {
  std::vector<PovmElement> elements;

  int dim() const { return elements.empty() ? 0 : static_cast<int>(elements.front().op.rows()); }
};

/// Prior-weighted state set over a double-triangle basis.
struct Ensemble {
  RealVector priors;          // eta_j, nonnegative, sums to 1
  std::vector<int> group_of;  // group id per state
  DtrBasis dtr;
  GramMatrix gram;

  int n() const { return dtr.n; }
  Matrix density() const;
};

/// Builds an ensemble from a raw overlap matrix, validating it along with the
/// priors and groups. An empty group list means every state is its own group.
Ensemble make_ensemble(const Matrix& raw, const RealVector& priors,
                       std::vector<int> group_of = {});

struct ValidityReport {
  double completeness_residual = 0.0;
  double min_eigenvalue = 0.0;
  double hermiticity_residual = 0.0;
  // Largest eigenvalue of the summed detection operators; equals 1 when some
  // state direction is detected with certainty.
  double max_detection_eigenvalue = 0.0;
  bool pass = false;
};

ValidityReport verify_povm(const PovmSet& s);

struct ZeroReport {
  std::vector<std::pair<OutcomeLabel, double>> per_element;
  double max_residual = 0.0;
  bool pass = false;
};

/// Unambiguity check: every identifying element must annihilate the states it
/// is not allowed to fire for.
ZeroReport zero_conditions(const PovmSet& s, const Ensemble& ens);

/// Tr(E_fail rho), summed over all failure-labeled elements.
double failure_probability(const PovmSet& s, const Ensemble& ens);

}  // namespace uqsd
