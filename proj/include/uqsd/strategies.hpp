#pragma once

#include <string>
#include <vector>

#include "uqsd/filtering.hpp"
#include "uqsd/optics.hpp"
#include "uqsd/povm.hpp"

namespace uqsd {

/// Outcome of a composite strategy: parameters, optimal or evaluated failure,
/// the realized POVMs, and the network recipe that emits them.
struct StrategyResult {
  std::vector<std::pair<std::string, double>> params;
  double f_opt = 0.0;
  PovmSet povms;
  std::vector<std::string> regime_notes;
  NetworkPlan plan;
  Ensemble ensemble;            // ensemble the POVMs and plan are expressed in
  std::vector<int> state_order; // internal index -> caller index
};

// ---- filtering with a background state (n = 3, state 3 shared) ----

/// Effective two-state parameters of the background reduction: subspace
/// overlap o'_12 and scaled priors eta'_j = eta_j (1 - |o_3j|^2).
struct BackgroundReduction {
  Complex o12_eff;
  double eta1_eff = 0.0;
  double eta2_eff = 0.0;
  double f2_const = 0.0;  // prior-weighted weight the background rail absorbs
};
BackgroundReduction background_reduction(const Ensemble& ens);

StrategyResult background_filter(const Ensemble& ens, double omega);
double background_failure(const Ensemble& ens, double omega);
StrategyResult background_optimal(const Ensemble& ens);

// ---- two mixtures in a Jordan-paired basis ----

struct JordanSpec {
  std::vector<double> thetas;  // one angle per two-dimensional sector
  RealVector priors;           // eta_1..eta_K then eta_{K+1}..eta_{2K}
};

StrategyResult jordan_design(const JordanSpec& spec);

// ---- successive filtering of three pure states ----

StrategyResult three_state_design(const Ensemble& ens, double omega1, double omega2);
double three_state_failure(const Ensemble& ens, double omega1, double omega2);
StrategyResult three_state_optimal(const Ensemble& ens);

/// Closed forms for the symmetric case o_12 = o_13 = s1, o_23 = s2 (real,
/// equal priors, s1^2 < s2). Branch 1 applies when s1 >= 2 s2.
struct SymmetricThreeState {
  int branch = 2;
  double f_opt = 0.0;
  double sin2_omega1 = 0.0;
  double f_branch1 = 0.0;
  double f_branch2 = 0.0;
};
SymmetricThreeState symmetric_three_state(double s1, double s2);

// ---- two mixtures of two pure states each (n = 4, groups {1,2}/{3,4}) ----

StrategyResult four_state_mixture_design(const Ensemble& ens, double omega1, double omega2);
double four_state_failure(const Ensemble& ens, double omega1, double omega2);
StrategyResult four_state_optimal(const Ensemble& ens);

// ---- coherent-state application ----

struct CoherentSpec {
  double mu = 1.0;  // mean photon number |alpha|^2
};

/// Overlap matrix of {alpha, -alpha, i alpha, -i alpha}.
GramMatrix bb84_gram(double mu);

/// e^{-mu} (|cos mu| + |sin mu|), the known optimum for the two mixtures.
double bb84_analytic(double mu);

struct Bb84Point {
  double mu = 0.0;
  double f_scanned = 0.0;
  double f_analytic = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
};

std::vector<Bb84Point> bb84_curve(const std::vector<double>& mus);

// ---- generic staged pipeline ----

struct StageSpec {
  int target = 0;               // state index to filter at this stage
  std::vector<int> background;  // states every detector must annihilate
};

struct PipelineSpec {
  std::vector<StageSpec> stages;
};

StrategyResult composed_pipeline(const Ensemble& ens, const PipelineSpec& spec,
                                 const std::vector<double>& omegas);
double pipeline_failure(const Ensemble& ens, const PipelineSpec& spec,
                        const std::vector<double>& omegas);
StrategyResult composed_pipeline_optimal(const Ensemble& ens, const PipelineSpec& spec);

}  // namespace uqsd
