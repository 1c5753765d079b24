#include "uqsd/povm.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace uqsd {

std::string OutcomeLabel::str() const {
  switch (kind) {
    case Kind::Identify: return "identify-" + std::to_string(index + 1);
    case Kind::GroupIdentify: return "group-" + std::to_string(index + 1);
    case Kind::Fail: return "fail";
  }
  return "?";
}

Matrix Ensemble::density() const {
  Matrix rho = Matrix::Zero(n(), n());
  for (int j = 0; j < n(); ++j) {
    const Vector psi = dtr.state_ket(j);
    rho += priors(j) * (psi * psi.adjoint());
  }
  return rho;
}

Ensemble make_ensemble(const Matrix& raw, const RealVector& priors,
                       std::vector<int> group_of) {
  const GramMatrix o = validate_gram(raw);
  const int n = o.n();
  if (priors.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "priors length does not match state count");
  }
  if (priors.minCoeff() < 0.0 || std::abs(priors.sum() - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidRange, "priors must be nonnegative and sum to 1");
  }
  if (group_of.empty()) {
    group_of.resize(n);
    for (int j = 0; j < n; ++j) group_of[j] = j;
  }
  if (static_cast<int>(group_of.size()) != n) {
    throw Error(ErrorCode::GroupingError, "group map length does not match state count");
  }
  return Ensemble{priors, std::move(group_of), build_dtr(o), o};
}

ValidityReport verify_povm(const PovmSet& s) {
  ValidityReport r;
  if (s.elements.empty()) throw Error(ErrorCode::DimensionMismatch, "empty POVM set");
  const int n = s.dim();
  Matrix sum = Matrix::Zero(n, n);
  Matrix detect = Matrix::Zero(n, n);
  r.min_eigenvalue = 1.0;
  for (const auto& e : s.elements) {
    if (e.op.rows() != n || e.op.cols() != n) {
      throw Error(ErrorCode::DimensionMismatch, "POVM element dimension mismatch");
    }
    r.hermiticity_residual =
        std::max(r.hermiticity_residual, (e.op - e.op.adjoint()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Matrix> es(e.op, Eigen::EigenvaluesOnly);
    r.min_eigenvalue = std::min(r.min_eigenvalue, es.eigenvalues().minCoeff());
    sum += e.op;
    if (!(e.label == OutcomeLabel::fail())) detect += e.op;
  }
  r.completeness_residual = (sum - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Matrix> ed(detect, Eigen::EigenvaluesOnly);
  r.max_detection_eigenvalue = ed.eigenvalues().maxCoeff();
  r.pass = r.completeness_residual <= tol::kCompleteness &&
           r.min_eigenvalue >= tol::kEigenvalue &&
           r.hermiticity_residual <= tol::kHermitian;
  return r;
}

ZeroReport zero_conditions(const PovmSet& s, const Ensemble& ens) {
  ZeroReport r;
  const int n = ens.n();
  if (s.dim() != n) throw Error(ErrorCode::DimensionMismatch, "POVM/ensemble dimension mismatch");
  int max_group = 0;
  for (int g : ens.group_of) max_group = std::max(max_group, g);
  for (const auto& e : s.elements) {
    double worst = 0.0;
    if (e.label.kind == OutcomeLabel::Kind::Identify) {
      if (e.label.index < 0 || e.label.index >= n) {
        throw Error(ErrorCode::UnknownLabel, "identify label " + e.label.str());
      }
      for (int k = 0; k < n; ++k) {
        if (k == e.label.index) continue;
        worst = std::max(worst, (e.op * ens.dtr.state_ket(k)).norm());
      }
    } else if (e.label.kind == OutcomeLabel::Kind::GroupIdentify) {
      if (e.label.index < 0 || e.label.index > max_group) {
        throw Error(ErrorCode::UnknownLabel, "group label " + e.label.str());
      }
      for (int k = 0; k < n; ++k) {
        if (ens.group_of[k] == e.label.index) continue;
        worst = std::max(worst, (e.op * ens.dtr.state_ket(k)).norm());
      }
    }
    r.per_element.emplace_back(e.label, worst);
    r.max_residual = std::max(r.max_residual, worst);
  }
  r.pass = r.max_residual <= tol::kZeroCondition;
  return r;
}

double failure_probability(const PovmSet& s, const Ensemble& ens) {
  const Matrix rho = ens.density();
  double f = 0.0;
  for (const auto& e : s.elements) {
    if (e.label == OutcomeLabel::fail()) f += (e.op * rho).trace().real();
  }
  return f;
}

}  // namespace uqsd
