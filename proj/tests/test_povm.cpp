#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "uqsd/filtering.hpp"
#include "uqsd/povm.hpp"

using namespace uqsd;

namespace {

Ensemble two_state_ensemble(double eta1, double o12) {
  Matrix o(2, 2);
  o << 1.0, o12, o12, 1.0;
  RealVector p(2);
  p << eta1, 1.0 - eta1;
  return make_ensemble(o, p);
}

}  // namespace

TEST_CASE("identity alone is a valid POVM") {
  PovmSet s;
  s.elements = {{OutcomeLabel::fail(), Matrix::Identity(3, 3)}};
  const ValidityReport r = verify_povm(s);
  CHECK(r.pass);
  CHECK(r.completeness_residual < 1e-15);
  CHECK(r.min_eigenvalue >= 0.0);
}

TEST_CASE("projective pair passes, a scaled projector fails") {
  Matrix p1 = Matrix::Zero(2, 2), p2 = Matrix::Zero(2, 2);
  p1(0, 0) = 1.0;
  p2(1, 1) = 1.0;
  PovmSet good;
  good.elements = {{OutcomeLabel::identify(0), p1}, {OutcomeLabel::identify(1), p2}};
  CHECK(verify_povm(good).pass);
  CHECK(verify_povm(good).max_detection_eigenvalue == doctest::Approx(1.0));

  PovmSet bad;
  bad.elements = {{OutcomeLabel::identify(0), 1.5 * p1},
                  {OutcomeLabel::identify(1), Matrix(Matrix::Identity(2, 2) - 1.5 * p1)}};
  const ValidityReport r = verify_povm(bad);
  CHECK_FALSE(r.pass);
  CHECK(r.min_eigenvalue < -1e-3);
}

TEST_CASE("dimension mismatch is rejected") {
  PovmSet s;
  s.elements = {{OutcomeLabel::fail(), Matrix::Identity(2, 2)},
                {OutcomeLabel::fail(), Matrix::Identity(3, 3)}};
  CHECK_THROWS_AS(verify_povm(s), Error);
}

TEST_CASE("zero conditions on the optimal two-state design") {
  const Ensemble ens = two_state_ensemble(0.5, 0.6);
  const RegimeResult r = two_state_optimal(ens);
  const ZeroReport z = zero_conditions(r.design.povms, ens);
  CHECK(z.pass);
  CHECK(z.max_residual <= 1e-10);

  // A reciprocal projector annihilates every other state exactly.
  PovmSet proj;
  const Vector perp1 = ens.dtr.reciprocal_ket(0);
  proj.elements = {{OutcomeLabel::identify(0), perp1 * perp1.adjoint()},
                   {OutcomeLabel::fail(),
                    Matrix(Matrix::Identity(2, 2) - perp1 * perp1.adjoint())}};
  const ZeroReport zp = zero_conditions(proj, ens);
  CHECK(zp.per_element[0].second == 0.0);
  // Fail elements carry no condition.
  CHECK(zp.per_element[1].second == 0.0);
}

TEST_CASE("unknown labels are rejected") {
  const Ensemble ens = two_state_ensemble(0.5, 0.3);
  PovmSet s;
  s.elements = {{OutcomeLabel::identify(5), Matrix::Identity(2, 2)}};
  CHECK_THROWS_AS(zero_conditions(s, ens), Error);
}

TEST_CASE("failure probability endpoints and the worked value") {
  const Ensemble ens = two_state_ensemble(0.5, 0.6);

  PovmSet all_fail;
  all_fail.elements = {{OutcomeLabel::fail(), Matrix::Identity(2, 2)}};
  CHECK(failure_probability(all_fail, ens) == doctest::Approx(1.0).epsilon(1e-12));

  PovmSet never_fail;
  never_fail.elements = {{OutcomeLabel::fail(), Matrix::Zero(2, 2)},
                         {OutcomeLabel::group(0), Matrix::Identity(2, 2)}};
  CHECK(failure_probability(never_fail, ens) == doctest::Approx(0.0));

  const FilterDesign d = two_state_design(ens, 0.0);
  CHECK(failure_probability(d.povms, ens) == doctest::Approx(0.68).epsilon(1e-12));
}

TEST_CASE("success and failure partition the ensemble weight") {
  std::mt19937_64 rng(99);
  for (int n : {2, 3, 4}) {
    const Ensemble ens = make_ensemble(test::random_gram(rng, n),
                                       test::random_priors(rng, n), filtering_groups(n));
    const FilterDesign d = filter_povms(ens, 0.7);
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
      const Vector psi = ens.dtr.state_ket(j);
      for (const auto& e : d.povms.elements) {
        total += ens.priors(j) * (psi.adjoint() * e.op * psi)(0).real();
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("ensemble construction validates its inputs") {
  Matrix o(2, 2);
  o << 1.0, 0.5, 0.5, 1.0;
  RealVector bad_len(3);
  bad_len << 0.5, 0.25, 0.25;
  CHECK_THROWS_AS(make_ensemble(o, bad_len), Error);

  RealVector bad_sum(2);
  bad_sum << 0.5, 0.6;
  CHECK_THROWS_AS(make_ensemble(o, bad_sum), Error);

  RealVector ok(2);
  ok << 0.5, 0.5;
  CHECK_THROWS_AS(make_ensemble(o, ok, std::vector<int>{0}), Error);
  CHECK_NOTHROW(make_ensemble(o, ok, std::vector<int>{0, 1}));
}
