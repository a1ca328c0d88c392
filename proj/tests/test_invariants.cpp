#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "kobdyn/invariants.hpp"

using namespace kobdyn;

namespace {

CVector cvec(std::initializer_list<Complex> xs) {
  CVector v(static_cast<int>(xs.size()));
  int i = 0;
  for (Complex x : xs) v[i++] = x;
  return v;
}

SelfMap diag_map(std::initializer_list<Complex> diag,
                 std::initializer_list<Complex> off = {}) {
  const int n = static_cast<int>(diag.size());
  CMatrix L = CMatrix::Zero(n, n);
  int i = 0;
  for (Complex d : diag) L(i, i) = d, ++i;
  CVector t = CVector::Zero(n);
  if (off.size()) {
    i = 0;
    for (Complex b : off) t[i++] = b;
  }
  return SelfMap::siegel_affine(L, t);
}

SelfMap translation_h1(Complex b) { return diag_map({1.0}, {b}); }

}  // namespace

TEST_CASE("gap limits along expanding orbits hit their closed values") {
  const SelfMap g = diag_map({2.0, std::sqrt(2.0)});
  // on the z1-axis the orbit rides the vertical geodesic
  const CVector x = cvec({Complex(0, 1), 0.0});
  const StepEstimate s1 = hyperbolic_step(g, x, 1);
  CHECK(s1.limit == doctest::Approx(0.6931471805599453).epsilon(1e-12));
  const StepEstimate s3 = hyperbolic_step(g, x, 3);
  CHECK(s3.limit == doctest::Approx(2.0794415416798357).epsilon(1e-12));
  CHECK(s3.m == 3);
}

TEST_CASE("gap limits distinguish the two shift directions") {
  const CVector i1 = cvec({Complex(0, 1)});
  // z+1 moves along a horocycle: every step has the same length acosh(3/2)
  const StepEstimate horizontal = hyperbolic_step(translation_h1(1.0), i1, 1);
  CHECK(horizontal.limit == doctest::Approx(0.9624236501192069).epsilon(1e-12));
  // z+i climbs the vertical geodesic: step lengths log((n+2)/(n+1)) -> 0
  const StepEstimate vertical = hyperbolic_step(translation_h1(Complex(0, 1)), i1, 1);
  CHECK(vertical.limit < 1e-4);
  CHECK(vertical.limit >= 0.0);
}

TEST_CASE("gap sequences decrease monotonically") {
  // (4 z1, w) freezes the second coordinate, so off-axis gap distances
  // genuinely decrease before settling at log 4
  const SelfMap f = diag_map({4.0, 1.0});
  const CVector x = cvec({Complex(0, 1), 0.3});
  const StepEstimate s = hyperbolic_step(f, x, 1);
  CHECK(s.values.front() > s.limit + 1e-3);
  for (size_t i = 1; i < s.values.size(); ++i) {
    CHECK(s.values[i] <= s.values[i - 1] + 1e-10);
  }
  CHECK(s.limit == doctest::Approx(2 * 0.6931471805599453).epsilon(1e-7));
}

TEST_CASE("orbit divergence rate of an expanding dilation") {
  const SelfMap g = diag_map({2.0, std::sqrt(2.0)});
  // geodesic base: the ratio sequence is exactly constant, so the printed
  // bracket genuinely contains the limit
  const CVector x = cvec({Complex(0, 1), 0.0});
  const DivergenceEstimate est = divergence_rate(g, x, 2000, 1e-8);
  CHECK(est.c == doctest::Approx(0.6931471805599453).epsilon(1e-12));
  CHECK(est.status == LimitStatus::converged);
  CHECK(!est.increments_decaying);
  CHECK(est.bracket.first <= est.c);
  CHECK(est.c <= est.bracket.second + 1e-15);
  // the running certificate is nonincreasing and caps the estimate
  for (size_t i = 1; i < est.fekete_bounds.size(); ++i) {
    CHECK(est.fekete_bounds[i] <= est.fekete_bounds[i - 1] + 1e-15);
  }
  CHECK(est.c <= est.fekete_bounds.back() + 1e-15);
}

TEST_CASE("orbit distances are subadditive") {
  const SelfMap g = diag_map({2.0, std::sqrt(2.0)});
  const CVector x = default_base(Domain::siegel, 2);
  auto a = [&](int m) {
    return kobayashi_distance(Domain::siegel, x, iterate(g, x, m));
  };
  for (auto [m, n] : std::vector<std::pair<int, int>>{
           {1, 1}, {2, 3}, {5, 7}, {10, 20}, {17, 31}}) {
    CHECK(a(m + n) <= a(m) + a(n) + 1e-10);
  }
}

TEST_CASE("rate scales linearly under iteration powers") {
  const SelfMap g = diag_map({2.0, std::sqrt(2.0)});
  const CVector x = default_base(Domain::siegel, 2);
  const double c1 = divergence_rate(g, x, 1500, 1e-8).c;
  const double c2 = divergence_rate(g.pow(2), x, 1500, 1e-8).c;
  const double c3 = divergence_rate(g.pow(3), x, 1500, 1e-8).c;
  CHECK(std::abs(c2 - 2 * c1) < 1e-10);
  CHECK(std::abs(c3 - 3 * c1) < 1e-10);
}

TEST_CASE("rate does not depend on the base point") {
  const SelfMap g = diag_map({2.0, std::sqrt(2.0)});
  const double ca = divergence_rate(g, default_base(Domain::siegel, 2), 1500, 1e-8).c;
  const double cb =
      divergence_rate(g, cvec({Complex(0.5, 3.0), Complex(0.2, -0.1)}), 1500, 1e-8).c;
  CHECK(std::abs(ca - cb) < 1e-10);
}

TEST_CASE("slow shifts have vanishing rate and say so") {
  const DivergenceEstimate est =
      divergence_rate(translation_h1(1.0), cvec({Complex(0, 1)}), 4000, 1e-8);
  CHECK(est.increments_decaying);
  CHECK(est.c < 2e-3);
}

TEST_CASE("limit pseudo-distance: isometric flows keep distances, contractions collapse them") {
  // (2 z1, sqrt(2) w) is an automorphism: the limit equals the plain distance
  const SelfMap aut = diag_map({2.0, std::sqrt(2.0)});
  const CVector z = cvec({Complex(0, 1), 0.0});
  const CVector w = cvec({Complex(0, 1), 0.1});
  CHECK(model_distance(aut, z, w) ==
        doctest::Approx(0.20067069546215124).epsilon(1e-10));

  // (4 z1, w) kills the second coordinate in the limit
  const SelfMap squeeze = diag_map({4.0, 1.0});
  CHECK(model_distance(squeeze, z, w) < 1e-7);

  // pseudo-distance properties under the squeezing map
  Sampler s(27);
  for (int i = 0; i < 15; ++i) {
    const CVector a = s.siegel_point(2), b = s.siegel_point(2), c = s.siegel_point(2);
    const double ab = model_distance(squeeze, a, b);
    CHECK(ab >= -1e-12);
    CHECK(ab == doctest::Approx(model_distance(squeeze, b, a)).epsilon(1e-9));
    CHECK(ab <= kobayashi_distance(Domain::siegel, a, b) + 1e-10);
    CHECK(model_distance(squeeze, a, c) <=
          ab + model_distance(squeeze, b, c) + 1e-8);
  }
}

TEST_CASE("rank of the limit metric counts the surviving block") {
  CanonicalDimensionOptions opts;
  const LimitMetricReport flat =
      canonical_dimension(diag_map({4.0, 1.0}), default_base(Domain::siegel, 2), opts);
  CHECK(flat.rank == 1);
  REQUIRE(flat.eigenvalue_trajectories.size() == 2);

  const LimitMetricReport mixed = canonical_dimension(
      diag_map({2.0, std::sqrt(2.0), 1.0}), default_base(Domain::siegel, 3), opts);
  CHECK(mixed.rank == 2);
  // normalized eigenvalue trajectories never climb
  for (const auto& traj : mixed.eigenvalue_trajectories) {
    for (size_t i = 1; i < traj.size(); ++i) CHECK(traj[i] <= traj[i - 1] + 1e-8);
  }
  for (const CMatrix& H : mixed.matrices) {
    CHECK((H - H.adjoint()).norm() < 1e-10 * std::max(1.0, H.norm()));
  }
}

TEST_CASE("boundary step formula: closed values and degeneracies") {
  CHECK(step_limit_formula(1.0, 0.5) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-14));
  CHECK(step_limit_formula(std::polar(1.0, 0.5), 0.5) ==
        doctest::Approx(0.7854010567194797).epsilon(1e-13));
  CHECK(step_limit_formula(std::polar(1.0, 0.25), 0.8) ==
        doctest::Approx(0.23027212997564445).epsilon(1e-13));
  CHECK(step_limit_formula(1.0, 1.0) == 0.0);
  // phase with conj(c)^2 = -lambda collapses the denominator
  CHECK_THROWS_AS(step_limit_formula(Complex(0, 1), 0.5), Error);
}

TEST_CASE("boundary steps along admissible sequences match the formula") {
  CVector a1 = CVector::Zero(2);
  a1[0] = 1.0;
  const BoundaryPoint a(a1);
  const SelfMap f = diag_map({2.0, std::sqrt(2.0)}).transported(Domain::ball);

  const auto radial = radial_sequence(a, 36);
  const StepLimitReport rep = step_limit_check(f, 0.5, 1.0, radial);
  CHECK(rep.status == LimitStatus::converged);
  CHECK(!rep.parabolic);
  CHECK(rep.formula_value == doctest::Approx(0.6931471805599453).epsilon(1e-14));
  CHECK(std::abs(rep.difference) < 1e-4);

  // shifting by i is parabolic: the boundary step limit vanishes
  const SelfMap shift = translation_h1(Complex(0, 1)).transported(Domain::ball);
  CVector b1 = CVector::Zero(1);
  b1[0] = 1.0;
  const auto radial1 = radial_sequence(BoundaryPoint(b1), 36);
  const StepLimitReport par = step_limit_check(shift, 1.0, 1.0, radial1);
  CHECK(par.parabolic);
  CHECK(par.formula_value == 0.0);
  CHECK(std::abs(par.empirical_value) < 1e-4);
}

TEST_CASE("bounded-step hypotheses: pass, and each bound can fail") {
  CVector a1 = CVector::Zero(2);
  a1[0] = 1.0;
  const BoundaryPoint a(a1);
  const SelfMap h = diag_map({2.0, std::sqrt(2.0)}).transported(Domain::ball);
  const auto radial = radial_sequence(a, 36);

  const LindelofReport rep = lindelof_hypotheses(h, radial, a, 1.0);
  CHECK(rep.hypotheses_hold);
  CHECK(rep.bound_consecutive <= 1.0);
  CHECK(rep.bound_special <= 1.0);
  CHECK(rep.limits_agree);
  CHECK(rep.worst_limit_gap < 1e-6);

  // consecutive radial steps approach log 2 > 0.3: bound 1 fails
  try {
    lindelof_hypotheses(h, radial, a, 0.3);
    FAIL("expected HypothesisFailed");
  } catch (const HypothesisFailed& e) {
    CHECK(e.bound_index == 1);
  }

  // a drifting sequence keeps steps small but pushes the distance to the
  // complex radius above 1.2: bound 2 fails
  CVector dir = CVector::Zero(2);
  dir[1] = 1.0;
  const auto drifting = phase_sequence(a, 1.0, 36, 0.5, 0.9, &dir);
  try {
    lindelof_hypotheses(h, drifting, a, 1.2);
    FAIL("expected HypothesisFailed");
  } catch (const HypothesisFailed& e) {
    CHECK(e.bound_index == 2);
  }
}
