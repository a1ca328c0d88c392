#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "kobdyn/functional_equations.hpp"
#include "kobdyn/lft_models.hpp"

using namespace kobdyn;

namespace {

CVector cvec(std::initializer_list<Complex> xs) {
  CVector v(static_cast<int>(xs.size()));
  int i = 0;
  for (Complex x : xs) v[i++] = x;
  return v;
}

SelfMap affine(std::initializer_list<Complex> diag, std::initializer_list<Complex> off) {
  const int n = static_cast<int>(diag.size());
  CMatrix L = CMatrix::Zero(n, n);
  int i = 0;
  for (Complex d : diag) L(i, i) = d, ++i;
  CVector t = CVector::Zero(n);
  i = 0;
  for (Complex b : off) t[i++] = b;
  return SelfMap::siegel_affine(L, t);
}

}  // namespace

TEST_CASE("linearizer of 2z + i/2 is the shift by i/2") {
  // 2^{-n} f^n(z) = z + i/2 (1 - 2^{-n}) -> z + i/2
  const SelfMap f = affine({2.0}, {Complex(0, 0.5)});
  const ValironSolution sol = valiron_solve(f, 100, 17);
  CHECK(sol.lambda_f == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.residual_sup < 1e-12);
  CHECK(sol.failed_points == 0);
  CHECK(sol.im_positive_on_samples);
  CHECK(!sol.filling_certified);  // surjectivity is never certified numerically
  // the iteration stops at a 1e-12 relative gap, so allow |z| * 1e-12
  CHECK(std::abs(sol.theta(cvec({Complex(0, 1)})) - Complex(0, 1.5)) < 1e-11);
  CHECK(std::abs(sol.theta(cvec({Complex(0.3, 2.0)})) - Complex(0.3, 2.5)) < 1e-11);
}

TEST_CASE("linearizer intertwines a two-block map with its top coordinate") {
  // (4 z1 + i, 2 w): lambda_f = 1/4, Theta(z) = z1 + i/3
  const SelfMap f = affine({4.0, 2.0}, {Complex(0, 1), 0.0});
  const ValironSolution sol = valiron_solve(f, 150, 11);
  CHECK(sol.lambda_f == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(sol.residual_sup < 1e-10);
  CHECK(std::abs(sol.theta(cvec({Complex(0, 1), Complex(0.2, 0.1)})) -
                 Complex(0, 1.0 + 1.0 / 3.0)) < 1e-10);
}

TEST_CASE("abel coordinates: shift by one, strip height, frozen value") {
  const SelfMap f = affine({2.0, std::sqrt(2.0)}, {0.0, 0.0})
                        .with_analytic_dilation(0.5);
  const ValironSolution sol = valiron_solve(f, 120, 7);
  const AbelSolution abel = abel_solve(f, sol);
  CHECK(abel.strip_height == doctest::Approx(4.532360141827194).epsilon(1e-12));
  CHECK(abel.residual_sup < 1e-10);
  CHECK(!abel.surjective);
  // theta(i e1) = log(i)/log 2 = i pi / (2 log 2)
  const Complex th = abel.theta_abel(cvec({Complex(0, 1), 0.0}));
  CHECK(std::abs(th - Complex(0.0, 2.266180070913597)) < 1e-11);
  // image inside the strip on samples
  Sampler s(29);
  for (int i = 0; i < 50; ++i) {
    const Complex v = abel.theta_abel(s.siegel_point(2));
    CHECK(v.imag() > -1e-12);
    CHECK(v.imag() < abel.strip_height + 1e-12);
  }
}

TEST_CASE("the equation survives conjugation into the ball and back") {
  const SelfMap f = affine({2.0, std::sqrt(2.0)}, {0.0, 0.0})
                        .with_analytic_dilation(0.5)
                        .transported(Domain::ball);
  // iteration coordinates are the half-space ones, so the solver accepts it
  const ValironSolution sol = valiron_solve(f, 80, 19);
  CHECK(sol.residual_sup < 1e-10);
}

TEST_CASE("non-contracting inputs are rejected") {
  // parabolic: dilation 1
  const SelfMap shift = affine({1.0}, {Complex(0, 1)}).with_analytic_dilation(1.0);
  CHECK_THROWS_AS(valiron_solve(shift, 50, 3), Error);
  // elliptic: interior fixed point, fixed-point search classifies it first
  const SelfMap ell = affine({0.5}, {Complex(0, 1)});
  CHECK_THROWS_AS(valiron_solve(ell, 50, 3), Error);
  // ball-native compositions have no half-space iteration coordinates
  const SelfMap ball_comp = SelfMap::compose(
      automorphism_to_origin(cvec({0.2, 0.0})),
      automorphism_to_origin(cvec({0.0, Complex(0.0, 0.3)})));
  CHECK_THROWS_AS(valiron_solve(ball_comp, 50, 3), Error);
}

TEST_CASE("abel construction needs a strict contraction") {
  const SelfMap f = affine({2.0}, {0.0}).with_analytic_dilation(0.5);
  ValironSolution sol = valiron_solve(f, 60, 23);
  sol.lambda_f = 1.0;  // corrupt it: the log normalization degenerates
  CHECK_THROWS_AS(abel_solve(f, sol), Error);
}

TEST_CASE("a single linearizer serves the whole flow") {
  const Semigroup phi = Semigroup::affine_siegel(1.0, RVector::Constant(1, 0.25),
                                                 Complex(0.0, 0.0));
  const SemigroupValironReport rep =
      semigroup_valiron(phi, {0.5, 1.0, 2.0, 3.0}, 120, 13);
  CHECK(rep.lambda == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.lambda_f == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
  CHECK(rep.residual_sup < 1e-9);
  REQUIRE(rep.residuals.size() == 4);
  for (double r : rep.residuals) CHECK(r <= rep.residual_sup + 1e-15);
}

TEST_CASE("linearizer residual stays small on the validated block forms") {
  HyperbolicLFTForm hf;
  hf.q = 3;
  hf.p = 2;
  hf.lambda = 2.0;
  hf.b = Complex(0.0, 0.5);
  hf.D_diag = cvec({std::sqrt(2.0)});
  hf.A = CMatrix::Identity(1, 1);
  hf.c = cvec({Complex(0.3, 0.0)});
  const SelfMap g = hyperbolic_to_self_map(validate_hyperbolic_form(hf));
  const ValironSolution sol = valiron_solve(g, 200, 31);
  CHECK(sol.lambda_f == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.residual_sup < 1e-10);
  const AbelSolution abel = abel_solve(g, sol);
  CHECK(abel.residual_sup < 1e-10);
}
