#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "kobdyn/ball_geometry.hpp"
#include "kobdyn/types.hpp"

using namespace kobdyn;

namespace {

CVector e1(int q) {
  CVector v = CVector::Zero(q);
  v[0] = 1.0;
  return v;
}

CVector siegel_vec(Complex z1, Complex w0 = 0.0) {
  CVector p(2);
  p[0] = z1;
  p[1] = w0;
  return p;
}

}  // namespace

TEST_CASE("radial distances match the closed form") {
  // k(0, r e1) = log((1+r)/(1-r)); the r = 0.5 value was cross-checked by
  // Simpson quadrature of the integrand 2/(1-r^2) (agreement 4.4e-16).
  const CVector zero = CVector::Zero(2);
  auto radial = [&](double r) {
    return kobayashi_distance(Domain::ball, zero, CVector(r * e1(2)));
  };
  CHECK(radial(0.1) == doctest::Approx(0.20067069546215124).epsilon(1e-14));
  CHECK(radial(0.5) == doctest::Approx(1.0986122886681098).epsilon(1e-14));
  CHECK(radial(0.9) == doctest::Approx(2.9444389791664403).epsilon(1e-14));
  CHECK(radial(0.0) == 0.0);
}

TEST_CASE("distance is symmetric, positive and triangular") {
  Sampler s(31);
  for (int i = 0; i < 60; ++i) {
    const CVector a = s.ball_point(3), b = s.ball_point(3), c = s.ball_point(3);
    const double kab = ball_distance(a, b);
    CHECK(kab >= 0.0);
    CHECK(kab == doctest::Approx(ball_distance(b, a)).epsilon(1e-13));
    CHECK(ball_distance(a, c) <= kab + ball_distance(b, c) + 1e-10);
  }
  CHECK(ball_distance(e1(3) * 0.3, e1(3) * 0.3) == 0.0);
}

TEST_CASE("unitary maps are isometries") {
  Sampler s(7);
  CMatrix U(2, 2);  // a fixed non-trivial unitary
  const double c = std::cos(0.6), sn = std::sin(0.6);
  U << Complex(c, 0), Complex(0, sn), Complex(0, sn), Complex(c, 0);
  CHECK((U.adjoint() * U - CMatrix::Identity(2, 2)).norm() < 1e-14);
  for (int i = 0; i < 40; ++i) {
    const CVector a = s.ball_point(2), b = s.ball_point(2);
    CHECK(ball_distance(CVector(U * a), CVector(U * b)) ==
          doctest::Approx(ball_distance(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("exchange automorphism swaps its pole with the origin") {
  Sampler s(11);
  CVector w(2);
  w[0] = Complex(0.3, -0.1);
  w[1] = Complex(0.0, 0.25);
  CHECK(moebius_exchange_apply(w, w).norm() < 1e-14);
  CHECK((moebius_exchange_apply(w, CVector(CVector::Zero(2))) - w).norm() < 1e-14);
  for (int i = 0; i < 40; ++i) {
    const CVector z = s.ball_point(2);
    // involution
    CHECK((moebius_exchange_apply(w, moebius_exchange_apply(w, z)) - z).norm() < 1e-12);
    // isometry
    const CVector z2 = s.ball_point(2);
    CHECK(ball_distance(moebius_exchange_apply(w, z),
                        moebius_exchange_apply(w, z2)) ==
          doctest::Approx(ball_distance(z, z2)).epsilon(1e-11));
  }
}

TEST_CASE("exchange jacobian agrees with finite differences") {
  CVector w(2);
  w[0] = Complex(0.2, 0.1);
  w[1] = Complex(-0.15, 0.05);
  CVector z(2);
  z[0] = Complex(-0.1, 0.3);
  z[1] = Complex(0.25, -0.2);
  const CMatrix J = moebius_exchange_jacobian(w, z);
  const double h = 1e-7;
  for (int j = 0; j < 2; ++j) {
    CVector dz = CVector::Zero(2);
    dz[j] = h;
    const CVector fd = (moebius_exchange_apply(w, CVector(z + dz)) -
                        moebius_exchange_apply(w, CVector(z - dz))) /
                       (2 * h);
    CHECK((fd - J.col(j)).norm() < 1e-6);
  }
}

TEST_CASE("cayley transform: images, round trip, isometry") {
  const CVector zero = CVector::Zero(2);
  CHECK((cayley_apply(zero) - Complex(0, 1) * e1(2)).norm() < 1e-15);
  CHECK((cayley_apply(CVector(0.5 * e1(2))) - Complex(0, 3) * e1(2)).norm() < 1e-14);

  Sampler s(13);
  for (int i = 0; i < 50; ++i) {
    const CVector z = s.ball_point(2, 0.95), z2 = s.ball_point(2, 0.95);
    CHECK((cayley_inverse_apply(cayley_apply(z)) - z).norm() < 1e-12);
    CHECK(siegel_distance(cayley_apply(z), cayley_apply(z2)) ==
          doctest::Approx(ball_distance(z, z2)).epsilon(1e-10));
    const CVector p = s.siegel_point(2);
    CHECK((cayley_apply(cayley_inverse_apply(p)) - p).norm() < 1e-11 * p.norm());
  }

  // chain rule at a sample point: J_{inv}(cayley z) * J(z) = I
  const CVector z = 0.3 * e1(2);
  const CMatrix prod = cayley_inverse_jacobian(cayley_apply(z)) * cayley_jacobian(z);
  CHECK((prod - CMatrix::Identity(2, 2)).norm() < 1e-12);
}

TEST_CASE("half-space distance: closed values and large-coordinate stability") {
  // vertical geodesic: k(i, i s) = log s
  CHECK(siegel_distance(siegel_vec(Complex(0, 1)).head(1),
                        siegel_vec(Complex(0, 2)).head(1)) ==
        doctest::Approx(0.6931471805599453).epsilon(1e-14));
  // horizontal displacement in the second coordinate
  CHECK(siegel_distance(siegel_vec(Complex(0, 1)), siegel_vec(Complex(0, 1), 0.1)) ==
        doctest::Approx(0.20067069546215124).epsilon(1e-13));
  // far point: k(i, 1e100 i) = 100 log 10, no overflow
  CVector p(1), q(1);
  p[0] = Complex(0, 1);
  q[0] = Complex(0, 1e100);
  CHECK(siegel_distance(p, q) == doctest::Approx(230.25850929940458).epsilon(1e-12));
}

TEST_CASE("boundary gap of the cayley image avoids cancellation") {
  // 4*height/|p1+i|^2, exact even when the direct route would lose all digits
  CVector p(2);
  p[0] = Complex(1e12, 2.0);
  p[1] = 0.0;
  CHECK(one_minus_norm_sq_of_cayley_image(p) ==
        doctest::Approx(8e-24).epsilon(1e-10));
  // moderate points agree with the direct ball-side computation
  Sampler s(17);
  for (int i = 0; i < 30; ++i) {
    const CVector q = s.siegel_point(2);
    CHECK(one_minus_norm_sq_of_cayley_image(q) ==
          doctest::Approx(one_minus_norm_sq(cayley_inverse_apply(q))).epsilon(1e-11));
  }
}

TEST_CASE("metric matrix represents the infinitesimal metric") {
  CHECK(kobayashi_metric(BallPoint(CVector(CVector::Zero(2))), e1(2)) ==
        doctest::Approx(2.0).epsilon(1e-15));
  Sampler s(19);
  for (int i = 0; i < 30; ++i) {
    const CVector z = s.ball_point(2, 0.8);
    const CVector v = s.unit_vector(2);
    const CMatrix G = ball_metric_matrix(z);
    CHECK((G - G.adjoint()).norm() < 1e-12);
    const double quad = std::sqrt(hermitian_inner(CVector(G * v), v).real());
    CHECK(kobayashi_metric(BallPoint(z), v) == doctest::Approx(quad).epsilon(1e-11));
    // symmetric difference quotient of the distance recovers the metric
    const double h = 1e-6;
    const double fd =
        ball_distance(CVector(z - h * v), CVector(z + h * v)) / (2 * h);
    CHECK(fd == doctest::Approx(kobayashi_metric(BallPoint(z), v)).epsilon(1e-5));
  }
}

TEST_CASE("half-space metric matrix is the cayley pullback") {
  Sampler s(23);
  for (int i = 0; i < 30; ++i) {
    const CVector p = s.siegel_point(2);
    const CMatrix J = cayley_inverse_jacobian(p);
    const CMatrix pulled = J.adjoint() * ball_metric_matrix(cayley_inverse_apply(p)) * J;
    const CMatrix native = siegel_metric_matrix(p);
    CHECK((pulled - native).norm() < 1e-9 * native.norm());
  }
}

TEST_CASE("horosphere and approach-region quotients") {
  const BoundaryPoint a(e1(2));
  CHECK(horosphere_quotient(a, CVector(CVector::Zero(2))) ==
        doctest::Approx(1.0).epsilon(1e-15));
  // radial points: quotient (1-r)/(1+r)
  for (double r : {0.2, 0.5, 0.9}) {
    CHECK(horosphere_quotient(a, CVector(r * e1(2))) ==
          doctest::Approx((1 - r) / (1 + r)).epsilon(1e-12));
    CHECK(koranyi_quotient(a, CVector(r * e1(2))) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const Horosphere E(a, 0.5);
  CHECK(horosphere_contains(E, BallPoint(CVector(0.5 * e1(2)))));   // 1/3 < 1/2
  CHECK(!horosphere_contains(E, BallPoint(CVector(0.2 * e1(2)))));  // 2/3 > 1/2
  const KoranyiRegion K(a, 2.0);
  CHECK(koranyi_contains(K, BallPoint(CVector(0.7 * e1(2)))));
}

TEST_CASE("radial sequences are admissible and inside an approach region") {
  const BoundaryPoint a(e1(2));
  const auto seq = radial_sequence(a, 36);
  const auto d = classify_sequence(seq, a);
  CHECK(d.is_restricted);
  CHECK(d.is_special);
  CHECK(d.is_admissible);
  CHECK(d.eventually_koranyi);
  CHECK(d.bgp_consistent);
  REQUIRE(d.koranyi_amplitude_bound.has_value());
  CHECK(*d.koranyi_amplitude_bound <= 2.0);
}

TEST_CASE("transversally drifting sequences lose specialness but stay in a region") {
  const BoundaryPoint a(e1(2));
  CVector dir = CVector::Zero(2);
  dir[1] = 1.0;
  const auto seq = phase_sequence(a, Complex(1.0, 0.0), 36, 0.5, 0.4, &dir);
  const auto d = classify_sequence(seq, a);
  CHECK(d.is_restricted);
  CHECK(!d.is_special);  // special distances settle at a positive level
  CHECK(!d.is_admissible);
  CHECK(d.eventually_koranyi);  // ... but they stay bounded
  CHECK(d.bgp_consistent);
}

TEST_CASE("slanted approach stays restricted") {
  const BoundaryPoint a(e1(2));
  const auto seq = phase_sequence(a, std::polar(1.0, 0.5), 36);
  const auto d = classify_sequence(seq, a);
  CHECK(d.is_restricted);
  CHECK(d.is_special);
  CHECK(d.bgp_consistent);
}

TEST_CASE("sequence diagnostics reject a wrong target") {
  CVector e2 = CVector::Zero(2);
  e2[1] = 1.0;
  const auto seq = radial_sequence(BoundaryPoint(e1(2)), 30);
  CHECK_THROWS_AS(classify_sequence(seq, BoundaryPoint(e2)), NotConvergent);
}

TEST_CASE("region and point constructors validate") {
  CHECK_THROWS_AS(BallPoint(CVector(1.5 * e1(2))), Error);
  CHECK_THROWS_AS(BoundaryPoint(CVector(0.5 * e1(2))), Error);
  CHECK_THROWS_AS(SiegelPoint(Complex(0.0, -1.0), CVector(CVector::Zero(1))), Error);
  CHECK_THROWS_AS(SiegelPoint(Complex(0.0, 0.04), CVector(0.3 * e1(1))), Error);
  CHECK_THROWS_AS(Horosphere(BoundaryPoint(e1(2)), 0.0), Error);
  CHECK_THROWS_AS(KoranyiRegion(BoundaryPoint(e1(2)), 1.0), Error);
  CHECK(SiegelPoint(Complex(0.0, 1.0), CVector(CVector::Zero(1))).height() ==
        doctest::Approx(1.0));
}
