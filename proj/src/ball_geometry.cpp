#include "kobdyn/ball_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kobdyn {

// ---------------------------------------------------------------------------
// Tail utilities and sampling.
// ---------------------------------------------------------------------------

double tail_spread(const std::vector<double>& v, int window) {
  if (static_cast<int>(v.size()) < window || window <= 0) {
    return std::numeric_limits<double>::infinity();
  }
  auto first = v.end() - window;
  auto [lo, hi] = std::minmax_element(first, v.end());
  return *hi - *lo;
}

bool tail_is_flat(const std::vector<double>& v, const TailOptions& opts) {
  return tail_spread(v, opts.window) < opts.tol;
}

double Sampler::uniform(double a, double b) {
  std::uniform_real_distribution<double> d(a, b);
  return d(rng_);
}

double Sampler::gauss() {
  std::normal_distribution<double> d(0.0, 1.0);
  return d(rng_);
}

Complex Sampler::complex_gauss() {
  const double re = gauss();
  const double im = gauss();
  return {re, im};
}

CVector Sampler::ball_point(int q, double max_norm) {
  CVector g(q);
  for (int i = 0; i < q; ++i) g[i] = complex_gauss();
  const double n = g.norm();
  // radius ~ U^{1/(2q)} gives the uniform ball measure in R^{2q}
  const double r = max_norm * std::pow(uniform(0.0, 1.0), 1.0 / (2.0 * q));
  if (n == 0.0) return CVector::Zero(q);
  return (r / n) * g;
}

CVector Sampler::unit_vector(int q) {
  CVector g(q);
  for (int i = 0; i < q; ++i) g[i] = complex_gauss();
  const double n = g.norm();
  if (n == 0.0) {
    CVector e = CVector::Zero(q);
    e[0] = 1.0;
    return e;
  }
  return g / n;
}

CVector Sampler::siegel_point(int q, double spread) {
  CVector p(q);
  CVector w = (q > 1) ? ball_point(q - 1, 1.0) : CVector(0);
  const double h = uniform(0.2, std::max(0.4, spread));
  const double x = uniform(-spread, spread);
  const double wsq = w.squaredNorm();
  p[0] = Complex(x, wsq + h);
  for (int i = 1; i < q; ++i) p[i] = w[i - 1];
  return p;
}

// ---------------------------------------------------------------------------
// Points and regions.
// ---------------------------------------------------------------------------

BallPoint::BallPoint(CVector coords) : z(std::move(coords)) {
  if (z.size() < 1) throw Error("BallPoint: empty coordinate vector");
  if (!z.allFinite()) throw Error("BallPoint: non-finite coordinates");
  if (z.norm() >= 1.0) throw DomainEscape("BallPoint: norm >= 1");
}

BoundaryPoint::BoundaryPoint(CVector coords) : a(std::move(coords)) {
  if (a.size() < 1) throw Error("BoundaryPoint: empty coordinate vector");
  if (std::abs(a.norm() - 1.0) > 1e-12) {
    throw Error("BoundaryPoint: norm differs from 1 by more than 1e-12");
  }
}

SiegelPoint::SiegelPoint(Complex first, CVector rest)
    : z1(first), w(std::move(rest)) {
  if (!std::isfinite(z1.real()) || !std::isfinite(z1.imag()) || !w.allFinite()) {
    throw Error("SiegelPoint: non-finite coordinates");
  }
  if (height() <= 0.0) throw DomainEscape("SiegelPoint: Im z1 <= |w|^2");
}

double SiegelPoint::height() const { return z1.imag() - w.squaredNorm(); }

CVector SiegelPoint::vec() const {
  CVector p(dim());
  p[0] = z1;
  for (int i = 0; i < w.size(); ++i) p[i + 1] = w[i];
  return p;
}

SiegelPoint SiegelPoint::from_vec(const CVector& p) {
  if (p.size() < 1) throw Error("SiegelPoint: empty coordinate vector");
  return SiegelPoint(p[0], p.tail(p.size() - 1));
}

Horosphere::Horosphere(BoundaryPoint a, double R)
    : center(std::move(a)), radius(R) {
  if (!(R > 0.0)) throw Error("Horosphere: radius must be > 0");
}

KoranyiRegion::KoranyiRegion(BoundaryPoint a, double R)
    : vertex(std::move(a)), amplitude(R) {
  if (!(R > 1.0)) throw Error("KoranyiRegion: amplitude must be > 1");
}

// ---------------------------------------------------------------------------
// Distance kernels.
// ---------------------------------------------------------------------------

double one_minus_norm_sq(const CVector& z) {
  const double n = z.norm();
  return std::max(0.0, (1.0 - n) * (1.0 + n));
}

double one_minus_norm_sq_of_cayley_image(const CVector& p) {
  const Complex d = p[0] + Complex(0.0, 1.0);
  const double rho = interior_margin(Domain::siegel, p);
  return 4.0 * rho / std::norm(d);
}

double interior_margin(Domain d, const CVector& v) {
  if (d == Domain::ball) return 1.0 - v.norm();
  const double wsq = (v.size() > 1) ? v.tail(v.size() - 1).squaredNorm() : 0.0;
  return v[0].imag() - wsq;
}

namespace {

// log((1+t)/(1-t)) evaluated from t and u = 1 - t^2, accurate for t near both
// endpoints: near 0 use the atanh route, near 1 use 2*log1p(t) - log(u) so the
// value is controlled by u (which the callers compute without cancellation).
double log_ratio_from(double t, double u) {
  if (t < 0.5) return 2.0 * std::atanh(t);
  return 2.0 * std::log1p(t) - std::log(u);
}

}  // namespace

double ball_distance(const CVector& z, const CVector& w, double boundary_eps) {
  if (z.size() != w.size()) throw Error("ball_distance: dimension mismatch");
  if (z.norm() >= 1.0 - boundary_eps || w.norm() >= 1.0 - boundary_eps) {
    throw BoundaryProximity("ball_distance: point within boundary_eps of the sphere");
  }
  const Complex one_minus_inner = Complex(1.0, 0.0) - hermitian_inner(z, w);
  double u = one_minus_norm_sq(z) * one_minus_norm_sq(w) / std::norm(one_minus_inner);
  u = std::min(u, 1.0);
  double t = std::sqrt(std::max(0.0, 1.0 - u));
  if (u > 0.99) {
    // nearly equal points: the cancellation in 1-u dominates, so measure the
    // separation directly through the exchange automorphism instead.
    t = moebius_exchange_apply(w, z).norm();
    return 2.0 * std::atanh(std::min(t, 1.0 - 1e-16));
  }
  return log_ratio_from(t, u);
}

namespace {

// Siegel pairing S(p,q) = (p1 - conj(q1))/(2i) - <p',q'>; S(p,p) = height(p).
Complex siegel_pairing(const CVector& p, const CVector& q) {
  const Complex num = p[0] - std::conj(q[0]);
  Complex s = num / Complex(0.0, 2.0);
  if (p.size() > 1) {
    s -= hermitian_inner(p.tail(p.size() - 1), q.tail(q.size() - 1));
  }
  return s;
}

}  // namespace

double siegel_distance(const CVector& p, const CVector& q) {
  if (p.size() != q.size()) throw Error("siegel_distance: dimension mismatch");
  const double hp = interior_margin(Domain::siegel, p);
  const double hq = interior_margin(Domain::siegel, q);
  if (!(hp > 0.0) || !(hq > 0.0)) {
    throw BoundaryProximity("siegel_distance: point on or below the boundary");
  }
  const double s2 = std::norm(siegel_pairing(p, q));
  // 1 - t^2 for the Cayley images; exact identity, no ball coordinates needed.
  double u = hp * hq / s2;
  u = std::min(u, 1.0);
  const double t = std::sqrt(std::max(0.0, 1.0 - u));
  if (t < 1e-3) {
    // atanh series: 2t(1 + t^2/3 + t^4/5); truncation error ~ t^7
    const double t2 = t * t;
    return 2.0 * t * (1.0 + t2 / 3.0 + t2 * t2 / 5.0);
  }
  return log_ratio_from(t, u);
}

double kobayashi_distance(Domain d, const CVector& x, const CVector& y) {
  return d == Domain::ball ? ball_distance(x, y) : siegel_distance(x, y);
}

double kobayashi_distance(const BallPoint& z, const BallPoint& w,
                          double boundary_eps) {
  return ball_distance(z.z, w.z, boundary_eps);
}

double kobayashi_metric(const BallPoint& z, const CVector& v,
                        double boundary_eps) {
  if (v.size() != z.z.size()) throw Error("kobayashi_metric: dimension mismatch");
  const double omns = one_minus_norm_sq(z.z);
  if (omns <= boundary_eps) {
    throw BoundaryProximity("kobayashi_metric: point within boundary_eps of the sphere");
  }
  const double inner = std::norm(hermitian_inner(v, z.z));
  return 2.0 * std::sqrt(omns * v.squaredNorm() + inner) / omns;
}

CMatrix ball_metric_matrix(const CVector& z) {
  const double omns = one_minus_norm_sq(z);
  if (omns <= 0.0) throw BoundaryProximity("ball_metric_matrix: boundary point");
  const int q = static_cast<int>(z.size());
  CMatrix g = omns * CMatrix::Identity(q, q) + z * z.adjoint();
  return (4.0 / (omns * omns)) * g;
}

CMatrix siegel_metric_matrix(const CVector& p) {
  const int q = static_cast<int>(p.size());
  const double rho = interior_margin(Domain::siegel, p);
  if (!(rho > 0.0)) throw BoundaryProximity("siegel_metric_matrix: boundary point");
  const Complex d = p[0] + Complex(0.0, 1.0);
  // K = d^2 * J_{cayley_inverse}(p): scaled so no |d|^4 appears on its own.
  CMatrix K = CMatrix::Zero(q, q);
  K(0, 0) = Complex(0.0, 2.0);
  for (int j = 1; j < q; ++j) {
    K(j, 0) = -2.0 * p[j];
    K(j, j) = 2.0 * d;
  }
  const CVector z = cayley_inverse_apply(p);
  const CVector w = K.adjoint() * z;
  const double dsq = std::norm(d);
  CMatrix g = (4.0 * rho / dsq) * (K.adjoint() * K) + w * w.adjoint();
  return g / (4.0 * rho * rho);
}

CMatrix metric_matrix(Domain d, const CVector& at) {
  return d == Domain::ball ? ball_metric_matrix(at) : siegel_metric_matrix(at);
}

// ---------------------------------------------------------------------------
// Möbius exchange automorphism.
//
// φ_w(z) = (w − P z − s Q z)/(1 − ⟨z,w⟩) with P the orthogonal projection onto
// span(w), Q = I − P, s = sqrt(1 − ‖w‖²).  φ_w(0) = w, φ_w(w) = 0, φ_w∘φ_w = id.
// ---------------------------------------------------------------------------

namespace {

// M = P + sQ as a dense matrix (reduces to s·I when w = 0).
CMatrix exchange_linear_part(const CVector& w) {
  const int q = static_cast<int>(w.size());
  const double nsq = w.squaredNorm();
  const double s = std::sqrt(std::max(0.0, 1.0 - nsq));
  if (nsq == 0.0) return s * CMatrix::Identity(q, q);
  CMatrix P = (w * w.adjoint()) / nsq;
  return P + s * (CMatrix::Identity(q, q) - P);
}

}  // namespace

CVector moebius_exchange_apply(const CVector& w, const CVector& z) {
  if (w.size() != z.size()) throw Error("moebius_exchange: dimension mismatch");
  if (w.norm() >= 1.0) throw DomainEscape("moebius_exchange: center outside the ball");
  const CMatrix M = exchange_linear_part(w);
  const Complex den = Complex(1.0, 0.0) - hermitian_inner(z, w);
  return (w - M * z) / den;
}

CMatrix moebius_exchange_jacobian(const CVector& w, const CVector& z) {
  const CMatrix M = exchange_linear_part(w);
  const Complex den = Complex(1.0, 0.0) - hermitian_inner(z, w);
  const CVector num = w - M * z;
  // d/dz of num/den: -(M)/den + num · (conj(w))^T / den^2
  return -M / den + (num * w.adjoint()) / (den * den);
}

// ---------------------------------------------------------------------------
// Cayley map.
// ---------------------------------------------------------------------------

CVector cayley_apply(const CVector& z) {
  const int q = static_cast<int>(z.size());
  const Complex den = Complex(1.0, 0.0) - z[0];
  if (den == Complex(0.0, 0.0)) throw BoundaryProximity("cayley: z1 = 1");
  CVector p(q);
  p[0] = Complex(0.0, 1.0) * (Complex(1.0, 0.0) + z[0]) / den;
  for (int j = 1; j < q; ++j) p[j] = Complex(0.0, 1.0) * z[j] / den;
  return p;
}

CMatrix cayley_jacobian(const CVector& z) {
  const int q = static_cast<int>(z.size());
  const Complex den = Complex(1.0, 0.0) - z[0];
  const Complex den2 = den * den;
  CMatrix J = CMatrix::Zero(q, q);
  J(0, 0) = Complex(0.0, 2.0) / den2;
  for (int j = 1; j < q; ++j) {
    J(j, 0) = Complex(0.0, 1.0) * z[j] / den2;
    J(j, j) = Complex(0.0, 1.0) / den;
  }
  return J;
}

CVector cayley_inverse_apply(const CVector& p) {
  const int q = static_cast<int>(p.size());
  const Complex den = p[0] + Complex(0.0, 1.0);
  if (den == Complex(0.0, 0.0)) throw BoundaryProximity("cayley_inverse: z1 = -i");
  CVector z(q);
  z[0] = (p[0] - Complex(0.0, 1.0)) / den;
  for (int j = 1; j < q; ++j) z[j] = 2.0 * p[j] / den;
  return z;
}

CMatrix cayley_inverse_jacobian(const CVector& p) {
  const int q = static_cast<int>(p.size());
  const Complex den = p[0] + Complex(0.0, 1.0);
  const Complex den2 = den * den;
  CMatrix J = CMatrix::Zero(q, q);
  J(0, 0) = Complex(0.0, 2.0) / den2;
  for (int j = 1; j < q; ++j) {
    J(j, 0) = -2.0 * p[j] / den2;
    J(j, j) = 2.0 / den;
  }
  return J;
}

SiegelPoint cayley(const BallPoint& z) {
  return SiegelPoint::from_vec(cayley_apply(z.z));
}

BallPoint cayley_inverse(const SiegelPoint& p) {
  return BallPoint(cayley_inverse_apply(p.vec()));
}

// ---------------------------------------------------------------------------
// Horospheres and approach regions.
// ---------------------------------------------------------------------------

double horosphere_quotient(const BoundaryPoint& a, const CVector& z) {
  const double omns = one_minus_norm_sq(z);
  if (omns <= 0.0) throw BoundaryProximity("horosphere_quotient: boundary point");
  const Complex g = Complex(1.0, 0.0) - hermitian_inner(z, a.a);
  return std::norm(g) / omns;
}

bool horosphere_contains(const Horosphere& E, const BallPoint& z) {
  return horosphere_quotient(E.center, z.z) < E.radius;
}

double koranyi_quotient(const BoundaryPoint& a, const CVector& z) {
  const double m = 1.0 - z.norm();
  if (m <= 0.0) throw BoundaryProximity("koranyi_quotient: boundary point");
  const Complex g = Complex(1.0, 0.0) - hermitian_inner(z, a.a);
  return std::abs(g) / m;
}

bool koranyi_contains(const KoranyiRegion& K, const BallPoint& z) {
  return koranyi_quotient(K.vertex, z.z) < K.amplitude;
}

// ---------------------------------------------------------------------------
// Sequence diagnostics.
// ---------------------------------------------------------------------------

SequenceDiagnostics classify_sequence(std::span<const BallPoint> seq,
                                      const BoundaryPoint& a,
                                      const SequenceOptions& opts) {
  if (seq.size() < 2) throw NotConvergent("classify_sequence: need at least 2 points");
  const int n = static_cast<int>(seq.size());
  if ((seq[n - 1].z - a.a).norm() > opts.convergence_tol) {
    throw NotConvergent("classify_sequence: sequence does not approach the boundary point");
  }

  SequenceDiagnostics d;
  d.special_distances.reserve(n);
  d.nontangential_ratios.reserve(n);
  d.koranyi_quotients.reserve(n);
  for (const BallPoint& zk : seq) {
    const Complex inner = hermitian_inner(zk.z, a.a);
    const CVector proj = inner * a.a;
    d.special_distances.push_back(ball_distance(zk.z, proj));
    const double denom = 1.0 - std::abs(inner);
    d.nontangential_ratios.push_back(
        denom > 0.0 ? std::abs(Complex(1.0, 0.0) - inner) / denom
                    : std::numeric_limits<double>::infinity());
    d.koranyi_quotients.push_back(koranyi_quotient(a, zk.z));
  }

  const int win = std::min(opts.window, n);
  auto tail_max = [&](const std::vector<double>& v) {
    return *std::max_element(v.end() - win, v.end());
  };
  auto tail_min = [&](const std::vector<double>& v) {
    return *std::min_element(v.end() - win, v.end());
  };

  d.is_restricted = tail_max(d.nontangential_ratios) <= opts.restricted_cap;

  // "special" = special distances tend to 0: either the whole tail is already
  // below special_tol, or it is decreasing and has dipped below it.
  const double sd_max = tail_max(d.special_distances);
  const double sd_min = tail_min(d.special_distances);
  bool decreasing = true;
  for (int i = n - win; i + 1 < n; ++i) {
    if (d.special_distances[i + 1] > d.special_distances[i] + opts.tol) {
      decreasing = false;
      break;
    }
  }
  d.is_special = (sd_max < opts.special_tol) ||
                 (decreasing && sd_min < opts.special_tol);
  d.is_admissible = d.is_special && d.is_restricted;

  // least ladder amplitude containing the tail quotients
  const double kq_max = tail_max(d.koranyi_quotients);
  for (int j = 1; j <= opts.koranyi_ladder_max; ++j) {
    const double R = std::ldexp(1.0, j);  // 2^j
    if (kq_max < R) {
      d.koranyi_amplitude_bound = R;
      break;
    }
  }
  d.eventually_koranyi = d.koranyi_amplitude_bound.has_value();

  const bool restricted_and_bounded =
      d.is_restricted && tail_max(d.special_distances) <= opts.bounded_cap;
  d.bgp_consistent = (d.eventually_koranyi == restricted_and_bounded);
  return d;
}

std::vector<BallPoint> radial_sequence(const BoundaryPoint& a, int count) {
  std::vector<BallPoint> seq;
  seq.reserve(count);
  for (int k = 1; k <= count; ++k) {
    seq.emplace_back(CVector((1.0 - std::ldexp(1.0, -k)) * a.a));
  }
  return seq;
}

std::vector<BallPoint> phase_sequence(const BoundaryPoint& a, Complex phase,
                                      int count, double t0, double drift,
                                      const CVector* dir) {
  if (!(phase.real() > 0.0)) {
    throw Error("phase_sequence: Re(phase) must be positive");
  }
  std::vector<BallPoint> seq;
  seq.reserve(count);
  for (int k = 1; k <= count; ++k) {
    const double t = t0 * std::ldexp(1.0, -k);
    CVector z = (Complex(1.0, 0.0) - t * phase) * a.a;
    if (drift != 0.0 && dir != nullptr) {
      z += drift * std::sqrt(t) * (*dir);
    }
    seq.emplace_back(std::move(z));
  }
  return seq;
}

}  // namespace kobdyn
