#pragma once

#include <optional>
#include <span>
#include <utility>

#include "kobdyn/types.hpp"

namespace kobdyn {

// ---------------------------------------------------------------------------
// Points and regions.
// ---------------------------------------------------------------------------

/// Interior point of B^q (validated: ‖z‖ < 1).
struct BallPoint {
  CVector z;
  explicit BallPoint(CVector coords);
  int dim() const { return static_cast<int>(z.size()); }
};

/// Point of the unit sphere ∂B^q (validated: |‖a‖ − 1| ≤ 1e−12).
struct BoundaryPoint {
  CVector a;
  explicit BoundaryPoint(CVector coords);
  int dim() const { return static_cast<int>(a.size()); }
};

/// Point of the Siegel half-space H^q: Im z1 > ‖w‖² (w has length q−1).
struct SiegelPoint {
  Complex z1;
  CVector w;
  SiegelPoint(Complex first, CVector rest);
  int dim() const { return 1 + static_cast<int>(w.size()); }
  /// Height above the boundary: Im z1 − ‖w‖² (> 0 inside).
  double height() const;
  CVector vec() const;
  static SiegelPoint from_vec(const CVector& p);
};

/// Horosphere E(a,R) = { z : |1−⟨z,a⟩|²/(1−‖z‖²) < R }, internally tangent at a.
struct Horosphere {
  BoundaryPoint center;
  double radius;  // R > 0
  Horosphere(BoundaryPoint a, double R);
};

/// Korányi approach region K(a,R) = { z : |1−⟨z,a⟩| < R(1−‖z‖) }, R > 1.
struct KoranyiRegion {
  BoundaryPoint vertex;
  double amplitude;  // R > 1
  KoranyiRegion(BoundaryPoint a, double R);
};

// ---------------------------------------------------------------------------
// Distance and metric kernels (flat-vector level; used by everything above).
//
// Normalization: curvature −1, i.e. k(0, z) = log((1+‖z‖)/(1−‖z‖)).  The two
// coordinate systems are glued by the Cayley map, which is an isometry, and
// both kernels are written to stay accurate for points far from the reference
// scale (orbit points of expanding maps).
// ---------------------------------------------------------------------------

inline constexpr double kBoundaryEps = 1e-14;

/// 1 − ‖z‖² for a ball vector, computed as (1−‖z‖)(1+‖z‖).
double one_minus_norm_sq(const CVector& z);

/// Ball-side 1 − ‖·‖² of the Cayley image of a Siegel vector p, computed
/// entirely in Siegel coordinates: 4·height / |p1 + i|².
double one_minus_norm_sq_of_cayley_image(const CVector& p);

/// Signed interior margin: ball → 1 − ‖z‖; siegel → Im p1 − ‖p'‖².
double interior_margin(Domain d, const CVector& v);

double ball_distance(const CVector& z, const CVector& w,
                     double boundary_eps = kBoundaryEps);
double siegel_distance(const CVector& p, const CVector& q);
double kobayashi_distance(Domain d, const CVector& x, const CVector& y);

double kobayashi_distance(const BallPoint& z, const BallPoint& w,
                          double boundary_eps = kBoundaryEps);

/// Infinitesimal metric κ(z; v) = 2·sqrt((1−‖z‖²)‖v‖² + |⟨v,z⟩|²)/(1−‖z‖²).
double kobayashi_metric(const BallPoint& z, const CVector& v,
                        double boundary_eps = kBoundaryEps);

/// Hermitian matrix G with κ(z;v)² = v*Gv (ball coordinates).
CMatrix ball_metric_matrix(const CVector& z);

/// Same quadratic form in Siegel coordinates (robust for large |p1|).
CMatrix siegel_metric_matrix(const CVector& p);

CMatrix metric_matrix(Domain d, const CVector& at);

// ---------------------------------------------------------------------------
// Möbius exchange automorphism and the Cayley map (vector-level kernels; the
// SelfMap wrappers live in self_map.hpp).
// ---------------------------------------------------------------------------

/// φ_w(z): the involutive automorphism exchanging w and 0.
CVector moebius_exchange_apply(const CVector& w, const CVector& z);
/// Complex Jacobian of φ_w at z.
CMatrix moebius_exchange_jacobian(const CVector& w, const CVector& z);

/// Ψ(z) = i(e1 + z)/(1 − z1): B^q → H^q.
CVector cayley_apply(const CVector& z);
CMatrix cayley_jacobian(const CVector& z);
/// Ψ^{-1}(p) = ((p1−i)/(p1+i), 2p'/(p1+i)).
CVector cayley_inverse_apply(const CVector& p);
CMatrix cayley_inverse_jacobian(const CVector& p);

SiegelPoint cayley(const BallPoint& z);
BallPoint cayley_inverse(const SiegelPoint& p);

// ---------------------------------------------------------------------------
// Horospheres and approach regions.
// ---------------------------------------------------------------------------

/// |1−⟨z,a⟩|²/(1−‖z‖²); the defining quotient of E(a,R).
double horosphere_quotient(const BoundaryPoint& a, const CVector& z);
bool horosphere_contains(const Horosphere& E, const BallPoint& z);

/// |1−⟨z,a⟩|/(1−‖z‖); the defining quotient of K(a,R).
double koranyi_quotient(const BoundaryPoint& a, const CVector& z);
bool koranyi_contains(const KoranyiRegion& K, const BallPoint& z);

// ---------------------------------------------------------------------------
// Boundary-approach sequence diagnostics.
// ---------------------------------------------------------------------------

struct SequenceOptions {
  int window = 20;                 // tail window for limit declarations
  double tol = 1e-8;               // flatness tolerance
  double convergence_tol = 1e-3;   // ‖z_last − a‖ must fall below this
  double restricted_cap = 1e3;     // tail bound on |1−⟨z,a⟩|/(1−|⟨z,a⟩|)
  double special_tol = 1e-4;       // a decreasing special-distance tail below
                                   // this (at its minimum) counts as → 0
  double bounded_cap = 50.0;       // "bounded special distances" cutoff
  int koranyi_ladder_max = 20;     // amplitudes 2^1 .. 2^ladder_max are tried
};

/// Everything classify_sequence measured, so callers can re-decide with their
/// own cutoffs: raw tails are retained alongside the verdicts.
struct SequenceDiagnostics {
  bool is_restricted = false;
  bool is_special = false;
  bool is_admissible = false;                    // special AND restricted
  std::vector<double> special_distances;         // k(z_k, ⟨z_k,a⟩a)
  std::vector<double> nontangential_ratios;      // |1−⟨z_k,a⟩|/(1−|⟨z_k,a⟩|)
  std::vector<double> koranyi_quotients;         // |1−⟨z_k,a⟩|/(1−‖z_k‖)
  std::optional<double> koranyi_amplitude_bound; // least ladder R with the tail in K(a,R)
  bool eventually_koranyi = false;
  bool bgp_consistent = false;  // eventually-Korányi ⇔ restricted ∧ bounded special distances
};

/// Diagnoses how seq approaches the boundary point a.  Throws NotConvergent if
/// the sequence does not actually approach a (within opts.convergence_tol).
SequenceDiagnostics classify_sequence(std::span<const BallPoint> seq,
                                      const BoundaryPoint& a,
                                      const SequenceOptions& opts = {});

// ---------------------------------------------------------------------------
// Canned boundary-approach sequences (shared by tests, harnesses and the
// verification suites).
// ---------------------------------------------------------------------------

/// z_k = (1 − 2^{−k}) a, k = 1..count.
std::vector<BallPoint> radial_sequence(const BoundaryPoint& a, int count);

/// ⟨z_k,a⟩ = 1 − t_k·phase with t_k = t0·2^{−k}, plus an optional orthogonal
/// drift of size drift·sqrt(t_k) along dir (dir ⊥ a assumed).  Re(phase) > 0.
std::vector<BallPoint> phase_sequence(const BoundaryPoint& a, Complex phase,
                                      int count, double t0 = 0.5,
                                      double drift = 0.0,
                                      const CVector* dir = nullptr);

}  // namespace kobdyn
