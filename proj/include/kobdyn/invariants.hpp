#pragma once

// Dynamical invariants of a holomorphic self-map: hyperbolic m-step,
// divergence rate with Fekete bracketing, the limit pseudo-distance and
// limit-metric rank of the canonical model, the step-limit formula at the
// Denjoy-Wolff point, and the Lindelof-type hypothesis checker.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kobdyn/ball_geometry.hpp"
#include "kobdyn/self_map.hpp"
#include "kobdyn/types.hpp"

namespace kobdyn {

// ---------------------------------------------------------------------------
// Hyperbolic m-step  s_m(x) = lim_n k(f^n x, f^{n+m} x).
// ---------------------------------------------------------------------------

struct StepEstimate {
  int m = 1;                   // gap count
  std::vector<double> values;  // n ↦ k(f^n x, f^{n+m} x), up to the stop index
  double limit = 0.0;          // declared limit (last tail value)
  int window = 20;             // tail size used for the flatness declaration
};

struct StepOptions {
  int window = 20;
  double tol = 1e-8;
  long cap = 50000;                 // max n before giving up
  double monotone_slack = 1e-10;    // allowed uphill wiggle per step
};

// The sequence n ↦ k(f^n x, f^{n+m} x) is nonincreasing; the limit is
// declared once the tail window is flat within tol.  Throws NotConvergent at
// the cap and MonotonicityViolation if the sequence climbs beyond the slack.
StepEstimate hyperbolic_step(const SelfMap& f, const CVector& x, int m,
                             const StepOptions& opts = {});

// ---------------------------------------------------------------------------
// Divergence rate  c(f) = lim_m k(x, f^m x)/m.
// ---------------------------------------------------------------------------

struct DivergenceEstimate {
  std::vector<double> ratios;         // m ↦ k(x, f^m x)/m
  std::vector<double> fekete_bounds;  // running inf of the ratios (upper certificates)
  std::vector<double> via_steps;      // m ↦ s_m(x)/m proxy at the deepest tail index
  std::vector<double> increments;     // m ↦ k(x,f^m x) − k(x,f^{m−1} x)
  double c = 0.0;                     // point estimate (clamped to [0, fekete inf])
  std::pair<double, double> bracket{0.0, 0.0};  // (last ratio − tol, fekete inf)
  LimitStatus status = LimitStatus::not_converged;
  bool increments_decaying = false;   // tail increments still shrinking ⇒ limit 0
  int n_used = 0;                     // orbit length actually available
};

struct DivergenceOptions {
  long max_m = 2000;
  double tol = 1e-8;
  int window = 20;
  double ball_margin_floor = 1e-8;
  double coordinate_guard = 1e140;
};

// Estimates c(f) from the orbit of x.  The reported point estimate is the
// median of the last few distance increments (exact for orbits along
// geodesics, error O(1/m) for parabolic tails), clamped into [0, Fekete inf].
// A tail-decay test flags increment sequences that are still shrinking
// geometrically in m — the signature of a vanishing rate.
DivergenceEstimate divergence_rate(const SelfMap& f, const CVector& x,
                                   const DivergenceOptions& opts = {});
DivergenceEstimate divergence_rate(const SelfMap& f, const CVector& x,
                                   long max_m, double tol);

// ---------------------------------------------------------------------------
// Limit pseudo-distance of the canonical model.
// ---------------------------------------------------------------------------

struct ModelDistanceOptions {
  long cap = 10000;
  double tol = 1e-8;
  int window = 20;
};

// lim_m k(f^m z, f^m w): the Kobayashi distance of the abstract model pulled
// back through the intertwining map.  Requires a declared-univalent f; the
// sequence is nonincreasing and the limit is declared at tail flatness.
double model_distance(const SelfMap& f, const CVector& z, const CVector& w,
                      const ModelDistanceOptions& opts = {});

// ---------------------------------------------------------------------------
// Canonical dimension: rank of the limit of the pulled-back metric.
// ---------------------------------------------------------------------------

struct LimitMetricReport {
  std::vector<CMatrix> matrices;  // H_m = J_m^* G(f^m base) J_m (Hermitian PSD)
  std::vector<std::vector<double>> eigenvalue_trajectories;  // per index, over m
  int rank = 0;
  double tolerance = 1e-6;  // cutoff on eigenvalues normalized by the largest of H_0
};

struct CanonicalDimensionOptions {
  int cap = 100;
  double eig_tol = 1e-6;
  int window = 10;
  double monotone_slack = 1e-8;
  double hermitian_tol = 1e-10;
};

// Pullback of the squared infinitesimal metric: H_m(v) = κ(f^m b; J_m v)².
// Eigenvalues (sorted, normalized by the top eigenvalue of H_0) are
// nonincreasing in m; rank counts the trajectories with limit > eig_tol.
LimitMetricReport canonical_dimension(const SelfMap& f, const CVector& base,
                                      const CanonicalDimensionOptions& opts = {});

// ---------------------------------------------------------------------------
// Step-limit formula at the Denjoy-Wolff point.
// ---------------------------------------------------------------------------

// F(c, λ) = log( (|conj(c)²+λ| + (1−λ)) / (|conj(c)²+λ| − (1−λ)) ) for a unit
// phase c; the parabolic case λ=1 gives 0.  Throws on the degenerate phase
// c² ≈ −λ where the denominator vanishes.
double step_limit_formula(Complex c_phase, double lambda_f);

struct StepLimitReport {
  double formula_value = 0.0;
  double empirical_value = 0.0;   // declared limit of k(z_k, f(z_k)) along seq
  double difference = 0.0;
  bool parabolic = false;
  LimitStatus status = LimitStatus::not_converged;
  std::vector<double> trace;      // k(z_k, f(z_k)) along the sequence
};

// Compares lim k(z_k, f(z_k)) along an admissible sequence with the closed
// formula; distances are evaluated in half-space coordinates for stability
// next to the boundary.
StepLimitReport step_limit_check(const SelfMap& f, double lambda_f,
                                 Complex c_phase,
                                 std::span<const BallPoint> seq,
                                 const TailOptions& tail = {});

// ---------------------------------------------------------------------------
// Lindelof-type hypothesis checker.
// ---------------------------------------------------------------------------

struct LindelofOptions {
  double slack = 1e-9;          // tolerance on the two distance bounds
  double agreement_tol = 1e-6;  // limit agreement across approach sequences
  int koranyi_family = 5;       // seeded Koranyi approach sequences
  int koranyi_count = 40;       // points per generated sequence
  std::uint64_t seed = 7;
  TailOptions tail{};
};

struct LindelofReport {
  double bound_consecutive = 0.0;  // sup_n k(z_n, z_{n+1})
  double bound_special = 0.0;      // sup_n k(z_n, ⟨z_n,a⟩a)
  bool hypotheses_hold = false;
  CVector sequence_limit;                 // lim h(z_n)
  std::vector<CVector> koranyi_limits;    // lim h along each generated sequence
  bool limits_agree = false;
  double worst_limit_gap = 0.0;
};

// Verifies k(z_n,z_{n+1}) ≤ C and k(z_n, ⟨z_n,a⟩a) ≤ C along the sequence
// (throwing HypothesisFailed with the violated bound index), then compares
// the limit of h along the sequence with its limits along seeded Koranyi
// approach sequences — an empirical restricted-K-limit witness.
LindelofReport lindelof_hypotheses(const std::function<CVector(const CVector&)>& h,
                                   std::span<const BallPoint> seq,
                                   const BoundaryPoint& a, double C,
                                   const LindelofOptions& opts = {});
LindelofReport lindelof_hypotheses(const SelfMap& h, std::span<const BallPoint> seq,
                                   const BoundaryPoint& a, double C,
                                   const LindelofOptions& opts = {});

}  // namespace kobdyn
