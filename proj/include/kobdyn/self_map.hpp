#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "kobdyn/ball_geometry.hpp"

namespace kobdyn {

// ---------------------------------------------------------------------------
// Holomorphic self-maps of B^q or H^q.
//
// Value type over a shared immutable payload.  Exact Jacobians are kept for
// every structured kind; closures fall back to central finite differences.
// Construction validates on a fixed seeded sample that the map actually sends
// its domain into itself (tolerance 1e-12 on the interior margin).
// ---------------------------------------------------------------------------

class SelfMap {
 public:
  enum class Kind { ball_automorphism, siegel_affine, composition, closure, transported };

  using EvalFn = std::function<CVector(const CVector&)>;
  using JacFn = std::function<CMatrix(const CVector&)>;

  SelfMap() = default;

  static SelfMap identity(Domain d, int dim);

  /// z ↦ U·φ_w(z) with φ_w the exchange automorphism; U defaults to I.
  /// automorphism_to_origin(w) below is the U = I case, which swaps w and 0.
  static SelfMap ball_automorphism(const CVector& w,
                                   std::optional<CMatrix> unitary = std::nullopt);

  /// z ↦ L z + t on H^q (used by every linear-fractional normal form).
  static SelfMap siegel_affine(const CMatrix& linear, const CVector& offset);

  static SelfMap closure(Domain d, int dim, EvalFn eval, JacFn jac = nullptr,
                         bool univalent = false, std::string label = "closure");

  /// outer ∘ inner (domains and dimensions must match).
  static SelfMap compose(const SelfMap& outer, const SelfMap& inner);

  /// k-fold composition power, k ≥ 1 (closed form for affine maps).
  SelfMap pow(int k) const;

  /// Inverse; available for ball automorphisms only.
  SelfMap inverse() const;

  /// The same map conjugated by the Cayley isometry into `target` coordinates.
  /// The original is retained as the iteration form: unbounded Siegel
  /// coordinates keep precision that near-sphere ball points cannot.
  SelfMap transported(Domain target) const;

  /// Records the exact dilation coefficient at the attracting boundary point
  /// when the construction pins it (normal forms).
  SelfMap with_analytic_dilation(double lambda_f) const;

  CVector operator()(const CVector& z) const;
  CMatrix jacobian(const CVector& z) const;

  Domain domain() const;
  int dim() const;
  Kind kind() const;
  bool univalent() const;
  const std::string& label() const;
  std::optional<double> analytic_dilation() const;

  bool is_transport() const;
  SelfMap iteration_form() const;

  bool valid() const { return impl_ != nullptr; }

  struct Impl;

 private:
  std::shared_ptr<const Impl> impl_;
  explicit SelfMap(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
};

/// The exchange automorphism φ_w as a SelfMap (swaps w and 0; involutive).
SelfMap automorphism_to_origin(const CVector& w);

/// Deterministic interior base point of the given domain.
CVector default_base(Domain d, int dim);

/// x expressed in `target` coordinates (Cayley when domains differ).
CVector transport_point(Domain from, Domain target, const CVector& x);

// ---------------------------------------------------------------------------
// Iteration.
// ---------------------------------------------------------------------------

/// f^m(x); every step checks the image stays in the domain (margin ≥ −1e−10)
/// and stays finite, else DomainEscape.
CVector iterate(const SelfMap& f, const CVector& x, int m);

/// Forward orbit x, f(x), …; stops early (truncated = true) when coordinates
/// leave the numerically trustworthy range rather than overflowing:
/// ball margin below `ball_margin_floor`, or Siegel coordinates above
/// `coordinate_guard`.  Genuine domain violations still throw.
struct Orbit {
  std::vector<CVector> points;
  bool truncated = false;
};
Orbit compute_orbit(const SelfMap& f, const CVector& x, int max_n,
                    double ball_margin_floor = 1e-8,
                    double coordinate_guard = 1e140);

// ---------------------------------------------------------------------------
// Fixed points and Denjoy–Wolff data.
// ---------------------------------------------------------------------------

struct FixedPointOptions {
  double tol = 1e-10;
  long max_iter = 100000;
  double interior_margin_min = 1e-9;  // below this a candidate is boundary junk
  int extra_seeds = 2;                // sampled seeds besides the default base
  std::uint64_t seed = 2024;
};

struct FixedPointResult {
  enum class Outcome { found, none, inconclusive };
  Outcome outcome = Outcome::inconclusive;
  std::optional<CVector> point;  // in the map's public coordinates
  long iterations_used = 0;
};

/// Plain iteration first; Newton refinement when orbits stall without either
/// converging or escaping.  `none` = every orbit escaped to the boundary.
FixedPointResult find_fixed_point(const SelfMap& f, const FixedPointOptions& opts = {});

enum class MapClass { elliptic, hyperbolic, parabolic };
const char* to_string(MapClass c);

struct DenjoyWolffOptions {
  double tol = 1e-8;
  long max_iter = 100000;
  int orbit_cap = 2000;       // divergence-rate budget
  double class_tol = 1e-6;    // |λ−1| within this is declared parabolic
  TailOptions tail{};
  std::optional<CVector> base;  // in the map's public coordinates
};

struct DenjoyWolffData {
  std::optional<MapClass> map_class;     // empty ⇒ Inconclusive
  std::optional<CVector> boundary_point; // ball coordinates, unit norm
  std::optional<double> dilation;        // λ_f ∈ (0,1]; unset for elliptic
  std::optional<CVector> fixed_point;    // public coordinates; elliptic only
  double dilation_from_quotients = 0.0;  // (1−‖z_{m+1}‖)/(1−‖z_m‖) tail
  double dilation_from_rate = 0.0;       // exp(−ĉ)
  double rate_estimate = 0.0;            // ĉ from the divergence-rate estimator
  std::vector<double> quotient_trace;    // tail of the quotient sequence
  LimitStatus status = LimitStatus::converged;
  bool inconclusive = false;
  std::string note;
};

/// Full classification: interior fixed point ⇒ elliptic; otherwise the orbit
/// escapes, the boundary target and the dilation are estimated two ways
/// (boundary-distance quotients, and exp(−divergence rate): the reported
/// dilation), and disagreement is surfaced as inconclusive, never averaged.
DenjoyWolffData denjoy_wolff(const SelfMap& f, const DenjoyWolffOptions& opts = {});
DenjoyWolffData classify(const SelfMap& f, const DenjoyWolffOptions& opts = {});

// ---------------------------------------------------------------------------
// Horosphere invariance (Julia inclusion) check.
// ---------------------------------------------------------------------------

struct JuliaOptions {
  std::vector<double> R_grid{0.25, 1.0, 4.0};
  int samples = 1000;           // accepted points per R
  std::uint64_t seed = 1;
  double margin_tol = 1e-8;
  long attempt_cap = 50'000'000;  // rejection-sampling budget per R
};

struct JuliaReport {
  struct Row {
    double R = 0.0;
    int samples = 0;
    int violations = 0;
    double worst_margin = 0.0;  // max over samples of quotient(f(z)) − λ·R
  };
  std::vector<Row> rows;
  double dilation_used = 0.0;
  bool pass = false;
};

/// Rejection-samples E(a,R) inside the ball for each R and verifies images lie
/// in E(a, λR) within margin_tol.  Throws SamplingStarved if the attempt
/// budget runs out.
JuliaReport julia_check(const SelfMap& f, const DenjoyWolffData& dw,
                        const JuliaOptions& opts = {});

}  // namespace kobdyn
