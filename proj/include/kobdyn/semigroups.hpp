#pragma once

// One-parameter semigroups of holomorphic self-maps: explicitly integrable
// affine half-space flows and user-supplied closures, rate extraction along a
// geometric time grid, the rate-linearity law c(φ_t) = t·c(φ_1), and
// classification with cross-time consistency checks.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kobdyn/self_map.hpp"
#include "kobdyn/types.hpp"

namespace kobdyn {

class Semigroup {
 public:
  enum class Kind { affine_siegel_flow, closure };
  using FlowFn = std::function<CVector(double, const CVector&)>;

  Semigroup() = default;

  // φ_t(z1, w_j) = (e^{λt} z1 + b·g_λ(t), e^{μ_j t} w_j) with
  // g_λ(t) = (e^{λt}−1)/λ (= t when λ = 0).  Self-map conditions: Im b ≥ 0
  // and λ ≥ 2 μ_j for every block exponent.
  static Semigroup affine_siegel(double lambda, const RVector& mu, Complex drift);

  static Semigroup closure(Domain d, int dim, FlowFn eval,
                           std::string label = "flow-closure");

  CVector operator()(double t, const CVector& z) const;
  // The time-t slice as a SelfMap (exact affine data for affine flows; tagged
  // with its dilation e^{−λt} when the flow escapes to infinity).
  SelfMap time_map(double t) const;

  Domain domain() const;
  int dim() const;
  Kind kind() const;
  const std::string& label() const;
  // Generator exponent λ of an affine flow; unset for closures.
  std::optional<double> flow_rate() const;
  bool valid() const { return impl_ != nullptr; }

  struct Impl;

 private:
  explicit Semigroup(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

// Max over sampled (t, s, z) of ‖φ_{t+s}(z) − φ_t(φ_s(z))‖ — the semigroup
// law defect (also verified at construction).
double semigroup_law_residual(const Semigroup& phi, int triples = 100,
                              std::uint64_t seed = 23);

// ---------------------------------------------------------------------------
// Rate along the flow.
// ---------------------------------------------------------------------------

struct SemigroupRateEstimate {
  double lambda = 0.0;  // estimate of lim k(x, φ_t x)/t, clamped to [0, Fekete inf]
  std::pair<double, double> bracket{0.0, 0.0};  // (last ratio − tol, Fekete inf)
  std::vector<double> t_grid;  // geometric grid t0·2^j
  std::vector<double> ratios;  // k(x, φ_t x)/t per grid point
  LimitStatus status = LimitStatus::not_converged;
  bool increments_decaying = false;  // level increments still shrinking ⇒ rate 0
};

struct SemigroupRateOptions {
  double t_max = 1024.0;
  int levels = 13;     // grid t_max·2^{−(levels−1)} … t_max
  double tol = 1e-8;
};

SemigroupRateEstimate semigroup_rate(const Semigroup& phi, const CVector& x,
                                     const SemigroupRateOptions& opts = {});
SemigroupRateEstimate semigroup_rate(const Semigroup& phi, const CVector& x,
                                     double t_max, double tol);

// ---------------------------------------------------------------------------
// Rate linearity  c(φ_t) = t·c(φ_1).
// ---------------------------------------------------------------------------

struct LinearityReport {
  std::vector<double> t_grid;
  std::vector<double> rates;  // independent divergence-rate estimate per t
  double c1 = 0.0;            // rate of the time-1 map
  double slope = 0.0;         // least-squares slope of rates vs t (through 0)
  double max_deviation = 0.0; // max |rate(t) − c1·t|
  bool pass = false;
};

struct LinearityOptions {
  long max_m = 2000;
  double tol = 1e-8;
  double pass_tol = 1e-5;
};

LinearityReport rate_linearity_check(const Semigroup& phi,
                                     const std::vector<double>& t_grid,
                                     const LinearityOptions& opts = {});

// ---------------------------------------------------------------------------
// Classification with cross-time consistency.
// ---------------------------------------------------------------------------

struct TimeConsistency {
  double t = 0.0;
  double dilation = 0.0;           // measured dilation of φ_t
  double expected_dilation = 0.0;  // e^{−λt}
  double dw_gap = 0.0;             // distance between boundary targets
};

struct SemigroupClassification {
  std::optional<MapClass> map_class;  // class of the time-1 map
  DenjoyWolffData dw1;                // full data of the time-1 map
  double lambda = 0.0;                // flow rate
  std::vector<TimeConsistency> checks;
  bool consistent = false;
  bool inconclusive = false;
};

struct SemigroupClassifyOptions {
  std::vector<double> t_samples{0.5, 2.0};
  double dilation_tol = 1e-5;
  double dw_point_tol = 2e-3;  // orbit-estimated directions converge O(1/m)
  DenjoyWolffOptions dw{};
};

SemigroupClassification classify_semigroup(const Semigroup& phi,
                                           const SemigroupClassifyOptions& opts = {});

}  // namespace kobdyn
