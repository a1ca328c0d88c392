#pragma once

// Numerical solvers for the two linearizing functional equations of a
// hyperbolic self-map — Θ∘f = Θ/λ_f (half-plane valued) and θ∘f = θ + 1
// (strip valued) — with residual certification over sample sets, plus the
// one-parameter-flow variant Θ∘φ_t = e^{λt}Θ.

#include <functional>
#include <vector>

#include "kobdyn/self_map.hpp"
#include "kobdyn/semigroups.hpp"
#include "kobdyn/types.hpp"

namespace kobdyn {

struct ValironOptions {
  long cap = 10000;    // iteration budget per point
  double tol = 1e-12;  // Cauchy-gap threshold (relative)
};

struct ValironSolution {
  std::function<Complex(const CVector&)> theta;  // H^q → H, throws NotConvergent
  double lambda_f = 0.5;
  double residual_sup = 0.0;  // sup |Θ(f z) − Θ(z)/λ_f| over converged samples
  std::vector<double> convergence_trace;  // final Cauchy gap per sample
  std::vector<CVector> samples;           // half-space sample set used
  int failed_points = 0;                  // samples where the estimator stalled
  bool im_positive_on_samples = false;    // Im Θ > 0 held on every sample
  bool filling_certified = false;         // the covering of H is never certified
};

// Normalized-iterate estimator Θ(z) = lim λ_f^n (f^n z)_1 for a hyperbolic
// map in half-space coordinates (Denjoy-Wolff point at infinity in the first
// coordinate).  λ_f is taken from the map's pinned dilation when present,
// otherwise estimated.  Parabolic or elliptic inputs are rejected.
ValironSolution valiron_solve(const SelfMap& f, std::vector<CVector> sample_set,
                              const ValironOptions& opts = {});
// Convenience: seeded half-space sample set of the given size.
ValironSolution valiron_solve(const SelfMap& f, int samples = 200,
                              std::uint64_t seed = 17,
                              const ValironOptions& opts = {});

struct AbelSolution {
  std::function<Complex(const CVector&)> theta_abel;  // H^q → strip in H
  double residual_sup = 0.0;  // sup |θ(f z) − θ(z) − 1| over the sample set
  bool surjective = false;    // the logarithmic construction never fills H
  double strip_height = 0.0;  // image lies in {0 < Im < π / log(1/λ_f)}
};

// θ = log Θ / log(1/λ_f) with the principal branch (Θ avoids the cut since it
// maps into the upper half-plane).
AbelSolution abel_solve(const SelfMap& f, const ValironSolution& valiron);

struct SemigroupValironReport {
  double lambda = 0.0;    // flow rate, from the time-1 map
  double lambda_f = 0.0;  // e^{−λ}
  std::vector<double> t_grid;
  std::vector<double> residuals;  // sup |Θ(φ_t z) − e^{λt}Θ(z)| per t
  double residual_sup = 0.0;
};

// A single Θ (solved on the time-1 map) checked against the whole flow.
SemigroupValironReport semigroup_valiron(const Semigroup& phi,
                                         const std::vector<double>& t_grid,
                                         int samples = 200, std::uint64_t seed = 17,
                                         const ValironOptions& opts = {});

}  // namespace kobdyn
