#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kobdyn {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;

/// Coordinate system a point or map lives in: the unit ball B^q, or the
/// unbounded Siegel half-space H^q = { (z1,w) : Im z1 > |w|^2 }.
enum class Domain { ball, siegel };

/// Hermitian product <u,v> = sum_i u_i * conj(v_i)  (linear in the first slot).
/// Eigen's dot conjugates its object, so v.dot(u) realizes exactly this.
inline Complex hermitian_inner(const CVector& u, const CVector& v) {
  return v.dot(u);
}

// ---------------------------------------------------------------------------
// Error conditions.  Estimator non-convergence is reported through result
// structs (LimitStatus), never through these; exceptions are reserved for
// broken inputs and violated preconditions.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point sits too close to the boundary for the requested computation.
class BoundaryProximity : public Error {
 public:
  using Error::Error;
};

/// A map or orbit left its domain (or produced non-finite coordinates).
class DomainEscape : public Error {
 public:
  using Error::Error;
};

/// A sequence fails its stated convergence precondition.
class NotConvergent : public Error {
 public:
  using Error::Error;
};

/// Evidence is contradictory or insufficient to decide; never silently resolved.
class Inconclusive : public Error {
 public:
  using Error::Error;
};

/// A sequence that must be monotone (up to slack) is not: the underlying
/// distance or map implementation is broken.
class MonotonicityViolation : public Error {
 public:
  using Error::Error;
};

/// A structural constraint on normal-form data fails; carries which one and by
/// how much.
class ConstraintViolated : public Error {
 public:
  ConstraintViolated(const std::string& constraint_name, double violation_margin)
      : Error("constraint violated: " + constraint_name +
              " (margin " + std::to_string(violation_margin) + ")"),
        name(constraint_name),
        margin(violation_margin) {}
  std::string name;
  double margin;
};

/// Two routes that must agree do not.
class ConsistencyFailure : public Error {
 public:
  using Error::Error;
};

/// Rejection sampling could not collect enough points within the attempt budget.
class SamplingStarved : public Error {
 public:
  using Error::Error;
};

/// A stated hypothesis fails; carries the 1-based index of the violated bound.
class HypothesisFailed : public Error {
 public:
  HypothesisFailed(int index, const std::string& what_failed)
      : Error("hypothesis " + std::to_string(index) + " failed: " + what_failed),
        bound_index(index) {}
  int bound_index;
};

/// Degenerate-offset parabolic normal form with a nonzero mixing vector c:
/// structurally impossible, so the data are inconsistent.
class NonzeroCInCaseTwo : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Limit declarations.
// ---------------------------------------------------------------------------

enum class LimitStatus { converged, not_converged };

/// Tail-window flatness options used by every sequential limit in the library.
struct TailOptions {
  int window = 20;     // number of trailing terms inspected
  double tol = 1e-8;   // max spread allowed over the window
};

/// True when the last `opts.window` values of `v` exist and spread < opts.tol.
bool tail_is_flat(const std::vector<double>& v, const TailOptions& opts);

/// Spread (max-min) of the last `window` values; +inf when fewer values exist.
double tail_spread(const std::vector<double>& v, int window);

// ---------------------------------------------------------------------------
// Deterministic sampling.  All randomized checks draw from this; identical
// seeds give identical samples on every platform we target.
// ---------------------------------------------------------------------------

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b);
  double gauss();
  Complex complex_gauss();

  /// Uniform point of the real 2q-ball of radius `max_norm`, read as q complex
  /// coordinates: an interior point of B^q.
  CVector ball_point(int q, double max_norm = 0.9);

  /// Unit vector in C^q.
  CVector unit_vector(int q);

  /// Interior point of H^q with height (Im z1 - |w|^2) in [0.2, spread].
  CVector siegel_point(int q, double spread = 2.0);

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace kobdyn
