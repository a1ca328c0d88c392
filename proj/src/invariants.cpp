#include "kobdyn/invariants.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace kobdyn {

namespace {

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.begin() + v.size() / 2;
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

// Median of the window ending at index `end` (exclusive).
double median_ending_at(const std::vector<double>& v, std::size_t end, int window) {
  if (v.empty() || end == 0) return 0.0;
  end = std::min(end, v.size());
  const std::size_t w = std::min<std::size_t>(window, end);
  return median_of(std::vector<double>(v.begin() + (end - w), v.begin() + end));
}

void check_point(Domain d, const CVector& z, double coordinate_guard, const char* who) {
  if (!z.allFinite()) throw DomainEscape(std::string(who) + ": non-finite iterate");
  const double scale = (d == Domain::siegel) ? std::max(1.0, std::abs(z[0].imag())) : 1.0;
  if (interior_margin(d, z) < -1e-10 * scale) {
    throw DomainEscape(std::string(who) + ": iterate left the domain");
  }
  if (d == Domain::siegel && z.cwiseAbs().maxCoeff() > coordinate_guard) {
    throw NotConvergent(std::string(who) + ": coordinate guard hit before tail flatness");
  }
  if (d == Domain::ball && one_minus_norm_sq(z) < 1e-14) {
    throw NotConvergent(std::string(who) + ": precision floor hit before tail flatness");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Hyperbolic m-step.
// ---------------------------------------------------------------------------

StepEstimate hyperbolic_step(const SelfMap& f, const CVector& x, int m,
                             const StepOptions& opts) {
  if (m < 1) throw Error("hyperbolic_step: gap must be >= 1");
  const SelfMap g = f.iteration_form();
  const Domain d = g.domain();

  StepEstimate out;
  out.m = m;
  out.window = opts.window;

  std::deque<CVector> ring;  // holds f^n x .. f^{n+m} x
  ring.push_back(transport_point(f.domain(), d, x));
  check_point(d, ring.back(), 1e140, "hyperbolic_step");
  for (int j = 0; j < m; ++j) {
    ring.push_back(g(ring.back()));
    check_point(d, ring.back(), 1e140, "hyperbolic_step");
  }

  for (long n = 0; n <= opts.cap; ++n) {
    const double value = kobayashi_distance(d, ring.front(), ring.back());
    if (!out.values.empty()) {
      const double prev = out.values.back();
      if (value > prev + opts.monotone_slack * std::max(1.0, std::abs(prev))) {
        throw MonotonicityViolation("hyperbolic_step: gap distances increased at n=" +
                                    std::to_string(n));
      }
    }
    out.values.push_back(value);
    if (static_cast<int>(out.values.size()) >= opts.window &&
        tail_spread(out.values, opts.window) <= opts.tol) {
      out.limit = value;
      return out;
    }
    ring.push_back(g(ring.back()));
    check_point(d, ring.back(), 1e140, "hyperbolic_step");
    ring.pop_front();
  }
  throw NotConvergent("hyperbolic_step: tail not flat within tol at the cap");
}

// ---------------------------------------------------------------------------
// Divergence rate.
// ---------------------------------------------------------------------------

DivergenceEstimate divergence_rate(const SelfMap& f, const CVector& x,
                                   const DivergenceOptions& opts) {
  const SelfMap g = f.iteration_form();
  const Domain d = g.domain();
  const CVector x0 = transport_point(f.domain(), d, x);

  const Orbit orbit = compute_orbit(g, x0, static_cast<int>(opts.max_m),
                                    opts.ball_margin_floor, opts.coordinate_guard);
  const int M = static_cast<int>(orbit.points.size()) - 1;
  if (M < 4) throw NotConvergent("divergence_rate: orbit too short for estimation");

  DivergenceEstimate out;
  out.n_used = M;
  out.ratios.reserve(M);
  out.fekete_bounds.reserve(M);
  out.increments.reserve(M);

  double prev_a = 0.0;
  double inf_so_far = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= M; ++m) {
    const double a = kobayashi_distance(d, orbit.points[0], orbit.points[m]);
    out.ratios.push_back(a / m);
    inf_so_far = std::min(inf_so_far, a / m);
    out.fekete_bounds.push_back(inf_so_far);
    out.increments.push_back(a - prev_a);
    prev_a = a;
  }

  // Cross-check sequence: s_m(x)/m approximated at the deepest available
  // tail index n = M−m (the gap distances are nonincreasing in n).
  const int via_cap = std::min(M / 2, 2000);
  out.via_steps.reserve(via_cap);
  for (int m = 1; m <= via_cap; ++m) {
    out.via_steps.push_back(
        kobayashi_distance(d, orbit.points[M - m], orbit.points[M]) / m);
  }

  const double fekete_inf = out.fekete_bounds.back();
  const double med_end = median_ending_at(out.increments, out.increments.size(),
                                          std::min(5, M));
  out.c = std::clamp(med_end, 0.0, fekete_inf);
  out.bracket = {out.ratios.back() - opts.tol, fekete_inf};
  if (out.bracket.second - out.bracket.first > 100.0 * opts.tol) {
    throw NotConvergent("divergence_rate: bracket wider than 100*tol at the cap");
  }

  // Decay test: a tail median well below the mid-orbit median means the
  // increments are still shrinking — the signature of a vanishing rate.
  const double med_half =
      median_ending_at(out.increments, out.increments.size() / 2, std::min(5, M / 2));
  if (med_half > 10.0 * opts.tol) {
    out.increments_decaying = med_end < 0.75 * med_half;
  }

  const int w = std::min(opts.window, M);
  const double spread = tail_spread(out.increments, w);
  out.status = spread <= std::max(opts.tol, 0.05 * std::abs(med_end))
                   ? LimitStatus::converged
                   : LimitStatus::not_converged;
  return out;
}

DivergenceEstimate divergence_rate(const SelfMap& f, const CVector& x,
                                   long max_m, double tol) {
  DivergenceOptions opts;
  opts.max_m = max_m;
  opts.tol = tol;
  return divergence_rate(f, x, opts);
}

// ---------------------------------------------------------------------------
// Model pseudo-distance.
// ---------------------------------------------------------------------------

double model_distance(const SelfMap& f, const CVector& z, const CVector& w,
                      const ModelDistanceOptions& opts) {
  if (!f.univalent()) {
    throw Error("model_distance: map must be declared univalent");
  }
  const SelfMap g = f.iteration_form();
  const Domain d = g.domain();
  CVector p = transport_point(f.domain(), d, z);
  CVector q = transport_point(f.domain(), d, w);

  std::vector<double> vals;
  vals.push_back(kobayashi_distance(d, p, q));
  for (long m = 1; m <= opts.cap; ++m) {
    p = g(p);
    q = g(q);
    check_point(d, p, 1e140, "model_distance");
    check_point(d, q, 1e140, "model_distance");
    const double v = kobayashi_distance(d, p, q);
    if (m == 1 && v < 1e-13 && vals[0] > 1e-6) {
      throw Error("model_distance: sample pair collided after one step "
                  "(map is not injective)");
    }
    if (v > vals.back() + 1e-10 * std::max(1.0, vals.back())) {
      throw MonotonicityViolation("model_distance: pullback distances increased at m=" +
                                  std::to_string(m));
    }
    vals.push_back(v);
    if (v <= opts.tol) return v;  // limit pinched into [0, tol]
    if (static_cast<int>(vals.size()) >= opts.window &&
        tail_spread(vals, opts.window) <= opts.tol) {
      return v;
    }
  }
  throw NotConvergent("model_distance: tail not flat within tol at the cap");
}

// ---------------------------------------------------------------------------
// Canonical dimension.
// ---------------------------------------------------------------------------

LimitMetricReport canonical_dimension(const SelfMap& f, const CVector& base,
                                      const CanonicalDimensionOptions& opts) {
  if (!f.univalent()) {
    throw Error("canonical_dimension: map must be declared univalent");
  }
  const SelfMap g = f.iteration_form();
  const Domain d = g.domain();
  const int q = g.dim();

  CVector p = transport_point(f.domain(), d, base);
  check_point(d, p, 1e140, "canonical_dimension");
  CMatrix J = CMatrix::Identity(q, q);

  LimitMetricReport rep;
  rep.tolerance = opts.eig_tol;
  rep.eigenvalue_trajectories.assign(q, {});

  double top0 = 0.0;
  for (int m = 0;; ++m) {
    const CMatrix G = metric_matrix(d, p);
    CMatrix H = J.adjoint() * G * J;
    const double defect = (H - CMatrix(H.adjoint())).norm() / std::max(1.0, H.norm());
    if (defect > opts.hermitian_tol) {
      throw ConsistencyFailure("canonical_dimension: pullback form lost Hermitian "
                               "symmetry (defect " + std::to_string(defect) + ")");
    }
    H = 0.5 * (H + CMatrix(H.adjoint()));
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    if (es.info() != Eigen::Success) {
      throw Error("canonical_dimension: eigensolver failed");
    }
    if (m == 0) {
      top0 = es.eigenvalues().maxCoeff();
      if (!(top0 > 0.0)) throw Error("canonical_dimension: degenerate metric at base");
    }
    rep.matrices.push_back(H);
    for (int i = 0; i < q; ++i) {
      const double e = es.eigenvalues()[q - 1 - i] / top0;  // descending order
      auto& traj = rep.eigenvalue_trajectories[i];
      if (!traj.empty() &&
          e > traj.back() + opts.monotone_slack * std::max(1.0, traj.back())) {
        throw MonotonicityViolation("canonical_dimension: eigenvalue " +
                                    std::to_string(i) + " increased at m=" +
                                    std::to_string(m));
      }
      traj.push_back(e);
    }

    if (m + 1 >= opts.window) {
      bool all_flat = true;
      for (const auto& traj : rep.eigenvalue_trajectories) {
        if (traj.back() < opts.eig_tol * 0.01) continue;  // decayed to the floor
        if (tail_spread(traj, opts.window) > opts.eig_tol / 10.0) {
          all_flat = false;
          break;
        }
      }
      if (all_flat) break;
    }
    if (m >= opts.cap) {
      throw NotConvergent("canonical_dimension: eigenvalue tails not flat at the cap");
    }

    J = g.jacobian(p) * J;  // J_{m+1} = Jg(f^m b) · J_m
    p = g(p);
    check_point(d, p, 1e140, "canonical_dimension");
  }

  rep.rank = 0;
  for (const auto& traj : rep.eigenvalue_trajectories) {
    if (traj.back() > opts.eig_tol) ++rep.rank;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Step-limit formula at the Denjoy-Wolff point.
// ---------------------------------------------------------------------------

double step_limit_formula(Complex c_phase, double lambda_f) {
  if (!(lambda_f > 0.0 && lambda_f <= 1.0)) {
    throw Error("step_limit_formula: dilation must lie in (0,1]");
  }
  if (std::abs(std::abs(c_phase) - 1.0) > 1e-10) {
    throw Error("step_limit_formula: phase must be unimodular");
  }
  if (lambda_f == 1.0) return 0.0;
  const Complex cbar = std::conj(c_phase);
  const double A = std::abs(cbar * cbar + lambda_f);
  const double num = A + (1.0 - lambda_f);
  const double den = A - (1.0 - lambda_f);
  if (den <= 1e-12 * num) {
    throw Error("step_limit_formula: degenerate phase (c^2 = -1)");
  }
  return std::log(num / den);
}

StepLimitReport step_limit_check(const SelfMap& f, double lambda_f,
                                 Complex c_phase, std::span<const BallPoint> seq,
                                 const TailOptions& tail) {
  if (seq.empty()) throw Error("step_limit_check: empty sequence");
  StepLimitReport rep;
  rep.parabolic = std::abs(lambda_f - 1.0) <= 1e-12;
  rep.formula_value = step_limit_formula(c_phase, lambda_f);

  // One-step displacement along the sequence; boundary-hugging points are
  // handled in half-space coordinates where the distance kernel stays exact.
  const SelfMap g = f.iteration_form();
  for (const BallPoint& zk : seq) {
    double val;
    if (g.domain() == Domain::siegel) {
      const CVector p = cayley_apply(zk.z);
      val = kobayashi_distance(Domain::siegel, p, g(p));
    } else {
      val = kobayashi_distance(Domain::ball, zk.z, g(zk.z));
    }
    rep.trace.push_back(val);
  }
  rep.empirical_value = rep.trace.back();
  rep.difference = std::abs(rep.empirical_value - rep.formula_value);
  const int w = std::min<int>(5, static_cast<int>(rep.trace.size()));
  rep.status = tail_spread(rep.trace, w) <= std::max(tail.tol, 1e-7)
                   ? LimitStatus::converged
                   : LimitStatus::not_converged;
  return rep;
}

// ---------------------------------------------------------------------------
// Lindelof-type hypothesis checker.
// ---------------------------------------------------------------------------

LindelofReport lindelof_hypotheses(const std::function<CVector(const CVector&)>& h,
                                   std::span<const BallPoint> seq,
                                   const BoundaryPoint& a, double C,
                                   const LindelofOptions& opts) {
  if (seq.size() < 2) throw Error("lindelof_hypotheses: need at least two points");
  LindelofReport rep;

  for (std::size_t n = 0; n + 1 < seq.size(); ++n) {
    const double b1 = ball_distance(seq[n].z, seq[n + 1].z);
    rep.bound_consecutive = std::max(rep.bound_consecutive, b1);
    if (b1 > C + opts.slack) {
      throw HypothesisFailed(1, "consecutive-step distance bound exceeded at n=" +
                                    std::to_string(n));
    }
  }
  for (std::size_t n = 0; n < seq.size(); ++n) {
    const Complex s = hermitian_inner(seq[n].z, a.a);
    const double b2 = ball_distance(seq[n].z, s * a.a);
    rep.bound_special = std::max(rep.bound_special, b2);
    if (b2 > C + opts.slack) {
      throw HypothesisFailed(2, "special-distance bound exceeded at n=" +
                                    std::to_string(n));
    }
  }
  rep.hypotheses_hold = true;

  rep.sequence_limit = h(seq.back().z);
  Sampler sampler(opts.seed);
  for (int j = 0; j < opts.koranyi_family; ++j) {
    const Complex phase = std::polar(1.0, sampler.uniform(-1.2, 1.2));
    const auto ks = phase_sequence(a, phase, opts.koranyi_count);
    rep.koranyi_limits.push_back(h(ks.back().z));
    rep.worst_limit_gap = std::max(
        rep.worst_limit_gap, (rep.koranyi_limits.back() - rep.sequence_limit).norm());
  }
  rep.limits_agree = rep.worst_limit_gap <= opts.agreement_tol;
  return rep;
}

LindelofReport lindelof_hypotheses(const SelfMap& h, std::span<const BallPoint> seq,
                                   const BoundaryPoint& a, double C,
                                   const LindelofOptions& opts) {
  if (h.domain() != Domain::ball) {
    throw Error("lindelof_hypotheses: the map must act on ball coordinates");
  }
  return lindelof_hypotheses(
      [&h](const CVector& z) { return h(z); }, seq, a, C, opts);
}

}  // namespace kobdyn
