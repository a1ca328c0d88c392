#include "kobdyn/functional_equations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include "kobdyn/ball_geometry.hpp"

namespace kobdyn {

namespace {

// One normalized-iterate limit: Θ(z) = lim λ^n (f^n z)_1.  Returns the value
// and the final relative Cauchy gap; throws NotConvergent when the gap is
// still above tol at the cap.
std::pair<Complex, double> theta_with_gap(const SelfMap& g, double lambda_f,
                                          const CVector& z,
                                          const ValironOptions& opts) {
  CVector cur = z;
  double scale = 1.0;
  Complex prev = cur[0];
  for (long n = 1; n <= opts.cap; ++n) {
    cur = g(cur);
    scale *= lambda_f;
    if (!cur.allFinite() || scale == 0.0) {
      throw NotConvergent("normalized iterates left the representable range");
    }
    const Complex val = scale * cur[0];
    const double gap = std::abs(val - prev) / std::max(1.0, std::abs(prev));
    if (gap <= opts.tol) return {val, gap};
    prev = val;
  }
  throw NotConvergent("normalized iterates still moving at the iteration cap");
}

double resolve_lambda_f(const SelfMap& g) {
  if (g.analytic_dilation()) return *g.analytic_dilation();
  const DenjoyWolffData dw = denjoy_wolff(g);
  if (dw.map_class != MapClass::hyperbolic || !dw.dilation) {
    throw Error("valiron_solve: the map must be hyperbolic (dilation < 1)");
  }
  return *dw.dilation;
}

}  // namespace

ValironSolution valiron_solve(const SelfMap& f, std::vector<CVector> sample_set,
                              const ValironOptions& opts) {
  const SelfMap g = f.iteration_form();
  if (g.domain() != Domain::siegel) {
    throw Error(
        "valiron_solve: needs half-space iteration coordinates "
        "(construct the map on H^q or transport it)");
  }
  const double lambda_f = resolve_lambda_f(g);
  if (!(lambda_f > 0.0) || lambda_f >= 1.0 - 1e-12) {
    throw Error("valiron_solve: dilation must lie in (0, 1); got " +
                std::to_string(lambda_f));
  }

  ValironSolution out;
  out.lambda_f = lambda_f;
  out.samples = std::move(sample_set);
  auto shared_opts = std::make_shared<const ValironOptions>(opts);
  out.theta = [g, lambda_f, shared_opts](const CVector& z) {
    return theta_with_gap(g, lambda_f, z, *shared_opts).first;
  };

  std::vector<Complex> values(out.samples.size());
  std::vector<bool> ok(out.samples.size(), false);
  out.im_positive_on_samples = true;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    try {
      auto [val, gap] = theta_with_gap(g, lambda_f, out.samples[i], opts);
      values[i] = val;
      ok[i] = true;
      out.convergence_trace.push_back(gap);
      if (!(val.imag() > 0.0)) out.im_positive_on_samples = false;
    } catch (const NotConvergent&) {
      ++out.failed_points;
      out.convergence_trace.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  if (out.failed_points == static_cast<int>(out.samples.size()) &&
      !out.samples.empty()) {
    throw NotConvergent("valiron_solve: estimator stalled on every sample");
  }

  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    if (!ok[i]) continue;
    try {
      auto [fval, gap] = theta_with_gap(g, lambda_f, g(out.samples[i]), opts);
      (void)gap;
      out.residual_sup =
          std::max(out.residual_sup, std::abs(fval - values[i] / lambda_f));
    } catch (const NotConvergent&) {
      ++out.failed_points;
    }
  }
  return out;
}

ValironSolution valiron_solve(const SelfMap& f, int samples, std::uint64_t seed,
                              const ValironOptions& opts) {
  const SelfMap g = f.iteration_form();
  Sampler s(seed);
  std::vector<CVector> set;
  set.reserve(samples);
  for (int i = 0; i < samples; ++i) set.push_back(s.siegel_point(g.dim(), 2.0));
  return valiron_solve(f, std::move(set), opts);
}

AbelSolution abel_solve(const SelfMap& f, const ValironSolution& valiron) {
  const SelfMap g = f.iteration_form();
  const double log_inv = std::log(1.0 / valiron.lambda_f);
  if (!(log_inv > 0.0)) {
    throw Error("abel_solve: needs a strictly contracting dilation");
  }
  AbelSolution out;
  out.strip_height = std::numbers::pi / log_inv;
  auto theta = valiron.theta;
  out.theta_abel = [theta, log_inv](const CVector& z) {
    // Θ maps into the upper half-plane, so the principal log never meets the
    // cut and Im(log Θ) ∈ (0, π) lands the quotient in the declared strip.
    return std::log(theta(z)) / log_inv;
  };
  for (const CVector& z : valiron.samples) {
    try {
      const Complex a = out.theta_abel(z);
      const Complex b = out.theta_abel(g(z));
      out.residual_sup = std::max(out.residual_sup, std::abs(b - a - 1.0));
    } catch (const NotConvergent&) {
      // the Valiron pass already counted stalled samples
    }
  }
  return out;
}

SemigroupValironReport semigroup_valiron(const Semigroup& phi,
                                         const std::vector<double>& t_grid,
                                         int samples, std::uint64_t seed,
                                         const ValironOptions& opts) {
  if (phi.domain() != Domain::siegel) {
    throw Error("semigroup_valiron: the flow must live on the half-space");
  }
  SemigroupValironReport rep;
  const SelfMap f1 = phi.time_map(1.0);
  const ValironSolution sol = valiron_solve(f1, samples, seed, opts);
  rep.lambda_f = sol.lambda_f;
  rep.lambda = -std::log(sol.lambda_f);
  rep.t_grid = t_grid;
  for (double t : t_grid) {
    double worst = 0.0;
    for (const CVector& z : sol.samples) {
      try {
        const Complex base = sol.theta(z);
        const Complex moved = sol.theta(phi(t, z));
        worst = std::max(worst,
                         std::abs(moved - std::exp(rep.lambda * t) * base));
      } catch (const NotConvergent&) {
      }
    }
    rep.residuals.push_back(worst);
    rep.residual_sup = std::max(rep.residual_sup, worst);
  }
  return rep;
}

}  // namespace kobdyn
