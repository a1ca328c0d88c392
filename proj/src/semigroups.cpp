#include "kobdyn/semigroups.hpp"

#include <algorithm>
#include <cmath>

#include "kobdyn/ball_geometry.hpp"
#include "kobdyn/invariants.hpp"

namespace kobdyn {

struct Semigroup::Impl {
  Kind kind = Kind::closure;
  Domain dom = Domain::siegel;
  int dim = 1;
  std::string label;

  // affine flow data
  double lambda = 0.0;
  RVector mu;
  Complex drift{0.0, 0.0};

  // closure
  FlowFn eval;
};

namespace {

double lambda_ramp(double lambda, double t) {
  return lambda == 0.0 ? t : std::expm1(lambda * t) / lambda;
}

CVector flow_eval(const Semigroup::Impl& im, double t, const CVector& z) {
  if (im.kind == Semigroup::Kind::closure) return im.eval(t, z);
  CVector out(im.dim);
  out[0] = std::exp(im.lambda * t) * z[0] + im.drift * lambda_ramp(im.lambda, t);
  for (int j = 1; j < im.dim; ++j) out[j] = std::exp(im.mu[j - 1] * t) * z[j];
  return out;
}

// Construction-time checks: φ_0 = id and the semigroup law on seeded triples.
void validate_flow(const Semigroup::Impl& im) {
  Sampler s(0xf10f10);
  for (int i = 0; i < 16; ++i) {
    const CVector z = (im.dom == Domain::ball) ? s.ball_point(im.dim, 0.9)
                                               : s.siegel_point(im.dim, 2.0);
    const double id_defect = (flow_eval(im, 0.0, z) - z).norm();
    if (id_defect > 1e-12) {
      throw ConstraintViolated("flow at t=0 must be the identity", id_defect);
    }
    const double t = s.uniform(0.05, 2.0);
    const double u = s.uniform(0.05, 2.0);
    const CVector lhs = flow_eval(im, t + u, z);
    const CVector rhs = flow_eval(im, t, flow_eval(im, u, z));
    const double law_defect = (lhs - rhs).norm() / std::max(1.0, lhs.norm());
    if (law_defect > 1e-10) {
      throw ConstraintViolated("semigroup law phi_{t+s} = phi_t o phi_s", law_defect);
    }
    const CVector img = flow_eval(im, t, z);
    if (!img.allFinite() || interior_margin(im.dom, img) <
                                -1e-12 * std::max(1.0, std::abs(img[0].imag()))) {
      throw DomainEscape("flow leaves its domain at a sampled (t, z)");
    }
  }
}

}  // namespace

Semigroup Semigroup::affine_siegel(double lambda, const RVector& mu, Complex drift) {
  auto im = std::make_shared<Impl>();
  im->kind = Kind::affine_siegel_flow;
  im->dom = Domain::siegel;
  im->dim = static_cast<int>(mu.size()) + 1;
  im->label = "affine_siegel_flow";
  im->lambda = lambda;
  im->mu = mu;
  im->drift = drift;
  if (drift.imag() < -1e-12) {
    throw ConstraintViolated("flow drift needs Im b >= 0", drift.imag());
  }
  for (int j = 0; j < mu.size(); ++j) {
    if (2.0 * mu[j] > lambda + 1e-12) {
      throw ConstraintViolated("flow exponents need lambda >= 2*mu_j",
                               lambda - 2.0 * mu[j]);
    }
  }
  validate_flow(*im);
  return Semigroup(std::move(im));
}

Semigroup Semigroup::closure(Domain d, int dim, FlowFn eval, std::string label) {
  auto im = std::make_shared<Impl>();
  im->kind = Kind::closure;
  im->dom = d;
  im->dim = dim;
  im->label = std::move(label);
  im->eval = std::move(eval);
  validate_flow(*im);
  return Semigroup(std::move(im));
}

CVector Semigroup::operator()(double t, const CVector& z) const {
  if (!valid()) throw Error("Semigroup: empty flow");
  if (t < 0.0) throw Error("Semigroup: t must be nonnegative");
  if (z.size() != impl_->dim) throw Error("Semigroup: input dimension mismatch");
  return flow_eval(*impl_, t, z);
}

SelfMap Semigroup::time_map(double t) const {
  if (!valid()) throw Error("Semigroup: empty flow");
  if (t <= 0.0) throw Error("Semigroup: time slice needs t > 0");
  if (impl_->kind == Kind::affine_siegel_flow) {
    const int q = impl_->dim;
    CMatrix L = CMatrix::Zero(q, q);
    CVector off = CVector::Zero(q);
    L(0, 0) = std::exp(impl_->lambda * t);
    off[0] = impl_->drift * lambda_ramp(impl_->lambda, t);
    for (int j = 1; j < q; ++j) L(j, j) = std::exp(impl_->mu[j - 1] * t);
    SelfMap m = SelfMap::siegel_affine(L, off);
    if (impl_->lambda >= 0.0) {
      m = m.with_analytic_dilation(std::exp(-impl_->lambda * t));
    }
    return m;
  }
  auto impl = impl_;
  return SelfMap::closure(
      impl_->dom, impl_->dim,
      [impl, t](const CVector& z) { return flow_eval(*impl, t, z); }, nullptr,
      /*univalent=*/true, impl_->label + "@t=" + std::to_string(t));
}

Domain Semigroup::domain() const { return impl_->dom; }
int Semigroup::dim() const { return impl_->dim; }
Semigroup::Kind Semigroup::kind() const { return impl_->kind; }
const std::string& Semigroup::label() const { return impl_->label; }

std::optional<double> Semigroup::flow_rate() const {
  if (impl_->kind == Kind::affine_siegel_flow) return impl_->lambda;
  return std::nullopt;
}

double semigroup_law_residual(const Semigroup& phi, int triples, std::uint64_t seed) {
  Sampler s(seed);
  double worst = 0.0;
  for (int i = 0; i < triples; ++i) {
    const CVector z = (phi.domain() == Domain::ball) ? s.ball_point(phi.dim(), 0.9)
                                                     : s.siegel_point(phi.dim(), 2.0);
    const double t = s.uniform(0.05, 2.0);
    const double u = s.uniform(0.05, 2.0);
    const CVector lhs = phi(t + u, z);
    const CVector rhs = phi(t, phi(u, z));
    worst = std::max(worst, (lhs - rhs).norm() / std::max(1.0, lhs.norm()));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Rate.
// ---------------------------------------------------------------------------

SemigroupRateEstimate semigroup_rate(const Semigroup& phi, const CVector& x,
                                     const SemigroupRateOptions& opts) {
  if (opts.levels < 3) throw Error("semigroup_rate: need at least 3 grid levels");
  SemigroupRateEstimate out;
  const Domain d = phi.domain();
  std::vector<double> values;  // k(x, φ_t x) per level
  for (int j = opts.levels - 1; j >= 0; --j) {
    const double t = opts.t_max * std::ldexp(1.0, -j);
    const CVector img = phi(t, x);
    // Expanding flows outgrow the representable range long before parabolic
    // ones need their large times: keep the levels reached and stop there.
    if (!img.allFinite() || img.cwiseAbs().maxCoeff() > 1e120) break;
    out.t_grid.push_back(t);
    values.push_back(kobayashi_distance(d, x, img));
    out.ratios.push_back(values.back() / t);
  }
  if (values.size() < 3) {
    throw NotConvergent("semigroup_rate: flow overflows even at the smallest grid times");
  }
  double fekete_inf = out.ratios[0];
  for (double r : out.ratios) fekete_inf = std::min(fekete_inf, r);

  // Level increments (a(2t) − a(t)) / t converge to the rate.
  const int n = static_cast<int>(values.size());
  std::vector<double> level_estimates;
  for (int j = 1; j < n; ++j) {
    level_estimates.push_back((values[j] - values[j - 1]) / out.t_grid[j - 1]);
  }
  const double last = level_estimates.back();
  const double prev = level_estimates[level_estimates.size() - 2];
  out.lambda = std::clamp(last, 0.0, fekete_inf);
  out.bracket = {out.ratios.back() - opts.tol, fekete_inf};
  out.status = std::abs(last - prev) <= std::max(opts.tol, 0.05 * std::abs(last))
                   ? LimitStatus::converged
                   : LimitStatus::not_converged;
  if (std::abs(prev) > 10.0 * opts.tol) {
    out.increments_decaying = std::abs(last) < 0.75 * std::abs(prev);
  }
  return out;
}

SemigroupRateEstimate semigroup_rate(const Semigroup& phi, const CVector& x,
                                     double t_max, double tol) {
  SemigroupRateOptions opts;
  opts.t_max = t_max;
  opts.tol = tol;
  return semigroup_rate(phi, x, opts);
}

// ---------------------------------------------------------------------------
// Linearity of the rate in t.
// ---------------------------------------------------------------------------

LinearityReport rate_linearity_check(const Semigroup& phi,
                                     const std::vector<double>& t_grid,
                                     const LinearityOptions& opts) {
  LinearityReport rep;
  rep.t_grid = t_grid;
  const CVector base = default_base(phi.domain(), phi.dim());
  DivergenceOptions dopts;
  dopts.max_m = opts.max_m;
  dopts.tol = opts.tol;
  rep.c1 = divergence_rate(phi.time_map(1.0), base, dopts).c;
  double st2 = 0.0, str = 0.0;
  for (double t : t_grid) {
    const double rate = divergence_rate(phi.time_map(t), base, dopts).c;
    rep.rates.push_back(rate);
    st2 += t * t;
    str += t * rate;
    rep.max_deviation = std::max(rep.max_deviation, std::abs(rate - rep.c1 * t));
  }
  rep.slope = st2 > 0.0 ? str / st2 : 0.0;
  rep.pass = rep.max_deviation <= opts.pass_tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Classification.
// ---------------------------------------------------------------------------

SemigroupClassification classify_semigroup(const Semigroup& phi,
                                           const SemigroupClassifyOptions& opts) {
  SemigroupClassification out;
  const SelfMap f1 = phi.time_map(1.0);
  out.dw1 = denjoy_wolff(f1, opts.dw);
  out.map_class = out.dw1.map_class;
  out.inconclusive = out.dw1.inconclusive;
  out.lambda = out.dw1.dilation ? -std::log(*out.dw1.dilation) : 0.0;

  out.consistent = true;
  if (out.map_class == MapClass::elliptic && out.dw1.fixed_point) {
    for (double t : opts.t_samples) {
      TimeConsistency tc;
      tc.t = t;
      tc.dilation = 1.0;
      tc.expected_dilation = 1.0;
      tc.dw_gap = (phi(t, *out.dw1.fixed_point) - *out.dw1.fixed_point).norm();
      if (tc.dw_gap > 1e-8) out.consistent = false;
      out.checks.push_back(tc);
    }
    return out;
  }

  for (double t : opts.t_samples) {
    const DenjoyWolffData dwt = denjoy_wolff(phi.time_map(t), opts.dw);
    TimeConsistency tc;
    tc.t = t;
    tc.dilation = dwt.dilation.value_or(0.0);
    tc.expected_dilation = std::exp(-out.lambda * t);
    if (dwt.boundary_point && out.dw1.boundary_point) {
      tc.dw_gap = (*dwt.boundary_point - *out.dw1.boundary_point).norm();
    } else {
      tc.dw_gap = 1.0;
    }
    if (std::abs(tc.dilation - tc.expected_dilation) > opts.dilation_tol ||
        tc.dw_gap > opts.dw_point_tol) {
      out.consistent = false;
    }
    if (dwt.inconclusive) out.inconclusive = true;
    out.checks.push_back(tc);
  }
  return out;
}

}  // namespace kobdyn
