#include "kobdyn/verify.hpp"

#include <algorithm>
#include <cmath>

#include "kobdyn/functional_equations.hpp"
#include "kobdyn/invariants.hpp"
#include "kobdyn/lft_models.hpp"
#include "kobdyn/semigroups.hpp"

namespace kobdyn {

namespace {

void push(SuiteReport& rep, std::string name, double worst, double bound,
          std::string detail = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.worst = worst;
  r.bound = bound;
  r.pass = worst <= bound;
  r.detail = std::move(detail);
  rep.checks.push_back(std::move(r));
}

CMatrix seeded_unitary(int q, Sampler& s) {
  CMatrix raw(q, q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) raw(i, j) = s.complex_gauss();
  Eigen::HouseholderQR<CMatrix> qr(raw);
  CMatrix Q = qr.householderQ();
  return Q;
}

// ---------------------------------------------------------------------------

SuiteReport suite_convexity(const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "convexity";
  Sampler s(cfg.seed);
  const std::vector<double> t_grid = {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0};

  double worst1 = 0.0, worst2 = 0.0;
  for (int i = 0; i < cfg.samples; ++i) {
    const int q = 2 + (i % 2);
    const CVector x = s.ball_point(q), y = s.ball_point(q);
    const CVector z = s.ball_point(q), w = s.ball_point(q);
    const double kxz = ball_distance(x, z), kyw = ball_distance(y, w);
    const double kxy = ball_distance(x, y);
    for (double t : t_grid) {
      const CVector a = t * x + (1.0 - t) * y;
      const CVector b = t * z + (1.0 - t) * w;
      worst1 = std::max(worst1, ball_distance(a, b) - std::max(kxz, kyw));
      const double u = s.uniform(0.0, 1.0);
      const CVector c = u * x + (1.0 - u) * y;
      worst2 = std::max(worst2, ball_distance(a, c) - kxy);
    }
  }
  push(rep, "segment-pair-distance", worst1, 1e-10,
       "k(tx+(1-t)y, tz+(1-t)w) <= max(k(x,z), k(y,w))");
  push(rep, "segment-internal-distance", worst2, 1e-10,
       "k of two points of [x,y] <= k(x,y)");

  double worst_iso = 0.0;
  for (int i = 0; i < std::max(1, cfg.samples / 10); ++i) {
    const int q = 2 + (i % 2);
    const SelfMap phi =
        SelfMap::ball_automorphism(s.ball_point(q, 0.8), seeded_unitary(q, s));
    const CVector x = s.ball_point(q), y = s.ball_point(q);
    worst_iso = std::max(
        worst_iso,
        std::abs(ball_distance(phi(x), phi(y)) - ball_distance(x, y)));
  }
  push(rep, "automorphism-isometry", worst_iso, 1e-10);

  double worst_rt = 0.0, worst_ci = 0.0;
  for (int i = 0; i < std::max(1, cfg.samples / 10); ++i) {
    const int q = 2 + (i % 2);
    const CVector z = s.ball_point(q, 0.95);
    const CVector p = s.siegel_point(q, 2.0);
    worst_rt = std::max(worst_rt,
                        (cayley_inverse_apply(cayley_apply(z)) - z).norm());
    worst_rt = std::max(worst_rt,
                        (cayley_apply(cayley_inverse_apply(p)) - p).norm());
    const CVector w = s.ball_point(q, 0.95);
    worst_ci = std::max(worst_ci,
                        std::abs(siegel_distance(cayley_apply(z), cayley_apply(w)) -
                                 ball_distance(z, w)));
  }
  push(rep, "cayley-round-trip", worst_rt, 1e-12);
  push(rep, "cayley-isometry", worst_ci, 1e-10);
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport suite_julia(const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "julia";
  struct Item {
    const char* name;
    SelfMap map;
  };
  CVector rot(1);
  rot[0] = std::sqrt(2.0) * std::polar(1.0, 0.7);
  HyperbolicLFTForm twist;
  twist.lambda = 2.0;
  twist.b = Complex(0.0, 0.25);
  twist.D_diag = rot;
  twist.A.resize(0, 0);
  twist.c.resize(0);
  twist.p = 2;
  twist.q = 2;
  const std::vector<Item> items = {
      {"dilation-2", siegel_dilation_map(2.0, 2)},
      {"dilation-rotation", hyperbolic_to_self_map(validate_hyperbolic_form(twist))},
      {"translation", siegel_translation_map(Complex(1.0, 0.0), 2)},
  };
  JuliaOptions jopts;
  jopts.samples = cfg.samples;
  jopts.seed = cfg.seed;
  for (const auto& item : items) {
    const DenjoyWolffData dw = denjoy_wolff(item.map);
    const JuliaReport jr = julia_check(item.map, dw, jopts);
    double worst = -1.0;
    int violations = 0;
    for (const auto& row : jr.rows) {
      worst = std::max(worst, row.worst_margin);
      violations += row.violations;
    }
    push(rep, std::string("horosphere-contraction-") + item.name, worst,
         jopts.margin_tol,
         "violations=" + std::to_string(violations) +
             " dilation=" + std::to_string(jr.dilation_used));
  }
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport suite_fekete(const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "fekete";
  Sampler s(cfg.seed);

  // Subadditivity of a_m = k(x, f^m x) on sampled index pairs.
  double worst_sub = 0.0;
  for (const double lambda : {2.0, 1.0}) {
    const SelfMap f = lambda > 1.0 ? siegel_dilation_map(lambda, 2)
                                   : siegel_translation_map(Complex(1.0, 0.0), 2);
    const CVector x = default_base(Domain::siegel, 2);
    const Orbit orbit = compute_orbit(f, x, 80);
    std::vector<double> a{0.0};
    for (std::size_t m = 1; m < orbit.points.size(); ++m) {
      a.push_back(kobayashi_distance(Domain::siegel, x, orbit.points[m]));
    }
    for (int trial = 0; trial < 200; ++trial) {
      const int m = static_cast<int>(s.uniform(1.0, 40.0));
      const int n = static_cast<int>(s.uniform(1.0, 40.0));
      if (m + n >= static_cast<int>(a.size())) continue;
      worst_sub = std::max(worst_sub, a[m + n] - a[m] - a[n]);
    }
  }
  push(rep, "orbit-distance-subadditive", worst_sub, 1e-8);

  // Rate vs the closed-form value −log(dilation); the running-inf certificate
  // must stay above the point estimate (the lower bracket end is a heuristic
  // finite-m readout, not a bound, so it is not asserted against).
  double worst_rate = 0.0, worst_bracket = 0.0;
  for (const double lambda : {1.5, 2.0, 4.0}) {
    const SelfMap f = siegel_dilation_map(lambda, 2);
    const DivergenceEstimate est =
        divergence_rate(f, default_base(Domain::siegel, 2), 2000, cfg.tol);
    worst_rate = std::max(worst_rate, std::abs(est.c - std::log(lambda)));
    worst_bracket = std::max(worst_bracket, est.c - est.bracket.second);
  }
  push(rep, "rate-equals-log-dilation", worst_rate, 1e-4);
  push(rep, "rate-below-certificate", worst_bracket, 0.0);

  // Power law under composition powers.
  double worst_pow = 0.0;
  for (const double lambda : {1.5, 2.0}) {
    const SelfMap f = siegel_dilation_map(lambda, 2);
    const CVector x = default_base(Domain::siegel, 2);
    const double c1 = divergence_rate(f, x, 2000, cfg.tol).c;
    for (int k : {2, 3}) {
      const double ck = divergence_rate(f.pow(k), x, 1000, cfg.tol).c;
      worst_pow = std::max(worst_pow, std::abs(ck - k * c1));
    }
  }
  push(rep, "rate-power-law", worst_pow, 1e-4);

  // Parabolic orbits have vanishing rate (decay O(log m / m)).
  const SelfMap trans = siegel_translation_map(Complex(1.0, 0.0), 2);
  DivergenceOptions dopts;
  dopts.max_m = 10000;
  dopts.tol = cfg.tol;
  const DivergenceEstimate est =
      divergence_rate(trans, default_base(Domain::siegel, 2), dopts);
  push(rep, "translation-null-rate", est.c, 1e-3,
       est.increments_decaying ? "increments decaying" : "increments flat");
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport suite_steplimit(const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "steplimit";
  CVector e1 = CVector::Zero(2);
  e1[0] = 1.0;
  const BoundaryPoint a(e1);
  const std::vector<BallPoint> radial = radial_sequence(a, 36);

  {
    const SelfMap f = siegel_dilation_map(2.0, 2);
    const StepLimitReport r =
        step_limit_check(f, 0.5, Complex(1.0, 0.0), radial, {20, cfg.tol});
    push(rep, "radial-dilation-formula", std::abs(r.difference), 1e-4,
         "formula=" + std::to_string(r.formula_value));
    push(rep, "radial-dilation-log2",
         std::abs(r.empirical_value - std::log(2.0)), 1e-4);
  }
  {
    const Complex phase = std::polar(1.0, 0.5);
    const std::vector<BallPoint> special = phase_sequence(a, phase, 36);
    const SelfMap f = siegel_dilation_map(2.0, 2);
    const StepLimitReport r =
        step_limit_check(f, 0.5, phase, special, {20, cfg.tol});
    push(rep, "slanted-dilation-formula", std::abs(r.difference), 1e-4);
  }
  {
    const SelfMap f = siegel_translation_map(Complex(1.0, 0.0), 2);
    const StepLimitReport r =
        step_limit_check(f, 1.0, Complex(1.0, 0.0), radial, {20, cfg.tol});
    push(rep, "radial-parabolic-zero", std::abs(r.empirical_value), 1e-4,
         r.parabolic ? "parabolic branch" : "generic branch");
  }
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport suite_conjugation(const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "conjugation";
  Sampler s(cfg.seed);

  const SelfMap g = siegel_dilation_map(2.0, 2).transported(Domain::ball);
  CVector w(2);
  w[0] = Complex(0.25, 0.10);
  w[1] = Complex(-0.05, 0.20);
  const SelfMap phi = SelfMap::ball_automorphism(w, seeded_unitary(2, s));
  const SelfMap h = SelfMap::compose(SelfMap::compose(phi, g), phi.inverse());

  const DenjoyWolffData dw_g = denjoy_wolff(g);
  const DenjoyWolffData dw_h = denjoy_wolff(h);
  const bool class_ok = dw_g.map_class && dw_h.map_class &&
                        *dw_g.map_class == *dw_h.map_class;
  const double dil_gap =
      (dw_g.dilation && dw_h.dilation)
          ? std::abs(*dw_g.dilation - *dw_h.dilation)
          : 1.0;
  push(rep, "class-preserved", class_ok ? 0.0 : 1.0, 0.5,
       class_ok ? "both hyperbolic" : "class mismatch");
  // The conjugate evaluates in ball coordinates, so its orbit truncates at
  // the near-sphere margin floor and the rate estimate is good to ~1e-5.
  push(rep, "dilation-preserved", dil_gap, 2e-5);

  // Rate is independent of the base point.
  const double c_a =
      divergence_rate(h, default_base(Domain::ball, 2), 1500, cfg.tol).c;
  const double c_b = divergence_rate(h, s.ball_point(2, 0.5), 1500, cfg.tol).c;
  push(rep, "rate-base-point-independent", std::abs(c_a - c_b), 1e-6);

  // Semiconjugation h(z) = sqrt(z) carries 4z (on H^1) to 2w, so the rate of
  // the upstairs map dominates: c(4z) >= c(2w), here with gap log 2.
  const SelfMap f4 = siegel_dilation_map(4.0, 1);
  const SelfMap f2 = siegel_dilation_map(2.0, 1);
  const CVector x1 = default_base(Domain::siegel, 1);
  const double c4 = divergence_rate(f4, x1, 1500, cfg.tol).c;
  const double c2 = divergence_rate(f2, x1, 1500, cfg.tol).c;
  push(rep, "semiconjugation-monotone", c2 - c4, 1e-8,
       "c(downstairs) - c(upstairs) <= 0");
  push(rep, "semiconjugation-gap-log2", std::abs((c4 - c2) - std::log(2.0)),
       1e-4);

  // The limit-metric rank is a conjugation invariant.  Conjugate inside the
  // half-space (affine automorphism) so the eigenvalue tails stay clean of
  // near-sphere cancellation.
  CanonicalDimensionOptions copts;
  copts.eig_tol = cfg.eig_tol;
  const SelfMap gs = siegel_dilation_map(2.0, 2);
  CMatrix TL = CMatrix::Identity(2, 2);
  TL(1, 1) = std::polar(1.0, 0.9);
  CVector Tt = CVector::Zero(2);
  Tt[0] = Complex(1.0, 0.0);
  const SelfMap T = SelfMap::siegel_affine(TL, Tt);
  const SelfMap Tinv = SelfMap::siegel_affine(
      CMatrix(TL.inverse()), CVector(-(TL.inverse() * Tt)));
  const SelfMap h2 = SelfMap::compose(SelfMap::compose(T, gs), Tinv);
  const CVector sbase = default_base(Domain::siegel, 2);
  const int rank_g = canonical_dimension(gs, sbase, copts).rank;
  const int rank_h = canonical_dimension(h2, sbase, copts).rank;
  push(rep, "limit-metric-rank-preserved",
       std::abs(static_cast<double>(rank_g - rank_h)), 0.0,
       "rank=" + std::to_string(rank_g));
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport suite_semigroup_linearity(const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "semigroup-linearity";
  RVector mu(1);
  mu[0] = 0.25;
  const Semigroup phi = Semigroup::affine_siegel(1.0, mu, Complex(0.0, 0.0));

  const double law = semigroup_law_residual(phi, 100, cfg.seed);
  push(rep, "law-residual", law, 1e-10);

  LinearityOptions lopts;
  lopts.tol = cfg.tol;
  const LinearityReport lin = rate_linearity_check(phi, {0.5, 1.0, 2.0, 4.0}, lopts);
  push(rep, "rate-linearity", lin.max_deviation, 1e-5,
       "c1=" + std::to_string(lin.c1) + " slope=" + std::to_string(lin.slope));

  const SemigroupClassification cls = classify_semigroup(phi);
  const bool ok = cls.consistent && !cls.inconclusive &&
                  cls.map_class == MapClass::hyperbolic;
  push(rep, "classification-consistent", ok ? 0.0 : 1.0, 0.5,
       "lambda=" + std::to_string(cls.lambda));
  return rep;
}

// ---------------------------------------------------------------------------

SuiteReport suite_lindelof(const RunConfig& cfg) {
  SuiteReport rep;
  rep.suite = "lindelof";
  CVector e1 = CVector::Zero(2);
  e1[0] = 1.0;
  const BoundaryPoint a(e1);
  const std::vector<BallPoint> radial = radial_sequence(a, 36);
  const SelfMap h = siegel_dilation_map(2.0, 2).transported(Domain::ball);

  LindelofOptions lopts;
  lopts.seed = cfg.seed;
  const LindelofReport r = lindelof_hypotheses(h, radial, a, 1.0, lopts);
  push(rep, "hypotheses-hold", r.hypotheses_hold ? 0.0 : 1.0, 0.5,
       "sup consecutive=" + std::to_string(r.bound_consecutive) +
           " sup special=" + std::to_string(r.bound_special));
  push(rep, "approach-limits-agree", r.worst_limit_gap, lopts.agreement_tol,
       r.limits_agree ? "all limits match" : "limit spread too wide");
  return rep;
}

}  // namespace

SelfMap siegel_dilation_map(double lambda, int q) {
  HyperbolicLFTForm f;
  f.q = q;
  f.p = q;
  f.lambda = lambda;
  f.b = Complex(0.0, 0.0);
  f.D_diag = CVector::Constant(q - 1, Complex(std::sqrt(lambda), 0.0));
  f.A.resize(0, 0);
  f.c.resize(0);
  return hyperbolic_to_self_map(validate_hyperbolic_form(f));
}

SelfMap siegel_translation_map(Complex b, int q) {
  ParabolicLFTForm f;
  f.q = q;
  f.r = 1;
  f.p = q;
  f.a.resize(0);
  f.b = b;
  f.c.resize(0);
  f.D_diag = CVector::Constant(q - 1, Complex(1.0, 0.0));
  f.A.resize(0, 0);
  return parabolic_to_self_map(validate_parabolic_form(f));
}

const std::vector<std::string>& verify_suite_names() {
  static const std::vector<std::string> names = {
      "convexity", "julia",        "fekete",  "steplimit",
      "conjugation", "semigroup-linearity", "lindelof"};
  return names;
}

SuiteReport run_verify_suite(const std::string& name, const RunConfig& cfg) {
  SuiteReport rep;
  if (name == "convexity") rep = suite_convexity(cfg);
  else if (name == "julia") rep = suite_julia(cfg);
  else if (name == "fekete") rep = suite_fekete(cfg);
  else if (name == "steplimit") rep = suite_steplimit(cfg);
  else if (name == "conjugation") rep = suite_conjugation(cfg);
  else if (name == "semigroup-linearity") rep = suite_semigroup_linearity(cfg);
  else if (name == "lindelof") rep = suite_lindelof(cfg);
  else throw Error("verify: unknown suite \"" + name + "\"");
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(),
                         [](const CheckResult& c) { return c.pass; });
  return rep;
}

}  // namespace kobdyn
