#include "kobdyn/lft_models.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

namespace kobdyn {

namespace {

void require(bool ok, const std::string& name, double margin) {
  if (!ok) throw ConstraintViolated(name, margin);
}

// Spectrum of a Hermitian matrix, ascending; empty input gives empty output.
RVector hermitian_spectrum(const CMatrix& M) {
  if (M.rows() == 0) return RVector(0);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(M);
  if (es.info() != Eigen::Success) throw Error("eigensolver failed on a constraint matrix");
  return es.eigenvalues();
}

}  // namespace

// ---------------------------------------------------------------------------
// Hyperbolic family.
// ---------------------------------------------------------------------------

ValidatedHyperbolicForm validate_hyperbolic_form(const HyperbolicLFTForm& raw) {
  const int q = raw.q, p = raw.p;
  if (q < 1 || p < 1 || p > q) throw Error("hyperbolic form: need 1 <= p <= q");
  if (raw.D_diag.size() != p - 1) throw Error("hyperbolic form: D must have length p-1");
  if (raw.A.rows() != q - p || raw.A.cols() != q - p) {
    throw Error("hyperbolic form: A must be (q-p)x(q-p)");
  }
  if (raw.c.size() != q - p) throw Error("hyperbolic form: c must have length q-p");

  require(raw.lambda > 1.0 + 1e-12, "lambda > 1", raw.lambda - 1.0);
  require(std::abs(raw.b.real()) <= 1e-12, "b purely imaginary", std::abs(raw.b.real()));

  const double root_lambda = std::sqrt(raw.lambda);
  for (int i = 0; i < raw.D_diag.size(); ++i) {
    const double gap = std::abs(std::abs(raw.D_diag[i]) - root_lambda);
    require(gap <= 1e-10 * root_lambda, "diagonal block magnitude sqrt(lambda)", gap);
  }

  ValidatedHyperbolicForm v;
  v.form = raw;
  const int n = q - p;
  if (n > 0) {
    const CMatrix Q = raw.lambda * CMatrix::Identity(n, n) - raw.A.adjoint() * raw.A;
    v.Q_eigenvalues = hermitian_spectrum(Q);
    require(v.Q_eigenvalues.minCoeff() > 1e-10, "Q = lambda*I - A*A positive definite",
            v.Q_eigenvalues.minCoeff());
    // σ_min(A)² = λ − max eigenvalue of Q.
    const double sigma_min_sq = raw.lambda - v.Q_eigenvalues.maxCoeff();
    require(sigma_min_sq > 1e-12, "A invertible", sigma_min_sq);
    const CVector Ac = raw.A.adjoint() * raw.c;
    const CVector QiAc = Q.ldlt().solve(Ac);
    v.offset_bound = raw.c.squaredNorm() + hermitian_inner(QiAc, Ac).real();
  } else {
    v.Q_eigenvalues = RVector(0);
    v.offset_bound = 0.0;
  }

  const double im_b = raw.b.imag();
  require(v.offset_bound <= im_b + 1e-12, "|c|^2 + <Q^-1 A*c, A*c> <= Im b",
          v.offset_bound - im_b);
  require(im_b < raw.lambda - 1.0, "Im b < lambda - 1", (raw.lambda - 1.0) - im_b);
  v.near_upper_boundary = (raw.lambda - 1.0) - im_b < 1e-8;
  return v;
}

SiegelPoint apply_hyperbolic_form(const ValidatedHyperbolicForm& g,
                                  const SiegelPoint& z) {
  const auto& f = g.form;
  if (z.w.size() != f.q - 1) throw Error("apply_hyperbolic_form: dimension mismatch");
  const Complex z1 = f.lambda * z.z1 + f.b;
  CVector w(f.q - 1);
  for (int j = 0; j < f.p - 1; ++j) w[j] = f.D_diag[j] * z.w[j];
  if (f.q - f.p > 0) w.tail(f.q - f.p) = f.A * z.w.tail(f.q - f.p) + f.c;
  const double scale = std::max(1.0, std::abs(z1.imag()));
  if (z1.imag() - w.squaredNorm() < -1e-12 * scale) {
    throw DomainEscape("apply_hyperbolic_form: image left the half-space");
  }
  return SiegelPoint(z1, std::move(w));
}

SelfMap hyperbolic_to_self_map(const ValidatedHyperbolicForm& g) {
  const auto& f = g.form;
  CMatrix L = CMatrix::Zero(f.q, f.q);
  CVector t = CVector::Zero(f.q);
  L(0, 0) = f.lambda;
  t[0] = f.b;
  for (int j = 0; j < f.p - 1; ++j) L(1 + j, 1 + j) = f.D_diag[j];
  const int n = f.q - f.p;
  if (n > 0) {
    L.bottomRightCorner(n, n) = f.A;
    t.tail(n) = f.c;
  }
  return SelfMap::siegel_affine(L, t).with_analytic_dilation(1.0 / f.lambda);
}

// ---------------------------------------------------------------------------
// Parabolic family.
// ---------------------------------------------------------------------------

ValidatedParabolicForm validate_parabolic_form(const ParabolicLFTForm& raw) {
  const int q = raw.q, r = raw.r, p = raw.p;
  if (q < 1 || r < 1 || r > p || p > q) throw Error("parabolic form: need 1 <= r <= p <= q");
  if (raw.a.size() != r - 1) throw Error("parabolic form: a must have length r-1");
  if (raw.D_diag.size() != p - r) throw Error("parabolic form: D must have length p-r");
  if (raw.A.rows() != q - p || raw.A.cols() != q - p) {
    throw Error("parabolic form: A must be (q-p)x(q-p)");
  }
  if (raw.c.size() != q - p) throw Error("parabolic form: c must have length q-p");

  for (int i = 0; i < raw.D_diag.size(); ++i) {
    const double gap = std::abs(std::abs(raw.D_diag[i]) - 1.0);
    require(gap <= 1e-10, "diagonal block unimodular", gap);
  }

  ValidatedParabolicForm v;
  v.form = raw;
  v.offset = raw.b.imag() - raw.a.squaredNorm();
  const int n = q - p;
  if (n > 0) {
    const CMatrix Q = CMatrix::Identity(n, n) - raw.A * raw.A.adjoint();
    v.Q_eigenvalues = hermitian_spectrum(Q);
    require(v.Q_eigenvalues.minCoeff() > 1e-10, "Q = I - AA* positive definite",
            v.Q_eigenvalues.minCoeff());
    const double sigma_min_sq = 1.0 - v.Q_eigenvalues.maxCoeff();
    require(sigma_min_sq > 1e-12, "A invertible", sigma_min_sq);
    const CVector Qic = Q.ldlt().solve(raw.c);
    v.coupling = hermitian_inner(Qic, raw.c).real();
  } else {
    v.Q_eigenvalues = RVector(0);
    v.coupling = 0.0;
  }

  require(v.offset >= v.coupling - 1e-12, "Im b - |a|^2 >= <Q^-1 c, c>",
          v.offset - v.coupling);
  return v;
}

SiegelPoint apply_parabolic_form(const ValidatedParabolicForm& g,
                                 const SiegelPoint& z) {
  const auto& f = g.form;
  if (z.w.size() != f.q - 1) throw Error("apply_parabolic_form: dimension mismatch");
  const int nu = f.r - 1, nv = f.p - f.r, nw = f.q - f.p;
  const Complex i2(0.0, 2.0);

  CVector w(f.q - 1);
  Complex z1 = z.z1 + f.b;
  if (nu > 0) {
    z1 += i2 * hermitian_inner(z.w.head(nu), f.a);
    w.head(nu) = z.w.head(nu) + f.a;
  }
  if (nw > 0) {
    z1 += i2 * hermitian_inner(z.w.tail(nw), f.c);
    w.tail(nw) = f.A * z.w.tail(nw);
  }
  for (int j = 0; j < nv; ++j) w[nu + j] = f.D_diag[j] * z.w[nu + j];

  const double scale = std::max(1.0, std::abs(z1.imag()));
  if (z1.imag() - w.squaredNorm() < -1e-12 * scale) {
    throw DomainEscape("apply_parabolic_form: image left the half-space");
  }
  return SiegelPoint(z1, std::move(w));
}

SelfMap parabolic_to_self_map(const ValidatedParabolicForm& g) {
  const auto& f = g.form;
  const int nu = f.r - 1, nv = f.p - f.r, nw = f.q - f.p;
  const Complex i2(0.0, 2.0);
  CMatrix L = CMatrix::Identity(f.q, f.q);
  CVector t = CVector::Zero(f.q);
  t[0] = f.b;
  for (int j = 0; j < nu; ++j) {
    L(0, 1 + j) = i2 * std::conj(f.a[j]);
    t[1 + j] = f.a[j];
  }
  for (int j = 0; j < nv; ++j) L(1 + nu + j, 1 + nu + j) = f.D_diag[j];
  if (nw > 0) {
    for (int j = 0; j < nw; ++j) L(0, 1 + nu + nv + j) = i2 * std::conj(f.c[j]);
    L.bottomRightCorner(nw, nw) = f.A;
  }
  return SelfMap::siegel_affine(L, t).with_analytic_dilation(1.0);
}

// ---------------------------------------------------------------------------
// Model domains.
// ---------------------------------------------------------------------------

double ModelDomain::margin(const CVector& z) const {
  if (static_cast<int>(z.size()) != q) throw Error("ModelDomain: dimension mismatch");
  if (shape == Shape::whole_space) return std::numeric_limits<double>::infinity();
  double head_sq = 0.0;
  for (int j = 1; j < head; ++j) head_sq += std::norm(z[j]);
  return z[0].imag() - head_sq + beta;
}

ModelDomain hyperbolic_model_domain(const ValidatedHyperbolicForm& g) {
  ModelDomain om;
  om.shape = ModelDomain::Shape::shifted_paraboloid;
  om.q = g.form.q;
  om.head = g.form.p;
  om.beta = g.form.b.imag() / (g.form.lambda - 1.0);
  std::ostringstream desc;
  desc << "Im z1 > |u|^2 - " << om.beta << "  (u = coordinates 2.." << om.head
       << "; remaining coordinates free)";
  om.description = desc.str();
  return om;
}

DomainConsistencyReport check_model_domain_consistency(
    const SelfMap& g, const ModelDomain& omega, const DomainConsistencyOptions& opts) {
  if (g.domain() != Domain::siegel || g.dim() != omega.q) {
    throw Error("check_model_domain_consistency: map/domain mismatch");
  }
  DomainConsistencyReport rep;
  rep.horizon = opts.horizon;
  Sampler sampler(opts.seed);

  // Forward-iteration oracle for membership in ∪_n g^{-n}(H^q).  Affine maps
  // extend to all of C^q, so evaluating outside the half-space is legitimate.
  auto enters_half_space = [&](CVector z) {
    for (int n = 0; n <= opts.horizon; ++n) {
      const double scale = std::max(1.0, std::abs(z[0].imag()));
      if (interior_margin(Domain::siegel, z) > 1e-12 * scale) return true;
      z = g(z);
      if (!z.allFinite() || z.cwiseAbs().maxCoeff() > 1e140) return false;
    }
    return false;
  };

  auto sample_with_margin = [&](double target_margin) {
    CVector z(omega.q);
    for (int j = 1; j < omega.q; ++j) {
      z[j] = 0.7 * sampler.complex_gauss();
    }
    double head_sq = 0.0;
    for (int j = 1; j < omega.head; ++j) head_sq += std::norm(z[j]);
    z[0] = Complex(sampler.gauss(), head_sq - omega.beta + target_margin);
    return z;
  };

  const bool whole = omega.shape == ModelDomain::Shape::whole_space;
  for (int i = 0; i < opts.member_samples; ++i) {
    CVector z;
    if (whole) {
      z = CVector(omega.q);
      for (int j = 0; j < omega.q; ++j) z[j] = 2.0 * sampler.complex_gauss();
    } else {
      z = sample_with_margin(sampler.uniform(opts.sample_margin, opts.sample_margin + 2.0));
    }
    ++rep.member_samples;
    if (!omega.contains(z) || !enters_half_space(z)) ++rep.contradictions;
  }
  if (!whole) {
    for (int i = 0; i < opts.nonmember_samples; ++i) {
      const CVector z = sample_with_margin(
          -sampler.uniform(opts.sample_margin, opts.sample_margin + 2.0));
      ++rep.nonmember_samples;
      if (omega.contains(z) || enters_half_space(z)) ++rep.contradictions;
    }
  }
  rep.pass = rep.contradictions == 0;
  if (!rep.pass) {
    throw ConsistencyFailure(
        "model domain predicate contradicts the forward-iteration oracle on " +
        std::to_string(rep.contradictions) + " samples");
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Canonical semi-models.
// ---------------------------------------------------------------------------

const char* to_string(TauKind k) {
  switch (k) {
    case TauKind::elliptic: return "elliptic";
    case TauKind::hyperbolic: return "hyperbolic";
    case TauKind::parabolic: return "parabolic";
    case TauKind::identity: return "identity";
    case TauKind::trivial: return "trivial";
  }
  return "?";
}

SemiModelReport canonical_semi_model_hyperbolic(const ValidatedHyperbolicForm& g) {
  const auto& f = g.form;
  SemiModelReport rep;
  rep.base_dimension = f.p;
  rep.retained_coordinates = f.p;
  rep.tau_kind = TauKind::hyperbolic;
  CMatrix L = CMatrix::Zero(f.p, f.p);
  CVector t = CVector::Zero(f.p);
  L(0, 0) = f.lambda;
  t[0] = f.b;
  for (int j = 0; j < f.p - 1; ++j) L(1 + j, 1 + j) = f.D_diag[j];
  rep.tau = SelfMap::siegel_affine(L, t).with_analytic_dilation(1.0 / f.lambda);
  rep.omega = hyperbolic_model_domain(g);
  return rep;
}

SemiModelReport parabolic_model_dichotomy(const ValidatedParabolicForm& g) {
  const auto& f = g.form;
  SemiModelReport rep;
  rep.dichotomy_offset = g.offset;
  rep.boundary_case = g.offset != 0.0 && std::abs(g.offset) <= 1e-9;

  if (g.offset > 1e-10) {  // case (i): every point is eventually absorbed
    rep.tau_kind = TauKind::trivial;
    rep.base_dimension = 0;
    rep.retained_coordinates = 0;
    rep.omega.shape = ModelDomain::Shape::whole_space;
    rep.omega.q = f.q;
    rep.omega.head = 1;
    rep.omega.beta = 0.0;
    rep.omega.description = "C^q (trivial model)";
    return rep;
  }

  // case (ii): zero offset, which forces a vanishing w-coupling.
  if (f.c.size() > 0 && f.c.norm() > 1e-10) {
    throw NonzeroCInCaseTwo("parabolic dichotomy: Im b = |a|^2 but c != 0 "
                            "(the constraint forces c = 0 in this case)");
  }
  const int nu = f.r - 1, nv = f.p - f.r;
  CMatrix L = CMatrix::Identity(f.p, f.p);
  CVector t = CVector::Zero(f.p);
  t[0] = f.b;
  const Complex i2(0.0, 2.0);
  for (int j = 0; j < nu; ++j) {
    L(0, 1 + j) = i2 * std::conj(f.a[j]);
    t[1 + j] = f.a[j];
  }
  for (int j = 0; j < nv; ++j) L(1 + nu + j, 1 + nu + j) = f.D_diag[j];

  const bool is_identity = f.a.size() == 0 && std::abs(f.b) == 0.0 &&
                           (f.D_diag.size() == 0 ||
                            (f.D_diag - CVector::Ones(f.D_diag.size())).norm() == 0.0);
  rep.tau_kind = is_identity ? TauKind::identity : TauKind::parabolic;
  rep.base_dimension = f.p;
  rep.retained_coordinates = f.p;
  rep.tau = SelfMap::siegel_affine(L, t).with_analytic_dilation(1.0);
  rep.omega.shape = ModelDomain::Shape::shifted_paraboloid;
  rep.omega.q = f.q;
  rep.omega.head = f.p;
  rep.omega.beta = 0.0;
  rep.omega.description = "Im z1 > |u|^2 + |v|^2  (coordinates 2.." +
                          std::to_string(f.p) + "; remaining coordinates free)";
  return rep;
}

double intertwining_residual(const SelfMap& g, const SemiModelReport& model,
                             int samples, std::uint64_t seed) {
  if (!model.tau) throw Error("intertwining_residual: trivial model has no base map");
  if (g.domain() != Domain::siegel) {
    throw Error("intertwining_residual: expected a half-space map");
  }
  const int k = model.base_dimension;
  Sampler sampler(seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const CVector z = sampler.siegel_point(g.dim(), 2.0);
    const CVector gz = g(z);
    const CVector lhs = gz.head(k);
    const CVector rhs = (*model.tau)(CVector(z.head(k)));
    worst = std::max(worst, (lhs - rhs).norm());
  }
  return worst;
}

}  // namespace kobdyn
