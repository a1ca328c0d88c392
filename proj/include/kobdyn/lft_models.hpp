#pragma once

// Affine normal forms of univalent linear-fractional self-maps of the
// half-space H^q (hyperbolic and parabolic families), their constraint
// validation, the associated model domains with membership predicates, and
// the explicit canonical semi-models (projection r, base automorphism τ).

#include <optional>
#include <string>
#include <vector>

#include "kobdyn/ball_geometry.hpp"
#include "kobdyn/self_map.hpp"
#include "kobdyn/types.hpp"

namespace kobdyn {

// ---------------------------------------------------------------------------
// Hyperbolic family  g(z1,u,v) = (λ z1 + b, D u, A v + c).
// ---------------------------------------------------------------------------

struct HyperbolicLFTForm {
  int q = 1;          // ambient dimension
  int p = 1;          // split index, 1 ≤ p ≤ q; u has length p−1, v length q−p
  double lambda = 2.0;  // > 1
  Complex b{0.0, 0.0};  // purely imaginary
  CVector D_diag;       // diagonal of D, |d_i| = √λ
  CMatrix A;            // invertible, Q := λI − A*A positive definite
  CVector c;            // offset of the v-block
};

struct ValidatedHyperbolicForm {
  HyperbolicLFTForm form;
  RVector Q_eigenvalues;          // spectrum of λI − A*A (all > 1e−10)
  double offset_bound = 0.0;      // |c|² + ⟨Q⁻¹A*c, A*c⟩ (≤ Im b)
  bool near_upper_boundary = false;  // Im b within 1e−8 of λ−1
};

// Checks every constraint of the normal form and reports the Q spectrum.
// Throws ConstraintViolated naming the failed item with its margin.
ValidatedHyperbolicForm validate_hyperbolic_form(const HyperbolicLFTForm& raw);

SiegelPoint apply_hyperbolic_form(const ValidatedHyperbolicForm& g,
                                  const SiegelPoint& z);

// The form as an exact affine SelfMap of H^q, tagged with its dilation 1/λ.
SelfMap hyperbolic_to_self_map(const ValidatedHyperbolicForm& g);

// ---------------------------------------------------------------------------
// Parabolic family  g(z1,u,v,w) = (z1 + 2i⟨u,a⟩ + 2i⟨w,c⟩ + b, u+a, Dv, Aw).
// ---------------------------------------------------------------------------

struct ParabolicLFTForm {
  int q = 1;
  int r = 1;          // 1 ≤ r ≤ p ≤ q; u: r−1, v: p−r, w: q−p
  int p = 1;
  CVector a;          // translation of the u-block
  Complex b{0.0, 0.0};
  CVector c;          // coupling of the w-block into z1
  CVector D_diag;     // unimodular diagonal
  CMatrix A;          // invertible, Q := I − AA* positive definite
};

struct ValidatedParabolicForm {
  ParabolicLFTForm form;
  RVector Q_eigenvalues;    // spectrum of I − AA*
  double offset = 0.0;      // Im b − ‖a‖²  (≥ ⟨Q⁻¹c,c⟩, up to 1e−12)
  double coupling = 0.0;    // ⟨Q⁻¹c,c⟩
};

ValidatedParabolicForm validate_parabolic_form(const ParabolicLFTForm& raw);

SiegelPoint apply_parabolic_form(const ValidatedParabolicForm& g,
                                 const SiegelPoint& z);

// Exact affine SelfMap of H^q, tagged with unit dilation.
SelfMap parabolic_to_self_map(const ValidatedParabolicForm& g);

// ---------------------------------------------------------------------------
// Model domains.
// ---------------------------------------------------------------------------

// Ω is either all of C^q or a shifted-paraboloid region
//   { Im z1 > Σ_{j=1}^{head−1} |z_j|² − beta }
// (the coordinates beyond `head` are unconstrained).
struct ModelDomain {
  enum class Shape { whole_space, shifted_paraboloid };
  Shape shape = Shape::whole_space;
  int q = 1;
  int head = 1;      // number of constrained leading coordinates
  double beta = 0.0; // shift; 0 gives the half-space condition on the head block
  std::string description;

  double margin(const CVector& z) const;   // > 0 inside
  bool contains(const CVector& z) const { return margin(z) > 0.0; }
};

ModelDomain hyperbolic_model_domain(const ValidatedHyperbolicForm& g);

struct DomainConsistencyReport {
  int member_samples = 0;
  int nonmember_samples = 0;
  int contradictions = 0;
  int horizon = 200;
  bool pass = false;
};

struct DomainConsistencyOptions {
  int member_samples = 1000;
  int nonmember_samples = 1000;
  int horizon = 200;            // forward-iteration budget of the oracle
  double sample_margin = 0.05;  // distance from the Ω boundary when sampling
  std::uint64_t seed = 11;
};

// Cross-checks the closed-form membership predicate against the defining
// property of Ω: members reach H^q under ≤ horizon forward iterations of g,
// non-members never do.  Throws ConsistencyFailure on any contradiction.
DomainConsistencyReport check_model_domain_consistency(
    const SelfMap& g, const ModelDomain& omega,
    const DomainConsistencyOptions& opts = {});

// ---------------------------------------------------------------------------
// Canonical semi-models.
// ---------------------------------------------------------------------------

enum class TauKind { elliptic, hyperbolic, parabolic, identity, trivial };
const char* to_string(TauKind k);

struct SemiModelReport {
  int base_dimension = 0;              // k: τ acts on H^k
  TauKind tau_kind = TauKind::trivial;
  std::optional<SelfMap> tau;          // automorphism of H^k (absent if trivial)
  ModelDomain omega;                   // model domain in C^q
  int retained_coordinates = 0;        // r = projection onto this many leading coords
  double dichotomy_offset = 0.0;       // parabolic family: Im b − ‖a‖²
  bool boundary_case = false;          // dichotomy decided at the 1e−10 tolerance
};

// Hyperbolic family: r(z1,u,v) = (z1,u), τ(z1,u) = (λz1+b, Du) on H^p.
SemiModelReport canonical_semi_model_hyperbolic(const ValidatedHyperbolicForm& g);

// Parabolic family dichotomy on the sign of Im b − ‖a‖²: positive offset
// gives the trivial model (Ω = C^q); zero offset forces c = 0 (else
// NonzeroCInCaseTwo) and yields the parabolic
// τ(z1,u,v) = (z1 + 2i⟨u,a⟩ + b, u+a, Dv) on H^p.
SemiModelReport parabolic_model_dichotomy(const ValidatedParabolicForm& g);

// sup over seeded H^q samples of ‖head(g(z)) − τ(head(z))‖, the defect of the
// intertwining relation r∘g = τ∘r.  Throws if the model is trivial.
double intertwining_residual(const SelfMap& g, const SemiModelReport& model,
                             int samples = 1000, std::uint64_t seed = 5);

}  // namespace kobdyn
