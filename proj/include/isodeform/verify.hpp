#pragma once

#include "isodeform/curvature.hpp"
#include "isodeform/deform.hpp"

#include <optional>
#include <string>

namespace isodeform {

/// Primitive integer direction Z ∈ Z^k. The codimension-one subtorus K has
/// Lie algebra Z^⊥.
struct SubtorusDirection {
  Eigen::VectorXi Z;

  /// Throws std::invalid_argument if Z = 0 or its entries share a factor.
  static SubtorusDirection make(const Eigen::VectorXi& Z);
  Vec real() const { return Z.cast<double>(); }
  /// Orthonormal basis of Z^⊥ (k × (k−1)).
  Mat subtorus_basis() const;
  std::string label() const;  // "(1,-1)"
};

/// Primitive vectors with max-norm ≤ bound, one per ± pair, first nonzero entry positive.
std::vector<SubtorusDirection> default_directions(int k, int bound = 2);

/// Negative-control map j + ε‖j‖_F E / ‖E‖_F with E = random_jmap(m, k, seed).
JMap perturb_jmap(const JMap& j, double eps, std::uint64_t seed);

struct BracketCheck {
  Mat A;                             // canonical conjugator taking j(Z) to j2(Z)
  double residual = 0.0;             // max |⟨B2(Ax, Ay) − B(x, y), Z⟩| / (|x||y|‖j(Z)‖)
  double conjugation_residual = 0.0; // ‖A j(Z) Aᵀ − j2(Z)‖_F / ‖j(Z)‖_F
};

/// The conjugator is built from skew canonical forms without a spectrum
/// check, so a non-isospectral pair yields a large residual rather than an
/// exception.
BracketCheck check_bracket_identity(const JMap& j, const JMap& j2, const SubtorusDirection& Z, int samples, std::uint64_t seed);

/// τ(x, u) = (A x, u). Returns max of the equivariance defect
/// |τ(z̄·p) − z̄·τ(p)| and the norm defect ||τ(p)| − |p||.
double tau_equivariance_residual(const Mat& A, int k, int samples, std::uint64_t seed);
double check_tau_equivariance(const SubtorusDirection& Z, const JMap& j, const JMap& j2, int samples, std::uint64_t seed);

/// max |τ_*(H_K for g_j at p) − H_K for g_j2 at τ(p)| over random principal points.
double check_mean_curvature_intertwining(const JMap& j, const JMap& j2, const SubtorusDirection& Z, int samples,
                                         std::uint64_t seed);

/// K = T: τ_T is the identity and the quotient co-metric dπ G⁻¹ dπᵀ of
/// π(x, u) = (x, |u_1|, ..., |u_k|) does not depend on j. Returns the max
/// entrywise difference between j and j2 at random points.
double check_full_torus_quotient(const JMap& j, const JMap& j2, int samples, std::uint64_t seed);

struct SuiteTolerances {
  double bracket = 1e-10;
  double tau = 1e-12;
  double mean_curvature = 1e-8;
  double quotient = 1e-13;
};

struct SuiteConfig {
  int samples = 100;
  std::uint64_t seed = 0;
  SuiteTolerances tol;
  Exec exec = Exec::parallel;
};

struct DirectionRecord {
  int first = 0;   // family indices of the pair
  int second = 0;
  std::optional<SubtorusDirection> direction;  // empty for the K = T branch
  double conjugator_residual = 0.0;
  double bracket_residual = 0.0;
  double mean_curvature_residual = 0.0;
  double tau_residual = 0.0;
  double quotient_residual = 0.0;  // K = T only
  std::string error;
  bool pass = false;
};

struct HypothesisReport {
  std::vector<DirectionRecord> records;
  SuiteTolerances tol;
  bool pass = true;

  std::vector<std::pair<int, int>> failing_pairs() const;
};

/// Checks every consecutive pair and the endpoint pair for every direction,
/// plus the K = T branch per pair.
HypothesisReport run_hypothesis_suite(const std::vector<JMap>& members, const std::vector<SubtorusDirection>& directions,
                                      const SuiteConfig& config = {});

struct EvidenceConfig {
  int restarts = 50;
  std::uint64_t seed = 0;
  double rho = 1e-3;
  double certify_tol = 1e-8;
  int word_length = 4;
  int grid = 720;  // O(2) grid points per component
};

struct EvidenceRecord {
  int commutant_dim_1 = 0;
  int commutant_dim_2 = 0;
  double equivalence_floor = 0.0;
  int restarts = 0;
  double trace_word_separation = 0.0;  // min over C ∈ O(k) of the relative invariant distance
  double rho = 0.0;
  std::string verdict;
};

EvidenceRecord non_isometry_evidence(const JMap& j, const JMap& j2, const EvidenceConfig& config = {});

/// min over C ∈ O(k) of |w(j) − w(j2∘C)| / |w(j)|, w = trace-word invariants.
/// k = 2 scans a grid of both O(2) components and refines the best angle;
/// other k use Haar-random C.
double trace_word_separation(const JMap& j, const JMap& j2, int word_length, int grid, std::uint64_t seed);

}  // namespace isodeform
