#pragma once

#include "isodeform/common.hpp"
#include "isodeform/forms.hpp"

#include <functional>
#include <optional>

namespace isodeform {

/// A linear map j: R^k → so(m), j(z) = Σ z_i J_i.
class JMap {
 public:
  JMap(int m, int k, std::vector<Mat> mats, double skew_tol = 1e-14);
  static JMap zero(int m, int k);
  /// Inverse of `params()`.
  static JMap from_params(int m, int k, const Eigen::Ref<const Vec>& params);

  int m() const { return m_; }
  int k() const { return k_; }
  const std::vector<Mat>& mats() const { return mats_; }
  const Mat& mat(int i) const { return mats_[static_cast<std::size_t>(i)]; }

  Mat operator()(const Eigen::Ref<const Vec>& z) const;

  /// Coordinates in W = so(m)^k: the upper triangles of J_1, ..., J_k.
  Vec params() const;
  int param_dim() const { return k_ * m_ * (m_ - 1) / 2; }

  JMap scaled(double c) const;
  /// z ↦ A j(z) Aᵀ.
  JMap conjugated(const Mat& A) const;
  double frobenius_norm() const;

  friend bool operator==(const JMap& a, const JMap& b);

 private:
  int m_;
  int k_;
  std::vector<Mat> mats_;
};

/// i.i.d. standard normal entries, antisymmetrized by (G - Gᵀ)/√2.
JMap random_jmap(int m, int k, std::uint64_t seed);

struct GenericSample {
  JMap j;
  std::uint64_t accepted_seed;
  int attempts;
};

/// Draws random_jmap(m, k, seed), seed+1, ... until the commutant dimension
/// is zero and `extra_condition` (if given) holds. Throws NumericalError
/// after `max_attempts` failures.
GenericSample random_generic_jmap(int m, int k, std::uint64_t seed,
                                  const std::function<bool(const JMap&)>& extra_condition = {},
                                  int max_attempts = 100);

/// The form z ↦ tr(j(z)^{2r}), 1 ≤ r ≤ ⌊m/2⌋.
HomogeneousForm power_trace_form(const JMap& j, int r);

/// All power-trace forms r = 1..⌊m/2⌋.
std::vector<HomogeneousForm> power_trace_forms(const JMap& j);

/// Largest coefficient deviation between two forms of equal shape, relative
/// to the largest coefficient magnitude of either form. Falls back to an
/// absolute deviation when both forms are below `absolute_floor`.
double form_deviation(const HomogeneousForm& a, const HomogeneousForm& b, double absolute_floor = 1e-12);

struct IsospectralReport {
  bool isospectral = false;
  std::vector<double> deviation_per_r;  // index r-1
  double max_deviation = 0.0;
};

IsospectralReport isospectral(const JMap& j, const JMap& j2, double tol = 1e-10);
IsospectralReport isospectral_to_forms(const std::vector<HomogeneousForm>& reference, const JMap& j2,
                                       double tol = 1e-10);

/// Orthogonal A with A j(z) Aᵀ = j2(z), built from the skew canonical forms
/// of both sides. Throws NotIsospectralError if the block values differ by
/// more than `spectrum_tol` relative to the spectral radius.
Mat conjugator_at(const JMap& j, const JMap& j2, const Eigen::Ref<const Vec>& z, double spectrum_tol = 1e-8);

/// Same construction without the spectrum check; the caller measures the
/// resulting residual.
Mat canonical_conjugator(const Mat& from, const Mat& to);

/// Dimension of {X ∈ so(m) : [X, J_i] = 0 for all i}.
int genericity_test(const JMap& j, double tol = 1e-10);

struct EquivalenceWitness {
  Mat A;
  Mat C;
  double residual = 0.0;  // sqrt(Σ_s ‖A j(z_s) Aᵀ − j2(C z_s)‖²_F)
  int restart = 0;        // index of the restart that produced it
};

struct EquivalenceOptions {
  int max_iterations = 300;
  double certify_tol = 1e-8;
  Exec exec = Exec::parallel;
};

/// The fixed sample of 4k unit vectors used by equivalence_search.
Mat equivalence_sample_directions(int k);

/// Residual of a candidate pair (A, C).
double equivalence_residual(const JMap& j, const JMap& j2, const Mat& A, const Mat& C);

/// Multistart Levenberg–Marquardt over O(m) × O(k). Restart 0 starts at
/// (I, I); restart i > 0 starts at Haar-random (A, C) drawn from
/// derive_seed(seed, i). Returns the smallest residual found (lowest restart
/// index on ties).
EquivalenceWitness equivalence_search(const JMap& j, const JMap& j2, int restarts, std::uint64_t seed,
                                      const EquivalenceOptions& options = {});

/// Single local run from a given start; exposed for tests.
EquivalenceWitness equivalence_local_search(const JMap& j, const JMap& j2, Mat A, Mat C,
                                            const EquivalenceOptions& options = {});

/// Traces of all words in J_1..J_k of length 2..max_len; words of equal
/// length in lexicographic order of their letter indices.
std::vector<double> trace_word_invariants(const JMap& j, int max_len);

/// j∘C: J'_i = Σ_l C_{li} J_l.
JMap substitute_basis(const JMap& j, const Mat& C, double orth_tol = 1e-10);

}  // namespace isodeform
