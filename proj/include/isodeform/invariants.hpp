#pragma once

#include "isodeform/curvature.hpp"

#include <string>

namespace isodeform {

struct IntegralEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 for exact values
  std::int64_t n_samples = 0;
  std::string method;      // "exact" | "monte-carlo" | "low-discrepancy"
  int flagged_points = 0;  // curvature points whose Bianchi residual exceeded 1e-5
};

enum class Sampling { monte_carlo, halton };
std::string to_string(Sampling s);
Sampling sampling_from_string(const std::string& s);

struct SamplingOptions {
  std::int64_t samples = 1 << 16;
  std::uint64_t seed = 0;
  Sampling method = Sampling::monte_carlo;
  int batches = 64;
  Exec exec = Exec::parallel;
};

double unit_ball_volume(int n);
/// Area of the unit sphere S^{n-1} ⊂ R^n.
double unit_sphere_area(int n);

/// Halton point with prime bases 2, 3, 5, ..., randomized by a digital
/// shift: digit l of coordinate d is replaced by (digit + s_{d,l}) mod b_d.
class ShiftedHalton {
 public:
  ShiftedHalton(int dim, std::uint64_t seed);
  Vec point(std::uint64_t index) const;  // coordinates in (0, 1)

 private:
  int dim_;
  std::vector<std::vector<int>> shifts_;
};

/// Sample s of the uniform distribution on S^{n-1} / in B^n under the
/// configured sampling; identical across calls with the same options, so
/// evaluations for different j use common random numbers.
Vec sphere_sample(int n, std::int64_t s, const SamplingOptions& options);
Vec ball_sample(int n, std::int64_t s, const SamplingOptions& options);

/// sqrt(det g_j|TS) in a Euclidean-orthonormal frame of T_X S.
double sphere_density(const AmbientMetric& g, const Eigen::Ref<const Vec>& X);

enum class SphereIntegrand { volume, scalar, a2_experimental };
std::string to_string(SphereIntegrand s);

/// Per-sample integrand values f(X)·density(X); the integral is
/// unit_sphere_area(n) times their mean.
std::vector<double> sphere_integrand_samples(const JMap& j, SphereIntegrand what, const SamplingOptions& options,
                                             int* flagged = nullptr);

/// Mean times `scale`, standard error by batch means.
IntegralEstimate estimate_from_samples(const std::vector<double>& values, double scale, const SamplingOptions& options);

/// Exact Euclidean ball volume; throws InvariantViolation if sqrt(det G)
/// deviates from 1 by more than 1e-12 at any of `check_points` samples.
IntegralEstimate ball_volume(const JMap& j, int check_points = 10000, std::uint64_t seed = 0);

IntegralEstimate sphere_volume(const JMap& j, const SamplingOptions& options);
IntegralEstimate boundary_area(const JMap& j, const SamplingOptions& options);
IntegralEstimate total_scalar_curvature(const JMap& j, const SamplingOptions& options);
/// ∫ (5 scal² − 2|Ric|² + 2|Rm|²) dV; not part of any acceptance check.
IntegralEstimate heat_a2_experimental(const JMap& j, const SamplingOptions& options);

enum class BallIntegrand { one, scalar };
std::string to_string(BallIntegrand b);

/// ∫_B f over the unit ball of R^{m+2k} for T-invariant f, reduced to
/// (x, r_1..r_k) with weight (2π)^k Π r_i. Spot-checks T-invariance of f
/// and throws InvariantViolation on a mismatch above 1e-10.
IntegralEstimate symmetry_reduced_integrate(const JMap& j, BallIntegrand what, const SamplingOptions& options);
/// Plain uniform sampling of the full ball, for cross-checking.
IntegralEstimate full_ball_integrate(const JMap& j, BallIntegrand what, const SamplingOptions& options);

struct PairedComparison {
  std::string invariant;
  IntegralEstimate a;
  IntegralEstimate b;
  double difference = 0.0;  // a − b
  double std_error = 0.0;   // batch-means error of the paired difference, floored at rounding level
  double sigma_multiple = 0.0;
  bool within(double k) const { return std::abs(difference) <= k * std_error; }
};

/// Comparison from per-sample values drawn with common random numbers.
PairedComparison compare_samples(const std::string& invariant, const std::vector<double>& a,
                                 const std::vector<double>& b, double scale, const SamplingOptions& options);

/// Common-random-number comparison of an invariant between two maps.
PairedComparison paired_compare(const JMap& j1, const JMap& j2, SphereIntegrand what, const SamplingOptions& options);

}  // namespace isodeform
