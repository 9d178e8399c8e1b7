#pragma once

#include "isodeform/jmap.hpp"

#include <iosfwd>

namespace isodeform {

// Coordinates on R^{m+2k} are stacked as (x, u) with x ∈ R^m and
// u = (u_1, ..., u_k), u_i ∈ R². The torus T = R^k / Z^k acts by rotating
// u_i through the angle 2π z̄_i; its Lie algebra acts through
// ρ_*(Z) = diag(Z_1 R, ..., Z_k R), R = [[0,-1],[1,0]], so exp ρ_*(Z) is the
// action of z̄ = Z / 2π.

/// (x, y) ↦ B(x, y) ∈ R^k with B(x, y)_i = ⟨J_i x, y⟩.
struct BilinearMapB {
  int m = 0;
  int k = 0;
  std::vector<Mat> components;  // component i as a bilinear form: B_i(x, y) = yᵀ J_i x

  Vec operator()(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y) const;
};

BilinearMapB bmap_from_j(const JMap& j);

Mat rho_star(const Eigen::Ref<const Vec>& Z);
Vec fundamental_field(const Eigen::Ref<const Vec>& Z, const Eigen::Ref<const Vec>& u);

/// ρ(z̄): block rotations by 2π z̄_i.
Mat torus_rotation(const Eigen::Ref<const Vec>& zbar);

/// (x, u) ↦ (x, ρ(z̄) u) on stacked coordinates.
Vec torus_action(const Eigen::Ref<const Vec>& zbar, const Eigen::Ref<const Vec>& point, int m);

/// The metric g_j: the unique metric for which (x, u) ↦ x is a Riemannian
/// submersion onto Euclidean R^m, fibers are Euclidean, and the horizontal
/// space at (x, u) is {(y, A(x,u) y)} with A(x,u) y = ½ ρ_*(B(x, y)) u.
///
/// In block form G = [[I + AᵀA, -Aᵀ], [-A, I]] = Pᵀ P with
/// P = [[I, 0], [-A, I]], hence det G = 1 and G⁻¹ = [[I, Aᵀ], [A, I + AAᵀ]].
class AmbientMetric {
 public:
  explicit AmbientMetric(JMap j);

  const JMap& j() const { return j_; }
  int m() const { return j_.m(); }
  int k() const { return j_.k(); }
  int dim() const { return j_.m() + 2 * j_.k(); }

  /// A(x, u): R^m → R^{2k}, the vertical part of the horizontal lift.
  Mat horizontal_map(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& u) const;

  Mat metric_at(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& u) const;
  Mat metric_at(const Eigen::Ref<const Vec>& point) const;
  Mat inverse_metric_at(const Eigen::Ref<const Vec>& point) const;

 private:
  JMap j_;
};

/// Graph chart of the unit sphere S^{n-1} ⊂ R^n over the coordinate plane
/// orthogonal to `axis`, on the hemisphere where sign·X_axis > 0.
struct SphereChart {
  int dim = 0;   // n, ambient dimension
  int axis = 0;
  int sign = 1;
  double margin = 0.05;  // points with |p|² > 1 - margin² are outside the domain

  bool in_domain(const Eigen::Ref<const Vec>& p) const;
  Vec embed(const Eigen::Ref<const Vec>& p) const;       // R^{n-1} → S^{n-1}
  Mat jacobian(const Eigen::Ref<const Vec>& p) const;    // n × (n-1)
  Vec chart_point(const Eigen::Ref<const Vec>& X) const; // drop the axis coordinate

  /// Chart whose axis is the largest-magnitude coordinate of X.
  static SphereChart best_for(const Eigen::Ref<const Vec>& X, double margin = 0.05);
};

/// Pullback of g_j to a sphere chart. Throws ChartDomainError outside the
/// chart domain.
Mat sphere_metric_at(const AmbientMetric& g, const SphereChart& chart, const Eigen::Ref<const Vec>& p);

/// Radii a = (a_1, ..., a_k) of the T-orbit defining the leaf L(a) = R^m × T·u.
struct LeafSpec {
  Vec a;
  double base_radius() const;  // sqrt(1 - |a|²), NaN if |a| ≥ 1
};

/// Left-invariant metric g_a on G_B = R^m × T^k in coordinates (x, z),
/// z ∈ R^k the Lie-algebra coordinate (period 2π):
/// [[I + ΩᵀHΩ, -ΩᵀH], [-HΩ, H]], Ω(x) y = ½ B(x, y), H = diag(a_i²).
Mat leaf_metric_at(const JMap& j, const LeafSpec& leaf, const Eigen::Ref<const Vec>& x,
                   const Eigen::Ref<const Vec>& z);

/// Point u0 of R^{2k} with |u0_i| = a_i at angle zero in each block.
Vec leaf_base_fiber_point(const LeafSpec& leaf);

/// (x, z) ↦ (x, ρ(z / 2π) u0) and its Jacobian ((m+2k) × (m+k)).
Vec leaf_embedding(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& z, const Eigen::Ref<const Vec>& u0);
Mat leaf_embedding_jacobian(int m, const Eigen::Ref<const Vec>& z, const Eigen::Ref<const Vec>& u0);

/// Compares g_j with the metric of the associated bundle E_B through the
/// map τ([(x, z̄), u]) = (x, z̄·u): pushes the orthonormal E_B frame
/// (left-invariant horizontal fields, Euclidean fiber directions) forward
/// with τ's differential and measures max |FᵀGF - I| over random points.
/// `torus_shift` rotates every sampled fiber point first.
double bundle_isometry_check(const JMap& j, int samples, std::uint64_t seed, const Vec* torus_shift = nullptr);

/// Uniform point in the closed unit ball of R^n.
Vec sample_ball_point(Rng& rng, int n);
/// Uniform point on the unit sphere of R^n.
Vec sample_sphere_point(Rng& rng, int n);
/// All |u_i| ≥ min_radius.
bool on_principal_orbit(const Eigen::Ref<const Vec>& point, int m, double min_radius = 1e-3);

/// CSV of sampled ball points: coordinates then metric entries row-major.
void write_metric_samples_csv(std::ostream& out, const AmbientMetric& g, int samples, std::uint64_t seed);

}  // namespace isodeform
