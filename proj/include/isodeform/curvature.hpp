#pragma once

#include "isodeform/ambient.hpp"

#include <functional>
#include <iosfwd>
#include <string>

namespace isodeform {

/// Metric with its first and second coordinate derivatives at a point.
struct MetricJet {
  Vec point;
  Mat g;
  std::vector<Mat> d1;  // d1[e] = ∂_e g
  std::vector<Mat> d2;  // d2[e * n + f] = ∂_e ∂_f g; empty for first-order jets

  int dim() const { return static_cast<int>(g.rows()); }
  const Mat& dd(int e, int f) const { return d2[static_cast<std::size_t>(e * dim() + f)]; }
};

/// Closed-form jet of g_j. `order` is 1 or 2.
MetricJet ambient_jet(const AmbientMetric& g, const Eigen::Ref<const Vec>& point, int order = 2);
/// Jet of the pullback of g_j to a sphere chart, by the chain rule with the
/// exact chart derivatives.
MetricJet sphere_jet(const AmbientMetric& g, const SphereChart& chart, const Eigen::Ref<const Vec>& p);
/// Jet of the left-invariant leaf metric in coordinates (x, z).
MetricJet leaf_jet(const JMap& j, const LeafSpec& leaf, const Eigen::Ref<const Vec>& x,
                   const Eigen::Ref<const Vec>& z);

using MetricField = std::function<Mat(const Vec&)>;

/// Central differences with one Richardson step (h and h/2).
MetricJet finite_difference_jet(const MetricField& metric, const Eigen::Ref<const Vec>& point, double h = 1e-4);

/// Curvature data in the active chart. Index conventions:
///   Γ^c_ab at christoffel[(c n + a) n + b]
///   R_abcd = R(∂_a, ∂_b, ∂_c, ∂_d) = g(R(∂_a, ∂_b) ∂_c, ∂_d),
///   R(X, Y) = ∇_X ∇_Y − ∇_Y ∇_X − ∇_[X,Y]
///   Ric_bc = g^{ad} R_abcd, scal = g^{bc} Ric_bc
struct CurvaturePack {
  int n = 0;
  Vec point;
  Mat g;
  Mat g_inv;
  std::vector<double> christoffel;
  std::vector<double> riemann;
  Mat ricci;
  double scalar = 0.0;

  double gamma(int c, int a, int b) const { return christoffel[static_cast<std::size_t>((c * n + a) * n + b)]; }
  double R(int a, int b, int c, int d) const {
    return riemann[static_cast<std::size_t>(((a * n + b) * n + c) * n + d)];
  }
  /// max over pair antisymmetries and pair symmetry, relative to max |R|.
  double symmetry_residual() const;
  /// max |R_abcd + R_acdb + R_adbc|, relative to max |R|.
  double bianchi_residual() const;
  double max_abs_riemann() const;
};

/// Throws NumericalError if the metric's condition number exceeds 1e12.
CurvaturePack curvature_from_jet(const MetricJet& jet);

CurvaturePack curvature_at(const AmbientMetric& g, const Eigen::Ref<const Vec>& point);
CurvaturePack curvature_at(const AmbientMetric& g, const SphereChart& chart, const Eigen::Ref<const Vec>& p);
CurvaturePack curvature_at(const JMap& j, const LeafSpec& leaf, const Eigen::Ref<const Vec>& x,
                           const Eigen::Ref<const Vec>& z);

/// Christoffel symbols only (first-order jet suffices).
std::vector<double> christoffel_symbols(const MetricJet& jet, const Mat& g_inv);

/// K(X, Y) = R(X, Y, Y, X) / (|X|²|Y|² − ⟨X, Y⟩²). Throws
/// DegeneratePlaneError when the Gram determinant is below 1e-12.
double sectional(const CurvaturePack& pack, const Eigen::Ref<const Vec>& X, const Eigen::Ref<const Vec>& Y);

/// Γ(X, Y) = Γ^c_ab X^a Y^b from a first-order jet.
Vec christoffel_contract(const MetricJet& jet, const Mat& g_inv, const Eigen::Ref<const Vec>& X,
                         const Eigen::Ref<const Vec>& Y);

/// g-norm of the second fundamental form of the fiber {x} × R^{2k}.
double fiber_second_fundamental_form(const JMap& j, const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& u);

struct MeanCurvatureRecord {
  Mat basis;    // k × k', columns span the subtorus Lie algebra
  Vec point;    // (x, u)
  Vec vector;   // trace of the second fundamental form, ambient coordinates
  double norm = 0.0;                    // g-norm
  double orthogonality_residual = 0.0;  // max |g(H, X_s)| over orbit generators
};

/// Mean curvature of the orbit K·(x, u), K = exp(span basis). Throws
/// DegenerateOrbitError if the orbit is not principal at the point.
MeanCurvatureRecord orbit_mean_curvature(const JMap& j, const Mat& basis, const Eigen::Ref<const Vec>& point);

enum class Surface { ball, sphere };
std::string to_string(Surface s);
Surface surface_from_string(const std::string& s);

struct ScanRow {
  double c = 0.0;
  Surface surface = Surface::ball;
  int n_points = 0;
  int n_planes = 0;
  double sup_stat = 0.0;  // sup |K| (ball) or sup |K − 1| (sphere)
  Vec argmax;             // ambient point attaining the sup
};

struct ScanOptions {
  int points = 256;
  int planes = 64;
  std::uint64_t seed = 0;
  Exec exec = Exec::parallel;
};

/// For each c, sectional curvatures of g_{cj} over random points and planes.
/// Point s uses derive_seed(seed, s) for every c, so rows share points.
std::vector<ScanRow> curvature_scan(const JMap& j, const std::vector<double>& cs, Surface surface,
                                    const ScanOptions& options = {});

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows);

}  // namespace isodeform
