#include "isodeform/ambient.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

namespace isodeform {

namespace {

// R = [[0,-1],[1,0]] applied to a 2-vector.
inline void rotate_quarter(double a, double b, double& ra, double& rb) {
  ra = -b;
  rb = a;
}

}  // namespace

Vec BilinearMapB::operator()(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y) const {
  if (x.size() != m || y.size() != m) throw DimensionError("B: argument dimension mismatch");
  Vec out(k);
  for (int i = 0; i < k; ++i) out(i) = y.dot(components[static_cast<std::size_t>(i)] * x);
  return out;
}

BilinearMapB bmap_from_j(const JMap& j) { return {j.m(), j.k(), j.mats()}; }

Mat rho_star(const Eigen::Ref<const Vec>& Z) {
  const Eigen::Index k = Z.size();
  Mat out = Mat::Zero(2 * k, 2 * k);
  for (Eigen::Index i = 0; i < k; ++i) {
    out(2 * i, 2 * i + 1) = -Z(i);
    out(2 * i + 1, 2 * i) = Z(i);
  }
  return out;
}

Vec fundamental_field(const Eigen::Ref<const Vec>& Z, const Eigen::Ref<const Vec>& u) {
  if (u.size() != 2 * Z.size()) throw DimensionError("fundamental_field: dimension mismatch");
  Vec out(u.size());
  for (Eigen::Index i = 0; i < Z.size(); ++i) {
    double a, b;
    rotate_quarter(u(2 * i), u(2 * i + 1), a, b);
    out(2 * i) = Z(i) * a;
    out(2 * i + 1) = Z(i) * b;
  }
  return out;
}

Mat torus_rotation(const Eigen::Ref<const Vec>& zbar) {
  const Eigen::Index k = zbar.size();
  Mat out = Mat::Zero(2 * k, 2 * k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double t = 2.0 * std::numbers::pi * zbar(i);
    const double c = std::cos(t), s = std::sin(t);
    out(2 * i, 2 * i) = c;
    out(2 * i, 2 * i + 1) = -s;
    out(2 * i + 1, 2 * i) = s;
    out(2 * i + 1, 2 * i + 1) = c;
  }
  return out;
}

Vec torus_action(const Eigen::Ref<const Vec>& zbar, const Eigen::Ref<const Vec>& point, int m) {
  const Eigen::Index k = zbar.size();
  if (point.size() != m + 2 * k) throw DimensionError("torus_action: dimension mismatch");
  Vec out = point;
  out.tail(2 * k) = torus_rotation(zbar) * point.tail(2 * k);
  return out;
}

AmbientMetric::AmbientMetric(JMap j) : j_(std::move(j)) {}

Mat AmbientMetric::horizontal_map(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& u) const {
  const int m = this->m(), k = this->k();
  if (x.size() != m || u.size() != 2 * k) throw DimensionError("horizontal_map: dimension mismatch");
  Mat A(2 * k, m);
  for (int i = 0; i < k; ++i) {
    const Vec jx = j_.mat(i) * x;
    double a, b;
    rotate_quarter(u(2 * i), u(2 * i + 1), a, b);
    A.row(2 * i) = 0.5 * a * jx.transpose();
    A.row(2 * i + 1) = 0.5 * b * jx.transpose();
  }
  return A;
}

Mat AmbientMetric::metric_at(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& u) const {
  const int m = this->m(), v = 2 * k();
  const Mat A = horizontal_map(x, u);
  Mat G(m + v, m + v);
  G.topLeftCorner(m, m) = Mat::Identity(m, m) + A.transpose() * A;
  G.topRightCorner(m, v) = -A.transpose();
  G.bottomLeftCorner(v, m) = -A;
  G.bottomRightCorner(v, v) = Mat::Identity(v, v);
  return G;
}

Mat AmbientMetric::metric_at(const Eigen::Ref<const Vec>& point) const {
  if (point.size() != dim()) throw DimensionError("metric_at: dimension mismatch");
  return metric_at(point.head(m()), point.tail(2 * k()));
}

Mat AmbientMetric::inverse_metric_at(const Eigen::Ref<const Vec>& point) const {
  if (point.size() != dim()) throw DimensionError("inverse_metric_at: dimension mismatch");
  const int m = this->m(), v = 2 * k();
  const Mat A = horizontal_map(point.head(m), point.tail(v));
  Mat Gi(m + v, m + v);
  Gi.topLeftCorner(m, m) = Mat::Identity(m, m);
  Gi.topRightCorner(m, v) = A.transpose();
  Gi.bottomLeftCorner(v, m) = A;
  Gi.bottomRightCorner(v, v) = Mat::Identity(v, v) + A * A.transpose();
  return Gi;
}

bool SphereChart::in_domain(const Eigen::Ref<const Vec>& p) const {
  return p.size() == dim - 1 && p.squaredNorm() <= 1.0 - margin * margin;
}

Vec SphereChart::embed(const Eigen::Ref<const Vec>& p) const {
  if (!in_domain(p)) throw ChartDomainError("sphere chart: point outside chart domain");
  Vec X(dim);
  for (int a = 0, c = 0; c < dim; ++c) {
    if (c == axis) continue;
    X(c) = p(a++);
  }
  X(axis) = sign * std::sqrt(1.0 - p.squaredNorm());
  return X;
}

Mat SphereChart::jacobian(const Eigen::Ref<const Vec>& p) const {
  if (!in_domain(p)) throw ChartDomainError("sphere chart: point outside chart domain");
  const double w = std::sqrt(1.0 - p.squaredNorm());
  Mat J = Mat::Zero(dim, dim - 1);
  for (int a = 0, c = 0; c < dim; ++c) {
    if (c == axis) continue;
    J(c, a++) = 1.0;
  }
  for (int a = 0; a < dim - 1; ++a) J(axis, a) = -sign * p(a) / w;
  return J;
}

Vec SphereChart::chart_point(const Eigen::Ref<const Vec>& X) const {
  if (X.size() != dim) throw DimensionError("chart_point: dimension mismatch");
  Vec p(dim - 1);
  for (int a = 0, c = 0; c < dim; ++c)
    if (c != axis) p(a++) = X(c);
  return p;
}

SphereChart SphereChart::best_for(const Eigen::Ref<const Vec>& X, double margin) {
  Eigen::Index axis = 0;
  X.cwiseAbs().maxCoeff(&axis);
  return {static_cast<int>(X.size()), static_cast<int>(axis), X(axis) >= 0 ? 1 : -1, margin};
}

Mat sphere_metric_at(const AmbientMetric& g, const SphereChart& chart, const Eigen::Ref<const Vec>& p) {
  if (chart.dim != g.dim()) throw DimensionError("sphere_metric_at: chart dimension mismatch");
  const Mat J = chart.jacobian(p);
  return J.transpose() * g.metric_at(chart.embed(p)) * J;
}

double LeafSpec::base_radius() const {
  const double s = 1.0 - a.squaredNorm();
  return s > 0.0 ? std::sqrt(s) : std::numeric_limits<double>::quiet_NaN();
}

Mat leaf_metric_at(const JMap& j, const LeafSpec& leaf, const Eigen::Ref<const Vec>& x,
                   const Eigen::Ref<const Vec>& z) {
  const int m = j.m(), k = j.k();
  if (x.size() != m || z.size() != k || leaf.a.size() != k) throw DimensionError("leaf_metric_at: dimension mismatch");
  Mat Omega(k, m);
  for (int i = 0; i < k; ++i) Omega.row(i) = 0.5 * (j.mat(i) * x).transpose();
  const Vec h = leaf.a.cwiseAbs2();
  const Mat HOmega = h.asDiagonal() * Omega;
  Mat G(m + k, m + k);
  G.topLeftCorner(m, m) = Mat::Identity(m, m) + Omega.transpose() * HOmega;
  G.topRightCorner(m, k) = -HOmega.transpose();
  G.bottomLeftCorner(k, m) = -HOmega;
  G.bottomRightCorner(k, k) = h.asDiagonal();
  return G;
}

Vec leaf_base_fiber_point(const LeafSpec& leaf) {
  Vec u = Vec::Zero(2 * leaf.a.size());
  for (Eigen::Index i = 0; i < leaf.a.size(); ++i) u(2 * i) = leaf.a(i);
  return u;
}

Vec leaf_embedding(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& z, const Eigen::Ref<const Vec>& u0) {
  Vec out(x.size() + u0.size());
  out.head(x.size()) = x;
  out.tail(u0.size()) = torus_rotation(z / (2.0 * std::numbers::pi)) * u0;
  return out;
}

Mat leaf_embedding_jacobian(int m, const Eigen::Ref<const Vec>& z, const Eigen::Ref<const Vec>& u0) {
  const Eigen::Index k = z.size();
  const Vec u = torus_rotation(z / (2.0 * std::numbers::pi)) * u0;
  Mat J = Mat::Zero(m + 2 * k, m + k);
  J.topLeftCorner(m, m).setIdentity();
  for (Eigen::Index i = 0; i < k; ++i) {
    double a, b;
    rotate_quarter(u(2 * i), u(2 * i + 1), a, b);
    J(m + 2 * i, m + i) = a;
    J(m + 2 * i + 1, m + i) = b;
  }
  return J;
}

double bundle_isometry_check(const JMap& j, int samples, std::uint64_t seed, const Vec* torus_shift) {
  const int m = j.m(), k = j.k(), n = m + 2 * k;
  const AmbientMetric g(j);
  const BilinearMapB B = bmap_from_j(j);
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vec point = sample_ball_point(rng, n);
    if (torus_shift) point = torus_action(*torus_shift, point, m);
    Vec zbar(k);
    for (int i = 0; i < k; ++i) zbar(i) = unit(rng);
    const Vec x = point.head(m);
    const Mat R = torus_rotation(zbar);
    const Vec Ru = R * point.tail(2 * k);

    // τ_* of the left-invariant horizontal field through e_c is
    // (e_c, ½ ρ_*(B(x, e_c)) ρ(z̄) u); fiber directions e_l go to ρ(z̄) e_l.
    Mat F = Mat::Zero(n, n);
    for (int c = 0; c < m; ++c) {
      F(c, c) = 1.0;
      F.col(c).tail(2 * k) = 0.5 * rho_star(B(x, Vec::Unit(m, c))) * Ru;
    }
    F.bottomRightCorner(2 * k, 2 * k) = R;

    Vec image(n);
    image << x, Ru;
    const Mat D = F.transpose() * g.metric_at(image) * F - Mat::Identity(n, n);
    worst = std::max(worst, D.cwiseAbs().maxCoeff());
  }
  return worst;
}

Vec sample_ball_point(Rng& rng, int n) {
  Vec v = sample_sphere_point(rng, n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  return std::pow(unit(rng), 1.0 / n) * v;
}

Vec sample_sphere_point(Rng& rng, int n) {
  Vec v;
  double r = 0.0;
  do {
    v = gaussian_vector(rng, n);
    r = v.norm();
  } while (r < 1e-300);
  return v / r;
}

bool on_principal_orbit(const Eigen::Ref<const Vec>& point, int m, double min_radius) {
  const Eigen::Index k = (point.size() - m) / 2;
  for (Eigen::Index i = 0; i < k; ++i)
    if (point.segment(m + 2 * i, 2).norm() < min_radius) return false;
  return true;
}

void write_metric_samples_csv(std::ostream& out, const AmbientMetric& g, int samples, std::uint64_t seed) {
  const int m = g.m(), k = g.k(), n = g.dim();
  for (int c = 0; c < m; ++c) out << "x" << c + 1 << ",";
  for (int c = 0; c < 2 * k; ++c) out << "u" << c + 1 << ",";
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out << "g_" << a + 1 << "_" << b + 1 << (a + 1 == n && b + 1 == n ? "\n" : ",");
  Rng rng(seed);
  out << std::setprecision(17);
  for (int s = 0; s < samples; ++s) {
    const Vec p = sample_ball_point(rng, n);
    const Mat G = g.metric_at(p);
    for (int c = 0; c < n; ++c) out << p(c) << ",";
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) out << G(a, b) << (a + 1 == n && b + 1 == n ? "\n" : ",");
  }
}

}  // namespace isodeform
