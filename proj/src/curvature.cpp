#include "isodeform/curvature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <iomanip>
#include <ostream>

namespace isodeform {

namespace {

// R = [[0,-1],[1,0]]
constexpr double kRot[2][2] = {{0.0, -1.0}, {1.0, 0.0}};

Mat assemble_dG(const Mat& A, const Mat& dA) {
  const Eigen::Index m = A.cols(), v = A.rows();
  Mat out = Mat::Zero(m + v, m + v);
  out.topLeftCorner(m, m) = dA.transpose() * A + A.transpose() * dA;
  out.topRightCorner(m, v) = -dA.transpose();
  out.bottomLeftCorner(v, m) = -dA;
  return out;
}

}  // namespace

MetricJet ambient_jet(const AmbientMetric& metric, const Eigen::Ref<const Vec>& point, int order) {
  const int m = metric.m(), k = metric.k(), n = metric.dim(), v = 2 * k;
  if (point.size() != n) throw DimensionError("ambient_jet: dimension mismatch");
  const JMap& j = metric.j();
  const Vec x = point.head(m), u = point.tail(v);
  const Mat A = metric.horizontal_map(x, u);

  std::vector<Vec> Jx(static_cast<std::size_t>(k));
  std::vector<Vec> Ru(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    Jx[i] = j.mat(i) * x;
    Ru[i] = Vec(2);
    Ru[i] << -u(2 * i + 1), u(2 * i);
  }

  std::vector<Mat> dA(static_cast<std::size_t>(n), Mat::Zero(v, m));
  for (int d = 0; d < m; ++d)
    for (int i = 0; i < k; ++i)
      for (int a = 0; a < 2; ++a) dA[d].row(2 * i + a) = 0.5 * Ru[i](a) * j.mat(i).col(d).transpose();
  for (int i = 0; i < k; ++i)
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a)
        if (kRot[a][b] != 0.0) dA[m + 2 * i + b].row(2 * i + a) = 0.5 * kRot[a][b] * Jx[i].transpose();

  MetricJet jet;
  jet.point = point;
  jet.g = metric.metric_at(x, u);
  jet.d1.reserve(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) jet.d1.push_back(assemble_dG(A, dA[e]));
  if (order < 2) return jet;

  jet.d2.assign(static_cast<std::size_t>(n * n), Mat());
  Mat ddA = Mat::Zero(v, m);
  for (int e = 0; e < n; ++e) {
    for (int f = e; f < n; ++f) {
      Mat out = Mat::Zero(n, n);
      out.topLeftCorner(m, m) = dA[e].transpose() * dA[f] + dA[f].transpose() * dA[e];
      // Only x–u mixed second derivatives of A are nonzero.
      if (e < m && f >= m) {
        const int i = (f - m) / 2, b = (f - m) % 2;
        ddA.setZero();
        for (int a = 0; a < 2; ++a)
          if (kRot[a][b] != 0.0) ddA.row(2 * i + a) = 0.5 * kRot[a][b] * j.mat(i).col(e).transpose();
        out.topLeftCorner(m, m) += ddA.transpose() * A + A.transpose() * ddA;
        out.topRightCorner(m, v) = -ddA.transpose();
        out.bottomLeftCorner(v, m) = -ddA;
      }
      jet.d2[static_cast<std::size_t>(e * n + f)] = out;
      if (f != e) jet.d2[static_cast<std::size_t>(f * n + e)] = std::move(out);
    }
  }
  return jet;
}

MetricJet sphere_jet(const AmbientMetric& metric, const SphereChart& chart, const Eigen::Ref<const Vec>& p) {
  const int n = metric.dim(), d = n - 1, q = chart.axis;
  if (chart.dim != n) throw DimensionError("sphere_jet: chart dimension mismatch");
  if (!chart.in_domain(p)) throw ChartDomainError("sphere chart: point outside chart domain");
  const MetricJet amb = ambient_jet(metric, chart.embed(p), 2);

  // Graph f = s·w, w = sqrt(1 - |p|²), and its derivatives.
  const double s = chart.sign, w = std::sqrt(1.0 - p.squaredNorm());
  const double w3 = w * w * w, w5 = w3 * w * w;
  const Vec f1 = -s * p / w;
  Mat f2 = -s * (Mat::Identity(d, d) / w + p * p.transpose() / w3);
  auto f3 = [&](int a, int b, int c) {
    const double t = (a == b ? p(c) : 0.0) + (a == c ? p(b) : 0.0) + (b == c ? p(a) : 0.0);
    return -s * (t / w3 + 3.0 * p(a) * p(b) * p(c) / w5);
  };
  std::vector<int> col(static_cast<std::size_t>(d));  // chart index → ambient index
  for (int a = 0, c = 0; c < n; ++c)
    if (c != q) col[a++] = c;

  // JᵀXJ with J = selection of `col` plus row q equal to f1.
  auto sandwich = [&](const Mat& X) {
    Mat out(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        out(a, b) = X(col[a], col[b]) + f1(a) * X(q, col[b]) + X(col[a], q) * f1(b) + f1(a) * f1(b) * X(q, q);
    return out;
  };
  // Row q of X·J.
  auto row_q = [&](const Mat& X) {
    Vec out(d);
    for (int b = 0; b < d; ++b) out(b) = X(q, col[b]) + X(q, q) * f1(b);
    return out;
  };

  std::vector<Mat> DG(static_cast<std::size_t>(d));
  std::vector<Vec> DGrow(static_cast<std::size_t>(d));
  for (int e = 0; e < d; ++e) {
    DG[e] = amb.d1[col[e]] + f1(e) * amb.d1[q];
    DGrow[e] = row_q(DG[e]);
  }
  const Vec Grow = row_q(amb.g);
  const double Gqq = amb.g(q, q);

  MetricJet jet;
  jet.point = p;
  jet.g = sandwich(amb.g);
  jet.d1.resize(static_cast<std::size_t>(d));
  for (int e = 0; e < d; ++e) {
    // H_eᵀ(GJ) + its transpose; H_e has only row q, equal to f2.col(e).
    const Mat S = f2.col(e) * Grow.transpose();
    jet.d1[e] = sandwich(DG[e]) + S + S.transpose();
  }
  jet.d2.assign(static_cast<std::size_t>(d * d), Mat());
  for (int e = 0; e < d; ++e) {
    for (int f = e; f < d; ++f) {
      const int ce = col[e], cf = col[f];
      const Mat DGef = amb.dd(ce, cf) + f1(f) * amb.dd(ce, q) + f1(e) * amb.dd(q, cf) +
                       f1(e) * f1(f) * amb.dd(q, q) + f2(e, f) * amb.d1[q];
      Vec t3(d);
      for (int a = 0; a < d; ++a) t3(a) = f3(a, e, f);
      const Mat S = f2.col(f) * DGrow[e].transpose() + f2.col(e) * DGrow[f].transpose() + t3 * Grow.transpose() +
                    Gqq * f2.col(e) * f2.col(f).transpose();
      Mat out = sandwich(DGef) + S + S.transpose();
      jet.d2[static_cast<std::size_t>(e * d + f)] = out;
      if (f != e) jet.d2[static_cast<std::size_t>(f * d + e)] = std::move(out);
    }
  }
  return jet;
}

MetricJet leaf_jet(const JMap& j, const LeafSpec& leaf, const Eigen::Ref<const Vec>& x,
                   const Eigen::Ref<const Vec>& z) {
  const int m = j.m(), k = j.k(), n = m + k;
  MetricJet jet;
  jet.point.resize(n);
  jet.point << x, z;
  jet.g = leaf_metric_at(j, leaf, x, z);

  Mat Omega(k, m);
  for (int i = 0; i < k; ++i) Omega.row(i) = 0.5 * (j.mat(i) * x).transpose();
  const Vec h = leaf.a.cwiseAbs2();
  std::vector<Mat> dOmega(static_cast<std::size_t>(m), Mat(k, m));
  for (int d = 0; d < m; ++d)
    for (int i = 0; i < k; ++i) dOmega[d].row(i) = 0.5 * j.mat(i).col(d).transpose();

  jet.d1.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
  for (int d = 0; d < m; ++d) {
    const Mat HdO = h.asDiagonal() * dOmega[d];
    Mat& out = jet.d1[d];
    out.topLeftCorner(m, m) = dOmega[d].transpose() * h.asDiagonal() * Omega + Omega.transpose() * HdO;
    out.topRightCorner(m, k) = -HdO.transpose();
    out.bottomLeftCorner(k, m) = -HdO;
  }
  jet.d2.assign(static_cast<std::size_t>(n * n), Mat::Zero(n, n));
  for (int d = 0; d < m; ++d)
    for (int e = 0; e < m; ++e) {
      const Mat t = dOmega[d].transpose() * h.asDiagonal() * dOmega[e];
      jet.d2[static_cast<std::size_t>(d * n + e)].topLeftCorner(m, m) = t + t.transpose();
    }
  return jet;
}

MetricJet finite_difference_jet(const MetricField& metric, const Eigen::Ref<const Vec>& point, double h) {
  const int n = static_cast<int>(point.size());
  const Vec p = point;
  MetricJet jet;
  jet.point = p;
  jet.g = metric(p);

  auto first = [&](int e, double s) {
    const Vec de = s * Vec::Unit(n, e);
    return Mat((metric(p + de) - metric(p - de)) / (2.0 * s));
  };
  auto second = [&](int e, int f, double s) {
    if (e == f) {
      const Vec de = s * Vec::Unit(n, e);
      return Mat((metric(p + de) - 2.0 * jet.g + metric(p - de)) / (s * s));
    }
    const Vec de = s * Vec::Unit(n, e), df = s * Vec::Unit(n, f);
    return Mat((metric(p + de + df) - metric(p + de - df) - metric(p - de + df) + metric(p - de - df)) /
               (4.0 * s * s));
  };
  for (int e = 0; e < n; ++e) jet.d1.push_back((4.0 * first(e, h / 2) - first(e, h)) / 3.0);
  jet.d2.assign(static_cast<std::size_t>(n * n), Mat());
  for (int e = 0; e < n; ++e)
    for (int f = e; f < n; ++f) {
      const Mat v = (4.0 * second(e, f, h / 2) - second(e, f, h)) / 3.0;
      jet.d2[static_cast<std::size_t>(e * n + f)] = v;
      jet.d2[static_cast<std::size_t>(f * n + e)] = v;
    }
  return jet;
}

namespace {

// Γ_{c,ab} = ½(∂_a g_bc + ∂_b g_ac − ∂_c g_ab) at [(c n + a) n + b].
std::vector<double> christoffel_first_kind(const MetricJet& jet) {
  const int n = jet.dim();
  std::vector<double> out(static_cast<std::size_t>(n * n * n));
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        out[static_cast<std::size_t>((c * n + a) * n + b)] =
            0.5 * (jet.d1[a](b, c) + jet.d1[b](a, c) - jet.d1[c](a, b));
  return out;
}

std::vector<double> raise_first(const std::vector<double>& lower, const Mat& g_inv) {
  const int n = static_cast<int>(g_inv.rows());
  const std::size_t nn = static_cast<std::size_t>(n * n);
  std::vector<double> out(lower.size(), 0.0);
  for (int c = 0; c < n; ++c)
    for (int d = 0; d < n; ++d) {
      const double w = g_inv(c, d);
      if (w == 0.0) continue;
      for (std::size_t ab = 0; ab < nn; ++ab) out[c * nn + ab] += w * lower[d * nn + ab];
    }
  return out;
}

Mat checked_inverse(const Mat& g) {
  Eigen::SelfAdjointEigenSolver<Mat> es(g, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) throw NumericalError("metric is near-singular (condition number > 1e12)");
  Mat inv = g.llt().solve(Mat::Identity(g.rows(), g.cols()));
  return 0.5 * (inv + inv.transpose());
}

}  // namespace

std::vector<double> christoffel_symbols(const MetricJet& jet, const Mat& g_inv) {
  return raise_first(christoffel_first_kind(jet), g_inv);
}

CurvaturePack curvature_from_jet(const MetricJet& jet) {
  const int n = jet.dim();
  if (jet.d2.size() != static_cast<std::size_t>(n * n)) throw DimensionError("curvature_from_jet: second-order jet required");
  CurvaturePack pack;
  pack.n = n;
  pack.point = jet.point;
  pack.g = jet.g;
  pack.g_inv = checked_inverse(jet.g);
  const auto lower = christoffel_first_kind(jet);
  pack.christoffel = raise_first(lower, pack.g_inv);

  const std::size_t N = static_cast<std::size_t>(n);
  auto lo = [&](int c, int a, int b) { return lower[(c * N + a) * N + b]; };
  pack.riemann.assign(N * N * N * N, 0.0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double r = 0.5 * (jet.dd(a, c)(b, d) + jet.dd(b, d)(a, c) - jet.dd(a, d)(b, c) - jet.dd(b, c)(a, d));
          for (int e = 0; e < n; ++e) r += pack.gamma(e, a, c) * lo(e, b, d) - pack.gamma(e, b, c) * lo(e, a, d);
          pack.riemann[((a * N + b) * N + c) * N + d] = r;
        }

  pack.ricci = Mat::Zero(n, n);
  for (int b = 0; b < n; ++b)
    for (int c = 0; c < n; ++c) {
      double s = 0.0;
      for (int a = 0; a < n; ++a)
        for (int d = 0; d < n; ++d) s += pack.g_inv(a, d) * pack.R(a, b, c, d);
      pack.ricci(b, c) = s;
    }
  pack.scalar = (pack.g_inv.cwiseProduct(pack.ricci)).sum();
  return pack;
}

double CurvaturePack::max_abs_riemann() const {
  double out = 0.0;
  for (double r : riemann) out = std::max(out, std::abs(r));
  return out;
}

double CurvaturePack::symmetry_residual() const {
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double r = R(a, b, c, d);
          worst = std::max({worst, std::abs(r + R(b, a, c, d)), std::abs(r + R(a, b, d, c)), std::abs(r - R(c, d, a, b))});
        }
  const double scale = max_abs_riemann();
  return scale > 0.0 ? worst / scale : worst;
}

double CurvaturePack::bianchi_residual() const {
  double worst = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) worst = std::max(worst, std::abs(R(a, b, c, d) + R(a, c, d, b) + R(a, d, b, c)));
  const double scale = max_abs_riemann();
  return scale > 0.0 ? worst / scale : worst;
}

CurvaturePack curvature_at(const AmbientMetric& g, const Eigen::Ref<const Vec>& point) {
  return curvature_from_jet(ambient_jet(g, point, 2));
}

CurvaturePack curvature_at(const AmbientMetric& g, const SphereChart& chart, const Eigen::Ref<const Vec>& p) {
  return curvature_from_jet(sphere_jet(g, chart, p));
}

CurvaturePack curvature_at(const JMap& j, const LeafSpec& leaf, const Eigen::Ref<const Vec>& x,
                           const Eigen::Ref<const Vec>& z) {
  return curvature_from_jet(leaf_jet(j, leaf, x, z));
}

double sectional(const CurvaturePack& pack, const Eigen::Ref<const Vec>& X, const Eigen::Ref<const Vec>& Y) {
  const int n = pack.n;
  if (X.size() != n || Y.size() != n) throw DimensionError("sectional: vector dimension mismatch");
  const double xx = X.dot(pack.g * X), yy = Y.dot(pack.g * Y), xy = X.dot(pack.g * Y);
  const double gram = xx * yy - xy * xy;
  if (!(gram >= 1e-12)) throw DegeneratePlaneError("sectional: degenerate plane");
  double r = 0.0;
  for (int a = 0; a < n; ++a) {
    if (X(a) == 0.0) continue;
    for (int b = 0; b < n; ++b) {
      if (Y(b) == 0.0) continue;
      for (int c = 0; c < n; ++c) {
        if (Y(c) == 0.0) continue;
        for (int d = 0; d < n; ++d) r += X(a) * Y(b) * Y(c) * X(d) * pack.R(a, b, c, d);
      }
    }
  }
  return r / gram;
}

Vec christoffel_contract(const MetricJet& jet, const Mat& g_inv, const Eigen::Ref<const Vec>& X,
                         const Eigen::Ref<const Vec>& Y) {
  const int n = jet.dim();
  // Γ_d(X, Y) = ½(∂_X g(Y)_d + ∂_Y g(X)_d − Xᵀ ∂_d g Y).
  Mat dX = Mat::Zero(n, n), dY = Mat::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    if (X(a) != 0.0) dX += X(a) * jet.d1[a];
    if (Y(a) != 0.0) dY += Y(a) * jet.d1[a];
  }
  Vec low = 0.5 * (dX * Y + dY * X);
  for (int d = 0; d < n; ++d) low(d) -= 0.5 * X.dot(jet.d1[d] * Y);
  return g_inv * low;
}

double fiber_second_fundamental_form(const JMap& j, const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& u) {
  const int m = j.m(), v = 2 * j.k(), n = m + v;
  const AmbientMetric metric(j);
  Vec point(n);
  point << x, u;
  const MetricJet jet = ambient_jet(metric, point, 1);
  const Mat g_inv = metric.inverse_metric_at(point);
  // Coordinate fields ∂_{u_a} are parallel in the Euclidean sense, so
  // ∇_{∂a} ∂b = Γ(∂a, ∂b). The fiber metric block is the identity, so the
  // g-orthogonal projection onto the fiber tangent is W ↦ (0, G_vert W).
  double sum = 0.0;
  for (int a = 0; a < v; ++a)
    for (int b = 0; b < v; ++b) {
      const Vec W = christoffel_contract(jet, g_inv, Vec::Unit(n, m + a), Vec::Unit(n, m + b));
      Vec tangent = Vec::Zero(n);
      tangent.tail(v) = jet.g.bottomRows(v) * W;
      const Vec normal = W - tangent;
      sum += normal.dot(jet.g * normal);
    }
  return std::sqrt(std::max(sum, 0.0));
}

MeanCurvatureRecord orbit_mean_curvature(const JMap& j, const Mat& basis, const Eigen::Ref<const Vec>& point) {
  const int m = j.m(), k = j.k(), v = 2 * k, n = m + v;
  if (basis.rows() != k || point.size() != n) throw DimensionError("orbit_mean_curvature: dimension mismatch");
  const int kp = static_cast<int>(basis.cols());
  const AmbientMetric metric(j);
  const MetricJet jet = ambient_jet(metric, point, 1);
  const Mat g_inv = metric.inverse_metric_at(point);
  const Vec u = point.tail(v);

  // Orbit generators X_s = (0, ρ_*(b_s) u); they are linear fields in u.
  std::vector<Mat> rho(static_cast<std::size_t>(kp));
  Mat X = Mat::Zero(n, kp);
  for (int s = 0; s < kp; ++s) {
    rho[s] = rho_star(basis.col(s));
    X.col(s).tail(v) = rho[s] * u;
  }
  const Mat gram = X.transpose() * jet.g * X;
  Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
  const double scale = std::max(1.0, es.eigenvalues().maxCoeff());
  if (kp == 0 || !(es.eigenvalues().minCoeff() > 1e-12 * scale))
    throw DegenerateOrbitError("orbit_mean_curvature: point is not on a principal orbit");
  const Mat gram_inv = gram.inverse();

  auto normal_part = [&](const Vec& W) -> Vec { return W - X * (gram_inv * (X.transpose() * (jet.g * W))); };

  Vec H = Vec::Zero(n);
  for (int s = 0; s < kp; ++s)
    for (int t = 0; t < kp; ++t) {
      if (gram_inv(s, t) == 0.0) continue;
      Vec nabla = christoffel_contract(jet, g_inv, X.col(s), X.col(t));
      nabla.tail(v) += rho[t] * X.col(s).tail(v);  // Euclidean derivative of X_t along X_s
      H += gram_inv(s, t) * normal_part(nabla);
    }

  MeanCurvatureRecord rec;
  rec.basis = basis;
  rec.point = point;
  rec.vector = H;
  rec.norm = std::sqrt(std::max(0.0, H.dot(jet.g * H)));
  rec.orthogonality_residual = (X.transpose() * (jet.g * H)).cwiseAbs().maxCoeff();
  return rec;
}

std::string to_string(Surface s) { return s == Surface::ball ? "ball" : "sphere"; }

Surface surface_from_string(const std::string& s) {
  if (s == "ball" || s == "ambient") return Surface::ball;
  if (s == "sphere") return Surface::sphere;
  throw std::invalid_argument("unknown surface '" + s + "'");
}

namespace {

struct PointStat {
  double sup = 0.0;
  Vec where;
};

// Two Gaussian vectors, Gram–Schmidt orthonormalized in the Euclidean sense.
std::pair<Vec, Vec> random_plane(Rng& rng, int d) {
  for (;;) {
    Vec a = gaussian_vector(rng, d), b = gaussian_vector(rng, d);
    a.normalize();
    b -= a.dot(b) * a;
    const double nb = b.norm();
    if (nb > 1e-6) return {a, b / nb};
  }
}

}  // namespace

std::vector<ScanRow> curvature_scan(const JMap& j, const std::vector<double>& cs, Surface surface,
                                    const ScanOptions& options) {
  const int n = j.m() + 2 * j.k();
  std::vector<ScanRow> rows;
  for (double c : cs) {
    if (!(c >= 0.0)) throw std::invalid_argument("curvature_scan: scale factors must be non-negative");
    const AmbientMetric metric(j.scaled(c));
    std::vector<PointStat> stats(static_cast<std::size_t>(options.points));
    for_each_index(stats.size(), options.exec, [&](std::size_t s) {
      Rng rng(derive_seed(options.seed, s));
      PointStat& out = stats[s];
      if (surface == Surface::ball) {
        out.where = sample_ball_point(rng, n);
        const CurvaturePack pack = curvature_at(metric, out.where);
        for (int l = 0; l < options.planes; ++l) {
          const auto [X, Y] = random_plane(rng, n);
          out.sup = std::max(out.sup, std::abs(sectional(pack, X, Y)));
        }
      } else {
        out.where = sample_sphere_point(rng, n);
        const SphereChart chart = SphereChart::best_for(out.where);
        const CurvaturePack pack = curvature_at(metric, chart, chart.chart_point(out.where));
        for (int l = 0; l < options.planes; ++l) {
          const auto [X, Y] = random_plane(rng, n - 1);
          out.sup = std::max(out.sup, std::abs(sectional(pack, X, Y) - 1.0));
        }
      }
    });
    ScanRow row;
    row.c = c;
    row.surface = surface;
    row.n_points = options.points;
    row.n_planes = options.planes;
    row.argmax = stats.empty() ? Vec::Zero(n) : stats.front().where;
    for (const auto& st : stats)
      if (st.sup > row.sup_stat) {
        row.sup_stat = st.sup;
        row.argmax = st.where;
      }
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
  out << "c,surface,n_points,n_planes,sup_stat,argmax\n";
  out << std::setprecision(17);
  for (const auto& r : rows) {
    out << r.c << ',' << to_string(r.surface) << ',' << r.n_points << ',' << r.n_planes << ',' << r.sup_stat << ',';
    for (Eigen::Index i = 0; i < r.argmax.size(); ++i) out << (i ? " " : "") << r.argmax(i);
    out << '\n';
  }
}

}  // namespace isodeform
