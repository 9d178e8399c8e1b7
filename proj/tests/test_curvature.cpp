#include "isodeform/curvature.hpp"
#include "isodeform/deform.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace isodeform;

namespace {

const JMap& j_5_2() {
  static const JMap j = random_generic_jmap(5, 2, 42).j;
  return j;
}

double max_abs(const std::vector<double>& v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, std::abs(x));
  return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double out = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i]));
  return out;
}

// Heisenberg group: m = 2, k = 1, J = generator of so(2).
JMap heisenberg_map() {
  Mat J(2, 2);
  J << 0, -1, 1, 0;
  return JMap(2, 1, {J});
}

}  // namespace

TEST(FiniteDifferenceJet, ExactOnQuadraticMetric) {
  // g(p) = I + p pᵀ has ∂_e g = e pᵀ + p eᵀ and ∂_e∂_f g = e fᵀ + f eᵀ.
  const MetricField metric = [](const Vec& p) { return Mat(Mat::Identity(3, 3) + p * p.transpose()); };
  Vec p(3);
  p << 0.3, -0.2, 0.5;
  const MetricJet jet = finite_difference_jet(metric, p);
  for (int e = 0; e < 3; ++e) {
    const Vec ue = Vec::Unit(3, e);
    EXPECT_LE((jet.d1[e] - (ue * p.transpose() + p * ue.transpose())).cwiseAbs().maxCoeff(), 1e-10);
    for (int f = 0; f < 3; ++f) {
      const Vec uf = Vec::Unit(3, f);
      EXPECT_LE((jet.dd(e, f) - (ue * uf.transpose() + uf * ue.transpose())).cwiseAbs().maxCoeff(), 1e-6);
    }
  }
}

TEST(Curvature, FlatWhenJIsZero) {
  const AmbientMetric g(JMap::zero(5, 2));
  Rng rng(1);
  for (int s = 0; s < 10; ++s) {
    const auto pack = curvature_at(g, sample_ball_point(rng, 9));
    EXPECT_LE(pack.max_abs_riemann(), 1e-12);
    EXPECT_LE(max_abs(pack.christoffel), 1e-12);
    EXPECT_EQ(pack.scalar, 0.0);
  }
}

TEST(Curvature, RoundSphereWhenJIsZero) {
  const AmbientMetric g(JMap::zero(5, 2));
  Rng rng(2);
  for (int s = 0; s < 10; ++s) {
    const Vec X = sample_sphere_point(rng, 9);
    const SphereChart chart = SphereChart::best_for(X);
    const auto pack = curvature_at(g, chart, chart.chart_point(X));
    EXPECT_NEAR(pack.scalar, 56.0, 1e-9);
    EXPECT_LE((pack.ricci - 7.0 * pack.g).cwiseAbs().maxCoeff(), 1e-9);
    for (int l = 0; l < 20; ++l) {
      const Vec a = gaussian_vector(rng, 8), b = gaussian_vector(rng, 8);
      EXPECT_NEAR(sectional(pack, a, b), 1.0, 1e-9);
    }
  }
}

TEST(Curvature, HeisenbergLeafClosedForm) {
  // Orthonormal frame e1, e2 horizontal, e3 = ∂_z / a with [e1, e2] = a e3:
  // scal = -a²/2, K(e1, e2) = -3a²/4, K(e1, e3) = a²/4.
  const JMap j = heisenberg_map();
  for (double a : {0.3, 0.8}) {
    LeafSpec leaf{Vec::Constant(1, a)};
    Vec x(2), z(1);
    x << 0.4, -0.7;
    z << 1.1;
    const auto pack = curvature_at(j, leaf, x, z);
    EXPECT_NEAR(pack.scalar, -a * a / 2.0, 1e-12);
    // At x = 0 the coordinate fields are orthogonal and ∂_x1, ∂_x2 horizontal.
    const auto origin = curvature_at(j, leaf, Vec::Zero(2), z);
    EXPECT_NEAR(sectional(origin, Vec::Unit(3, 0), Vec::Unit(3, 1)), -0.75 * a * a, 1e-12);
    EXPECT_NEAR(sectional(origin, Vec::Unit(3, 0), Vec::Unit(3, 2)), 0.25 * a * a, 1e-12);
  }
}

TEST(Curvature, AmbientChristoffelsMatchFiniteDifferences) {
  const AmbientMetric g(j_5_2());
  const MetricField field = [&](const Vec& p) { return g.metric_at(p); };
  Rng rng(3);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    const Vec p = sample_ball_point(rng, 9);
    const Mat gi = g.inverse_metric_at(p);
    const auto exact = christoffel_symbols(ambient_jet(g, p, 1), gi);
    const auto fd = christoffel_symbols(finite_difference_jet(field, p, 1e-4), gi);
    worst = std::max(worst, max_abs_diff(exact, fd) / max_abs(exact));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(Curvature, AmbientRiemannMatchesFiniteDifferenceHessian) {
  const AmbientMetric g(j_5_2());
  const MetricField field = [&](const Vec& p) { return g.metric_at(p); };
  Rng rng(4);
  for (int s = 0; s < 5; ++s) {
    const Vec p = sample_ball_point(rng, 9);
    const auto exact = curvature_at(g, p);
    const auto fd = curvature_from_jet(finite_difference_jet(field, p, 1e-3));
    EXPECT_LE(max_abs_diff(exact.riemann, fd.riemann) / exact.max_abs_riemann(), 1e-5);
  }
}

TEST(Curvature, SphereAndLeafJetsMatchFiniteDifferences) {
  const AmbientMetric g(j_5_2());
  Rng rng(5);
  for (int s = 0; s < 5; ++s) {
    const Vec X = sample_sphere_point(rng, 9);
    const SphereChart chart = SphereChart::best_for(X);
    const Vec p = chart.chart_point(X);
    const MetricField field = [&](const Vec& q) { return sphere_metric_at(g, chart, q); };
    const auto exact = curvature_at(g, chart, p);
    const auto fd = curvature_from_jet(finite_difference_jet(field, p, 1e-3));
    EXPECT_LE((exact.g - sphere_metric_at(g, chart, p)).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_LE(max_abs_diff(exact.christoffel, fd.christoffel) / max_abs(exact.christoffel), 1e-6);
    EXPECT_LE(max_abs_diff(exact.riemann, fd.riemann) / exact.max_abs_riemann(), 1e-5);
  }
  LeafSpec leaf{Vec(2)};
  leaf.a << 0.4, 0.6;
  const Vec x = 0.5 * gaussian_vector(rng, 5), z = gaussian_vector(rng, 2);
  const MetricField field = [&](const Vec& q) { return leaf_metric_at(j_5_2(), leaf, q.head(5), q.tail(2)); };
  Vec q(7);
  q << x, z;
  const auto exact = curvature_at(j_5_2(), leaf, x, z);
  const auto fd = curvature_from_jet(finite_difference_jet(field, q, 1e-3));
  EXPECT_LE(max_abs_diff(exact.riemann, fd.riemann) / exact.max_abs_riemann(), 1e-5);
}

TEST(Curvature, SymmetriesAndBianchi) {
  const AmbientMetric g(j_5_2().scaled(2.0));
  Rng rng(6);
  for (int s = 0; s < 10; ++s) {
    const Vec p = sample_ball_point(rng, 9);
    const auto amb = curvature_at(g, p);
    EXPECT_LE(amb.symmetry_residual(), 1e-7);
    EXPECT_LE(amb.bianchi_residual(), 1e-7);
    const Vec X = sample_sphere_point(rng, 9);
    const SphereChart chart = SphereChart::best_for(X);
    const auto sph = curvature_at(g, chart, chart.chart_point(X));
    EXPECT_LE(sph.symmetry_residual(), 1e-7);
    EXPECT_LE(sph.bianchi_residual(), 1e-7);
    EXPECT_NEAR((sph.g_inv.cwiseProduct(sph.ricci)).sum(), sph.scalar, 1e-12 * std::abs(sph.scalar));
  }
}

TEST(Curvature, GaussEquationOnSphere) {
  // The position vector N is the g-unit normal of S (G N = N), so
  // scal_S = scal − 2 Ric(N, N) + H² − |h|², h_ab = −g(E_a + Γ(E_a, N), E_b).
  const AmbientMetric g(j_5_2().scaled(1.5));
  Rng rng(7);
  for (int s = 0; s < 10; ++s) {
    const Vec X = sample_sphere_point(rng, 9);
    const SphereChart chart = SphereChart::best_for(X);
    const Vec p = chart.chart_point(X);
    const auto amb = curvature_at(g, X);
    const MetricJet jet = ambient_jet(g, X, 1);
    const Mat E = chart.jacobian(p);
    const Mat gS = E.transpose() * amb.g * E;
    Mat h(8, 8);
    for (int a = 0; a < 8; ++a) {
      const Vec nabla = E.col(a) + christoffel_contract(jet, amb.g_inv, E.col(a), X);
      h.row(a) = -(nabla.transpose() * amb.g * E);
    }
    const Mat gi = gS.inverse();
    const double H = (gi.cwiseProduct(h)).sum();
    const double h2 = (gi * h * gi).cwiseProduct(h).sum();
    const double expected = amb.scalar - 2.0 * X.dot(amb.ricci * X) + H * H - h2;
    EXPECT_NEAR(X.dot(amb.g * X), 1.0, 1e-13);
    EXPECT_NEAR(curvature_at(g, chart, p).scalar, expected, 1e-8 * std::abs(expected));
  }
}

TEST(Curvature, SectionalSymmetryAndDegeneratePlanes) {
  const AmbientMetric g(j_5_2());
  Rng rng(8);
  const auto pack = curvature_at(g, sample_ball_point(rng, 9));
  const Vec a = gaussian_vector(rng, 9), b = gaussian_vector(rng, 9);
  EXPECT_NEAR(sectional(pack, a, b), sectional(pack, b, a), 1e-12);
  EXPECT_NEAR(sectional(pack, a, b), sectional(pack, 2.0 * a - b, 3.0 * b), 1e-12);
  EXPECT_THROW(sectional(pack, a, 2.0 * a), DegeneratePlaneError);
}

TEST(Curvature, IllConditionedMetricIsRejected) {
  MetricJet jet;
  jet.point = Vec::Zero(2);
  jet.g = Mat::Identity(2, 2);
  jet.g(1, 1) = 1e-13;
  jet.d1.assign(2, Mat::Zero(2, 2));
  jet.d2.assign(4, Mat::Zero(2, 2));
  EXPECT_THROW(curvature_from_jet(jet), NumericalError);
}

TEST(FiberGeometry, FibersAreTotallyGeodesic) {
  Rng rng(9);
  EXPECT_EQ(fiber_second_fundamental_form(JMap::zero(5, 2), gaussian_vector(rng, 5), gaussian_vector(rng, 4)), 0.0);
  for (double c : {1.0, 0.1}) {
    const JMap j = j_5_2().scaled(c);
    for (int s = 0; s < 100; ++s) {
      const Vec p = sample_ball_point(rng, 9);
      EXPECT_LE(fiber_second_fundamental_form(j, p.head(5), p.tail(4)), 1e-8);
    }
  }
}

TEST(FiberGeometry, CircleOrbitMeanCurvature) {
  Vec p = Vec::Zero(9);
  p(5) = 0.3;
  p(6) = 0.4;
  p(7) = 0.2;
  Mat basis(2, 1);
  basis << 1, 0;
  const auto rec = orbit_mean_curvature(j_5_2(), basis, p);
  EXPECT_NEAR(rec.norm, 1.0 / 0.5, 1e-10);
  EXPECT_LE(rec.orthogonality_residual, 1e-8);
  Vec q = p;
  q(7) = 0.0;
  EXPECT_THROW(orbit_mean_curvature(j_5_2(), Mat::Identity(2, 2), q), DegenerateOrbitError);
}

TEST(FiberGeometry, FullTorusMeanCurvatureIsEuclidean) {
  Rng rng(10);
  const Mat basis = Mat::Identity(2, 2);
  for (int s = 0; s < 50; ++s) {
    const Vec p = sample_ball_point(rng, 9);
    if (!on_principal_orbit(p, 5, 0.05)) continue;
    const auto rec = orbit_mean_curvature(j_5_2(), basis, p);
    const auto flat = orbit_mean_curvature(JMap::zero(5, 2), basis, p);
    Vec expected = Vec::Zero(9);
    for (int i = 0; i < 2; ++i) {
      const Vec ui = p.segment(5 + 2 * i, 2);
      expected.segment(5 + 2 * i, 2) = -ui / ui.squaredNorm();
    }
    EXPECT_LE((rec.vector - expected).cwiseAbs().maxCoeff(), 1e-8 * expected.norm());
    EXPECT_LE((rec.vector - flat.vector).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LE(rec.orthogonality_residual, 1e-8);
  }
}

TEST(FiberGeometry, OrbitMeanCurvatureConstantAlongFamily) {
  FamilyOptions options;
  options.certify_restarts = 2;
  const auto fam = build_family(j_5_2(), 3, 5e-3, options);
  Rng rng(11);
  Mat basis(2, 1);
  basis << 1, 2;
  for (int s = 0; s < 20; ++s) {
    const Vec p = sample_ball_point(rng, 9);
    const auto a = orbit_mean_curvature(fam.members.front(), basis, p);
    const auto b = orbit_mean_curvature(fam.members.back(), basis, p);
    EXPECT_LE((a.vector - b.vector).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(CurvatureScan, ReferenceRowMonotoneAndDeterministic) {
  ScanOptions options;
  options.points = 32;
  options.planes = 16;
  options.seed = 7;
  const std::vector<double> cs = {0.0, 1.0, 0.5, 0.25, 0.125};
  for (Surface surface : {Surface::ball, Surface::sphere}) {
    const auto rows = curvature_scan(j_5_2(), cs, surface, options);
    ASSERT_EQ(rows.size(), cs.size());
    EXPECT_LE(rows[0].sup_stat, 1e-12);
    for (std::size_t i = 2; i < rows.size(); ++i) {
      EXPECT_LE(rows[i].sup_stat, rows[i - 1].sup_stat);
      EXPECT_LE(rows[i].sup_stat, 0.6 * rows[i - 1].sup_stat);
    }
    options.exec = Exec::serial;
    const auto serial = curvature_scan(j_5_2(), cs, surface, options);
    options.exec = Exec::parallel;
    std::ostringstream a, b;
    write_scan_csv(a, rows);
    write_scan_csv(b, serial);
    EXPECT_EQ(a.str(), b.str());
  }
  EXPECT_EQ(surface_from_string("ambient"), Surface::ball);
  EXPECT_THROW(surface_from_string("torus"), std::invalid_argument);
}
