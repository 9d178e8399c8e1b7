#include "isodeform/verify.hpp"
#include "isodeform/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace isodeform {

SubtorusDirection SubtorusDirection::make(const Eigen::VectorXi& Z) {
  int g = 0;
  for (Eigen::Index i = 0; i < Z.size(); ++i) g = std::gcd(g, std::abs(Z(i)));
  if (g == 0) throw std::invalid_argument("subtorus direction must be nonzero");
  if (g != 1) throw std::invalid_argument("subtorus direction must be primitive");
  return {Z};
}

Mat SubtorusDirection::subtorus_basis() const {
  const Eigen::Index k = Z.size();
  const Vec z = real().normalized();
  // Complete z to an orthonormal basis; the trailing columns span Z^⊥.
  Mat M(k, k);
  M.col(0) = z;
  M.rightCols(k - 1) = Mat::Identity(k, k).leftCols(k - 1);
  Eigen::HouseholderQR<Mat> qr(M);
  const Mat Q = qr.householderQ() * Mat::Identity(k, k);
  return Q.rightCols(k - 1);
}

std::string SubtorusDirection::label() const {
  std::ostringstream out;
  out << '(';
  for (Eigen::Index i = 0; i < Z.size(); ++i) out << (i ? "," : "") << Z(i);
  out << ')';
  return out.str();
}

std::vector<SubtorusDirection> default_directions(int k, int bound) {
  std::vector<SubtorusDirection> out;
  const int side = 2 * bound + 1;
  long total = 1;
  for (int i = 0; i < k; ++i) total *= side;
  std::vector<Eigen::VectorXi> found;
  for (long code = 0; code < total; ++code) {
    Eigen::VectorXi Z(k);
    long c = code;
    for (int i = 0; i < k; ++i) {
      Z(i) = static_cast<int>(c % side) - bound;
      c /= side;
    }
    int first = 0;
    for (int i = 0; i < k && first == 0; ++i) first = Z(i);
    int g = 0;
    for (int i = 0; i < k; ++i) g = std::gcd(g, std::abs(Z(i)));
    if (first > 0 && g == 1) found.push_back(Z);
  }
  // Order by max-norm, then by number of nonzeros, then lexicographically descending.
  std::stable_sort(found.begin(), found.end(), [](const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
    const int na = a.cwiseAbs().maxCoeff(), nb = b.cwiseAbs().maxCoeff();
    if (na != nb) return na < nb;
    const auto za = (a.array() != 0).count(), zb = (b.array() != 0).count();
    if (za != zb) return za < zb;
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (a(i) != b(i)) return a(i) > b(i);
    return false;
  });
  for (const auto& Z : found) out.push_back(SubtorusDirection::make(Z));
  return out;
}

JMap perturb_jmap(const JMap& j, double eps, std::uint64_t seed) {
  const JMap E = random_jmap(j.m(), j.k(), seed);
  const Vec p = j.params() + eps * j.frobenius_norm() / E.frobenius_norm() * E.params();
  return JMap::from_params(j.m(), j.k(), p);
}

BracketCheck check_bracket_identity(const JMap& j, const JMap& j2, const SubtorusDirection& Z, int samples, std::uint64_t seed) {
  if (j.m() != j2.m() || j.k() != j2.k() || Z.Z.size() != j.k()) throw DimensionError("check_bracket_identity: dimension mismatch");
  const Mat jZ = j(Z.real()), j2Z = j2(Z.real());
  BracketCheck out;
  out.A = canonical_conjugator(jZ, j2Z);
  const double norm = jZ.norm();
  const double scale = norm > 0.0 ? norm : 1.0;
  out.conjugation_residual = (out.A * jZ * out.A.transpose() - j2Z).norm() / scale;
  const Mat pulled = out.A.transpose() * j2Z * out.A;
  Rng rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Vec x = gaussian_vector(rng, j.m()), y = gaussian_vector(rng, j.m());
    // ⟨B2(Ax, Ay), Z⟩ = ⟨j2(Z) A x, A y⟩ and ⟨B(x, y), Z⟩ = ⟨j(Z) x, y⟩.
    const double dev = y.dot(pulled * x) - y.dot(jZ * x);
    out.residual = std::max(out.residual, std::abs(dev) / (x.norm() * y.norm() * scale));
  }
  return out;
}

double tau_equivariance_residual(const Mat& A, int k, int samples, std::uint64_t seed) {
  const int m = static_cast<int>(A.rows()), n = m + 2 * k;
  auto tau = [&](const Vec& p) {
    Vec out = p;
    out.head(m) = A * p.head(m);
    return out;
  };
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec p = sample_ball_point(rng, n);
    Vec zbar(k);
    for (int i = 0; i < k; ++i) zbar(i) = unit(rng);
    const Vec lhs = tau(torus_action(zbar, p, m)), rhs = torus_action(zbar, tau(p), m);
    worst = std::max({worst, (lhs - rhs).cwiseAbs().maxCoeff(), std::abs(tau(p).norm() - p.norm())});
  }
  return worst;
}

double check_tau_equivariance(const SubtorusDirection& Z, const JMap& j, const JMap& j2, int samples, std::uint64_t seed) {
  const Mat A = canonical_conjugator(j(Z.real()), j2(Z.real()));
  return tau_equivariance_residual(A, j.k(), samples, seed);
}

namespace {

Vec principal_point(Rng& rng, int m, int k) {
  for (;;) {
    const Vec p = sample_ball_point(rng, m + 2 * k);
    if (on_principal_orbit(p, m, 1e-3)) return p;
  }
}

}  // namespace

double check_mean_curvature_intertwining(const JMap& j, const JMap& j2, const SubtorusDirection& Z, int samples,
                                         std::uint64_t seed) {
  const int m = j.m(), k = j.k();
  const Mat A = canonical_conjugator(j(Z.real()), j2(Z.real()));
  const Mat basis = Z.subtorus_basis();
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec p = principal_point(rng, m, k);
    Vec q = p;
    q.head(m) = A * p.head(m);
    const auto h1 = orbit_mean_curvature(j, basis, p);
    const auto h2 = orbit_mean_curvature(j2, basis, q);
    Vec pushed = h1.vector;
    pushed.head(m) = A * h1.vector.head(m);
    worst = std::max(worst, (pushed - h2.vector).cwiseAbs().maxCoeff());
  }
  return worst;
}

double check_full_torus_quotient(const JMap& j, const JMap& j2, int samples, std::uint64_t seed) {
  const int m = j.m(), k = j.k(), n = m + 2 * k;
  const AmbientMetric g1(j), g2(j2);
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vec p = principal_point(rng, m, k);
    Mat dpi = Mat::Zero(m + k, n);
    dpi.topLeftCorner(m, m).setIdentity();
    for (int i = 0; i < k; ++i) {
      const Vec ui = p.segment(m + 2 * i, 2);
      dpi.block(m + i, m + 2 * i, 1, 2) = ui.transpose() / ui.norm();
    }
    const Mat c1 = dpi * g1.inverse_metric_at(p) * dpi.transpose();
    const Mat c2 = dpi * g2.inverse_metric_at(p) * dpi.transpose();
    worst = std::max(worst, (c1 - c2).cwiseAbs().maxCoeff());
  }
  return worst;
}

std::vector<std::pair<int, int>> HypothesisReport::failing_pairs() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& r : records) {
    if (r.pass) continue;
    const std::pair<int, int> p{r.first, r.second};
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

HypothesisReport run_hypothesis_suite(const std::vector<JMap>& members, const std::vector<SubtorusDirection>& directions,
                                      const SuiteConfig& config) {
  HypothesisReport report;
  report.tol = config.tol;
  const int N = static_cast<int>(members.size());
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a + 1 < N; ++a) pairs.emplace_back(a, a + 1);
  if (N > 2) pairs.emplace_back(0, N - 1);

  const std::size_t per_pair = directions.size() + 1;
  report.records.resize(pairs.size() * per_pair);
  for_each_index(report.records.size(), config.exec, [&](std::size_t idx) {
    const auto [a, b] = pairs[idx / per_pair];
    const std::size_t d = idx % per_pair;
    DirectionRecord& rec = report.records[idx];
    rec.first = a;
    rec.second = b;
    const std::uint64_t seed = derive_seed(config.seed, idx);
    const JMap& j = members[static_cast<std::size_t>(a)];
    const JMap& j2 = members[static_cast<std::size_t>(b)];
    try {
      if (d == directions.size()) {
        rec.quotient_residual = check_full_torus_quotient(j, j2, config.samples, seed);
        rec.pass = rec.quotient_residual <= config.tol.quotient;
        return;
      }
      const SubtorusDirection& Z = directions[d];
      rec.direction = Z;
      const auto eq = check_bracket_identity(j, j2, Z, config.samples, seed);
      rec.conjugator_residual = eq.conjugation_residual;
      rec.bracket_residual = eq.residual;
      rec.tau_residual = tau_equivariance_residual(eq.A, j.k(), config.samples, derive_seed(seed, 1));
      rec.mean_curvature_residual = check_mean_curvature_intertwining(j, j2, Z, config.samples, derive_seed(seed, 2));
      rec.pass = rec.bracket_residual <= config.tol.bracket && rec.conjugator_residual <= config.tol.bracket &&
                 rec.tau_residual <= config.tol.tau && rec.mean_curvature_residual <= config.tol.mean_curvature;
    } catch (const std::exception& e) {
      rec.error = e.what();
      rec.pass = false;
    }
  });
  for (const auto& r : report.records) report.pass = report.pass && r.pass;
  return report;
}

namespace {

double relative_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += a[i] * a[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

Mat o2_element(double theta, bool reflect) {
  const double c = std::cos(theta), s = std::sin(theta);
  Mat C(2, 2);
  if (reflect)
    C << c, s, s, -c;
  else
    C << c, -s, s, c;
  return C;
}

}  // namespace

double trace_word_separation(const JMap& j, const JMap& j2, int word_length, int grid, std::uint64_t seed) {
  if (j.k() != j2.k() || j.m() != j2.m()) throw DimensionError("trace_word_separation: dimension mismatch");
  const auto target = trace_word_invariants(j, word_length);
  auto dist = [&](const Mat& C) { return relative_distance(target, trace_word_invariants(substitute_basis(j2, C), word_length)); };

  if (j.k() != 2) {
    Rng rng(seed);
    double best = dist(Mat::Identity(j.k(), j.k()));
    for (int s = 0; s < grid; ++s) best = std::min(best, dist(random_orthogonal(j.k(), rng)));
    return best;
  }
  double best = std::numeric_limits<double>::infinity();
  const double step = 2.0 * std::numbers::pi / grid;
  for (bool reflect : {false, true}) {
    double best_theta = 0.0, local = std::numeric_limits<double>::infinity();
    for (int s = 0; s < grid; ++s) {
      const double d = dist(o2_element(s * step, reflect));
      if (d < local) {
        local = d;
        best_theta = s * step;
      }
    }
    // Golden-section refinement on the bracketing grid cell.
    double lo = best_theta - step, hi = best_theta + step;
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - ratio * (hi - lo), x2 = lo + ratio * (hi - lo);
    double f1 = dist(o2_element(x1, reflect)), f2 = dist(o2_element(x2, reflect));
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - ratio * (hi - lo);
        f1 = dist(o2_element(x1, reflect));
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + ratio * (hi - lo);
        f2 = dist(o2_element(x2, reflect));
      }
    }
    best = std::min({best, local, f1, f2});
  }
  return best;
}

EvidenceRecord non_isometry_evidence(const JMap& j, const JMap& j2, const EvidenceConfig& config) {
  EvidenceRecord rec;
  rec.rho = config.rho;
  rec.commutant_dim_1 = genericity_test(j);
  rec.commutant_dim_2 = genericity_test(j2);
  if (rec.commutant_dim_1 != 0 || rec.commutant_dim_2 != 0) {
    rec.verdict = "inconclusive";
    return rec;
  }
  const auto witness = equivalence_search(j, j2, config.restarts, config.seed);
  rec.equivalence_floor = witness.residual;
  rec.restarts = config.restarts;
  rec.trace_word_separation = trace_word_separation(j, j2, config.word_length, config.grid, config.seed);
  if (rec.equivalence_floor <= config.certify_tol) {
    rec.verdict = "isometric construction data (equivalent j-maps)";
  } else if (rec.equivalence_floor >= config.rho) {
    std::ostringstream out;
    out << "not isometric at evidence level " << config.rho;
    rec.verdict = out.str();
  } else {
    rec.verdict = "inconclusive";
  }
  return rec;
}

}  // namespace isodeform
