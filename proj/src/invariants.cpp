#include "isodeform/invariants.hpp"
#include "isodeform/forms.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

namespace isodeform {

std::string to_string(Sampling s) { return s == Sampling::monte_carlo ? "monte-carlo" : "low-discrepancy"; }

Sampling sampling_from_string(const std::string& s) {
  if (s == "monte-carlo" || s == "mc") return Sampling::monte_carlo;
  if (s == "low-discrepancy" || s == "halton") return Sampling::halton;
  throw std::invalid_argument("unknown sampling method '" + s + "'");
}

std::string to_string(SphereIntegrand s) {
  switch (s) {
    case SphereIntegrand::volume: return "sphere_volume";
    case SphereIntegrand::scalar: return "total_scalar_curvature";
    case SphereIntegrand::a2_experimental: return "heat_a2_experimental";
  }
  return "";
}

std::string to_string(BallIntegrand b) { return b == BallIntegrand::one ? "one" : "scalar"; }

double unit_ball_volume(int n) { return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0); }

double unit_sphere_area(int n) { return n * unit_ball_volume(n); }

ShiftedHalton::ShiftedHalton(int dim, std::uint64_t seed) : dim_(dim) {
  const auto& primes = first_primes(static_cast<std::size_t>(dim));
  Rng rng(seed);
  for (int d = 0; d < dim; ++d) {
    const int b = primes[static_cast<std::size_t>(d)];
    // Enough digits to reach double resolution in base b.
    const int digits = static_cast<int>(std::ceil(53.0 * std::log(2.0) / std::log(b)));
    std::uniform_int_distribution<int> digit(0, b - 1);
    std::vector<int> s(static_cast<std::size_t>(digits));
    for (int& x : s) x = digit(rng);
    shifts_.push_back(std::move(s));
  }
}

Vec ShiftedHalton::point(std::uint64_t index) const {
  const auto& primes = first_primes(static_cast<std::size_t>(dim_));
  Vec out(dim_);
  for (int d = 0; d < dim_; ++d) {
    const int b = primes[static_cast<std::size_t>(d)];
    const auto& s = shifts_[static_cast<std::size_t>(d)];
    double value = 0.0, scale = 1.0 / b;
    std::uint64_t i = index;
    for (int digit : s) {
      const int a = static_cast<int>(i % static_cast<std::uint64_t>(b));
      i /= static_cast<std::uint64_t>(b);
      value += ((a + digit) % b) * scale;
      scale /= b;
    }
    out(d) = std::clamp(value, 1e-300, std::nextafter(1.0, 0.0));
  }
  return out;
}

namespace {

const ShiftedHalton& halton_for(int dim, std::uint64_t seed) {
  thread_local int cached_dim = -1;
  thread_local std::uint64_t cached_seed = 0;
  thread_local std::unique_ptr<ShiftedHalton> cached;
  if (!cached || cached_dim != dim || cached_seed != seed) {
    cached = std::make_unique<ShiftedHalton>(dim, seed);
    cached_dim = dim;
    cached_seed = seed;
  }
  return *cached;
}

// Gaussian direction and one uniform in (0, 1) for sample s.
std::pair<Vec, double> gaussian_and_uniform(int n, std::int64_t s, const SamplingOptions& options) {
  if (options.method == Sampling::monte_carlo) {
    Rng rng(derive_seed(options.seed, static_cast<std::uint64_t>(s)));
    Vec g = gaussian_vector(rng, n);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return {g, unit(rng)};
  }
  static const boost::math::normal_distribution<double> normal;
  const Vec h = halton_for(n + 1, options.seed).point(static_cast<std::uint64_t>(s) + 1);
  Vec g(n);
  for (int i = 0; i < n; ++i) g(i) = boost::math::quantile(normal, h(i));
  return {g, h(n)};
}

}  // namespace

Vec sphere_sample(int n, std::int64_t s, const SamplingOptions& options) {
  auto [g, unused] = gaussian_and_uniform(n, s, options);
  (void)unused;
  const double r = g.norm();
  if (r == 0.0) return Vec::Unit(n, 0);
  return g / r;
}

Vec ball_sample(int n, std::int64_t s, const SamplingOptions& options) {
  auto [g, t] = gaussian_and_uniform(n, s, options);
  const double r = g.norm();
  if (r == 0.0) return Vec::Zero(n);
  return std::pow(t, 1.0 / n) * g / r;
}

double sphere_density(const AmbientMetric& g, const Eigen::Ref<const Vec>& X) {
  const int n = g.dim();
  // Householder reflection taking X to a multiple of e_0; its other columns
  // are an orthonormal frame of X^⊥.
  Vec v = X;
  v(0) += X(0) >= 0 ? 1.0 : -1.0;
  const Mat H = Mat::Identity(n, n) - 2.0 * v * v.transpose() / v.squaredNorm();
  const Mat E = H.rightCols(n - 1);
  return std::sqrt((E.transpose() * g.metric_at(X) * E).determinant());
}

namespace {

double a2_density(const CurvaturePack& p) {
  const int n = p.n;
  const std::size_t N = static_cast<std::size_t>(n);
  double ric2 = 0.0;
  const Mat ric_up = p.g_inv * p.ricci * p.g_inv;
  ric2 = ric_up.cwiseProduct(p.ricci).sum();
  // |Rm|²: raise all four indices one at a time.
  std::vector<double> cur = p.riemann, next(cur.size());
  for (int slot = 0; slot < 4; ++slot) {
    std::size_t stride = 1;
    for (int s = slot; s < 3; ++s) stride *= N;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t idx = 0; idx < cur.size(); ++idx) {
      const std::size_t a = (idx / stride) % N, base = idx - a * stride;
      for (std::size_t b = 0; b < N; ++b) next[base + b * stride] += p.g_inv(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) * cur[idx];
    }
    std::swap(cur, next);
  }
  double rm2 = 0.0;
  for (std::size_t i = 0; i < cur.size(); ++i) rm2 += cur[i] * p.riemann[i];
  return 5.0 * p.scalar * p.scalar - 2.0 * ric2 + 2.0 * rm2;
}

}  // namespace

std::vector<double> sphere_integrand_samples(const JMap& j, SphereIntegrand what, const SamplingOptions& options,
                                             int* flagged) {
  if (options.samples <= 0) throw std::invalid_argument("sample count must be positive");
  const AmbientMetric g(j);
  const int n = g.dim();
  std::vector<double> values(static_cast<std::size_t>(options.samples));
  std::vector<char> flags(values.size(), 0);
  for_each_index(values.size(), options.exec, [&](std::size_t s) {
    const Vec X = sphere_sample(n, static_cast<std::int64_t>(s), options);
    const double density = sphere_density(g, X);
    if (what == SphereIntegrand::volume) {
      values[s] = density;
      return;
    }
    const SphereChart chart = SphereChart::best_for(X);
    const CurvaturePack pack = curvature_at(g, chart, chart.chart_point(X));
    flags[s] = pack.bianchi_residual() > 1e-5;
    values[s] = density * (what == SphereIntegrand::scalar ? pack.scalar : a2_density(pack));
  });
  if (flagged) {
    *flagged = 0;
    for (char f : flags) *flagged += f;
  }
  return values;
}

namespace {

// Mean and batch-means standard error, accumulated in batch order.
std::pair<double, double> batch_mean(const std::vector<double>& values, int batches) {
  const std::size_t N = values.size();
  const std::size_t B = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(batches), N));
  std::vector<double> means(B, 0.0);
  double total = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    const std::size_t lo = b * N / B, hi = (b + 1) * N / B;
    double sum = 0.0;
    for (std::size_t i = lo; i < hi; ++i) sum += values[i];
    total += sum;
    means[b] = sum / static_cast<double>(hi - lo);
  }
  const double mean = total / static_cast<double>(N);
  if (B < 2) return {mean, 0.0};
  double var = 0.0;
  for (double mb : means) var += (mb - mean) * (mb - mean);
  var /= static_cast<double>(B - 1);
  return {mean, std::sqrt(var / static_cast<double>(B))};
}

}  // namespace

IntegralEstimate estimate_from_samples(const std::vector<double>& values, double scale, const SamplingOptions& options) {
  const auto [mean, se] = batch_mean(values, options.batches);
  IntegralEstimate out;
  out.value = scale * mean;
  out.std_error = std::abs(scale) * se;
  out.n_samples = static_cast<std::int64_t>(values.size());
  out.method = to_string(options.method);
  if (!std::isfinite(out.value)) throw NumericalError("integral estimate is not finite");
  return out;
}

IntegralEstimate ball_volume(const JMap& j, int check_points, std::uint64_t seed) {
  const AmbientMetric g(j);
  Rng rng(seed);
  for (int s = 0; s < check_points; ++s) {
    const double det = g.metric_at(sample_ball_point(rng, g.dim())).determinant();
    if (std::abs(std::sqrt(det) - 1.0) > 1e-12) throw InvariantViolation("sqrt(det G) deviates from 1");
  }
  IntegralEstimate out;
  out.value = unit_ball_volume(g.dim());
  out.method = "exact";
  return out;
}

namespace {

IntegralEstimate sphere_integral(const JMap& j, SphereIntegrand what, const SamplingOptions& options) {
  int flagged = 0;
  const auto values = sphere_integrand_samples(j, what, options, &flagged);
  auto out = estimate_from_samples(values, unit_sphere_area(j.m() + 2 * j.k()), options);
  out.flagged_points = flagged;
  return out;
}

}  // namespace

IntegralEstimate sphere_volume(const JMap& j, const SamplingOptions& options) {
  return sphere_integral(j, SphereIntegrand::volume, options);
}

IntegralEstimate boundary_area(const JMap& j, const SamplingOptions& options) { return sphere_volume(j, options); }

IntegralEstimate total_scalar_curvature(const JMap& j, const SamplingOptions& options) {
  return sphere_integral(j, SphereIntegrand::scalar, options);
}

IntegralEstimate heat_a2_experimental(const JMap& j, const SamplingOptions& options) {
  return sphere_integral(j, SphereIntegrand::a2_experimental, options);
}

namespace {

double ball_integrand(const AmbientMetric& g, BallIntegrand what, const Vec& point) {
  if (what == BallIntegrand::one) return 1.0;
  return curvature_at(g, point).scalar;
}

void check_torus_invariance(const AmbientMetric& g, BallIntegrand what, const SamplingOptions& options) {
  const int n = g.dim(), k = g.k();
  Rng rng(derive_seed(options.seed, 0x7041u));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < 8; ++s) {
    const Vec p = sample_ball_point(rng, n);
    Vec zbar(k);
    for (int i = 0; i < k; ++i) zbar(i) = unit(rng);
    const double a = ball_integrand(g, what, p), b = ball_integrand(g, what, torus_action(zbar, p, g.m()));
    if (std::abs(a - b) > 1e-10 * std::max(1.0, std::abs(a)))
      throw InvariantViolation("integrand is not invariant under the torus action");
  }
}

}  // namespace

IntegralEstimate symmetry_reduced_integrate(const JMap& j, BallIntegrand what, const SamplingOptions& options) {
  if (options.samples <= 0) throw std::invalid_argument("sample count must be positive");
  const AmbientMetric g(j);
  const int m = g.m(), k = g.k(), d = m + k;
  check_torus_invariance(g, what, options);
  std::vector<double> values(static_cast<std::size_t>(options.samples));
  for_each_index(values.size(), options.exec, [&](std::size_t s) {
    const Vec y = ball_sample(d, static_cast<std::int64_t>(s), options);
    Vec point = Vec::Zero(m + 2 * k);
    point.head(m) = y.head(m);
    double weight = 1.0;
    for (int i = 0; i < k; ++i) {
      const double r = std::abs(y(m + i));
      point(m + 2 * i) = r;
      weight *= r;
    }
    values[s] = weight * ball_integrand(g, what, point);
  });
  const double scale = unit_ball_volume(d) / std::pow(2.0, k) * std::pow(2.0 * std::numbers::pi, k);
  return estimate_from_samples(values, scale, options);
}

IntegralEstimate full_ball_integrate(const JMap& j, BallIntegrand what, const SamplingOptions& options) {
  if (options.samples <= 0) throw std::invalid_argument("sample count must be positive");
  const AmbientMetric g(j);
  const int n = g.dim();
  std::vector<double> values(static_cast<std::size_t>(options.samples));
  for_each_index(values.size(), options.exec, [&](std::size_t s) {
    values[s] = ball_integrand(g, what, ball_sample(n, static_cast<std::int64_t>(s), options));
  });
  return estimate_from_samples(values, unit_ball_volume(n), options);
}

PairedComparison compare_samples(const std::string& invariant, const std::vector<double>& a,
                                 const std::vector<double>& b, double scale, const SamplingOptions& options) {
  if (a.size() != b.size()) throw DimensionError("compare_samples: sample counts differ");
  PairedComparison out;
  out.invariant = invariant;
  out.a = estimate_from_samples(a, scale, options);
  out.b = estimate_from_samples(b, scale, options);
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const auto d = estimate_from_samples(diff, scale, options);
  out.difference = out.a.value - out.b.value;
  // The volume integrand is identically 1, so its spread is pure rounding;
  // floor the error at that level.
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(out.a.value), std::abs(out.b.value));
  out.std_error = std::max(d.std_error, floor);
  out.sigma_multiple = std::abs(out.difference) / out.std_error;
  return out;
}

PairedComparison paired_compare(const JMap& j1, const JMap& j2, SphereIntegrand what, const SamplingOptions& options) {
  const auto a = sphere_integrand_samples(j1, what, options);
  const auto b = sphere_integrand_samples(j2, what, options);
  return compare_samples(to_string(what), a, b, unit_sphere_area(j1.m() + 2 * j1.k()), options);
}

}  // namespace isodeform
