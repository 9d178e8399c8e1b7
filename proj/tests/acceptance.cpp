// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include "isodeform/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace isodeform;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 42;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

const JMap& seed_map() {
  static const JMap j = deformable_generic_jmap(5, 2, kSeed).j;
  return j;
}

const IsospectralFamily& family() {
  static const IsospectralFamily fam = [] {
    FamilyOptions options;
    options.seed = kSeed;
    return build_family(seed_map(), 5, 5e-3, options);
  }();
  return fam;
}

Vec principal_point(Rng& rng, int m, int k) {
  for (;;) {
    Vec p = sample_ball_point(rng, m + 2 * k);
    if (on_principal_orbit(p, m, 1e-2)) return p;
  }
}

Outcome tangent_excess() {
  std::ostringstream d;
  bool pass = true;
  for (const auto& [m, bound] : {std::pair{5, 2}, std::pair{7, 6}}) {
    int worst = 1 << 30;
    for (std::uint64_t seed : {std::uint64_t{1}, std::uint64_t{2}, std::uint64_t{3}, kSeed}) {
      const JMap j = random_generic_jmap(m, 2, seed).j;
      worst = std::min(worst, isospectral_tangents(j).report.excess);
    }
    pass = pass && worst >= bound && deformation_parameter_bound(m) == bound;
    d << "m=" << m << " min excess " << worst << " (bound " << bound << ") ";
  }
  return {pass, d.str()};
}

Outcome certified_family() {
  const auto& fam = family();
  double dev = 0.0;
  for (const JMap& j : fam.members) dev = std::max(dev, isospectral(fam.members.front(), j).max_deviation);
  const double floor = equivalence_search(fam.members.back(), fam.members.front(), 50, kSeed).residual;
  const bool pass = fam.members.size() == 6 && fam.diagnostic.empty() && dev <= 1e-10 && floor >= 1e-3;
  return {pass, std::to_string(fam.members.size()) + " members, power-trace deviation " + sci(dev) +
                    ", endpoint floor " + sci(floor) + " over 50 restarts"};
}

Outcome hypothesis_suite() {
  const auto& members = family().members;
  const auto directions = default_directions(2);
  SuiteConfig config;
  config.seed = kSeed;
  const HypothesisReport report = run_hypothesis_suite(members, directions, config);
  double bracket = 0, tau = 0, mc = 0;
  for (const auto& r : report.records) {
    bracket = std::max(bracket, r.bracket_residual);
    tau = std::max(tau, r.tau_residual);
    mc = std::max(mc, r.mean_curvature_residual);
  }
  std::vector<JMap> bad = members;
  bad[3] = perturb_jmap(members[3], 1e-3, kSeed);
  const HypothesisReport control = run_hypothesis_suite(bad, directions, config);
  const auto failing = control.failing_pairs();
  const bool flagged = std::find(failing.begin(), failing.end(), std::pair{2, 3}) != failing.end() &&
                       std::find(failing.begin(), failing.end(), std::pair{3, 4}) != failing.end();
  const bool pass = directions.size() >= 4 && report.pass && bracket <= 1e-10 && tau <= 1e-12 && mc <= 1e-8 &&
                    !control.pass && flagged;
  return {pass, std::to_string(directions.size()) + " directions, bracket " + sci(bracket) + ", tau " + sci(tau) +
                    ", mean curvature " + sci(mc) + ", control " + (control.pass ? "accepted" : "rejected") + " (" +
                    std::to_string(failing.size()) + " failing pairs)"};
}

Outcome fibers_and_orbits() {
  const auto& members = family().members;
  Rng rng(kSeed);
  double fiber = 0.0;
  for (const JMap& j : members)
    for (int s = 0; s < 100; ++s) {
      const Vec p = principal_point(rng, 5, 2);
      fiber = std::max(fiber, fiber_second_fundamental_form(j, p.head(5), p.tail(4)));
    }
  double orbit = 0.0;
  const Mat basis = Mat::Identity(2, 2);
  for (int s = 0; s < 100; ++s) {
    const Vec p = principal_point(rng, 5, 2);
    const Vec h0 = orbit_mean_curvature(members.front(), basis, p).vector;
    const Vec h1 = orbit_mean_curvature(members.back(), basis, p).vector;
    orbit = std::max(orbit, (h0 - h1).cwiseAbs().maxCoeff());
  }
  return {fiber <= 1e-8 && orbit <= 1e-8, "fiber II " + sci(fiber) + ", orbit mean curvature difference " + sci(orbit)};
}

Outcome flat_and_round() {
  const JMap zero = JMap::zero(5, 2);
  const AmbientMetric g(zero);
  Rng rng(kSeed);
  double ambient = 0.0, sphere = 0.0;
  for (int s = 0; s < 100; ++s) {
    const CurvaturePack pack = curvature_at(g, sample_ball_point(rng, 9));
    ambient = std::max(ambient, pack.max_abs_riemann());
    const Vec X = sample_sphere_point(rng, 9);
    const SphereChart chart = SphereChart::best_for(X);
    const CurvaturePack sp = curvature_at(g, chart, chart.chart_point(X));
    for (int t = 0; t < 8; ++t) {
      const Vec a = gaussian_vector(rng, 8), b = gaussian_vector(rng, 8);
      sphere = std::max(sphere, std::abs(sectional(sp, a, b) - 1.0));
    }
  }
  const double closed = unit_ball_volume(9);
  const IntegralEstimate v0 = ball_volume(zero, 10000, kSeed);
  const IntegralEstimate v1 = ball_volume(family().members.back(), 10000, kSeed);
  const bool pass = ambient <= 1e-12 && sphere <= 1e-9 && v0.value == closed && v1.value == closed;
  return {pass, "flat |R| " + sci(ambient) + ", round |K-1| " + sci(sphere) + ", ball volume " +
                    std::to_string(v1.value) + " = 32pi^4/945, det G = 1 at 1e4 points"};
}

Outcome heat_invariants(const Json& inv) {
  const Json& v = inv.at("sphere_volume");
  const Json& s = inv.at("total_scalar_curvature");
  const Json& c = inv.at("control_j_vs_2j");
  const bool pass = inv.at("pass").get<bool>() &&
                    v.at("a").at("n_samples").get<std::int64_t>() == (1 << 20) &&
                    s.at("a").at("n_samples").get<std::int64_t>() == (1 << 18) &&
                    std::abs(v.at("sigma_multiple").get<double>()) <= 3 &&
                    v.at("relative_sigma").get<double>() <= 1e-3 &&
                    std::abs(s.at("sigma_multiple").get<double>()) <= 3 &&
                    s.at("relative_sigma").get<double>() <= 5e-3 &&
                    std::abs(c.at("sigma_multiple").get<double>()) > 10;
  std::ostringstream d;
  d << "volume " << sci(v.at("sigma_multiple").get<double>()) << " sigma (rel sigma "
    << sci(v.at("relative_sigma").get<double>()) << "), scalar " << sci(s.at("sigma_multiple").get<double>())
    << " sigma (rel sigma " << sci(s.at("relative_sigma").get<double>()) << "), j vs 2j "
    << sci(c.at("sigma_multiple").get<double>()) << " sigma";
  return {pass, d.str()};
}

Outcome curvature_convergence() {
  const std::vector<double> cs{1.0, 0.5, 0.25, 0.125};
  ScanOptions options;
  options.seed = kSeed;
  bool pass = true;
  std::ostringstream d;
  for (Surface surface : {Surface::ball, Surface::sphere}) {
    const auto rows = curvature_scan(seed_map(), cs, surface, options);
    for (std::size_t i = 1; i < rows.size(); ++i) pass = pass && rows[i].sup_stat <= rows[i - 1].sup_stat;
    const double r2 = rows[2].sup_stat / rows[1].sup_stat, r3 = rows[3].sup_stat / rows[2].sup_stat;
    pass = pass && r2 <= 0.6 && r3 <= 0.6;
    d << to_string(surface) << " sup " << sci(rows[0].sup_stat) << " -> " << sci(rows[3].sup_stat) << " (ratios "
      << sci(r2) << ", " << sci(r3) << ") ";
  }
  return {pass, d.str()};
}

double relative_max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(a[i]));
  }
  return diff / scale;
}

Outcome kernel_cross_checks() {
  const JMap& j = seed_map();
  const AmbientMetric g(j);
  Rng rng(kSeed);
  double christoffel = 0.0, symmetry = 0.0, bianchi = 0.0, trace = 0.0;
  LeafSpec leaf{Vec(2)};
  leaf.a << 0.4, 0.5;
  for (int s = 0; s < 100; ++s) {
    const Vec p = sample_ball_point(rng, 9);
    const Mat g_inv = g.inverse_metric_at(p);
    const auto exact = christoffel_symbols(ambient_jet(g, p, 1), g_inv);
    const auto fd = christoffel_symbols(
        finite_difference_jet([&](const Vec& q) { return g.metric_at(q); }, p), g_inv);
    christoffel = std::max(christoffel, relative_max_diff(exact, fd));

    const Vec X = sample_sphere_point(rng, 9);
    const SphereChart chart = SphereChart::best_for(X);
    const Vec x = gaussian_vector(rng, 5) * 0.5, z = gaussian_vector(rng, 2);
    for (const CurvaturePack& pack :
         {curvature_at(g, p), curvature_at(g, chart, chart.chart_point(X)), curvature_at(j, leaf, x, z)}) {
      symmetry = std::max(symmetry, pack.symmetry_residual());
      bianchi = std::max(bianchi, pack.bianchi_residual());
    }

    const Vec w = gaussian_vector(rng, 2);
    const Mat M = j(w);
    Mat P = Mat::Identity(5, 5);
    for (int r = 1; r <= 2; ++r) {
      P = P * M * M;
      const double direct = P.trace();
      trace = std::max(trace, std::abs(power_trace_form(j, r)(w) - direct) / std::abs(direct));
    }
  }
  const bool pass = christoffel <= 1e-6 && trace <= 1e-10 && symmetry <= 1e-7 && bianchi <= 1e-7;
  return {pass, "Christoffel vs FD " + sci(christoffel) + ", power trace " + sci(trace) + ", symmetries " +
                    sci(symmetry) + ", Bianchi " + sci(bianchi)};
}

Outcome structural_isometries() {
  const JMap& j = seed_map();
  const double bundle = bundle_isometry_check(j, 100, kSeed);
  const AmbientMetric g(j);
  Rng rng(kSeed);
  double leaf_err = 0.0, scale_err = 0.0;
  const double c = 1.7;
  for (int s = 0; s < 100; ++s) {
    LeafSpec leaf{(Vec(2) << 0.2 + 0.5 * std::uniform_real_distribution<>(0, 1)(rng), 0.3).finished()};
    const Vec x = gaussian_vector(rng, 5) * 0.4;
    const Vec z = gaussian_vector(rng, 2) * 3.0;
    const Vec u0 = leaf_base_fiber_point(leaf);
    const Mat E = leaf_embedding_jacobian(5, z, u0);
    const Mat pulled = E.transpose() * g.metric_at(leaf_embedding(x, z, u0)) * E;
    leaf_err = std::max(leaf_err, (pulled - leaf_metric_at(j, leaf, x, z)).cwiseAbs().maxCoeff());

    // mu(x, z) = (x, c z) from (G_B, g_{c²h}) to (G_{cB}, g_h).
    Mat D = Mat::Identity(7, 7);
    D.bottomRightCorner(2, 2) *= c;
    const Mat mu_pull = D.transpose() * leaf_metric_at(j.scaled(c), leaf, x, c * z) * D;
    const LeafSpec wide{c * leaf.a};
    scale_err = std::max(scale_err, (mu_pull - leaf_metric_at(j, wide, x, z)).cwiseAbs().maxCoeff());
  }
  const bool pass = bundle <= 1e-10 && leaf_err <= 1e-11 && scale_err <= 1e-11;
  return {pass, "bundle " + sci(bundle) + ", leaf " + sci(leaf_err) + ", scaling " + sci(scale_err) + " at 100 points"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool run_chain(const RunConfig& config, std::ostream& log) {
  bool ok = true;
  for (const char* cmd : {"gen", "deform", "verify", "invariants", "curvature", "report"})
    ok = run_command(cmd, config, log, log) == exit_pass && ok;
  return ok;
}

Outcome determinism() {
  RunConfig config;
  config.samples.certify_restarts = 4;
  config.samples.evidence_restarts = 8;
  config.samples.suite = 20;
  config.samples.fiber = 20;
  config.samples.volume = 1 << 12;
  config.samples.scalar = 1 << 11;
  config.samples.scan_points = 32;
  config.samples.scan_planes = 16;
  std::ostringstream sink;
  config.out_dir = "acceptance_repeat_a";
  fs::remove_all(config.out_dir);
  const bool ok_a = run_chain(config, sink);
  config.out_dir = "acceptance_repeat_b";
  fs::remove_all(config.out_dir);
  const bool ok_b = run_chain(config, sink);
  int compared = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator("acceptance_repeat_a")) {
    ++compared;
    if (slurp(entry.path()) != slurp(fs::path("acceptance_repeat_b") / entry.path().filename())) ++differing;
  }
  return {ok_a && ok_b && compared == 8 && differing == 0,
          std::to_string(compared) + " files compared, " + std::to_string(differing) + " differ"};
}

}  // namespace

int main() {
  // The default chain is the end-to-end run; its invariants report carries
  // the paired heat-invariant comparison.
  RunConfig defaults;
  defaults.out_dir = "acceptance_default";
  fs::remove_all(defaults.out_dir);
  std::ostringstream chain_log;
  const auto t0 = std::chrono::steady_clock::now();
  const bool chain_ok = run_chain(defaults, chain_log);
  const double chain_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << chain_log.str();
  std::printf("default chain: %s (%.1f s)\n", chain_ok ? "PASS" : "FAIL", chain_seconds);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"tangent excess", tangent_excess},
      {"certified isospectral family", certified_family},
      {"hypothesis suite", hypothesis_suite},
      {"fibers and orbit mean curvature", fibers_and_orbits},
      {"flat and round baselines", flat_and_round},
      {"heat invariants",
       [&] { return heat_invariants(read_sealed(defaults.out_dir / kInvariantsFile)); }},
      {"curvature convergence", curvature_convergence},
      {"numerical kernel cross-checks", kernel_cross_checks},
      {"structural isometries", structural_isometries},
      {"determinism", determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("criterion %2zu %s  %s: %s (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 && chain_ok ? 0 : 1;
}
