#include "isodeform/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef ISODEFORM_VERSION
#define ISODEFORM_VERSION "unknown"
#endif

namespace isodeform {

std::string version_string() { return "isodeform " ISODEFORM_VERSION; }

void Tolerances::set(const std::string& name, double value) {
  if (!(value > 0.0)) throw std::invalid_argument("tolerance " + name + " must be positive");
  static const std::map<std::string, double Tolerances::*> fields = {
      {"iso", &Tolerances::iso},
      {"rho", &Tolerances::rho},
      {"bracket", &Tolerances::bracket},
      {"tau", &Tolerances::tau},
      {"mean_curvature", &Tolerances::mean_curvature},
      {"quotient", &Tolerances::quotient},
      {"fiber", &Tolerances::fiber},
      {"orbit", &Tolerances::orbit},
      {"sigma", &Tolerances::sigma},
      {"control_sigma", &Tolerances::control_sigma},
      {"volume_rel_sigma", &Tolerances::volume_rel_sigma},
      {"scalar_rel_sigma", &Tolerances::scalar_rel_sigma},
      {"scan_ratio", &Tolerances::scan_ratio},
  };
  const auto it = fields.find(name);
  if (it == fields.end()) throw std::invalid_argument("unknown tolerance name '" + name + "'");
  this->*(it->second) = value;
}

Json Tolerances::to_json() const {
  return {{"iso", iso},
          {"rho", rho},
          {"bracket", bracket},
          {"tau", tau},
          {"mean_curvature", mean_curvature},
          {"quotient", quotient},
          {"fiber", fiber},
          {"orbit", orbit},
          {"sigma", sigma},
          {"control_sigma", control_sigma},
          {"volume_rel_sigma", volume_rel_sigma},
          {"scalar_rel_sigma", scalar_rel_sigma},
          {"scan_ratio", scan_ratio}};
}

void RunConfig::validate() const {
  if (m < 2) throw std::invalid_argument("m must be at least 2");
  if (k < 1) throw std::invalid_argument("k must be at least 1");
  if (steps < 0) throw std::invalid_argument("steps must be nonnegative");
  if (!(h > 0.0)) throw std::invalid_argument("h must be positive");
  if (!(control_eps > 0.0)) throw std::invalid_argument("control_eps must be positive");
  if (c_list.empty()) throw std::invalid_argument("c_list must not be empty");
  for (double c : c_list)
    if (!(c > 0.0)) throw std::invalid_argument("c_list entries must be positive");
  const SampleCounts& s = samples;
  if (s.metric_csv < 0 || s.certify_restarts < 1 || s.suite < 1 || s.fiber < 1 || s.evidence_restarts < 1 ||
      s.volume < 2 || s.scalar < 2 || s.scan_points < 1 || s.scan_planes < 1)
    throw std::invalid_argument("sample counts must be positive");
  const Json t = tol.to_json();
  for (const auto& [name, value] : t.items())
    if (!(value.get<double>() > 0.0)) throw std::invalid_argument("tolerance " + name + " must be positive");
}

std::vector<std::string> RunConfig::warnings() const {
  std::vector<std::string> out;
  if (!deformation_bound_applies(m))
    out.push_back("m=" + std::to_string(m) +
                  " is in the excluded set {1,2,3,4,6}; the deformation-count bound does not apply");
  if (k < 2) out.push_back("k=" + std::to_string(k) + " < 2: the only codimension-one subtorus is trivial");
  return out;
}

Json RunConfig::to_json() const {
  return {{"m", m},
          {"k", k},
          {"seed", seed},
          {"steps", steps},
          {"h", h},
          {"c_list", c_list},
          {"control_eps", control_eps},
          {"sampling", to_string(sampling)},
          {"samples",
           {{"metric_csv", samples.metric_csv},
            {"certify_restarts", samples.certify_restarts},
            {"suite", samples.suite},
            {"fiber", samples.fiber},
            {"evidence_restarts", samples.evidence_restarts},
            {"volume", samples.volume},
            {"scalar", samples.scalar},
            {"scan_points", samples.scan_points},
            {"scan_planes", samples.scan_planes}}},
          {"tol", tol.to_json()}};
}

void RunConfig::merge(const Json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "m") m = value.get<int>();
      else if (key == "k") k = value.get<int>();
      else if (key == "seed") seed = value.get<std::uint64_t>();
      else if (key == "steps") steps = value.get<int>();
      else if (key == "h") h = value.get<double>();
      else if (key == "c_list") c_list = value.get<std::vector<double>>();
      else if (key == "control_eps") control_eps = value.get<double>();
      else if (key == "sampling") sampling = sampling_from_string(value.get<std::string>());
      else if (key == "out") out_dir = value.get<std::string>();
      else if (key == "tol") {
        for (const auto& [name, v] : value.items()) tol.set(name, v.get<double>());
      } else if (key == "samples") {
        for (const auto& [name, v] : value.items()) {
          if (name == "metric_csv") samples.metric_csv = v.get<int>();
          else if (name == "certify_restarts") samples.certify_restarts = v.get<int>();
          else if (name == "suite") samples.suite = v.get<int>();
          else if (name == "fiber") samples.fiber = v.get<int>();
          else if (name == "evidence_restarts") samples.evidence_restarts = v.get<int>();
          else if (name == "volume") samples.volume = v.get<std::int64_t>();
          else if (name == "scalar") samples.scalar = v.get<std::int64_t>();
          else if (name == "scan_points") samples.scan_points = v.get<int>();
          else if (name == "scan_planes") samples.scan_planes = v.get<int>();
          else throw std::invalid_argument("unknown samples field '" + name + "'");
        }
      } else {
        throw std::invalid_argument("unknown config field '" + key + "'");
      }
    }
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

void write_sealed(const std::filesystem::path& path, Json j) {
  j.erase("content_hash");
  j["content_hash"] = json_hash(j);
  write_json_file(path, j);
}

Json read_sealed(const std::filesystem::path& path) {
  Json j = read_json_file(path);
  if (!j.is_object() || !j.contains("content_hash") || !j["content_hash"].is_string())
    throw ArtifactError(path.string() + ": missing content_hash");
  Json body = j;
  body.erase("content_hash");
  const std::string stored = j["content_hash"].get<std::string>();
  if (json_hash(body) != stored) throw ArtifactError(path.string() + ": content hash mismatch, refusing tampered file");
  return j;
}

namespace {

Json header(const RunConfig& config, const std::string& command) {
  return {{"command", command}, {"version", version_string()}, {"config", config.to_json()}, {"config_hash", config.hash()}};
}

std::filesystem::path out_path(const RunConfig& config, const char* name) { return config.out_dir / name; }

/// Upstream artifact, checked against the current config. A family built
/// under a different (m, k) or seed is an inconsistent upstream.
Json read_upstream(const RunConfig& config, const char* name) {
  Json j = read_sealed(out_path(config, name));
  const Json& up = j.at("config");
  if (up.at("m") != config.m || up.at("k") != config.k)
    throw ArtifactError(std::string(name) + ": built for a different (m, k)");
  return j;
}

struct Upstream {
  IsospectralFamily family;
  std::string hash;
};

Upstream load_family(const RunConfig& config) {
  const Json j = read_upstream(config, kFamilyFile);
  return {family_from_json(j.at("family")), j.at("content_hash").get<std::string>()};
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

Vec principal_ball_point(Rng& rng, int m, int k) {
  for (;;) {
    Vec p = sample_ball_point(rng, m + 2 * k);
    if (on_principal_orbit(p, m, 1e-2)) return p;
  }
}

}  // namespace

CommandResult cmd_gen(const RunConfig& config, std::ostream& log) {
  const bool bound_applies = deformation_bound_applies(config.m) && config.k == 2;
  log << "gen: m=" << config.m << " k=" << config.k << "\n";
  if (!bound_applies) log << "  excess bound: not applicable (m in {1,2,3,4,6} or k != 2)\n";
  // A deformable seed only exists where the bound is positive.
  std::optional<GenericSample> drawn;
  try {
    drawn = bound_applies ? deformable_generic_jmap(config.m, config.k, config.seed)
                          : random_generic_jmap(config.m, config.k, config.seed);
  } catch (const NumericalError& e) {
    log << "  " << e.what() << "\n";
    Json report = header(config, "gen");
    report["error"] = e.what();
    report["pass"] = false;
    return {false, report};
  }
  const GenericSample& sample = *drawn;
  const TangentSpace tangents = isospectral_tangents(sample.j);
  const int commutant = genericity_test(sample.j);
  const int bound = deformation_parameter_bound(config.m);
  const bool pass = commutant == 0 && (!bound_applies || tangents.report.excess >= bound);

  Json report = header(config, "gen");
  report["jmap"] = to_json(sample.j);
  report["accepted_seed"] = sample.accepted_seed;
  report["attempts"] = sample.attempts;
  report["commutant_dim"] = commutant;
  report["tangent"] = to_json(tangents.report);
  report["excess_bound"] = bound_applies ? Json(bound) : Json(nullptr);
  report["excess_bound_note"] =
      bound_applies ? "m(m-1)/2 - [m/2]([m/2]+2) for k = 2"
                    : "bound not claimed for m in {1,2,3,4,6} or k != 2";
  report["pass"] = pass;
  write_sealed(out_path(config, kJmapFile), report);

  std::ofstream csv(out_path(config, kMetricCsv), std::ios::binary);
  if (!csv) throw ArtifactError("cannot write " + out_path(config, kMetricCsv).string());
  write_metric_samples_csv(csv, AmbientMetric(sample.j), config.samples.metric_csv, config.seed);

  log << "  accepted seed " << sample.accepted_seed << " after " << sample.attempts << " attempt(s)\n";
  log << "  commutant dim " << commutant << ", isospectral tangents " << tangents.report.iso_dim << ", orbit "
      << tangents.report.orbit_dim << ", excess " << tangents.report.excess << "\n";
  if (bound_applies) log << "  excess bound " << bound << ": " << verdict(tangents.report.excess >= bound) << "\n";
  return {pass, report};
}

CommandResult cmd_deform(const RunConfig& config, std::ostream& log) {
  const Json gen = read_upstream(config, kJmapFile);
  const JMap j0 = jmap_from_json(gen.at("jmap"));

  FamilyOptions options;
  options.seed = config.seed;
  options.certify_restarts = config.samples.certify_restarts;
  options.iso_tol = config.tol.iso;
  const IsospectralFamily family = build_family(j0, config.steps, config.h, options);

  double worst_iso = 0.0;
  for (const Certificate& c : family.certificates) worst_iso = std::max(worst_iso, c.isospectral_residual);
  const double floor = family.certificates.back().inequivalence_residual;
  const bool complete = static_cast<int>(family.members.size()) == config.steps + 1 && family.diagnostic.empty();
  const bool pass = complete && worst_iso <= config.tol.iso && (config.steps == 0 || floor >= config.tol.rho);

  Json report = header(config, "deform");
  report["upstream"] = {{kJmapFile, gen.at("content_hash")}};
  report["family"] = to_json(family);
  report["max_isospectral_residual"] = worst_iso;
  report["endpoint_inequivalence_floor"] = floor;
  report["pass"] = pass;
  write_sealed(out_path(config, kFamilyFile), report);

  log << "deform: " << family.members.size() << " member(s), h=" << config.h << "\n";
  log << "  max power-trace deviation " << fmt(worst_iso) << " (tol " << fmt(config.tol.iso) << ")\n";
  log << "  endpoint equivalence floor " << fmt(floor) << " over " << config.samples.certify_restarts
      << " restarts\n";
  if (!family.diagnostic.empty()) log << "  truncated: " << family.diagnostic << "\n";
  return {pass, report};
}

CommandResult cmd_verify(const RunConfig& config, std::ostream& log) {
  const Upstream up = load_family(config);
  const auto& members = up.family.members;
  const JMap& j0 = members.front();
  const JMap& jend = members.back();
  const auto directions = default_directions(config.k);

  SuiteConfig suite;
  suite.samples = config.samples.suite;
  suite.seed = config.seed;
  suite.tol = {config.tol.bracket, config.tol.tau, config.tol.mean_curvature, config.tol.quotient};
  const HypothesisReport hypotheses = run_hypothesis_suite(members, directions, suite);

  // The endpoint is replaced by a perturbed map; the suite has to reject it.
  std::vector<JMap> perturbed = members;
  perturbed.back() = perturb_jmap(jend, config.control_eps, derive_seed(config.seed, 0x6e6567));
  const HypothesisReport control =
      members.size() > 1 ? run_hypothesis_suite(perturbed, directions, suite) : HypothesisReport{};
  const bool control_rejected = members.size() <= 1 || !control.pass;

  // Fibers are totally geodesic for every member.
  std::vector<double> fiber(members.size(), 0.0);
  const int m = config.m, k = config.k;
  for_each_index(members.size(), Exec::parallel, [&](std::size_t i) {
    Rng rng(derive_seed(config.seed, 0x666962 + i));
    for (int s = 0; s < config.samples.fiber; ++s) {
      const Vec p = principal_ball_point(rng, m, k);
      fiber[i] = std::max(fiber[i], fiber_second_fundamental_form(members[i], p.head(m), p.tail(2 * k)));
    }
  });
  const double fiber_worst = *std::max_element(fiber.begin(), fiber.end());

  // Full-torus orbit mean curvature at matched points.
  double orbit_worst = 0.0;
  {
    Rng rng(derive_seed(config.seed, 0x6f7262));
    const Mat basis = Mat::Identity(k, k);
    for (int s = 0; s < config.samples.fiber; ++s) {
      const Vec p = principal_ball_point(rng, m, k);
      const Vec h0 = orbit_mean_curvature(j0, basis, p).vector;
      const Vec h1 = orbit_mean_curvature(jend, basis, p).vector;
      orbit_worst = std::max(orbit_worst, (h0 - h1).cwiseAbs().maxCoeff());
    }
  }

  EvidenceRecord evidence;
  bool evidence_pass = true;
  if (members.size() > 1) {
    EvidenceConfig ec;
    ec.restarts = config.samples.evidence_restarts;
    ec.seed = config.seed;
    ec.rho = config.tol.rho;
    evidence = non_isometry_evidence(j0, jend, ec);
    evidence_pass = evidence.verdict.rfind("not isometric", 0) == 0;
  }

  const bool fiber_pass = fiber_worst <= config.tol.fiber;
  const bool orbit_pass = orbit_worst <= config.tol.orbit;
  const bool pass = hypotheses.pass && control_rejected && fiber_pass && orbit_pass && evidence_pass;

  Json report = header(config, "verify");
  report["upstream"] = {{kFamilyFile, up.hash}};
  report["directions"] = Json::array();
  for (const auto& d : directions) report["directions"].push_back(d.label());
  report["hypotheses"] = to_json(hypotheses);
  report["negative_control"] = {{"eps", config.control_eps},
                                {"replaced_member", members.size() - 1},
                                {"suite_pass", members.size() > 1 ? Json(control.pass) : Json(nullptr)},
                                {"failing_pairs", members.size() > 1 ? to_json(control)["failing_pairs"] : Json::array()},
                                {"rejected", control_rejected}};
  report["fiber_second_fundamental_form"] = {
      {"per_member", fiber}, {"max", fiber_worst}, {"points", config.samples.fiber}, {"pass", fiber_pass}};
  report["orbit_mean_curvature"] = {
      {"max_difference", orbit_worst}, {"points", config.samples.fiber}, {"pass", orbit_pass}};
  report["non_isometry_evidence"] = members.size() > 1 ? to_json(evidence) : Json(nullptr);
  report["pass"] = pass;
  write_sealed(out_path(config, kVerifyFile), report);

  double bracket = 0, tau = 0, mc = 0;
  for (const auto& r : hypotheses.records) {
    bracket = std::max(bracket, r.bracket_residual);
    tau = std::max(tau, r.tau_residual);
    mc = std::max(mc, r.mean_curvature_residual);
  }
  log << "verify: " << directions.size() << " direction(s) plus K=T, " << hypotheses.records.size() << " checks\n";
  log << "  bracket " << fmt(bracket) << ", tau " << fmt(tau) << ", mean curvature " << fmt(mc) << ": "
      << verdict(hypotheses.pass) << "\n";
  log << "  negative control (eps " << config.control_eps << "): "
      << (control_rejected ? "rejected" : "NOT rejected") << "\n";
  log << "  fiber II " << fmt(fiber_worst) << ": " << verdict(fiber_pass) << "; orbit mean curvature "
      << fmt(orbit_worst) << ": " << verdict(orbit_pass) << "\n";
  if (members.size() > 1)
    log << "  evidence: floor " << fmt(evidence.equivalence_floor) << ", trace words "
        << fmt(evidence.trace_word_separation) << ", " << evidence.verdict << "\n";
  return {pass, report};
}

CommandResult cmd_invariants(const RunConfig& config, std::ostream& log) {
  const Upstream up = load_family(config);
  const JMap& j0 = up.family.members.front();
  const JMap& jend = up.family.members.back();
  const int n = config.m + 2 * config.k;

  const IntegralEstimate ball0 = ball_volume(j0, 10000, config.seed);
  const IntegralEstimate ball1 = ball_volume(jend, 10000, config.seed);
  const double closed_form = unit_ball_volume(n);
  const bool ball_pass = ball0.value == closed_form && ball1.value == closed_form;

  SamplingOptions vol;
  vol.samples = config.samples.volume;
  vol.seed = config.seed;
  vol.method = config.sampling;
  const PairedComparison volume = paired_compare(j0, jend, SphereIntegrand::volume, vol);

  SamplingOptions sc = vol;
  sc.samples = config.samples.scalar;
  const double area = unit_sphere_area(n);
  int flagged0 = 0, flagged1 = 0, flagged2 = 0;
  const auto s0 = sphere_integrand_samples(j0, SphereIntegrand::scalar, sc, &flagged0);
  const auto s1 = sphere_integrand_samples(jend, SphereIntegrand::scalar, sc, &flagged1);
  const auto s2 = sphere_integrand_samples(j0.scaled(2.0), SphereIntegrand::scalar, sc, &flagged2);
  PairedComparison scalar = compare_samples(to_string(SphereIntegrand::scalar), s0, s1, area, sc);
  PairedComparison control = compare_samples(to_string(SphereIntegrand::scalar) + " (j vs 2j)", s0, s2, area, sc);
  scalar.a.flagged_points = control.a.flagged_points = flagged0;
  scalar.b.flagged_points = flagged1;
  control.b.flagged_points = flagged2;

  auto rel = [](const PairedComparison& p) { return p.std_error / std::abs(p.a.value); };
  const bool volume_pass = volume.within(config.tol.sigma) && rel(volume) <= config.tol.volume_rel_sigma;
  const bool scalar_pass = scalar.within(config.tol.sigma) && rel(scalar) <= config.tol.scalar_rel_sigma;
  const bool control_pass = std::abs(control.sigma_multiple) > config.tol.control_sigma;
  const bool pass = ball_pass && volume_pass && scalar_pass && control_pass;

  Json report = header(config, "invariants");
  report["upstream"] = {{kFamilyFile, up.hash}};
  report["ball_volume"] = {{"closed_form", closed_form},
                           {"first", to_json(ball0)},
                           {"last", to_json(ball1)},
                           {"pass", ball_pass}};
  Json v = to_json(volume);
  v["relative_sigma"] = rel(volume);
  v["pass"] = volume_pass;
  Json s = to_json(scalar);
  s["relative_sigma"] = rel(scalar);
  s["pass"] = scalar_pass;
  Json c = to_json(control);
  c["pass"] = control_pass;
  report["sphere_volume"] = v;
  report["total_scalar_curvature"] = s;
  report["control_j_vs_2j"] = c;
  report["pass"] = pass;
  write_sealed(out_path(config, kInvariantsFile), report);

  log << "invariants: D^" << n << " volume " << closed_form << " (exact): " << verdict(ball_pass) << "\n";
  log << "  sphere volume diff " << fmt(volume.difference) << " = " << std::setprecision(3) << volume.sigma_multiple
      << " sigma, rel sigma " << fmt(rel(volume)) << ": " << verdict(volume_pass) << "\n";
  log << "  total scalar " << std::setprecision(8) << scalar.a.value << ", diff " << fmt(scalar.difference) << " = "
      << std::setprecision(3) << scalar.sigma_multiple << " sigma, rel sigma " << fmt(rel(scalar)) << ": "
      << verdict(scalar_pass) << "\n";
  log << "  control j vs 2j: " << std::setprecision(4) << control.sigma_multiple << " sigma: " << verdict(control_pass)
      << "\n";
  return {pass, report};
}

CommandResult cmd_curvature(const RunConfig& config, std::ostream& log) {
  const Upstream up = load_family(config);
  const JMap& j0 = up.family.members.front();

  ScanOptions so;
  so.points = config.samples.scan_points;
  so.planes = config.samples.scan_planes;
  so.seed = config.seed;

  std::vector<ScanRow> rows;
  Json surfaces = Json::object();
  bool pass = true;
  for (Surface surface : {Surface::ball, Surface::sphere}) {
    const auto scan = curvature_scan(j0, config.c_list, surface, so);
    bool monotone = true;
    std::vector<double> ratios;
    for (std::size_t i = 1; i < scan.size(); ++i) {
      if (scan[i].sup_stat > scan[i - 1].sup_stat) monotone = false;
      ratios.push_back(scan[i - 1].sup_stat > 0 ? scan[i].sup_stat / scan[i - 1].sup_stat : 0.0);
    }
    bool ratio_ok = true;
    for (std::size_t i = ratios.size() >= 2 ? ratios.size() - 2 : 0; i < ratios.size(); ++i)
      if (ratios[i] > config.tol.scan_ratio) ratio_ok = false;
    const bool ok = monotone && ratio_ok;
    pass = pass && ok;
    Json rs = Json::array();
    for (const auto& r : scan) rs.push_back(to_json(r));
    surfaces[to_string(surface)] = {
        {"rows", rs}, {"ratios", ratios}, {"nonincreasing", monotone}, {"last_ratios_ok", ratio_ok}, {"pass", ok}};
    log << "curvature " << to_string(surface) << ":";
    for (const auto& r : scan) log << " c=" << r.c << " sup " << fmt(r.sup_stat) << ";";
    log << " " << verdict(ok) << "\n";
    rows.insert(rows.end(), scan.begin(), scan.end());
  }

  std::ofstream csv(out_path(config, kScanCsv), std::ios::binary);
  if (!csv) throw ArtifactError("cannot write " + out_path(config, kScanCsv).string());
  write_scan_csv(csv, rows);
  csv.close();

  std::ifstream back(out_path(config, kScanCsv), std::ios::binary);
  const std::string csv_bytes((std::istreambuf_iterator<char>(back)), std::istreambuf_iterator<char>());

  Json report = header(config, "curvature");
  report["upstream"] = {{kFamilyFile, up.hash}};
  report["surfaces"] = surfaces;
  report["scan_csv"] = {{"file", kScanCsv}, {"hash", hex64(fnv1a64(csv_bytes))}};
  report["pass"] = pass;
  write_sealed(out_path(config, kCurvatureFile), report);
  return {pass, report};
}

CommandResult cmd_report(const RunConfig& config, std::ostream& log) {
  Json report = header(config, "report");
  bool pass = true;
  Json stages = Json::object();
  std::map<std::string, std::string> hashes;
  for (const char* name : {kJmapFile, kFamilyFile, kVerifyFile, kInvariantsFile, kCurvatureFile}) {
    const Json j = read_upstream(config, name);
    hashes[name] = j.at("content_hash").get<std::string>();
    // Stages may run with different sample counts, but each must have read
    // the artifact that is on disk now.
    if (j.contains("upstream"))
      for (const auto& [file, hash] : j.at("upstream").items())
        if (hashes.count(file) == 0 || hashes[file] != hash.get<std::string>())
          throw ArtifactError(std::string(name) + ": built from a different " + file);
    const bool ok = j.at("pass").get<bool>();
    pass = pass && ok;
    stages[j.at("command").get<std::string>()] = {{"file", name}, {"hash", j.at("content_hash")}, {"config_hash", j.at("config_hash")}, {"pass", ok}};
    log << "  " << std::left << std::setw(11) << j.at("command").get<std::string>() << verdict(ok) << "\n";
  }
  report["stages"] = stages;
  report["pass"] = pass;
  write_sealed(out_path(config, kReportFile), report);
  log << "report: " << verdict(pass) << "\n";
  return {pass, report};
}

int run_command(const std::string& name, const RunConfig& config, std::ostream& log, std::ostream& err) {
  static const std::map<std::string, CommandResult (*)(const RunConfig&, std::ostream&)> commands = {
      {"gen", cmd_gen},         {"deform", cmd_deform},       {"verify", cmd_verify},
      {"invariants", cmd_invariants}, {"curvature", cmd_curvature}, {"report", cmd_report}};
  const auto it = commands.find(name);
  if (it == commands.end()) {
    err << "error: unknown subcommand '" << name << "'\n";
    return exit_usage;
  }
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
  for (const auto& w : config.warnings()) err << "warning: " << w << "\n";
  try {
    std::filesystem::create_directories(config.out_dir);
    return it->second(config, log).pass ? exit_pass : exit_fail;
  } catch (const ArtifactError& e) {
    err << "error: " << e.what() << "\n";
    return exit_upstream;
  } catch (const Json::exception& e) {
    err << "error: inconsistent upstream artifact: " << e.what() << "\n";
    return exit_upstream;
  } catch (const std::exception& e) {
    err << name << " failed: " << e.what() << "\n";
    return exit_fail;
  }
}

}  // namespace isodeform
