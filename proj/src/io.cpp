#include "isodeform/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace isodeform {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string json_hash(const Json& j) { return hex64(fnv1a64(j.dump())); }

Json to_json(const Mat& M) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const Json& j) {
  if (!j.is_array()) throw ArtifactError("matrix: expected array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Mat M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw ArtifactError("matrix: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return M;
}

Json to_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const Json& j) {
  if (!j.is_array()) throw ArtifactError("vector: expected array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Json to_json(const JMap& j) {
  Json mats = Json::array();
  for (const Mat& J : j.mats()) mats.push_back(to_json(J));
  return {{"m", j.m()}, {"k", j.k()}, {"mats", mats}};
}

JMap jmap_from_json(const Json& j) {
  try {
    const int m = j.at("m").get<int>();
    const int k = j.at("k").get<int>();
    std::vector<Mat> mats;
    for (const Json& M : j.at("mats")) mats.push_back(mat_from_json(M));
    return JMap(m, k, std::move(mats));
  } catch (const Json::exception& e) {
    throw ArtifactError(std::string("j-map: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ArtifactError(std::string("j-map: ") + e.what());
  }
}

Json to_json(const HomogeneousForm& f) {
  return {{"k", f.k()}, {"degree", f.degree()}, {"coeffs", to_json(f.coeffs())}};
}

HomogeneousForm form_from_json(const Json& j) {
  try {
    return HomogeneousForm(j.at("k").get<int>(), j.at("degree").get<int>(), vec_from_json(j.at("coeffs")));
  } catch (const Json::exception& e) {
    throw ArtifactError(std::string("form: ") + e.what());
  }
}

Json to_json(const EquivalenceWitness& w) {
  return {{"A", to_json(w.A)}, {"C", to_json(w.C)}, {"residual", w.residual}, {"restart", w.restart}};
}

EquivalenceWitness witness_from_json(const Json& j) {
  EquivalenceWitness w;
  w.A = mat_from_json(j.at("A"));
  w.C = mat_from_json(j.at("C"));
  w.residual = j.at("residual").get<double>();
  w.restart = j.at("restart").get<int>();
  return w;
}

Json to_json(const TangentReport& t) {
  return {{"iso_dim", t.iso_dim},
          {"orbit_dim", t.orbit_dim},
          {"excess", t.excess},
          {"substitution_tangents_in_kernel", t.substitution_tangents_in_kernel}};
}

Json to_json(const Certificate& c) {
  return {{"isospectral_residual", c.isospectral_residual},
          {"inequivalence_residual", c.inequivalence_residual},
          {"commutant_dim", c.commutant_dim},
          {"restarts", c.restarts}};
}

namespace {

TangentReport tangent_from_json(const Json& j) {
  TangentReport t;
  t.iso_dim = j.at("iso_dim").get<int>();
  t.orbit_dim = j.at("orbit_dim").get<int>();
  t.excess = j.at("excess").get<int>();
  t.substitution_tangents_in_kernel = j.at("substitution_tangents_in_kernel").get<int>();
  return t;
}

Certificate certificate_from_json(const Json& j) {
  Certificate c;
  c.isospectral_residual = j.at("isospectral_residual").get<double>();
  c.inequivalence_residual = j.at("inequivalence_residual").get<double>();
  c.commutant_dim = j.at("commutant_dim").get<int>();
  c.restarts = j.at("restarts").get<int>();
  return c;
}

}  // namespace

Json to_json(const IsospectralFamily& f) {
  Json members = Json::array();
  for (const JMap& j : f.members) members.push_back(to_json(j));
  Json certs = Json::array();
  for (const Certificate& c : f.certificates) certs.push_back(to_json(c));
  Json out = {{"params", f.params},
              {"members", members},
              {"certificates", certs},
              {"seed_report", to_json(f.seed_report)},
              {"diagnostic", f.diagnostic}};
  out["content_hash"] = json_hash(out);
  return out;
}

IsospectralFamily family_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("content_hash")) throw ArtifactError("family: missing content_hash");
  Json body = j;
  const std::string stored = body["content_hash"].get<std::string>();
  body.erase("content_hash");
  const std::string actual = json_hash(body);
  if (stored != actual) throw ArtifactError("family: content hash mismatch (stored " + stored + ", actual " + actual + ")");
  try {
    IsospectralFamily f;
    f.params = j.at("params").get<std::vector<double>>();
    for (const Json& M : j.at("members")) f.members.push_back(jmap_from_json(M));
    for (const Json& c : j.at("certificates")) f.certificates.push_back(certificate_from_json(c));
    f.seed_report = tangent_from_json(j.at("seed_report"));
    f.diagnostic = j.at("diagnostic").get<std::string>();
    if (f.members.empty() || f.params.size() != f.members.size()) throw ArtifactError("family: inconsistent member count");
    return f;
  } catch (const Json::exception& e) {
    throw ArtifactError(std::string("family: ") + e.what());
  }
}

Json to_json(const IntegralEstimate& e) {
  return {{"value", e.value},
          {"std_error", e.std_error},
          {"n_samples", e.n_samples},
          {"method", e.method},
          {"flagged_points", e.flagged_points}};
}

Json to_json(const PairedComparison& p) {
  return {{"invariant", p.invariant},  {"a", to_json(p.a)},
          {"b", to_json(p.b)},         {"difference", p.difference},
          {"std_error", p.std_error},  {"sigma_multiple", p.sigma_multiple}};
}

Json to_json(const HypothesisReport& r) {
  Json records = Json::array();
  for (const DirectionRecord& d : r.records) {
    Json rec = {{"pair", {d.first, d.second}},
                {"direction", d.direction ? d.direction->label() : std::string("T")},
                {"conjugator_residual", d.conjugator_residual},
                {"bracket_residual", d.bracket_residual},
                {"mean_curvature_residual", d.mean_curvature_residual},
                {"tau_residual", d.tau_residual},
                {"quotient_residual", d.quotient_residual},
                {"pass", d.pass}};
    if (!d.error.empty()) rec["error"] = d.error;
    records.push_back(std::move(rec));
  }
  Json failing = Json::array();
  for (const auto& [a, b] : r.failing_pairs()) failing.push_back({a, b});
  return {{"tolerances",
           {{"bracket", r.tol.bracket}, {"tau", r.tol.tau}, {"mean_curvature", r.tol.mean_curvature}, {"quotient", r.tol.quotient}}},
          {"records", records},
          {"failing_pairs", failing},
          {"pass", r.pass}};
}

Json to_json(const EvidenceRecord& e) {
  return {{"commutant_dim_1", e.commutant_dim_1},
          {"commutant_dim_2", e.commutant_dim_2},
          {"equivalence_floor", e.equivalence_floor},
          {"restarts", e.restarts},
          {"trace_word_separation", e.trace_word_separation},
          {"rho", e.rho},
          {"verdict", e.verdict}};
}

Json to_json(const ScanRow& r) {
  std::vector<double> argmax(r.argmax.data(), r.argmax.data() + r.argmax.size());
  return {{"c", r.c},
          {"surface", to_string(r.surface)},
          {"n_points", r.n_points},
          {"n_planes", r.n_planes},
          {"sup_stat", r.sup_stat},
          {"argmax", argmax}};
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArtifactError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArtifactError("missing upstream file " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ArtifactError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace isodeform
