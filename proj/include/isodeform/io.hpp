#pragma once

#include "isodeform/deform.hpp"
#include "isodeform/invariants.hpp"
#include "isodeform/verify.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace isodeform {

using Json = nlohmann::json;

/// Missing, malformed, or tampered upstream artifact.
struct ArtifactError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t h);
/// FNV-1a of the compact dump (keys sorted by nlohmann's default map).
std::string json_hash(const Json& j);

Json to_json(const Mat& M);
Mat mat_from_json(const Json& j);
Json to_json(const Vec& v);
Vec vec_from_json(const Json& j);

Json to_json(const JMap& j);
JMap jmap_from_json(const Json& j);

Json to_json(const HomogeneousForm& f);
HomogeneousForm form_from_json(const Json& j);

Json to_json(const EquivalenceWitness& w);
EquivalenceWitness witness_from_json(const Json& j);

Json to_json(const TangentReport& t);
Json to_json(const Certificate& c);

/// Family with a "content_hash" over everything else.
Json to_json(const IsospectralFamily& f);
/// Throws ArtifactError if the content hash does not match.
IsospectralFamily family_from_json(const Json& j);

Json to_json(const IntegralEstimate& e);
Json to_json(const PairedComparison& p);
Json to_json(const HypothesisReport& r);
Json to_json(const EvidenceRecord& e);
Json to_json(const ScanRow& r);

/// Pretty-printed with a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& j);
/// Throws ArtifactError if the file is missing or not valid JSON.
Json read_json_file(const std::filesystem::path& path);

}  // namespace isodeform
