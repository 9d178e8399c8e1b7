#include "isodeform/linalg.hpp"
#include "isodeform/verify.hpp"

#include <gtest/gtest.h>

using namespace isodeform;

namespace {

const JMap& j_5_2() {
  static const JMap j = deformable_generic_jmap(5, 2, 42).j;
  return j;
}

const IsospectralFamily& family() {
  static const IsospectralFamily fam = [] {
    FamilyOptions options;
    options.seed = 42;
    options.certify_restarts = 4;
    return build_family(j_5_2(), 5, 5e-3, options);
  }();
  return fam;
}

SubtorusDirection dir(int a, int b) {
  Eigen::VectorXi Z(2);
  Z << a, b;
  return SubtorusDirection::make(Z);
}

JMap perturbed(const JMap& j, double eps) { return perturb_jmap(j, eps, 1); }

}  // namespace

TEST(Directions, PrimitiveAndDefaults) {
  EXPECT_THROW(dir(0, 0), std::invalid_argument);
  EXPECT_THROW(dir(2, 4), std::invalid_argument);
  const auto all = default_directions(2);
  ASSERT_EQ(all.size(), 8u);
  EXPECT_EQ(all[0].label(), "(1,0)");
  EXPECT_EQ(all[1].label(), "(0,1)");
  EXPECT_EQ(all[2].label(), "(1,1)");
  EXPECT_EQ(all[3].label(), "(1,-1)");
  EXPECT_EQ(default_directions(3, 1).size(), 13u);  // (3³ − 1) / 2
  const Mat basis = dir(1, 2).subtorus_basis();
  ASSERT_EQ(basis.cols(), 1);
  EXPECT_NEAR(basis.col(0).dot(Vec::Unit(2, 0) + 2.0 * Vec::Unit(2, 1)), 0.0, 1e-15);
  EXPECT_NEAR(basis.norm(), 1.0, 1e-15);
}

TEST(Bracket, TrivialPairAndIdentity) {
  const auto check = check_bracket_identity(j_5_2(), j_5_2(), dir(1, 0), 100, 1);
  EXPECT_LE(check.residual, 1e-14);
  // ⟨B(x, y), Z⟩ = ⟨j(Z) x, y⟩, so the sampled residual is bounded by the
  // conjugation residual of A.
  EXPECT_LE(check.conjugation_residual, 1e-13);
}

TEST(Bracket, FamilyEndpointsAndNegativeControl) {
  const auto& fam = family();
  for (const auto& Z : {dir(1, 0), dir(0, 1), dir(1, -1)}) {
    const auto c = check_bracket_identity(fam.members.front(), fam.members.back(), Z, 100, 2);
    EXPECT_LE(c.residual, 1e-10) << Z.label();
    EXPECT_LE(c.residual, c.conjugation_residual + 1e-12);
  }
  const auto broken = check_bracket_identity(j_5_2(), perturbed(j_5_2(), 1e-3), dir(1, 0), 100, 3);
  EXPECT_GT(broken.residual, 1e-4);
}

TEST(Tau, OrthogonalPassesAndNonOrthogonalFails) {
  Rng rng(4);
  const Mat A = random_orthogonal(5, rng);
  EXPECT_LE(tau_equivariance_residual(A, 2, 100, 5), 1e-14);
  Mat B = A;
  B(0, 0) += 0.01;
  EXPECT_GT(tau_equivariance_residual(B, 2, 100, 5), 1e-12);
  EXPECT_LE(check_tau_equivariance(dir(1, 1), family().members.front(), family().members.back(), 100, 6), 1e-12);
}

TEST(MeanCurvature, IntertwiningAlongFamily) {
  const auto& fam = family();
  EXPECT_LE(check_mean_curvature_intertwining(j_5_2(), j_5_2(), dir(1, 0), 20, 7), 1e-15);
  for (const auto& Z : {dir(1, 0), dir(0, 1)})
    EXPECT_LE(check_mean_curvature_intertwining(fam.members.front(), fam.members.back(), Z, 50, 8), 1e-8);
}

TEST(FullTorus, QuotientDataIndependentOfJ) {
  EXPECT_LE(check_full_torus_quotient(j_5_2(), JMap::zero(5, 2), 100, 9), 1e-13);
  EXPECT_LE(check_full_torus_quotient(j_5_2(), j_5_2().scaled(5.0), 100, 9), 1e-13);
}

TEST(Suite, FamilyPassesAndPerturbedMemberFails) {
  const auto& fam = family();
  const auto dirs = default_directions(2);
  const std::vector<SubtorusDirection> four(dirs.begin(), dirs.begin() + 4);
  SuiteConfig config;
  config.seed = 10;
  const auto report = run_hypothesis_suite(fam.members, four, config);
  EXPECT_TRUE(report.pass);
  EXPECT_EQ(report.records.size(), 6u * 5u);  // 5 consecutive + endpoint, 4 directions + K = T

  config.seed = 11;
  EXPECT_TRUE(run_hypothesis_suite(fam.members, four, config).pass);

  auto broken = fam.members;
  broken[3] = perturbed(broken[3], 1e-3);
  const auto bad = run_hypothesis_suite(broken, four, config);
  EXPECT_FALSE(bad.pass);
  const auto pairs = bad.failing_pairs();
  for (const auto& p : pairs) EXPECT_TRUE(p.first == 3 || p.second == 3) << p.first << "," << p.second;
  EXPECT_FALSE(pairs.empty());

  EXPECT_TRUE(run_hypothesis_suite({j_5_2()}, four, config).pass);
}

TEST(Suite, DeterministicAcrossExecutionModes) {
  const auto& fam = family();
  SuiteConfig config;
  config.samples = 10;
  const auto a = run_hypothesis_suite(fam.members, default_directions(2), config);
  config.exec = Exec::serial;
  const auto b = run_hypothesis_suite(fam.members, default_directions(2), config);
  ASSERT_EQ(a.records.size(), b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].bracket_residual, b.records[i].bracket_residual);
    EXPECT_EQ(a.records[i].mean_curvature_residual, b.records[i].mean_curvature_residual);
  }
}

TEST(Evidence, PlantedEquivalenceFamilyAndZeroMap) {
  Rng rng(12);
  const Mat A0 = random_orthogonal(5, rng);
  const Mat C0 = random_orthogonal(2, rng);
  EvidenceConfig config;
  config.restarts = 20;
  const JMap planted = substitute_basis(j_5_2(), C0).conjugated(A0);
  const auto same = non_isometry_evidence(j_5_2(), planted, config);
  EXPECT_EQ(same.verdict, "isometric construction data (equivalent j-maps)");
  EXPECT_LE(same.trace_word_separation, 1e-8);

  const auto& fam = family();
  const auto diff = non_isometry_evidence(fam.members.front(), fam.members.back(), config);
  EXPECT_EQ(diff.verdict.rfind("not isometric at evidence level", 0), 0u) << diff.verdict;
  EXPECT_GE(diff.equivalence_floor, 1e-3);
  EXPECT_GT(diff.trace_word_separation, 1e-6);

  EXPECT_EQ(non_isometry_evidence(JMap::zero(5, 2), j_5_2(), config).verdict, "inconclusive");
}
