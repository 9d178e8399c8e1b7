#include "isodeform/deform.hpp"
#include "isodeform/linalg.hpp"

#include <gtest/gtest.h>

using namespace isodeform;

namespace {

const JMap& seed_5_2() {
  static const JMap j = deformable_generic_jmap(5, 2, 42).j;
  return j;
}

const IsospectralFamily& family_5_2() {
  static const IsospectralFamily fam = [] {
    FamilyOptions options;
    options.seed = 42;
    return build_family(seed_5_2(), 5, 5e-3, options);
  }();
  return fam;
}

}  // namespace

TEST(ParameterBound, Arithmetic) {
  EXPECT_EQ(deformation_parameter_bound(5), 2);
  EXPECT_EQ(deformation_parameter_bound(7), 6);
  EXPECT_EQ(deformation_parameter_bound(9), 12);
  EXPECT_FALSE(deformation_bound_applies(2));
  EXPECT_FALSE(deformation_bound_applies(6));
  EXPECT_TRUE(deformation_bound_applies(5));
  EXPECT_TRUE(deformation_bound_applies(8));
}

TEST(Tangents, ZeroMapHasNoConstraints) {
  const auto t = isospectral_tangents(JMap::zero(5, 2));
  EXPECT_EQ(t.report.iso_dim, 2 * 10);
  EXPECT_EQ(t.report.orbit_dim, 0);
}

TEST(Tangents, GenericExcessMeetsBound) {
  for (int m : {5, 7, 9}) {
    const JMap j = deformable_generic_jmap(m, 2, 42).j;
    const auto t = isospectral_tangents(j);
    EXPECT_GE(t.report.excess, deformation_parameter_bound(m)) << "m=" << m;
    EXPECT_LE(t.report.orbit_dim, t.report.iso_dim);
    EXPECT_LE(t.report.iso_dim, j.param_dim());
  }
}

TEST(Tangents, OrbitDirectionsLieInKernel) {
  const JMap& j = seed_5_2();
  const auto t = isospectral_tangents(j);
  const Mat outside = t.orbit - t.kernel * (t.kernel.transpose() * t.orbit);
  EXPECT_LE(outside.cwiseAbs().maxCoeff(), 1e-9);
  // Conjugation tangents annihilate the linearized constraints directly.
  const Mat C = spectral_constraint_matrix(j);
  EXPECT_LE((C * t.orbit).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Tangents, SubstitutionTangentsMoveSpectraForGenericMaps) {
  // j(c·) for c ∈ so(2) rotates the power-trace forms, so it is not an
  // isospectral direction unless the forms are rotation invariant.
  EXPECT_EQ(isospectral_tangents(seed_5_2()).report.substitution_tangents_in_kernel, 0);
}

TEST(StepAndProject, ZeroDirectionAndZeroStepAreIdentity) {
  const JMap& j = seed_5_2();
  const auto targets = SpectralTargets::of(j);
  EXPECT_EQ(step_and_project(j, Vec::Zero(j.param_dim()), 1e-2, targets), j);
  const Vec d = transverse_direction(isospectral_tangents(j));
  EXPECT_EQ(step_and_project(j, d, 0.0, targets), j);
}

TEST(StepAndProject, KernelStepStaysIsospectral) {
  const JMap& j = seed_5_2();
  const auto targets = SpectralTargets::of(j);
  const Vec d = transverse_direction(isospectral_tangents(j));
  EXPECT_NEAR(d.norm(), 1.0, 1e-12);
  const JMap next = step_and_project(j, d, 1e-2, targets);
  const auto report = isospectral(j, next, 1e-10);
  EXPECT_TRUE(report.isospectral) << report.max_deviation;
  EXPECT_GT((next.params() - j.params()).norm(), 5e-3);
}

TEST(StepAndProject, LargeStepNeverReturnsUncertifiedMember) {
  const JMap& j = seed_5_2();
  const auto targets = SpectralTargets::of(j);
  const Vec d = transverse_direction(isospectral_tangents(j));
  try {
    const JMap next = step_and_project(j, d, 10.0, targets);
    EXPECT_TRUE(isospectral(j, next, 1e-10).isospectral);
  } catch (const StepFailure&) {
    SUCCEED();
  }
}

TEST(BuildFamily, ZeroStepsGivesSeedOnly) {
  const auto fam = build_family(seed_5_2(), 0, 5e-3);
  ASSERT_EQ(fam.members.size(), 1u);
  EXPECT_EQ(fam.members[0], seed_5_2());
  EXPECT_EQ(fam.params[0], 0.0);
}

TEST(BuildFamily, CertifiedFiveStepFamily) {
  const auto& fam = family_5_2();
  ASSERT_EQ(fam.members.size(), 6u) << fam.diagnostic;
  EXPECT_TRUE(fam.diagnostic.empty());
  EXPECT_EQ(fam.members.front(), seed_5_2());
  for (std::size_t a = 0; a < fam.members.size(); ++a) {
    EXPECT_LE(fam.certificates[a].isospectral_residual, 1e-10);
    EXPECT_EQ(fam.certificates[a].commutant_dim, 0);
    for (std::size_t b = a + 1; b < fam.members.size(); ++b)
      EXPECT_TRUE(isospectral(fam.members[a], fam.members[b], 1e-10).isospectral) << a << "," << b;
  }
  for (std::size_t a = 1; a < fam.members.size(); ++a)
    EXPECT_GE(fam.certificates[a].inequivalence_residual, fam.certificates[a - 1].inequivalence_residual);
  EXPECT_GE(fam.certificates.back().inequivalence_residual, 1e-4);
}

TEST(BuildFamily, SevenDimensionalFamily) {
  const JMap j = deformable_generic_jmap(7, 2, 42).j;
  FamilyOptions options;
  options.certify_restarts = 8;
  const auto fam = build_family(j, 3, 5e-3, options);
  ASSERT_EQ(fam.members.size(), 4u) << fam.diagnostic;
  EXPECT_GE(fam.seed_report.excess, 6);
  for (const auto& c : fam.certificates) EXPECT_LE(c.isospectral_residual, 1e-10);
  EXPECT_GE(fam.certificates.back().inequivalence_residual, 1e-4);
}

TEST(BuildFamily, RejectsDegenerateSeeds) {
  EXPECT_THROW(build_family(JMap::zero(5, 2), 2, 1e-2), std::invalid_argument);
  // Generic maps into so(3) are rigid: the constraints plus conjugations fill W.
  const JMap rigid = random_generic_jmap(3, 2, 5).j;
  EXPECT_EQ(isospectral_tangents(rigid).report.excess, 0);
  EXPECT_THROW(build_family(rigid, 2, 1e-2), NoDeformationError);
}

TEST(BuildFamily, Deterministic) {
  FamilyOptions options;
  options.seed = 42;
  options.certify_restarts = 4;
  const auto a = build_family(seed_5_2(), 2, 5e-3, options);
  options.exec = Exec::serial;
  const auto b = build_family(seed_5_2(), 2, 5e-3, options);
  ASSERT_EQ(a.members.size(), b.members.size());
  for (std::size_t i = 0; i < a.members.size(); ++i) {
    EXPECT_EQ(a.members[i], b.members[i]);
    EXPECT_EQ(a.certificates[i].inequivalence_residual, b.certificates[i].inequivalence_residual);
  }
}

TEST(EquivalenceSearch, FloorInvariantUnderConjugatingTarget) {
  const auto& fam = family_5_2();
  Rng rng(6);
  const Mat A0 = random_orthogonal(5, rng);
  const double a = equivalence_search(fam.members.back(), fam.members.front(), 30, 3).residual;
  const double b = equivalence_search(fam.members.back(), fam.members.front().conjugated(A0), 30, 3).residual;
  EXPECT_NEAR(a, b, 1e-9);
  EXPECT_GE(a, 1e-3);
}

TEST(ScaleFamily, UnitScaleAndHomogeneity) {
  const auto& fam = family_5_2();
  const auto same = scale_family(fam, 1.0);
  for (std::size_t i = 0; i < fam.members.size(); ++i) EXPECT_EQ(same.members[i], fam.members[i]);

  const auto small = scale_family(fam, 0.1);
  for (std::size_t i = 0; i < small.members.size(); ++i) {
    EXPECT_LE(small.certificates[i].isospectral_residual, 1e-10);
    const auto f = power_trace_form(small.members[i], 2);
    const auto g = power_trace_form(fam.members[i], 2);
    EXPECT_LE((f.coeffs() - 1e-4 * g.coeffs()).cwiseAbs().maxCoeff(), 1e-12 * 1e-4 * g.max_abs_coeff());
  }
  EXPECT_THROW(scale_family(fam, 0.0), std::invalid_argument);
  EXPECT_THROW(scale_family(fam, -1.0), std::invalid_argument);
}
