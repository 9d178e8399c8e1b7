#pragma once

#include "isodeform/jmap.hpp"

#include <string>

namespace isodeform {

/// Lower bound m(m-1)/2 - ⌊m/2⌋(⌊m/2⌋+2) on the number of isospectral,
/// inequivalent deformation parameters for k = 2.
int deformation_parameter_bound(int m);
/// The bound is only claimed for m ∉ {1, 2, 3, 4, 6}.
bool deformation_bound_applies(int m);

struct TangentReport {
  int iso_dim = 0;    // kernel of the linearized power-trace constraints
  int orbit_dim = 0;  // tangent space of the equivalence orbit inside that kernel
  int excess = 0;     // iso_dim - orbit_dim
  int substitution_tangents_in_kernel = 0;  // z ↦ j(cz), c ∈ so(k), that preserve the spectra
};

struct TangentSpace {
  Mat kernel;  // W × iso_dim, orthonormal columns, W = k·m(m-1)/2
  Mat orbit;   // W × orbit_dim, orthonormal columns
  TangentReport report;
};

/// Stacked constraint rows: for each r ≤ ⌊m/2⌋ the coefficients of
/// z ↦ tr(j(z)^{2r-1} δj(z)) as linear functionals of δj ∈ W.
/// Block r is scaled to unit max-row-norm (left unscaled if zero).
Mat spectral_constraint_matrix(const JMap& j);

TangentSpace isospectral_tangents(const JMap& j, double rel_tol = 1e-9);

/// Frozen spectral data (all power-trace forms) of the seed of a family.
struct SpectralTargets {
  std::vector<HomogeneousForm> forms;
  static SpectralTargets of(const JMap& j) { return {power_trace_forms(j)}; }
};

struct StepOptions {
  double residual_tol = 1e-11;
  int max_iterations = 50;
  int max_stalls = 5;
  int max_halvings = 20;
  double armijo = 1e-4;
};

/// Relative mismatch vector of all power-trace coefficients against targets.
Vec spectral_residual(const JMap& j, const SpectralTargets& targets);

/// Predictor j + h·direction followed by damped Gauss–Newton projection
/// back onto the isospectral set of `targets`. Throws StepFailure if the
/// corrector stalls.
JMap step_and_project(const JMap& j, const Vec& direction, double h, const SpectralTargets& targets,
                      const StepOptions& options = {});

struct Certificate {
  double isospectral_residual = 0.0;    // vs member 0
  double inequivalence_residual = 0.0;  // equivalence_search floor vs member 0
  int commutant_dim = 0;
  int restarts = 0;
};

struct IsospectralFamily {
  std::vector<double> params;
  std::vector<JMap> members;
  std::vector<Certificate> certificates;
  TangentReport seed_report;
  std::string diagnostic;  // non-empty if the family was truncated
};

struct FamilyOptions {
  int certify_restarts = 20;
  std::uint64_t seed = 0;
  double iso_tol = 1e-10;
  double min_step = 1e-7;
  StepOptions step;
  Exec exec = Exec::parallel;
};

/// Unit kernel direction orthogonal to the orbit tangents. Continues
/// `previous` when given; otherwise the dominant complement direction with
/// its largest-magnitude entry made positive.
Vec transverse_direction(const TangentSpace& tangents, const Vec* previous = nullptr);

IsospectralFamily build_family(const JMap& j0, int n_steps, double h, const FamilyOptions& options = {});

IsospectralFamily scale_family(const IsospectralFamily& family, double c);

/// random_generic_jmap with the extra requirement of positive tangent excess.
GenericSample deformable_generic_jmap(int m, int k, std::uint64_t seed, int max_attempts = 100);

}  // namespace isodeform
