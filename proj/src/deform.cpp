#include "isodeform/deform.hpp"

#include "isodeform/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace isodeform {

int deformation_parameter_bound(int m) {
  const int h = m / 2;
  return m * (m - 1) / 2 - h * (h + 2);
}

bool deformation_bound_applies(int m) { return !(m == 1 || m == 2 || m == 3 || m == 4 || m == 6); }

namespace {

Mat odd_power(const Mat& M, int p) {
  Mat out = M;
  const Mat sq = M * M;
  for (int i = 1; i < p; i += 2) out = sq * out;
  return out;
}

/// Coefficient rows of z ↦ tr(j(z)^{2r-1} δj(z)), unscaled.
Mat constraint_block(const JMap& j, int r) {
  const int m = j.m();
  const int k = j.k();
  const int p = skew_dim(m);
  const FormFitter fitter(k, 2 * r);
  const Mat& nodes = fitter.nodes();
  Mat values(nodes.cols(), k * p);
  for (Eigen::Index l = 0; l < nodes.cols(); ++l) {
    const Mat P = odd_power(j(nodes.col(l)), 2 * r - 1);
    int q = 0;
    for (int a = 0; a < m; ++a)
      for (int b = a + 1; b < m; ++b, ++q) {
        const double t = P(b, a) - P(a, b);
        for (int i = 0; i < k; ++i) values(l, i * p + q) = nodes(i, l) * t;
      }
  }
  return fitter.coefficients(values);
}

int numerical_rank(const Vec& s, double rel_tol) {
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rel_tol * s[0]) ++rank;
  return rank;
}

}  // namespace

Mat spectral_constraint_matrix(const JMap& j) {
  std::vector<Mat> blocks;
  Eigen::Index rows = 0;
  for (int r = 1; r <= j.m() / 2; ++r) {
    Mat block = constraint_block(j, r);
    const double scale = block.rowwise().norm().maxCoeff();
    if (scale > 0.0) block /= scale;
    rows += block.rows();
    blocks.push_back(std::move(block));
  }
  Mat out(rows, j.param_dim());
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  return out;
}

TangentSpace isospectral_tangents(const JMap& j, double rel_tol) {
  const int m = j.m();
  const int k = j.k();
  const int W = j.param_dim();
  TangentSpace out;

  const Mat constraints = spectral_constraint_matrix(j);
  if (constraints.rows() == 0) {
    out.kernel = Mat::Identity(W, W);
  } else {
    Eigen::JacobiSVD<Mat> svd(constraints, Eigen::ComputeFullV);
    const int rank = numerical_rank(svd.singularValues(), rel_tol);
    out.kernel = svd.matrixV().rightCols(W - rank);
  }

  // Orbit tangents: δj = [X, j(·)] for X ∈ so(m), plus any substitution
  // tangents j(c ·) that happen to preserve the spectra.
  const int pm = skew_dim(m);
  std::vector<Vec> generators;
  for (int q = 0; q < pm; ++q) {
    const Mat X = skew_basis_element(m, q);
    std::vector<Mat> mats;
    for (int i = 0; i < k; ++i) mats.push_back(X * j.mat(i) - j.mat(i) * X);
    generators.push_back(JMap(m, k, std::move(mats), 1e-9).params());
  }
  for (int q = 0; q < skew_dim(k); ++q) {
    const Mat c = skew_basis_element(k, q);
    std::vector<Mat> mats;
    for (int i = 0; i < k; ++i) {
      Mat Ji = Mat::Zero(m, m);
      for (int l = 0; l < k; ++l) Ji += c(l, i) * j.mat(l);
      mats.push_back(std::move(Ji));
    }
    const Vec v = JMap(m, k, std::move(mats)).params();
    const double nv = v.norm();
    if (nv == 0.0) continue;
    const Vec outside = v - out.kernel * (out.kernel.transpose() * v);
    if (outside.norm() <= rel_tol * nv) {
      generators.push_back(v);
      ++out.report.substitution_tangents_in_kernel;
    }
  }

  Mat G(W, static_cast<Eigen::Index>(generators.size()));
  for (std::size_t c = 0; c < generators.size(); ++c) G.col(static_cast<Eigen::Index>(c)) = generators[c];
  int orbit_rank = 0;
  if (G.cols() > 0) {
    Eigen::JacobiSVD<Mat> svd(G, Eigen::ComputeThinU);
    orbit_rank = numerical_rank(svd.singularValues(), rel_tol);
    out.orbit = svd.matrixU().leftCols(orbit_rank);
  } else {
    out.orbit = Mat(W, 0);
  }

  out.report.iso_dim = static_cast<int>(out.kernel.cols());
  out.report.orbit_dim = orbit_rank;
  out.report.excess = out.report.iso_dim - out.report.orbit_dim;
  return out;
}

Vec transverse_direction(const TangentSpace& tangents, const Vec* previous) {
  const Mat& K = tangents.kernel;
  if (K.cols() == 0) throw NoDeformationError("transverse_direction: empty isospectral tangent space");
  Mat PK = K;
  if (tangents.orbit.cols() > 0) PK -= tangents.orbit * (tangents.orbit.transpose() * K);
  // Eigenvalue 1 ↔ kernel direction orthogonal to the orbit, 0 ↔ orbit direction.
  const Mat M = K.transpose() * PK;
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (M + M.transpose()));
  const Vec& lambda = eig.eigenvalues();
  std::vector<Eigen::Index> transverse;
  for (Eigen::Index i = lambda.size() - 1; i >= 0; --i)
    if (lambda[i] > 0.5) transverse.push_back(i);
  if (transverse.empty()) throw NoDeformationError("transverse_direction: kernel is spanned by orbit tangents");

  Mat N(K.rows(), static_cast<Eigen::Index>(transverse.size()));
  for (std::size_t c = 0; c < transverse.size(); ++c) N.col(static_cast<Eigen::Index>(c)) = K * eig.eigenvectors().col(transverse[c]);
  // Re-orthonormalize the complement against the orbit span exactly.
  if (tangents.orbit.cols() > 0) N -= tangents.orbit * (tangents.orbit.transpose() * N);
  Eigen::HouseholderQR<Mat> qr(N);
  const Mat Nq = qr.householderQ() * Mat::Identity(N.rows(), N.cols());

  if (previous != nullptr) {
    Vec d = Nq * (Nq.transpose() * *previous);
    if (d.norm() > 1e-6 * previous->norm()) return d.normalized();
  }
  Vec d = N.col(0).normalized();
  Eigen::Index arg = 0;
  d.cwiseAbs().maxCoeff(&arg);
  if (d[arg] < 0.0) d = -d;
  return d;
}

Vec spectral_residual(const JMap& j, const SpectralTargets& targets) {
  Eigen::Index rows = 0;
  for (const auto& f : targets.forms) rows += f.coeffs().size();
  Vec out(rows);
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < targets.forms.size(); ++i) {
    const auto& target = targets.forms[i];
    const double scale = target.max_abs_coeff() > 0.0 ? target.max_abs_coeff() : 1.0;
    const auto current = power_trace_form(j, static_cast<int>(i) + 1);
    out.segment(at, target.coeffs().size()) = (current.coeffs() - target.coeffs()) / scale;
    at += target.coeffs().size();
  }
  return out;
}

namespace {

Mat spectral_residual_jacobian(const JMap& j, const SpectralTargets& targets) {
  Eigen::Index rows = 0;
  for (const auto& f : targets.forms) rows += f.coeffs().size();
  Mat out(rows, j.param_dim());
  Eigen::Index at = 0;
  for (std::size_t i = 0; i < targets.forms.size(); ++i) {
    const int r = static_cast<int>(i) + 1;
    const auto& target = targets.forms[i];
    const double scale = target.max_abs_coeff() > 0.0 ? target.max_abs_coeff() : 1.0;
    // d/dε tr((j+εδ)^{2r}) = 2r tr(j^{2r-1} δ); a skew δ in slot (a,b) counts
    // both entries, which constraint_block already accounts for.
    const Mat block = (2.0 * r / scale) * constraint_block(j, r);
    out.middleRows(at, block.rows()) = block;
    at += block.rows();
  }
  return out;
}

}  // namespace

JMap step_and_project(const JMap& j, const Vec& direction, double h, const SpectralTargets& targets,
                      const StepOptions& options) {
  if (direction.size() != j.param_dim()) throw DimensionError("step_and_project: direction has wrong length");
  if (static_cast<int>(targets.forms.size()) != j.m() / 2) throw DimensionError("step_and_project: target count");
  if (!(h >= 0.0)) throw std::invalid_argument("step_and_project: h must be nonnegative");

  Vec x = j.params() + h * direction;
  JMap current = JMap::from_params(j.m(), j.k(), x);
  Vec R = spectral_residual(current, targets);
  double norm2 = R.squaredNorm();
  int stalls = 0;

  for (int it = 0; it <= options.max_iterations; ++it) {
    if (R.size() == 0 || R.cwiseAbs().maxCoeff() <= options.residual_tol) return current;
    if (it == options.max_iterations) break;

    const Mat Jac = spectral_residual_jacobian(current, targets);
    const Vec delta = Jac.completeOrthogonalDecomposition().solve(-R);

    bool reduced = false;
    double alpha = 1.0;
    for (int halving = 0; halving <= options.max_halvings; ++halving, alpha *= 0.5) {
      const Vec trial_x = x + alpha * delta;
      const JMap trial = JMap::from_params(j.m(), j.k(), trial_x);
      const Vec trial_R = spectral_residual(trial, targets);
      const double trial_norm2 = trial_R.squaredNorm();
      if (trial_norm2 <= (1.0 - 2.0 * options.armijo * alpha) * norm2) {
        x = trial_x;
        current = trial;
        R = trial_R;
        norm2 = trial_norm2;
        reduced = true;
        break;
      }
    }
    stalls = reduced ? 0 : stalls + 1;
    if (stalls >= options.max_stalls) {
      std::ostringstream msg;
      msg << "step_and_project: corrector stalled at residual " << R.cwiseAbs().maxCoeff() << " (h=" << h << ")";
      throw StepFailure(msg.str());
    }
  }
  std::ostringstream msg;
  msg << "step_and_project: no convergence in " << options.max_iterations << " iterations (residual "
      << R.cwiseAbs().maxCoeff() << ", h=" << h << ")";
  throw StepFailure(msg.str());
}

namespace {

Certificate certify(const JMap& member, const JMap& seed_member, const std::vector<HomogeneousForm>& seed_forms,
                    std::uint64_t seed, const FamilyOptions& options) {
  Certificate c;
  c.isospectral_residual = isospectral_to_forms(seed_forms, member, options.iso_tol).max_deviation;
  EquivalenceOptions eo;
  eo.exec = options.exec;
  c.inequivalence_residual = equivalence_search(member, seed_member, options.certify_restarts, seed, eo).residual;
  c.commutant_dim = genericity_test(member);
  c.restarts = options.certify_restarts;
  return c;
}

}  // namespace

IsospectralFamily build_family(const JMap& j0, int n_steps, double h, const FamilyOptions& options) {
  if (n_steps < 0) throw std::invalid_argument("build_family: n_steps must be nonnegative");
  if (!(h > 0.0)) throw std::invalid_argument("build_family: h must be positive");
  if (genericity_test(j0) != 0) throw std::invalid_argument("build_family: seed j-map is not generic");

  IsospectralFamily family;
  const TangentSpace seed_tangents = isospectral_tangents(j0);
  family.seed_report = seed_tangents.report;
  if (seed_tangents.report.excess <= 0) throw NoDeformationError("build_family: tangent excess is zero");

  const SpectralTargets targets = SpectralTargets::of(j0);
  family.params.push_back(0.0);
  family.members.push_back(j0);
  family.certificates.push_back(certify(j0, j0, targets.forms, derive_seed(options.seed, 0), options));

  double t = 0.0;
  double step = h;
  Vec previous;
  for (int s = 1; s <= n_steps; ++s) {
    const JMap& current = family.members.back();
    const TangentSpace tangents = s == 1 ? seed_tangents : isospectral_tangents(current);
    if (tangents.report.excess <= 0) {
      family.diagnostic = "tangent excess vanished at step " + std::to_string(s);
      break;
    }
    const Vec direction = transverse_direction(tangents, previous.size() ? &previous : nullptr);

    std::optional<JMap> next;
    std::string last_error;
    while (!next && step >= options.min_step) {
      try {
        next = step_and_project(current, direction, step, targets, options.step);
      } catch (const StepFailure& e) {
        last_error = e.what();
        step *= 0.5;
      }
    }
    if (!next) {
      family.diagnostic = "step " + std::to_string(s) + " failed below minimum step size: " + last_error;
      break;
    }

    const Certificate cert = certify(*next, j0, targets.forms, derive_seed(options.seed, static_cast<std::uint64_t>(s)), options);
    if (!(cert.isospectral_residual <= options.iso_tol)) {
      std::ostringstream msg;
      msg << "member " << s << " failed isospectral certification (residual " << cert.isospectral_residual << ")";
      family.diagnostic = msg.str();
      break;
    }
    t += step;
    previous = direction;
    family.params.push_back(t);
    family.members.push_back(std::move(*next));
    family.certificates.push_back(cert);
    step = std::min(h, 2.0 * step);
  }
  return family;
}

IsospectralFamily scale_family(const IsospectralFamily& family, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("scale_family: c must be positive");
  IsospectralFamily out;
  out.params = family.params;
  out.seed_report = family.seed_report;
  out.diagnostic = family.diagnostic;
  if (family.members.empty()) return out;
  for (const auto& member : family.members) out.members.push_back(member.scaled(c));
  const auto seed_forms = power_trace_forms(out.members.front());
  for (std::size_t i = 0; i < out.members.size(); ++i) {
    Certificate cert = family.certificates.at(i);
    cert.isospectral_residual = isospectral_to_forms(seed_forms, out.members[i]).max_deviation;
    // The equivalence objective is homogeneous of degree one in (j, j').
    cert.inequivalence_residual *= c;
    out.certificates.push_back(cert);
  }
  return out;
}

GenericSample deformable_generic_jmap(int m, int k, std::uint64_t seed, int max_attempts) {
  return random_generic_jmap(
      m, k, seed, [](const JMap& j) { return isospectral_tangents(j).report.excess >= 1; }, max_attempts);
}

}  // namespace isodeform
