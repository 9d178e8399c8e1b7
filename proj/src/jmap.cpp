#include "isodeform/jmap.hpp"

#include "isodeform/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace isodeform {

namespace {

Mat antisymmetrized(const Mat& M) { return 0.5 * (M - M.transpose()); }

Mat matrix_power(const Mat& M, int p) {
  Mat result = Mat::Identity(M.rows(), M.cols());
  Mat base = M;
  while (p > 0) {
    if (p & 1) result = result * base;
    base = base * base;
    p >>= 1;
  }
  return result;
}

}  // namespace

// ---------------------------------------------------------------- JMap

JMap::JMap(int m, int k, std::vector<Mat> mats, double skew_tol) : m_(m), k_(k), mats_(std::move(mats)) {
  if (m < 1 || k < 1) throw DimensionError("JMap: need m >= 1 and k >= 1");
  if (static_cast<int>(mats_.size()) != k) throw DimensionError("JMap: expected k matrices");
  for (const auto& J : mats_) {
    if (J.rows() != m || J.cols() != m) throw DimensionError("JMap: matrix is not m×m");
    const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
    if ((J + J.transpose()).cwiseAbs().maxCoeff() > skew_tol * scale)
      throw std::invalid_argument("JMap: matrix is not skew-symmetric");
  }
}

JMap JMap::zero(int m, int k) { return JMap(m, k, std::vector<Mat>(static_cast<std::size_t>(k), Mat::Zero(m, m))); }

JMap JMap::from_params(int m, int k, const Eigen::Ref<const Vec>& params) {
  const int p = skew_dim(m);
  if (params.size() != k * p) throw DimensionError("JMap::from_params: wrong parameter count");
  std::vector<Mat> mats;
  mats.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) mats.push_back(params_to_skew(m, params.segment(i * p, p)));
  return JMap(m, k, std::move(mats));
}

Mat JMap::operator()(const Eigen::Ref<const Vec>& z) const {
  if (z.size() != k_) throw DimensionError("JMap: z has wrong dimension");
  Mat out = Mat::Zero(m_, m_);
  for (int i = 0; i < k_; ++i) out += z[i] * mats_[static_cast<std::size_t>(i)];
  return out;
}

Vec JMap::params() const {
  const int p = skew_dim(m_);
  Vec out(k_ * p);
  for (int i = 0; i < k_; ++i) out.segment(i * p, p) = skew_to_params(mats_[static_cast<std::size_t>(i)]);
  return out;
}

JMap JMap::scaled(double c) const {
  std::vector<Mat> mats;
  for (const auto& J : mats_) mats.push_back(c * J);
  return JMap(m_, k_, std::move(mats));
}

JMap JMap::conjugated(const Mat& A) const {
  if (A.rows() != m_ || A.cols() != m_) throw DimensionError("JMap::conjugated: A is not m×m");
  std::vector<Mat> mats;
  for (const auto& J : mats_) mats.push_back(antisymmetrized(A * J * A.transpose()));
  return JMap(m_, k_, std::move(mats));
}

double JMap::frobenius_norm() const {
  double s = 0.0;
  for (const auto& J : mats_) s += J.squaredNorm();
  return std::sqrt(s);
}

bool operator==(const JMap& a, const JMap& b) {
  if (a.m_ != b.m_ || a.k_ != b.k_) return false;
  for (int i = 0; i < a.k_; ++i)
    if (a.mat(i) != b.mat(i)) return false;
  return true;
}

// ---------------------------------------------------------------- sampling

JMap random_jmap(int m, int k, std::uint64_t seed) {
  if (m < 2 || k < 1) throw DimensionError("random_jmap: need m >= 2 and k >= 1");
  Rng rng(seed);
  std::vector<Mat> mats;
  for (int i = 0; i < k; ++i) {
    const Mat G = gaussian_vector(rng, static_cast<Eigen::Index>(m) * m).reshaped(m, m);
    mats.push_back((G - G.transpose()) / std::numbers::sqrt2);
  }
  return JMap(m, k, std::move(mats));
}

GenericSample random_generic_jmap(int m, int k, std::uint64_t seed,
                                  const std::function<bool(const JMap&)>& extra_condition, int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const std::uint64_t s = seed + static_cast<std::uint64_t>(attempt);
    JMap j = random_jmap(m, k, s);
    if (genericity_test(j) != 0) continue;
    if (extra_condition && !extra_condition(j)) continue;
    return GenericSample{std::move(j), s, attempt + 1};
  }
  std::ostringstream msg;
  msg << "no generic j-map found for m=" << m << ", k=" << k << " in " << max_attempts << " reseeds from " << seed;
  throw NumericalError(msg.str());
}

// ---------------------------------------------------------------- power traces

HomogeneousForm power_trace_form(const JMap& j, int r) {
  if (r < 1 || r > j.m() / 2) throw DimensionError("power_trace_form: need 1 <= r <= floor(m/2)");
  const FormFitter fitter(j.k(), 2 * r);
  const Mat& nodes = fitter.nodes();
  Vec values(nodes.cols());
  for (Eigen::Index l = 0; l < nodes.cols(); ++l) {
    const Mat M = j(nodes.col(l));
    values[l] = matrix_power(M * M, r).trace();
  }
  return HomogeneousForm(j.k(), 2 * r, fitter.coefficients(values));
}

std::vector<HomogeneousForm> power_trace_forms(const JMap& j) {
  std::vector<HomogeneousForm> out;
  for (int r = 1; r <= j.m() / 2; ++r) out.push_back(power_trace_form(j, r));
  return out;
}

double form_deviation(const HomogeneousForm& a, const HomogeneousForm& b, double absolute_floor) {
  if (a.k() != b.k() || a.degree() != b.degree()) throw DimensionError("form_deviation: shape mismatch");
  const double diff = (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff();
  const double scale = std::max(a.max_abs_coeff(), b.max_abs_coeff());
  return scale < absolute_floor ? diff : diff / scale;
}

IsospectralReport isospectral_to_forms(const std::vector<HomogeneousForm>& reference, const JMap& j2, double tol) {
  if (static_cast<int>(reference.size()) != j2.m() / 2) throw DimensionError("isospectral: form count mismatch");
  IsospectralReport report;
  for (int r = 1; r <= j2.m() / 2; ++r) {
    const double dev = form_deviation(reference[static_cast<std::size_t>(r - 1)], power_trace_form(j2, r));
    report.deviation_per_r.push_back(dev);
    report.max_deviation = std::max(report.max_deviation, dev);
  }
  report.isospectral = report.max_deviation <= tol;
  return report;
}

IsospectralReport isospectral(const JMap& j, const JMap& j2, double tol) {
  if (j.m() != j2.m() || j.k() != j2.k()) throw DimensionError("isospectral: (m, k) mismatch");
  return isospectral_to_forms(power_trace_forms(j), j2, tol);
}

// ---------------------------------------------------------------- conjugators

Mat canonical_conjugator(const Mat& from, const Mat& to) {
  const auto c1 = skew_canonical_form(from);
  const auto c2 = skew_canonical_form(to);
  return c2.Q * c1.Q.transpose();
}

Mat conjugator_at(const JMap& j, const JMap& j2, const Eigen::Ref<const Vec>& z, double spectrum_tol) {
  if (j.m() != j2.m() || j.k() != j2.k()) throw DimensionError("conjugator_at: (m, k) mismatch");
  const Mat S1 = j(z);
  const Mat S2 = j2(z);
  const auto c1 = skew_canonical_form(S1);
  const auto c2 = skew_canonical_form(S2);
  const double radius = std::max({c1.sigma.size() ? c1.sigma[0] : 0.0, c2.sigma.size() ? c2.sigma[0] : 0.0});
  bool match = c1.sigma.size() == c2.sigma.size();
  if (match && c1.sigma.size() > 0) match = (c1.sigma - c2.sigma).cwiseAbs().maxCoeff() <= spectrum_tol * radius;
  if (!match) {
    std::ostringstream msg;
    msg << "conjugator_at: j(z) and j'(z) have different spectra (blocks " << c1.sigma.transpose() << " vs "
        << c2.sigma.transpose() << ")";
    throw NotIsospectralError(msg.str());
  }
  return c2.Q * c1.Q.transpose();
}

// ---------------------------------------------------------------- genericity

int genericity_test(const JMap& j, double tol) {
  const int m = j.m();
  const int p = skew_dim(m);
  if (p == 0) return 0;
  Mat op(static_cast<Eigen::Index>(j.k()) * m * m, p);
  for (int q = 0; q < p; ++q) {
    const Mat E = skew_basis_element(m, q);
    for (int i = 0; i < j.k(); ++i) {
      const Mat comm = E * j.mat(i) - j.mat(i) * E;
      op.block(static_cast<Eigen::Index>(i) * m * m, q, m * m, 1) = comm.reshaped();
    }
  }
  Eigen::JacobiSVD<Mat> svd(op);
  const Vec s = svd.singularValues();
  const double cut = tol * std::max(1.0, s[0]);
  int nullity = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] < cut) ++nullity;
  return nullity;
}

// ---------------------------------------------------------------- equivalence search

Mat equivalence_sample_directions(int k) {
  const int count = 4 * k;
  if (k == 2) {
    Mat Z(2, count);
    for (int s = 0; s < count; ++s) {
      const double theta = std::numbers::pi * s / count;
      Z(0, s) = std::cos(theta);
      Z(1, s) = std::sin(theta);
    }
    return Z;
  }
  return interpolation_nodes(k, static_cast<std::size_t>(count));
}

namespace {

struct EquivalenceProblem {
  const JMap& j;
  const JMap& j2;
  Mat Z;
  std::vector<Mat> jz;  // j(z_s)

  EquivalenceProblem(const JMap& a, const JMap& b) : j(a), j2(b), Z(equivalence_sample_directions(a.k())) {
    for (Eigen::Index s = 0; s < Z.cols(); ++s) jz.push_back(j(Z.col(s)));
  }

  Vec residual(const Mat& A, const Mat& C) const {
    const int m = j.m();
    Vec r(static_cast<Eigen::Index>(jz.size()) * m * m);
    for (std::size_t s = 0; s < jz.size(); ++s) {
      const Mat R = A * jz[s] * A.transpose() - j2(C * Z.col(static_cast<Eigen::Index>(s)));
      r.segment(static_cast<Eigen::Index>(s) * m * m, m * m) = R.reshaped();
    }
    return r;
  }

  Mat jacobian(const Mat& A, const Mat& C) const {
    const int m = j.m();
    const int k = j.k();
    const int pm = skew_dim(m);
    const int pk = skew_dim(k);
    Mat Jac(static_cast<Eigen::Index>(jz.size()) * m * m, pm + pk);
    for (int q = 0; q < pm; ++q) {
      const Mat E = skew_basis_element(m, q);
      for (std::size_t s = 0; s < jz.size(); ++s) {
        const Mat D = A * (E * jz[s] - jz[s] * E) * A.transpose();
        Jac.block(static_cast<Eigen::Index>(s) * m * m, q, m * m, 1) = D.reshaped();
      }
    }
    for (int q = 0; q < pk; ++q) {
      const Mat F = skew_basis_element(k, q);
      for (std::size_t s = 0; s < jz.size(); ++s) {
        const Mat D = -j2(C * F * Z.col(static_cast<Eigen::Index>(s)));
        Jac.block(static_cast<Eigen::Index>(s) * m * m, pm + q, m * m, 1) = D.reshaped();
      }
    }
    return Jac;
  }
};

}  // namespace

double equivalence_residual(const JMap& j, const JMap& j2, const Mat& A, const Mat& C) {
  const EquivalenceProblem problem(j, j2);
  return problem.residual(A, C).norm();
}

EquivalenceWitness equivalence_local_search(const JMap& j, const JMap& j2, Mat A, Mat C,
                                            const EquivalenceOptions& options) {
  if (j.m() != j2.m() || j.k() != j2.k()) throw DimensionError("equivalence_search: (m, k) mismatch");
  const EquivalenceProblem problem(j, j2);
  const int m = j.m();
  const int k = j.k();
  const int pm = skew_dim(m);
  const int pk = skew_dim(k);
  const double scale = std::max(j.frobenius_norm(), j2.frobenius_norm());

  Vec r = problem.residual(A, C);
  double cost = r.squaredNorm();
  double mu = -1.0;
  int stalls = 0;

  for (int it = 0; it < options.max_iterations; ++it) {
    if (std::sqrt(cost) <= 1e-15 * std::max(scale, 1.0)) break;
    const Mat Jac = problem.jacobian(A, C);
    const Mat JtJ = Jac.transpose() * Jac;
    const Vec g = Jac.transpose() * r;
    if (mu < 0.0) mu = 1e-3 * std::max(JtJ.diagonal().maxCoeff(), 1e-300);

    bool accepted = false;
    for (int attempt = 0; attempt < 30 && !accepted; ++attempt) {
      Mat H = JtJ;
      H.diagonal().array() += mu;
      const Vec delta = H.ldlt().solve(-g);
      const Mat X = params_to_skew(m, delta.head(pm));
      const Mat A_new = polar_factor(A + A * X);
      const Mat C_new = pk > 0 ? polar_factor(C + C * params_to_skew(k, delta.tail(pk))) : C;
      const Vec r_new = problem.residual(A_new, C_new);
      const double cost_new = r_new.squaredNorm();
      if (cost_new < cost) {
        const double rel_gain = (cost - cost_new) / cost;
        A = A_new;
        C = C_new;
        r = r_new;
        cost = cost_new;
        mu = std::max(mu / 3.0, 1e-300);
        accepted = true;
        stalls = rel_gain < 1e-12 ? stalls + 1 : 0;
      } else {
        mu *= 4.0;
      }
    }
    if (!accepted || stalls >= 3) break;
  }
  return EquivalenceWitness{std::move(A), std::move(C), std::sqrt(cost), 0};
}

EquivalenceWitness equivalence_search(const JMap& j, const JMap& j2, int restarts, std::uint64_t seed,
                                      const EquivalenceOptions& options) {
  if (j.m() != j2.m() || j.k() != j2.k()) throw DimensionError("equivalence_search: (m, k) mismatch");
  restarts = std::max(restarts, 1);
  std::vector<EquivalenceWitness> results(static_cast<std::size_t>(restarts));
  for_each_index(results.size(), options.exec, [&](std::size_t i) {
    Mat A = Mat::Identity(j.m(), j.m());
    Mat C = Mat::Identity(j.k(), j.k());
    if (i > 0) {
      Rng rng(derive_seed(seed, i));
      A = random_orthogonal(j.m(), rng);
      C = random_orthogonal(j.k(), rng);
    }
    results[i] = equivalence_local_search(j, j2, std::move(A), std::move(C), options);
    results[i].restart = static_cast<int>(i);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].residual < results[best].residual) best = i;
  return results[best];
}

// ---------------------------------------------------------------- trace words

namespace {

void collect_words(const JMap& j, const Mat& prefix, int length, int target, std::vector<double>& out) {
  if (length == target) {
    out.push_back(prefix.trace());
    return;
  }
  for (int i = 0; i < j.k(); ++i) collect_words(j, prefix * j.mat(i), length + 1, target, out);
}

}  // namespace

std::vector<double> trace_word_invariants(const JMap& j, int max_len) {
  if (max_len < 2) throw std::invalid_argument("trace_word_invariants: need max_len >= 2");
  std::vector<double> out;
  for (int len = 2; len <= max_len; ++len)
    for (int i = 0; i < j.k(); ++i) collect_words(j, j.mat(i), 1, len, out);
  return out;
}

JMap substitute_basis(const JMap& j, const Mat& C, double orth_tol) {
  if (C.rows() != j.k() || C.cols() != j.k()) throw DimensionError("substitute_basis: C is not k×k");
  if (orthogonality_defect(C) > orth_tol) throw std::invalid_argument("substitute_basis: C is not orthogonal");
  std::vector<Mat> mats;
  for (int i = 0; i < j.k(); ++i) {
    Mat Ji = Mat::Zero(j.m(), j.m());
    for (int l = 0; l < j.k(); ++l) Ji += C(l, i) * j.mat(l);
    mats.push_back(std::move(Ji));
  }
  return JMap(j.m(), j.k(), std::move(mats));
}

}  // namespace isodeform
