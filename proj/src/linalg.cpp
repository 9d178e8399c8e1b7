#include "isodeform/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isodeform {

int skew_dim(int m) { return m * (m - 1) / 2; }

namespace {

std::pair<int, int> skew_index_pair(int m, int index) {
  int a = 0;
  int remaining = index;
  while (remaining >= m - 1 - a) {
    remaining -= m - 1 - a;
    ++a;
  }
  return {a, a + 1 + remaining};
}

}  // namespace

Mat skew_basis_element(int m, int index) {
  if (index < 0 || index >= skew_dim(m)) throw DimensionError("skew basis index out of range");
  const auto [a, b] = skew_index_pair(m, index);
  Mat E = Mat::Zero(m, m);
  E(a, b) = 1.0;
  E(b, a) = -1.0;
  return E;
}

Vec skew_to_params(const Mat& S) {
  const int m = static_cast<int>(S.rows());
  Vec p(skew_dim(m));
  int idx = 0;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) p[idx++] = S(a, b);
  return p;
}

Mat params_to_skew(int m, const Eigen::Ref<const Vec>& p) {
  if (p.size() != skew_dim(m)) throw DimensionError("skew parameter vector has wrong length");
  Mat S = Mat::Zero(m, m);
  int idx = 0;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      S(a, b) = p[idx];
      S(b, a) = -p[idx];
      ++idx;
    }
  return S;
}

Eigen::Matrix2d rotation_generator() {
  Eigen::Matrix2d R;
  R << 0.0, -1.0, 1.0, 0.0;
  return R;
}

Mat polar_factor(const Mat& M) {
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

Mat random_orthogonal(int n, Rng& rng) {
  const Mat G = gaussian_vector(rng, static_cast<Eigen::Index>(n) * n).reshaped(n, n);
  Eigen::HouseholderQR<Mat> qr(G);
  Mat Q = qr.householderQ() * Mat::Identity(n, n);
  const Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (R(i, i) < 0.0) Q.col(i) = -Q.col(i);
  return Q;
}

double orthogonality_defect(const Mat& Q) {
  return (Q.transpose() * Q - Mat::Identity(Q.cols(), Q.cols())).cwiseAbs().maxCoeff();
}

SkewCanonicalForm skew_canonical_form(const Mat& S, double cluster_rel_gap) {
  const int m = static_cast<int>(S.rows());
  if (S.cols() != m) throw DimensionError("skew_canonical_form: matrix not square");

  // -S² is symmetric positive semidefinite with eigenvalues σ_l², each twice.
  const Mat negsq = -(S * S);
  Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (negsq + negsq.transpose()));
  const Vec lambda = eig.eigenvalues();
  const Mat vecs = eig.eigenvectors();

  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return lambda[a] > lambda[b]; });

  const double rho2 = std::max(lambda.maxCoeff(), 0.0);
  const double rho = std::sqrt(rho2);
  // λ carries absolute error ~eps·ρ², so σ below 1e-6·ρ cannot be told apart from 0.
  const double zero_cut = 1e-12 * rho2;

  SkewCanonicalForm out;
  out.Q = Mat::Zero(m, m);
  std::vector<double> sigmas;
  int filled = 0;

  std::size_t pos = 0;
  while (pos < order.size() && rho2 > 0.0 && lambda[order[pos]] > zero_cut) {
    std::size_t end = pos + 1;
    while (end < order.size() && lambda[order[end]] > zero_cut &&
           std::sqrt(lambda[order[end - 1]]) - std::sqrt(lambda[order[end]]) <= cluster_rel_gap * rho)
      ++end;

    Mat cluster(m, static_cast<Eigen::Index>(end - pos));
    for (std::size_t c = pos; c < end; ++c) cluster.col(static_cast<Eigen::Index>(c - pos)) = vecs.col(order[c]);

    for (Eigen::Index c = 0; c < cluster.cols(); ++c) {
      Vec v = cluster.col(c);
      if (filled > 0) v -= out.Q.leftCols(filled) * (out.Q.leftCols(filled).transpose() * v);
      if (v.norm() < 0.5) continue;
      v.normalize();
      Vec w = S * v;
      const double sigma_raw = w.norm();
      if (sigma_raw == 0.0) continue;
      w /= sigma_raw;
      w -= out.Q.leftCols(filled) * (out.Q.leftCols(filled).transpose() * w);
      w -= v * v.dot(w);
      w.normalize();
      if (filled + 2 > m) break;
      out.Q.col(filled) = v;
      out.Q.col(filled + 1) = w;
      sigmas.push_back(w.dot(S * v));
      filled += 2;
    }
    pos = end;
  }

  // Remaining directions: orthonormal completion inside the kernel.
  for (std::size_t c = 0; c < order.size() && filled < m; ++c) {
    Vec v = vecs.col(order[order.size() - 1 - c]);
    if (filled > 0) v -= out.Q.leftCols(filled) * (out.Q.leftCols(filled).transpose() * v);
    if (v.norm() < 1e-3) continue;
    if (filled > 0) v -= out.Q.leftCols(filled) * (out.Q.leftCols(filled).transpose() * v);
    out.Q.col(filled++) = v.normalized();
  }
  if (filled != m) throw NumericalError("skew_canonical_form: failed to complete orthonormal basis");

  out.sigma = Eigen::Map<const Vec>(sigmas.data(), static_cast<Eigen::Index>(sigmas.size()));
  return out;
}

Mat canonical_block_matrix(int m, const Vec& sigma) {
  Mat L = Mat::Zero(m, m);
  for (Eigen::Index l = 0; l < sigma.size(); ++l) {
    L(2 * l, 2 * l + 1) = -sigma[l];
    L(2 * l + 1, 2 * l) = sigma[l];
  }
  return L;
}

}  // namespace isodeform
