#pragma once

#include "isodeform/common.hpp"

namespace isodeform {

/// Skew-symmetric m×m matrices, coordinatized by their strict upper
/// triangle in row-major order: (0,1), (0,2), ..., (m-2,m-1).
int skew_dim(int m);
Mat skew_basis_element(int m, int index);
Vec skew_to_params(const Mat& S);
Mat params_to_skew(int m, const Eigen::Ref<const Vec>& p);

/// 2×2 rotation generator [[0,-1],[1,0]].
Eigen::Matrix2d rotation_generator();

/// Orthogonal polar factor U Vᵀ of M = U Σ Vᵀ.
Mat polar_factor(const Mat& M);

/// Haar-distributed element of O(n).
Mat random_orthogonal(int n, Rng& rng);

/// max |QᵀQ - I|.
double orthogonality_defect(const Mat& Q);

/// Real canonical form of a skew-symmetric matrix: Qᵀ S Q is block
/// diagonal with blocks [[0,-σ_l],[σ_l,0]], σ_1 ≥ σ_2 ≥ ... > 0, followed
/// by a zero block.
struct SkewCanonicalForm {
  Mat Q;
  Vec sigma;  // one entry per 2×2 block, descending
};

/// Eigenvalues of S² whose magnitudes agree to cluster_rel_gap ·
/// spectral radius are treated as one cluster; each cluster's invariant
/// subspace is split into 2-planes deterministically.
SkewCanonicalForm skew_canonical_form(const Mat& S, double cluster_rel_gap = 1e-8);

/// Block-diagonal matrix assembled from a canonical form.
Mat canonical_block_matrix(int m, const Vec& sigma);

}  // namespace isodeform
