#pragma once

#include "isodeform/common.hpp"

#include <functional>

namespace isodeform {

using Exponent = std::vector<int>;

/// Exponent vectors of the degree-d monomials in k variables, graded-lex
/// order (descending powers of z_1 first).
std::vector<Exponent> monomials(int k, int degree);
std::size_t monomial_count(int k, int degree);

/// A homogeneous polynomial in k variables with dense coefficients over
/// `monomials(k, degree)`.
class HomogeneousForm {
 public:
  HomogeneousForm(int k, int degree);
  HomogeneousForm(int k, int degree, Vec coeffs);

  int k() const { return k_; }
  int degree() const { return degree_; }
  const Vec& coeffs() const { return coeffs_; }

  /// Nested Horner evaluation in z_1, then z_2, ...
  double operator()(const Eigen::Ref<const Vec>& z) const;

  /// Sum of coefficient · monomial with explicit powers.
  double evaluate_naive(const Eigen::Ref<const Vec>& z) const;

  double max_abs_coeff() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : 0.0; }

 private:
  int k_;
  int degree_;
  Vec coeffs_;
};

/// Deterministic interpolation nodes on the unit sphere in R^k: for k = 2
/// equally spaced angles on the half-circle, for k = 1 the point 1, and for
/// k > 2 Halton points pushed through the normal quantile and normalized.
Mat interpolation_nodes(int k, std::size_t count);

/// Values of the monomials of `monomials(k, degree)` at the columns of Z.
Mat monomial_matrix(int k, int degree, const Mat& Z);

/// Fits the degree-d form in k variables that interpolates `f` at
/// `interpolation_nodes`. Throws NumericalError (with the condition number)
/// if the node system is singular to working precision.
class FormFitter {
 public:
  FormFitter(int k, int degree);

  int k() const { return k_; }
  int degree() const { return degree_; }
  const Mat& nodes() const { return nodes_; }  // k × N
  double condition_number() const { return cond_; }

  /// Coefficients from node values (length N).
  Vec coefficients(const Vec& node_values) const;
  /// Coefficient-space image of many value vectors at once (columns).
  Mat coefficients(const Mat& node_values) const;

  HomogeneousForm fit(const std::function<double(const Vec&)>& f) const;

 private:
  int k_;
  int degree_;
  Mat nodes_;
  Eigen::PartialPivLU<Mat> lu_;
  double cond_ = 0.0;
};

/// Halton point (base primes 2, 3, 5, ...) with optional digital shift.
double radical_inverse(std::uint64_t index, int base);
const std::vector<int>& first_primes(std::size_t count);

}  // namespace isodeform
