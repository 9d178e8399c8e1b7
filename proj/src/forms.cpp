#include "isodeform/forms.hpp"

#include <boost/math/distributions/normal.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace isodeform {

namespace {

void append_monomials(int k, int degree, Exponent& prefix, std::vector<Exponent>& out) {
  if (k == 1) {
    prefix.push_back(degree);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int a = degree; a >= 0; --a) {
    prefix.push_back(a);
    append_monomials(k - 1, degree - a, prefix, out);
    prefix.pop_back();
  }
}

double horner(const double* coeffs, int k, int degree, const double* z) {
  if (k == 1) return coeffs[0] * std::pow(z[0], degree);
  double acc = 0.0;
  const double* block = coeffs;
  for (int a = degree; a >= 0; --a) {
    const double inner = horner(block, k - 1, degree - a, z + 1);
    acc = acc * z[0] + inner;
    block += monomial_count(k - 1, degree - a);
  }
  return acc;
}

}  // namespace

std::size_t monomial_count(int k, int degree) {
  // C(degree + k - 1, k - 1)
  std::size_t num = 1;
  std::size_t den = 1;
  for (int i = 1; i < k; ++i) {
    num *= static_cast<std::size_t>(degree + i);
    den *= static_cast<std::size_t>(i);
  }
  return num / den;
}

std::vector<Exponent> monomials(int k, int degree) {
  if (k < 1 || degree < 0) throw DimensionError("monomials: need k >= 1 and degree >= 0");
  std::vector<Exponent> out;
  out.reserve(monomial_count(k, degree));
  Exponent prefix;
  append_monomials(k, degree, prefix, out);
  return out;
}

HomogeneousForm::HomogeneousForm(int k, int degree)
    : HomogeneousForm(k, degree, Vec::Zero(static_cast<Eigen::Index>(monomial_count(k, degree)))) {}

HomogeneousForm::HomogeneousForm(int k, int degree, Vec coeffs)
    : k_(k), degree_(degree), coeffs_(std::move(coeffs)) {
  if (k < 1 || degree < 0) throw DimensionError("HomogeneousForm: need k >= 1 and degree >= 0");
  if (static_cast<std::size_t>(coeffs_.size()) != monomial_count(k, degree))
    throw DimensionError("HomogeneousForm: coefficient count does not match monomial count");
}

double HomogeneousForm::operator()(const Eigen::Ref<const Vec>& z) const {
  if (z.size() != k_) throw DimensionError("HomogeneousForm: evaluation point has wrong dimension");
  const Vec zz = z;
  return horner(coeffs_.data(), k_, degree_, zz.data());
}

double HomogeneousForm::evaluate_naive(const Eigen::Ref<const Vec>& z) const {
  if (z.size() != k_) throw DimensionError("HomogeneousForm: evaluation point has wrong dimension");
  const auto mons = monomials(k_, degree_);
  double sum = 0.0;
  for (std::size_t i = 0; i < mons.size(); ++i) {
    double term = coeffs_[static_cast<Eigen::Index>(i)];
    for (int v = 0; v < k_; ++v) term *= std::pow(z[v], mons[i][static_cast<std::size_t>(v)]);
    sum += term;
  }
  return sum;
}

const std::vector<int>& first_primes(std::size_t count) {
  static thread_local std::vector<int> primes{2};
  while (primes.size() < count) {
    int candidate = primes.back() + 1;
    for (;; ++candidate) {
      bool is_prime = true;
      for (int p : primes) {
        if (p * p > candidate) break;
        if (candidate % p == 0) {
          is_prime = false;
          break;
        }
      }
      if (is_prime) break;
    }
    primes.push_back(candidate);
  }
  return primes;
}

double radical_inverse(std::uint64_t index, int base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f /= base;
  }
  return result;
}

Mat interpolation_nodes(int k, std::size_t count) {
  Mat Z(k, static_cast<Eigen::Index>(count));
  if (k == 1) {
    Z.setOnes();
    return Z;
  }
  if (k == 2) {
    for (std::size_t l = 0; l < count; ++l) {
      const double theta = std::numbers::pi * static_cast<double>(l) / static_cast<double>(count);
      Z(0, static_cast<Eigen::Index>(l)) = std::cos(theta);
      Z(1, static_cast<Eigen::Index>(l)) = std::sin(theta);
    }
    return Z;
  }
  const auto& primes = first_primes(static_cast<std::size_t>(k));
  const boost::math::normal_distribution<double> normal;
  for (std::size_t l = 0; l < count; ++l) {
    Vec g(k);
    for (int v = 0; v < k; ++v)
      g[v] = boost::math::quantile(normal, radical_inverse(l + 1, primes[static_cast<std::size_t>(v)]));
    Z.col(static_cast<Eigen::Index>(l)) = g.normalized();
  }
  return Z;
}

Mat monomial_matrix(int k, int degree, const Mat& Z) {
  const auto mons = monomials(k, degree);
  Mat V(Z.cols(), static_cast<Eigen::Index>(mons.size()));
  for (Eigen::Index l = 0; l < Z.cols(); ++l)
    for (std::size_t i = 0; i < mons.size(); ++i) {
      double term = 1.0;
      for (int v = 0; v < k; ++v) term *= std::pow(Z(v, l), mons[i][static_cast<std::size_t>(v)]);
      V(l, static_cast<Eigen::Index>(i)) = term;
    }
  return V;
}

FormFitter::FormFitter(int k, int degree)
    : k_(k), degree_(degree), nodes_(interpolation_nodes(k, monomial_count(k, degree))) {
  const Mat V = monomial_matrix(k, degree, nodes_);
  Eigen::JacobiSVD<Mat> svd(V);
  const Vec s = svd.singularValues();
  cond_ = s[s.size() - 1] > 0.0 ? s[0] / s[s.size() - 1] : std::numeric_limits<double>::infinity();
  if (!(cond_ < 1e12)) {
    std::ostringstream msg;
    msg << "interpolation system for k=" << k << ", degree=" << degree << " is singular (condition number "
        << cond_ << ")";
    throw NumericalError(msg.str());
  }
  lu_.compute(V);
}

Vec FormFitter::coefficients(const Vec& node_values) const { return lu_.solve(node_values); }

Mat FormFitter::coefficients(const Mat& node_values) const { return lu_.solve(node_values); }

HomogeneousForm FormFitter::fit(const std::function<double(const Vec&)>& f) const {
  Vec values(nodes_.cols());
  for (Eigen::Index l = 0; l < nodes_.cols(); ++l) values[l] = f(nodes_.col(l));
  return HomogeneousForm(k_, degree_, coefficients(values));
}

}  // namespace isodeform
