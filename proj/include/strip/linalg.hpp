#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <vector>

namespace strip {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;

/// Largest singular value.
template <typename Derived>
double operator_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  using Plain = typename Derived::PlainObject;
  Eigen::JacobiSVD<Plain> svd(m.eval());
  return svd.singularValues()(0);
}

/// The standard symplectic form [[0, -I], [I, 0]] of order 2n.
Matrix symplectic_form(int n);

/// Symplectic inverse -J M^T J, exact for any M with M^T J M = J.
template <typename Derived>
typename Derived::PlainObject symplectic_inverse(const Eigen::MatrixBase<Derived>& m) {
  const Eigen::Index two_n = m.rows();
  const Eigen::Index n = two_n / 2;
  typename Derived::PlainObject out(two_n, two_n);
  // -J M^T J with J = [[0,-I],[I,0]] gives [[D^T, -B^T], [-C^T, A^T]].
  out.topLeftCorner(n, n) = m.bottomRightCorner(n, n).transpose();
  out.topRightCorner(n, n) = -m.topRightCorner(n, n).transpose();
  out.bottomLeftCorner(n, n) = -m.bottomLeftCorner(n, n).transpose();
  out.bottomRightCorner(n, n) = m.topLeftCorner(n, n).transpose();
  return out;
}

/// All p-element subsets of {0, ..., n-1} in lexicographic order.
std::vector<std::vector<int>> combinations(int n, int p);

/// Binomial coefficient for small arguments.
std::int64_t binomial(int n, int k);

}  // namespace strip
