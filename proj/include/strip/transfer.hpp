#pragma once

// Exact transfer matrices of -u'' + V u = E u across piecewise-constant
// cells. A transfer matrix maps (u(x0), u'(x0)) to (u(x1), u'(x1)).

#include "strip/linalg.hpp"
#include "strip/model.hpp"

#include <cmath>
#include <complex>
#include <map>
#include <type_traits>
#include <vector>

namespace strip {

namespace detail {
template <typename T>
double magnitude(const T& x) {
  using std::abs;
  return abs(x);
}
}  // namespace detail

/// C(x) = sum_k x^k / (2k)!, i.e. cosh(sqrt(x)) without a branch cut.
template <typename T>
T entire_c(const T& x) {
  if (detail::magnitude(x) <= 0.25) {
    T term(1.0), sum(1.0);
    for (int k = 1; k < 12; ++k) {
      term *= x / static_cast<double>((2 * k - 1) * (2 * k));
      sum += term;
    }
    return sum;
  }
  if constexpr (std::is_same_v<T, double>) {
    return x > 0.0 ? std::cosh(std::sqrt(x)) : std::cos(std::sqrt(-x));
  } else {
    return std::cosh(std::sqrt(x));
  }
}

/// S(x) = sum_k x^k / (2k+1)!, i.e. sinh(sqrt(x)) / sqrt(x).
template <typename T>
T entire_s(const T& x) {
  if (detail::magnitude(x) <= 0.25) {
    T term(1.0), sum(1.0);
    for (int k = 1; k < 12; ++k) {
      term *= x / static_cast<double>((2 * k) * (2 * k + 1));
      sum += term;
    }
    return sum;
  }
  if constexpr (std::is_same_v<T, double>) {
    if (x > 0.0) {
      const double r = std::sqrt(x);
      return std::sinh(r) / r;
    }
    const double r = std::sqrt(-x);
    return std::sin(r) / r;
  } else {
    const T r = std::sqrt(x);
    return std::sinh(r) / r;
  }
}

/// A cell with each constant piece diagonalized once, so transfers over
/// arbitrary sub-intervals and energies are cheap.
class DiagonalizedCell {
 public:
  explicit DiagonalizedCell(const CellPotential& cell);

  int channels() const { return channels_; }

  /// Transfer across [a, b] with 0 <= a <= b <= 1.
  Matrix transfer(double a, double b, double energy) const;
  CMatrix transfer(double a, double b, Complex energy) const;

 private:
  struct Piece {
    double start;
    double end;
    Matrix basis;        // orthonormal eigenvectors of V
    Vector eigenvalues;  // of V
  };

  template <typename Scalar>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> transfer_impl(double a, double b, Scalar energy) const;

  int channels_;
  std::vector<Piece> pieces_;
};

/// Transfer matrix across the whole unit cell.
Matrix cell_transfer(const CellPotential& cell, double energy);
CMatrix cell_transfer(const CellPotential& cell, Complex energy);

/// Memo of per-cell matrices at a fixed energy, keyed by the cell's exact
/// piece data. Discrete disorder laws produce few distinct cells, so this
/// turns most transfer evaluations into lookups. Bounded in size.
class CellMatrixCache {
 public:
  explicit CellMatrixCache(std::size_t capacity = 256) : capacity_(capacity) {}

  template <typename Compute>
  const Matrix& get(const CellPotential& cell, Compute&& compute) {
    key_.clear();
    for (const auto& p : cell.pieces()) {
      key_.push_back(p.start);
      key_.insert(key_.end(), p.value.data(), p.value.data() + p.value.size());
    }
    if (auto it = entries_.find(key_); it != entries_.end()) return it->second;
    if (entries_.size() >= capacity_) {
      scratch_ = compute(cell);
      return scratch_;
    }
    return entries_.emplace(key_, compute(cell)).first->second;
  }

 private:
  std::size_t capacity_;
  std::map<std::vector<double>, Matrix> entries_;
  std::vector<double> key_;
  Matrix scratch_;
};

/// Matrix of p x p minors, rows and columns in lexicographic subset order.
/// Requires an even-sized square matrix of order 2N and 1 <= p <= N.
Matrix exterior_power(const Matrix& m, int p);

/// ||M^T J M - J|| in operator norm.
double symplectic_residual(const Matrix& m);

}  // namespace strip
