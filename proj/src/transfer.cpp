#include "strip/transfer.hpp"

#include "strip/errors.hpp"

#include <algorithm>

namespace strip {

DiagonalizedCell::DiagonalizedCell(const CellPotential& cell) : channels_(cell.channels()) {
  const auto& ps = cell.pieces();
  pieces_.reserve(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(ps[i].value);
    if (es.info() != Eigen::Success) throw NumericalError("eigen-decomposition of cell piece failed");
    pieces_.push_back(Piece{ps[i].start, cell.piece_end(i), es.eigenvectors(), es.eigenvalues()});
  }
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> DiagonalizedCell::transfer_impl(double a, double b,
                                                                                      Scalar energy) const {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using V = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (!(a >= 0.0 && a <= b && b <= 1.0)) throw DomainError("segment must satisfy 0 <= a <= b <= 1");
  const int n = channels_;
  M total = M::Identity(2 * n, 2 * n);
  V c(n), s(n), t(n);
  M block(2 * n, 2 * n);
  for (const auto& piece : pieces_) {
    const double lo = std::max(a, piece.start);
    const double hi = std::min(b, piece.end);
    if (!(hi > lo)) continue;
    const double len = hi - lo;
    for (int i = 0; i < n; ++i) {
      const Scalar d = Scalar(piece.eigenvalues(i)) - energy;
      const Scalar x = d * (len * len);
      const Scalar sx = entire_s(x);
      c(i) = entire_c(x);
      s(i) = len * sx;
      t(i) = d * len * sx;
    }
    const M q = piece.basis.template cast<Scalar>();
    block.topLeftCorner(n, n) = q * c.asDiagonal() * q.transpose();
    block.topRightCorner(n, n) = q * s.asDiagonal() * q.transpose();
    block.bottomLeftCorner(n, n) = q * t.asDiagonal() * q.transpose();
    block.bottomRightCorner(n, n) = block.topLeftCorner(n, n);
    total = block * total;
  }
  return total;
}

Matrix DiagonalizedCell::transfer(double a, double b, double energy) const { return transfer_impl(a, b, energy); }

CMatrix DiagonalizedCell::transfer(double a, double b, Complex energy) const { return transfer_impl(a, b, energy); }

Matrix cell_transfer(const CellPotential& cell, double energy) { return DiagonalizedCell(cell).transfer(0.0, 1.0, energy); }

CMatrix cell_transfer(const CellPotential& cell, Complex energy) {
  return DiagonalizedCell(cell).transfer(0.0, 1.0, energy);
}

Matrix exterior_power(const Matrix& m, int p) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0) throw DomainError("exterior_power needs a square matrix of even order");
  const int n = static_cast<int>(m.rows()) / 2;
  if (p < 1 || p > n) throw DomainError("exterior_power: p must lie in [1, N]");
  const auto subsets = combinations(static_cast<int>(m.rows()), p);
  const auto dim = static_cast<Eigen::Index>(subsets.size());
  Matrix out(dim, dim);
  Matrix minor(p, p);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      for (int i = 0; i < p; ++i)
        for (int k = 0; k < p; ++k) minor(i, k) = m(subsets[r][i], subsets[c][k]);
      out(r, c) = p == 1 ? minor(0, 0) : minor.determinant();
    }
  }
  return out;
}

double symplectic_residual(const Matrix& m) {
  const Matrix j = symplectic_form(static_cast<int>(m.rows() / 2));
  return operator_norm(m.transpose() * j * m - j);
}

}  // namespace strip
