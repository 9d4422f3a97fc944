#pragma once

#include "p1pairs/rational.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace p1pairs {

using Index = Eigen::Index;

struct RrefResult {
  QMat reduced;
  Index rank = 0;
  std::vector<Index> pivot_cols;
};

/// Reduced row-echelon form. Forward elimination is fraction-free on integer
/// rows (denominators cleared per row, content removed after every update);
/// the final normalization divides each pivot row by its pivot.
RrefResult rref(const QMat& m);

Index rank(const QMat& m);

/// Columns form a basis of the null space of m. Basis vectors are the
/// standard ones read off the reduced form (free variable = 1).
QMat kernel_basis(const QMat& m);

/// Columns form a basis of the column space of m (the pivot columns of m).
QMat image_basis(const QMat& m);

/// A split surjection onto the cokernel of m: projection P with P*m = 0 and
/// rank(P) = rows(m) - rank(m), plus a section S with P*S = I. The section
/// consists of standard basis vectors completing the column space.
struct CokernelSplit {
  QMat projection;
  QMat section;
};
CokernelSplit cokernel_split(const QMat& m);

/// Surjection from the codomain of m whose kernel is the column space of m.
QMat cokernel_projection(const QMat& m);

/// Some X with a*X = b, or nullopt when the system is inconsistent.
std::optional<QMat> solve(const QMat& a, const QMat& b);

/// X with a*X = b; throws std::runtime_error on inconsistency.
QMat solve_or_throw(const QMat& a, const QMat& b, const char* what);

/// Coordinates of the columns of v in the basis given by the columns of
/// `basis` (which must be linearly independent). Throws when some column of
/// v is outside the span.
QMat coordinates(const QMat& basis, const QMat& v);

/// Basis (columns) of the intersection of the column spaces of a and b.
QMat intersect_spans(const QMat& a, const QMat& b);

bool is_zero(const QMat& m);

QMat identity(Index n);
QMat zeros(Index rows, Index cols);

/// Stacks vertically / horizontally; empty operands are allowed when the
/// shared dimension agrees.
QMat vstack(const QMat& top, const QMat& bottom);
QMat hstack(const QMat& left, const QMat& right);

/// Block diagonal matrix diag(a, b).
QMat block_diag(const QMat& a, const QMat& b);

/// Whether a and b are nonzero scalar multiples of each other (both zero
/// counts as proportional). When `ratio` is non-null and both are nonzero it
/// receives lambda with b = lambda * a.
bool proportional(const QMat& a, const QMat& b, Rat* ratio = nullptr);

/// Lexicographically ordered r-element subsets of {0, ..., n-1}.
std::vector<std::vector<Index>> subsets(Index n, Index r);

/// Determinant by fraction-free elimination.
template <typename Scalar>
Scalar determinant(DenseMatrix<Scalar> m) {
  const Index n = m.rows();
  if (n != m.cols()) throw std::invalid_argument("determinant: matrix is not square");
  Scalar det(1);
  for (Index c = 0; c < n; ++c) {
    Index piv = c;
    while (piv < n && m(piv, c) == Scalar(0)) ++piv;
    if (piv == n) return Scalar(0);
    if (piv != c) {
      m.row(piv).swap(m.row(c));
      det = -det;
    }
    const Scalar p = m(c, c);
    det *= p;
    for (Index r = c + 1; r < n; ++r) {
      if (m(r, c) == Scalar(0)) continue;
      const Scalar f = m(r, c) / p;
      for (Index k = c; k < n; ++k) m(r, k) -= f * m(c, k);
    }
  }
  return det;
}

/// r-th exterior power: entry (I, J) is the minor of m on rows I and columns J,
/// with I and J enumerated lexicographically. rank(m) < r iff the result is 0.
template <typename Scalar>
DenseMatrix<Scalar> exterior_power(const DenseMatrix<Scalar>& m, Index r) {
  if (r < 0 || r > std::min(m.rows(), m.cols()))
    throw std::out_of_range("exterior_power: r out of range");
  const auto rows = subsets(m.rows(), r);
  const auto cols = subsets(m.cols(), r);
  DenseMatrix<Scalar> out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (Index i = 0; i < out.rows(); ++i) {
    for (Index j = 0; j < out.cols(); ++j) {
      DenseMatrix<Scalar> sub(r, r);
      for (Index a = 0; a < r; ++a)
        for (Index b = 0; b < r; ++b) sub(a, b) = m(rows[i][a], cols[j][b]);
      out(i, j) = determinant<Scalar>(sub);
    }
  }
  return out;
}

/// Deterministic 64-bit generator (splitmix64 seeding, xoshiro256** stream).
/// Identical seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next();
  /// Uniform integer in [lo, hi] by rejection sampling.
  std::int64_t uniform(std::int64_t lo, std::int64_t hi);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return counter_; }

  /// Child generator for parallel task `index`; depends only on the parent
  /// seed, never on how many numbers the parent has drawn.
  Rng child(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::uint64_t s_[4];
};

std::uint64_t child_seed(std::uint64_t parent_seed, std::uint64_t task_index);

/// Integer entries uniform in [-coeff_bound, coeff_bound].
QMat random_matrix(Rng& rng, Index rows, Index cols, std::int64_t coeff_bound);
QVec random_vector(Rng& rng, Index size, std::int64_t coeff_bound);

}  // namespace p1pairs
