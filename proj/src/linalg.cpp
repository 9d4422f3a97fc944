#include "p1pairs/linalg.hpp"

#include <algorithm>
#include <numeric>

namespace p1pairs {

namespace {

using IntRow = std::vector<mpz_class>;

// Scales a rational row to a primitive integer row.
IntRow integer_row(const QMat& m, Index r) {
  mpz_class l = 1;
  for (Index c = 0; c < m.cols(); ++c) {
    const mpz_class d = m(r, c).den();
    if (d != 1) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), d.get_mpz_t());
  }
  IntRow row(static_cast<std::size_t>(m.cols()));
  for (Index c = 0; c < m.cols(); ++c) {
    const Rat& v = m(r, c);
    row[c] = v.num() * (l / v.den());
  }
  return row;
}

void remove_content(IntRow& row) {
  mpz_class g = 0;
  for (const auto& v : row) {
    if (v == 0) continue;
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    if (g == 1) return;
  }
  if (g > 1)
    for (auto& v : row) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
}

// row <- p*row - f*pivot_row, then primitive.
void eliminate(IntRow& row, const IntRow& pivot_row, const mpz_class& p, const mpz_class& f,
               std::size_t from) {
  for (std::size_t k = from; k < row.size(); ++k) {
    row[k] *= p;
    if (pivot_row[k] != 0) row[k] -= f * pivot_row[k];
  }
  remove_content(row);
}

}  // namespace

RrefResult rref(const QMat& m) {
  const Index rows = m.rows();
  const Index cols = m.cols();
  std::vector<IntRow> a;
  a.reserve(static_cast<std::size_t>(rows));
  for (Index r = 0; r < rows; ++r) {
    a.push_back(integer_row(m, r));
    remove_content(a.back());
  }

  RrefResult out;
  Index prow = 0;
  for (Index c = 0; c < cols && prow < rows; ++c) {
    // Pick the smallest nonzero entry as pivot to limit growth.
    Index best = -1;
    for (Index r = prow; r < rows; ++r) {
      if (a[r][c] == 0) continue;
      if (best < 0 || mpz_cmpabs(a[r][c].get_mpz_t(), a[best][c].get_mpz_t()) < 0) best = r;
    }
    if (best < 0) continue;
    std::swap(a[best], a[prow]);
    const mpz_class p = a[prow][c];
    for (Index r = prow + 1; r < rows; ++r) {
      if (a[r][c] == 0) continue;
      const mpz_class f = a[r][c];
      eliminate(a[r], a[prow], p, f, static_cast<std::size_t>(c));
    }
    out.pivot_cols.push_back(c);
    ++prow;
  }
  out.rank = prow;

  // Back substitution, still fraction-free.
  for (Index i = out.rank - 1; i >= 0; --i) {
    const Index c = out.pivot_cols[i];
    const mpz_class p = a[i][c];
    for (Index r = 0; r < i; ++r) {
      if (a[r][c] == 0) continue;
      const mpz_class f = a[r][c];
      eliminate(a[r], a[i], p, f, 0);
    }
  }

  out.reduced = QMat::Zero(rows, cols);
  for (Index i = 0; i < out.rank; ++i) {
    const mpz_class& p = a[i][out.pivot_cols[i]];
    for (Index c = 0; c < cols; ++c)
      if (a[i][c] != 0) out.reduced(i, c) = Rat(a[i][c], p);
  }
  return out;
}

Index rank(const QMat& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  return rref(m).rank;
}

QMat kernel_basis(const QMat& m) {
  const Index cols = m.cols();
  const RrefResult rr = rref(m);
  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (Index c : rr.pivot_cols) is_pivot[c] = true;
  QMat k = QMat::Zero(cols, cols - rr.rank);
  Index j = 0;
  for (Index free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    k(free, j) = Rat(1);
    for (Index i = 0; i < rr.rank; ++i) k(rr.pivot_cols[i], j) = -rr.reduced(i, free);
    ++j;
  }
  return k;
}

QMat image_basis(const QMat& m) {
  const RrefResult rr = rref(m);
  QMat b(m.rows(), rr.rank);
  for (Index i = 0; i < rr.rank; ++i) b.col(i) = m.col(rr.pivot_cols[i]);
  return b;
}

CokernelSplit cokernel_split(const QMat& m) {
  const Index n = m.rows();
  const QMat img = image_basis(m);
  const Index r = img.cols();
  // Complete the image basis with standard vectors: pivots of [img | I].
  const QMat aug = hstack(img, identity(n));
  const RrefResult rr = rref(aug);
  std::vector<Index> extra;
  for (Index c : rr.pivot_cols)
    if (c >= r) extra.push_back(c - r);
  QMat basis(n, n);
  basis.leftCols(r) = img;
  CokernelSplit out;
  out.section = QMat::Zero(n, static_cast<Index>(extra.size()));
  for (std::size_t i = 0; i < extra.size(); ++i) {
    out.section(extra[i], static_cast<Index>(i)) = Rat(1);
    basis.col(r + static_cast<Index>(i)) = out.section.col(static_cast<Index>(i));
  }
  // Coordinates in the completed basis; the cokernel coordinates are the
  // trailing block.
  const QMat inv = solve_or_throw(basis, identity(n), "cokernel_split");
  out.projection = inv.bottomRows(static_cast<Index>(extra.size()));
  return out;
}

QMat cokernel_projection(const QMat& m) { return cokernel_split(m).projection; }

std::optional<QMat> solve(const QMat& a, const QMat& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("solve: row mismatch");
  const Index n = a.cols();
  const RrefResult rr = rref(hstack(a, b));
  for (Index c : rr.pivot_cols)
    if (c >= n) return std::nullopt;
  QMat x = QMat::Zero(n, b.cols());
  for (Index i = 0; i < rr.rank; ++i) {
    const Index pc = rr.pivot_cols[i];
    for (Index j = 0; j < b.cols(); ++j) x(pc, j) = rr.reduced(i, n + j);
  }
  return x;
}

QMat solve_or_throw(const QMat& a, const QMat& b, const char* what) {
  auto x = solve(a, b);
  if (!x) throw std::runtime_error(std::string(what) + ": inconsistent linear system");
  return *x;
}

QMat coordinates(const QMat& basis, const QMat& v) {
  return solve_or_throw(basis, v, "coordinates: vector outside span");
}

QMat intersect_spans(const QMat& a, const QMat& b) {
  if (a.cols() == 0 || b.cols() == 0) return QMat(a.rows(), 0);
  const QMat k = kernel_basis(hstack(a, -b));
  return image_basis(a * k.topRows(a.cols()));
}

bool is_zero(const QMat& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (!m(i, j).is_zero()) return false;
  return true;
}

QMat identity(Index n) { return QMat::Identity(n, n); }

QMat zeros(Index rows, Index cols) { return QMat::Zero(rows, cols); }

QMat vstack(const QMat& top, const QMat& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  if (top.cols() != bottom.cols()) throw std::invalid_argument("vstack: column mismatch");
  QMat out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

QMat hstack(const QMat& left, const QMat& right) {
  if (left.cols() == 0 && left.rows() == right.rows()) return right;
  if (right.cols() == 0 && left.rows() == right.rows()) return left;
  if (left.rows() != right.rows()) throw std::invalid_argument("hstack: row mismatch");
  QMat out(left.rows(), left.cols() + right.cols());
  if (out.size() > 0) out << left, right;
  return out;
}

QMat block_diag(const QMat& a, const QMat& b) {
  QMat out = QMat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

bool proportional(const QMat& a, const QMat& b, Rat* ratio) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const bool za = is_zero(a), zb = is_zero(b);
  if (za || zb) return za && zb;
  Rat lambda;
  bool have = false;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      const Rat& x = a(i, j);
      const Rat& y = b(i, j);
      if (x.is_zero() != y.is_zero()) return false;
      if (x.is_zero()) continue;
      if (!have) {
        lambda = y / x;
        have = true;
      } else if (y != lambda * x) {
        return false;
      }
    }
  }
  if (ratio) *ratio = lambda;
  return true;
}

std::vector<std::vector<Index>> subsets(Index n, Index r) {
  std::vector<std::vector<Index>> out;
  if (r < 0 || r > n) return out;
  std::vector<Index> cur(static_cast<std::size_t>(r));
  std::iota(cur.begin(), cur.end(), Index{0});
  while (true) {
    out.push_back(cur);
    Index i = r - 1;
    while (i >= 0 && cur[i] == n - r + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (Index j = i + 1; j < r; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t x = seed;
  for (auto& s : s_) s = splitmix64(x);
}

std::uint64_t Rng::next() {
  ++counter_;
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::int64_t Rng::uniform(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("Rng::uniform: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(next());
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % span);
  std::uint64_t v;
  do {
    v = next();
  } while (v >= limit);
  return lo + static_cast<std::int64_t>(v % span);
}

Rng Rng::child(std::uint64_t index) const { return Rng(child_seed(seed_, index)); }

std::uint64_t child_seed(std::uint64_t parent_seed, std::uint64_t task_index) {
  std::uint64_t x = parent_seed ^ (0xD1B54A32D192ED03ULL * (task_index + 1));
  splitmix64(x);
  return splitmix64(x);
}

QMat random_matrix(Rng& rng, Index rows, Index cols, std::int64_t coeff_bound) {
  if (coeff_bound < 1) throw std::invalid_argument("random_matrix: coeff_bound must be >= 1");
  QMat m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = Rat(static_cast<long>(rng.uniform(-coeff_bound, coeff_bound)));
  return m;
}

QVec random_vector(Rng& rng, Index size, std::int64_t coeff_bound) {
  return random_matrix(rng, size, 1, coeff_bound);
}

}  // namespace p1pairs
