#include "p1pairs/tailmod.hpp"
#include "tailmod_internal.hpp"

#include <algorithm>

namespace p1pairs {

namespace {

// Kronecker product of rational matrices.
QMat kron(const QMat& a, const QMat& b) {
  QMat out = QMat::Zero(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      if (!a(i, j).is_zero()) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Maps F_D -> G_D that respect the linear relations of F in degree D.
QMat hom_candidates(const TailModule& f, const TailModule& g, int d) {
  const Index n = f.dim(d);
  const QMat rel = kernel_basis(hstack(f.mul0(d), f.mul1(d)));
  const QMat u = rel.topRows(n), v = rel.bottomRows(n);
  // vec(A X B) = (B^T kron A) vec(X), column-major.
  const QMat c = kron(u.transpose(), g.mul0(d)) + kron(v.transpose(), g.mul1(d));
  return kernel_basis(c);
}

QMat unvec(const QMat& col, Index rows, Index cols) {
  QMat x(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) x(i, j) = col(j * rows + i, 0);
  return x;
}

}  // namespace

std::vector<SheafMap> hom_space(ModulePtr f, ModulePtr g) {
  const int lo = std::max(f->d_lo(), g->d_lo());
  const int hi = std::min(f->d_hi(), g->d_hi());
  if (hi - lo < 3) throw WindowTooNarrow("hom_space: common window narrower than four degrees");
  const int top = hi - 2;
  const QMat cand = hom_candidates(*f, *g, top);
  if (hom_candidates(*f, *g, top - 1).cols() != cand.cols())
    throw WindowTooNarrow("hom_space: dimension not stable across degrees");

  std::vector<SheafMap> basis;
  for (Index k = 0; k < cand.cols(); ++k) {
    SheafMap h;
    h.source = f;
    h.target = g;
    h.d_lo = top;
    h.maps.push_back(unvec(cand.col(k), g->dim(top), f->dim(top)));
    for (int d = top; d < hi; ++d) {
      auto x = extend_map_up(*f, *g, d, h.maps.back());
      if (!x) throw WindowTooNarrow("hom_space: candidate does not extend upward");
      h.maps.push_back(std::move(*x));
    }
    basis.push_back(down_extend_map(std::move(h)));
  }
  return basis;
}

IsoVerdict iso_test(ModulePtr f, ModulePtr g, Rng& rng) {
  IsoVerdict v;
  auto no = [&](std::string why) {
    v.kind = IsoVerdict::Kind::NoIso;
    v.reason = std::move(why);
    return v;
  };
  const RankDegree a = rank_degree(*f), b = rank_degree(*g);
  if (a.rank != b.rank) return no("rank");
  if (a.degree != b.degree) return no("degree");
  const int lo = std::max(f->d_lo(), g->d_lo()), hi = std::min(f->d_hi(), g->d_hi());
  for (int d = lo; d <= hi; ++d)
    if (f->dim(d) != g->dim(d)) return no("hilbert function");
  if (torsion_length(f) != torsion_length(g)) return no("torsion length");

  if (is_zero_module(*f) && is_zero_module(*g)) {
    v.kind = IsoVerdict::Kind::Iso;
    v.witness = zero_map(f, g);
    return v;
  }
  const auto basis = hom_space(f, g);
  if (basis.empty()) return no("no nonzero homomorphisms");
  const int trials = 8;
  for (int t = 0; t < trials; ++t) {
    const std::int64_t bound = 9 * (t + 1);
    std::vector<Rat> c;
    for (std::size_t k = 0; k < basis.size(); ++k) c.push_back(Rat(static_cast<long>(rng.uniform(-bound, bound))));
    SheafMap h = combination(basis, c);
    if (is_degreewise_bijective(h)) {
      v.kind = IsoVerdict::Kind::Iso;
      v.witness = std::move(h);
      v.trials = t + 1;
      return v;
    }
  }
  v.kind = IsoVerdict::Kind::ProbablyNot;
  v.trials = trials;
  return v;
}

}  // namespace p1pairs
