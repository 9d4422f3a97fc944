#include "p1pairs/collin.hpp"

#include <thread>

namespace p1pairs {

namespace {

QMat block_of(const BinForm& f, int n, int m) {
  if (f.is_zero()) return QMat::Zero(n + m + 1, m + 1);
  return mult_map(f, m);
}

// Row-space basis of the gradients of all r-minors of g whose row set is
// rows, in the coordinates of the forms.
QMat minor_gradients(const QMat& g, const std::vector<Index>& rows, Index r, int N, int n, int m) {
  const Index coords = static_cast<Index>(N) * (n + 1);
  QMat out(0, coords);
  for (const auto& cols : subsets(g.cols(), r)) {
    QMat sub(r, r);
    for (Index a = 0; a < r; ++a)
      for (Index b = 0; b < r; ++b) sub(a, b) = g(rows[a], cols[b]);
    // In corank one the adjugate is lambda * kr * kl^T; otherwise it vanishes.
    const QMat kr = kernel_basis(sub);
    if (kr.cols() != 1) continue;
    const QMat kl = kernel_basis(sub.transpose());
    Index i0 = 0, j0 = 0;
    while (kr(i0, 0).is_zero()) ++i0;
    while (kl(j0, 0).is_zero()) ++j0;
    QMat cof(r - 1, r - 1);
    for (Index a = 0, aa = 0; a < r; ++a) {
      if (a == j0) continue;
      for (Index b = 0, bb = 0; b < r; ++b) {
        if (b == i0) continue;
        cof(aa, bb++) = sub(a, b);
      }
      ++aa;
    }
    Rat lambda = determinant<Rat>(cof) / (kr(i0, 0) * kl(j0, 0));
    if ((i0 + j0) % 2 == 1) lambda = -lambda;
    // d det / d sub(a, b) = adj(b, a) = lambda * kr(b) * kl(a).
    QMat grad = QMat::Zero(1, coords);
    for (Index a = 0; a < r; ++a)
      for (Index b = 0; b < r; ++b) {
        const Index row = rows[a], col = cols[b];
        const Index f = col / (m + 1), t = col % (m + 1);
        const Index i = row - t;
        if (i < 0 || i > n) continue;
        grad(0, f * (n + 1) + i) += lambda * kr(b, 0) * kl(a, 0);
      }
    if (!is_zero(grad)) out = vstack(out, grad);
    if (out.rows() > 4 * coords) out = image_basis(out.transpose()).transpose();
  }
  return image_basis(out.transpose()).transpose();
}

Index jacobian_rank(const QMat& g, Index r, int N, int n, int m, int threads) {
  const auto row_sets = subsets(g.rows(), r);
  const Index coords = static_cast<Index>(N) * (n + 1);
  threads = std::max(1, threads);
  std::vector<QMat> parts(static_cast<std::size_t>(threads), QMat(0, coords));
  auto work = [&](int k) {
    QMat acc(0, coords);
    for (std::size_t s = static_cast<std::size_t>(k); s < row_sets.size(); s += static_cast<std::size_t>(threads))
      acc = vstack(acc, minor_gradients(g, row_sets[s], r, N, n, m));
    parts[static_cast<std::size_t>(k)] = std::move(acc);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < threads; ++k) pool.emplace_back(work, k);
    for (auto& t : pool) t.join();
  }
  QMat all(0, coords);
  for (const auto& p : parts) all = vstack(all, p);
  return rank(all);
}

}  // namespace

QMat gamma(const StablePair& p, int m) {
  if (m < 0) throw std::invalid_argument("gamma: m must be nonnegative");
  QMat g(p.n + m + 1, 0);
  for (const auto& f : p.forms) g = hstack(g, block_of(f, p.n, m));
  return g;
}

int m0_bound(int n) { return n - 2; }
int default_m(int n) { return n + 1; }

bool rank_formula_check(const StablePair& p, int m) {
  if (m < p.n - 1) throw std::invalid_argument("rank_formula_check: m must be at least n - 1");
  const int deg_im = p.n - gcd(p.forms).degree();
  return rank(gamma(p, m)) == m + 1 + deg_im;
}

int stratum_index(const StablePair& p, int m) {
  if (m < p.n - 1) throw std::invalid_argument("stratum_index: m must be at least n - 1");
  return static_cast<int>(rank(gamma(p, m))) - m - 1;
}

CollineationLevel make_level(QMat map) {
  CollineationLevel l;
  l.kernel = kernel_basis(map);
  l.coker = cokernel_projection(map);
  l.map = std::move(map);
  return l;
}

CollineationChain embed_chain(const PsiChain& c, int m) {
  if (m < c.base.n - 1) throw std::invalid_argument("embed_chain: m must be at least n - 1");
  if (!c.vo->contains(m) || !c.vo->contains(m + 1)) throw WindowTooNarrow("embed_chain: m outside the chain window");
  CollineationChain cc;
  cc.levels.push_back(make_level(gamma(c.base, m)));
  if (c.psi0.at(m) != cc.levels[0].map) throw InternalError("embed_chain: sheaf and matrix forms of psi_0 differ");
  // e: sheaf coordinates of the source of psi_i -> coordinates of level i.
  // p: sheaf coordinates of the target of psi_i -> coordinates of level i.
  QMat e = identity(c.vo->dim(m));
  QMat p = identity(c.f->dim(m));
  for (int i = 0; i < c.length(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    const CollineationLevel& prev = cc.levels.back();
    const QMat j = i == 0 ? c.kernels[0].inclusion.at(m)
                          : lift_through(c.kernels[k - 1].inclusion, c.kernels[k].inclusion).at(m);
    const QMat e_next = solve_or_throw(prev.kernel, e * j, "embed_chain: kernel transition");
    const QMat& pi = c.cokernels[k].projection.at(m);
    const auto sec = solve(pi, identity(pi.rows()));
    if (!sec) throw InternalError("embed_chain: cokernel sections are not surjected in degree m");
    const QMat p_next = prev.coker * p * *sec;
    const QMat inv = solve_or_throw(e_next, identity(e_next.rows()), "embed_chain: kernel basis change");
    cc.levels.push_back(make_level(p_next * c.steps[k].at(m) * inv));
    if (cc.levels.back().kernel.cols() != c.kernels[k + 1].module->dim(m))
      throw InternalError("embed_chain: kernel dimension differs from h^0 of the sheaf kernel");
    e = e_next;
    p = p_next;
  }
  return cc;
}

Report validate_collineation(const CollineationChain& cc) {
  Report r;
  if (cc.levels.empty()) {
    r.add("nonempty", false);
    return r;
  }
  for (std::size_t i = 0; i < cc.levels.size(); ++i) {
    const auto& l = cc.levels[i];
    const std::string tag = "level[" + std::to_string(i) + "]";
    const auto red = rref(l.map);
    r.add(tag + " nonzero", red.rank > 0);
    const bool bases = l.kernel.rows() == l.map.cols() && l.kernel.cols() == l.map.cols() - red.rank &&
                       is_zero(l.map * l.kernel) && rank(l.kernel) == l.kernel.cols() &&
                       l.coker.cols() == l.map.rows() && l.coker.rows() == l.map.rows() - red.rank &&
                       is_zero(l.coker * l.map) && rank(l.coker) == l.coker.rows();
    r.add(tag + " bases", bases);
    if (i > 0) {
      const auto& prev = cc.levels[i - 1];
      r.add(tag + " shape", l.map.cols() == prev.kernel.cols() && l.map.rows() == prev.coker.rows());
    }
    const bool surjective = red.rank == l.map.rows();
    if (i + 1 < cc.levels.size())
      r.add(tag + " not surjective", !surjective, "chain continues past a surjective level");
    else
      r.add(tag + " surjective", surjective, "last level is not surjective");
  }
  return r;
}

StablePair stratum_map_g(const StablePair& pk, const BinForm& s) {
  if (s.is_zero()) throw std::invalid_argument("stratum_map_g: s must be nonzero");
  StablePair out;
  out.N = pk.N;
  out.n = pk.n + s.degree();
  for (const auto& f : pk.forms) out.forms.push_back(f.is_zero() ? BinForm::zero_of_degree(out.n) : f * s);
  return out;
}

Index expected_stratum_dim(int N, int n, int j) { return static_cast<Index>(j + 1) * N - 1 + (n - j); }

TangentDims tangent_dim_at(const StablePair& p, int m, int threads) {
  p.check();
  TangentDims out;
  out.stratum = stratum_index(p, m);
  const int j = out.stratum;
  if (j >= p.n) throw std::invalid_argument("tangent_dim_at: point lies on the open stratum");
  if (j != p.n - gcd(p.forms).degree()) throw InternalError("tangent_dim_at: stratum disagrees with the gcd");
  const int N = p.N, n = p.n;
  const QMat g = gamma(p, m);
  out.jac_dim = static_cast<Index>(N) * (n + 1) - 1 - jacobian_rank(g, m + 2 + j, N, n, m, threads);

  // (dpsi', ds) -> s dpsi' + ds psi' at the preimage (psi / s, s).
  const BinForm s = gcd(p.forms);
  QMat d = QMat::Zero(static_cast<Index>(N) * (n + 1), static_cast<Index>(N) * (j + 1) + (n - j + 1));
  for (int f = 0; f < N; ++f) {
    const Index row = static_cast<Index>(f) * (n + 1);
    d.block(row, static_cast<Index>(f) * (j + 1), n + 1, j + 1) = mult_map(s, j);
    if (p.forms[static_cast<std::size_t>(f)].is_zero()) continue;
    const auto q = divide_exact(p.forms[static_cast<std::size_t>(f)], s);
    if (!q) throw InternalError("tangent_dim_at: gcd does not divide a form");
    d.block(row, static_cast<Index>(N) * (j + 1), n + 1, n - j + 1) = mult_map(*q, n - j);
  }
  out.param_rank = rank(d) - 1;
  return out;
}

}  // namespace p1pairs
