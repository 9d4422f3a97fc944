#include "p1pairs/tailmod.hpp"

#include <algorithm>
#include <map>

namespace p1pairs {

namespace {

// Linear form vanishing at the j-th sample point (1 : c_j), scaled to
// integer coefficients. The points are fixed and far from any small support.
std::pair<Rat, Rat> sample_line(int j) {
  return {Rat(1000003L + 17L * j), Rat(-(97L + j))};
}

// Sections of F in degree d that vanish at every sample point.
QMat vanishing_sections(const TailModule& f, int d) {
  QMat basis = identity(f.dim(d));
  const int points = static_cast<int>(f.dim(d)) + 1;
  for (int j = 0; j < points && basis.cols() > 0; ++j) {
    const auto [a, b] = sample_line(j);
    const QMat l = a * f.mul0(d - 1) + b * f.mul1(d - 1);
    const QMat p = cokernel_projection(l);
    basis = basis * kernel_basis(p * basis);
  }
  return basis;
}

// Torsion subspaces T_d for d in the window of f, from the top down:
// T_d is the preimage of T_{d+1} under multiplication by z0.
std::vector<QMat> torsion_bases(const TailModule& f) {
  const int hi = f.d_hi();
  std::vector<QMat> t(static_cast<std::size_t>(f.width()) + 1);
  t.back() = vanishing_sections(f, hi);
  for (int d = hi - 1; d >= f.d_lo(); --d) {
    const QMat& above = t[static_cast<std::size_t>(d + 1 - f.d_lo())];
    const QMat q = cokernel_projection(above);
    t[static_cast<std::size_t>(d - f.d_lo())] = kernel_basis(q * f.mul0(d));
  }
  return t;
}

QMat push_up(const TailModule& f, QMat span, int from, int to) {
  for (int d = from; d < to; ++d) {
    if (span.cols() == 0) {
      span = QMat(f.dim(d + 1), 0);
      continue;
    }
    span = image_basis(hstack(f.mul0(d) * span, f.mul1(d) * span));
  }
  return span;
}

struct Generator {
  int degree;
  QVec vec;
};

// Lowers the window while the dimension keeps dropping.
TailModule extend_to_bottom(const TailModule& f) {
  TailModule g = f;
  while (true) {
    TailModule h = down_extend(g, g.d_lo() - 1);
    if (h.dim(h.d_lo()) == g.dim(g.d_lo())) return g;
    g = std::move(h);
  }
}

std::vector<Generator> choose_generators(const TailModule& g, Rng& rng) {
  const int top = g.d_hi();
  std::vector<Generator> gens;
  QMat covered(g.dim(top), 0);
  Index covered_rank = 0;
  for (int d = g.d_lo(); d <= top; ++d) {
    if (g.dim(d) == 0) continue;
    const QMat s = push_up(g, identity(g.dim(d)), d, top);
    while (rank(hstack(covered, s)) > covered_rank) {
      const QVec v = random_vector(rng, g.dim(d), 9);
      if (is_zero(v)) continue;
      const QMat pushed = push_up(g, v, d, top);
      const QMat next = hstack(covered, pushed);
      const Index r = rank(next);
      if (r == covered_rank) continue;
      covered = image_basis(next);
      covered_rank = r;
      gens.push_back({d, v});
    }
  }
  return gens;
}

// Map sum O(-deg_i) -> g sending the i-th generator to gens[i].
SheafMap generator_map(const TailModule& g, ModulePtr gptr, const std::vector<Generator>& gens, ModulePtr& p0) {
  std::vector<int> twists;
  for (const auto& x : gens) twists.push_back(-x.degree);
  p0 = share(free_module(twists, g.d_lo(), g.d_hi()));
  SheafMap phi;
  phi.source = p0;
  phi.target = std::move(gptr);
  phi.d_lo = g.d_lo();
  // Images of the monomials of each summand, carried up degree by degree.
  std::vector<QMat> cur(gens.size());
  for (int e = g.d_lo(); e <= g.d_hi(); ++e) {
    QMat x(g.dim(e), 0);
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const int k = e - gens[i].degree;
      if (k < 0) continue;
      if (k == 0) {
        cur[i] = gens[i].vec;
      } else {
        const QMat& prev = cur[i];
        QMat next(g.dim(e), prev.cols() + 1);
        next.leftCols(prev.cols()) = g.mul0(e - 1) * prev;
        next.col(prev.cols()) = g.mul1(e - 1) * prev.col(prev.cols() - 1);
        cur[i] = std::move(next);
      }
      x = hstack(x, cur[i]);
    }
    phi.maps.push_back(std::move(x));
  }
  return phi;
}

}  // namespace

TorsionResult torsion_filtration(ModulePtr f) {
  std::vector<QMat> t = torsion_bases(*f);
  for (const auto& b : t)
    if (b.cols() != t.back().cols()) throw InternalError("torsion_filtration: torsion part has positive rank");
  TorsionResult out;
  std::vector<Index> dims;
  std::vector<QMat> m0, m1;
  for (const auto& b : t) dims.push_back(b.cols());
  for (int d = f->d_lo(); d < f->d_hi(); ++d) {
    const std::size_t k = static_cast<std::size_t>(d - f->d_lo());
    m0.push_back(coordinates(t[k + 1], f->mul0(d) * t[k]));
    m1.push_back(coordinates(t[k + 1], f->mul1(d) * t[k]));
  }
  out.torsion = share(TailModule(f->d_lo(), std::move(dims), std::move(m0), std::move(m1)));
  out.length = t.back().cols();
  out.inclusion.source = out.torsion;
  out.inclusion.target = f;
  out.inclusion.d_lo = f->d_lo();
  out.inclusion.maps = std::move(t);
  const CokernelResult c = cokernel(out.inclusion);
  out.free_part = c.module;
  out.projection = c.projection;
  return out;
}

Index torsion_length(ModulePtr f) {
  const int hi = f->d_hi();
  return vanishing_sections(*f, hi).cols();
}

bool is_locally_free(ModulePtr f) { return torsion_length(f) == 0; }

std::vector<int> splitting_type(ModulePtr e) {
  if (!is_locally_free(e)) throw NotLocallyFree("splitting_type: sheaf has torsion");
  const Hilbert h = hilbert(*e);
  TailModule g = *e;
  while (g.dim(g.d_lo()) > 0) g = down_extend(g, g.d_lo() - 4);
  std::vector<int> out;
  // n_d - n_{d-1} counts the a_i >= -d.
  Index prev_delta = 0;
  for (int d = g.d_lo() + 1; d <= g.d_hi(); ++d) {
    const Index delta = g.dim(d) - g.dim(d - 1);
    for (Index k = 0; k < delta - prev_delta; ++k) out.push_back(-d);
    if (delta < prev_delta) throw InconsistentDims("splitting_type: difference sequence decreases");
    prev_delta = delta;
  }
  if (static_cast<Index>(out.size()) != h.r) throw InconsistentDims("splitting_type: rank mismatch");
  for (int d = g.d_lo(); d <= g.d_hi(); ++d) {
    Index n = 0;
    for (int a : out) n += wdim(a + d);
    if (n != g.dim(d)) throw InconsistentDims("splitting_type: no multiset fits the dimensions");
  }
  std::sort(out.begin(), out.end());
  return out;
}

PresentationResult minimal_presentation(ModulePtr f, std::uint64_t seed) {
  Rng rng(seed);
  const TailModule g = extend_to_bottom(*f);
  const auto gptr = share(g);
  const auto gens = choose_generators(g, rng);
  ModulePtr p0;
  const SheafMap phi = generator_map(g, gptr, gens, p0);
  if (!is_surjective(phi)) throw WindowTooNarrow("minimal_presentation: generators do not generate at the top");

  const KernelResult k = kernel(phi);
  const TailModule kb = extend_to_bottom(*k.module);
  const auto kgens = choose_generators(kb, rng);

  Presentation pres;
  for (const auto& x : gens) pres.gens.push_back(-x.degree);
  for (const auto& x : kgens) pres.rels.push_back(-x.degree);
  pres.matrix.assign(gens.size(), {});
  for (const auto& r : kgens) {
    // The relation lives in K_e; its image in P0_e splits into summand blocks.
    const int e = r.degree;
    if (e < k.inclusion.d_lo) throw WindowTooNarrow("minimal_presentation: relation below window");
    const QVec v = k.inclusion.at(e) * r.vec;
    Index off = 0;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const int deg = e - gens[i].degree;
      const Index n = wdim(deg);
      if (n == 0) {
        pres.matrix[i].push_back(BinForm::zero_of_degree(deg));
        continue;
      }
      pres.matrix[i].push_back(BinForm::from_vector(deg, v.segment(off, n)));
      off += n;
    }
  }
  if (hilbert(*f).r == 0 && pres.rels.size() != pres.gens.size())
    throw InternalError("minimal_presentation: torsion sheaf needs as many relations as generators");

  PresentationResult out;
  out.presentation = pres;
  out.generators = share(free_module(pres.gens, f->d_lo(), f->d_hi()));
  SheafMap m = restrict_window(phi, f->d_lo(), f->d_hi());
  m.source = out.generators;
  m.target = f;
  out.generator_map = std::move(m);
  return out;
}

FormMatrix transpose(const FormMatrix& m) {
  if (m.empty()) return {};
  FormMatrix t(m[0].size(), std::vector<BinForm>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j) t[j][i] = m[i][j];
  return t;
}

std::vector<int> negate(std::vector<int> twists) {
  for (int& a : twists) a = -a;
  return twists;
}

ModulePtr dual(ModulePtr e) {
  if (!is_locally_free(e)) throw NotLocallyFree("dual: sheaf has torsion");
  const Presentation p = minimal_presentation(e).presentation;
  int hi = e->d_hi();
  for (int a : p.gens) hi = std::max(hi, a + 4);
  if (p.rels.empty()) return share(free_module(negate(p.gens), e->d_lo(), hi));
  for (int b : p.rels) hi = std::max(hi, b + 4);
  auto p0 = share(free_module(negate(p.gens), e->d_lo(), hi));
  auto p1 = share(free_module(negate(p.rels), e->d_lo(), hi));
  return kernel(form_map(p0, p1, transpose(p.matrix))).module;
}

ModulePtr ext1(ModulePtr t) {
  if (hilbert(*t).r != 0) throw std::invalid_argument("ext1: sheaf is not torsion");
  const Presentation p = minimal_presentation(t).presentation;
  Presentation q;
  q.gens = negate(p.rels);
  q.rels = negate(p.gens);
  q.matrix = transpose(p.matrix);
  return share(from_presentation(q, t->d_lo(), t->d_hi()));
}

}  // namespace p1pairs
