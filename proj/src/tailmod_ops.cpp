#include "p1pairs/tailmod.hpp"

#include <algorithm>

namespace p1pairs {

namespace {

// Matrices of the multiplication maps of a submodule spanned degreewise by
// the columns of basis[d] inside m.
TailModule submodule(const TailModule& m, int lo, const std::vector<QMat>& basis) {
  std::vector<Index> dims;
  std::vector<QMat> m0, m1;
  for (const auto& b : basis) dims.push_back(b.cols());
  for (std::size_t k = 0; k + 1 < basis.size(); ++k) {
    const int d = lo + static_cast<int>(k);
    m0.push_back(coordinates(basis[k + 1], m.mul0(d) * basis[k]));
    m1.push_back(coordinates(basis[k + 1], m.mul1(d) * basis[k]));
  }
  return TailModule(lo, std::move(dims), std::move(m0), std::move(m1));
}

SheafMap inclusion_map(ModulePtr sub, ModulePtr ambient, int lo, std::vector<QMat> basis) {
  SheafMap f;
  f.source = std::move(sub);
  f.target = std::move(ambient);
  f.d_lo = lo;
  f.maps = std::move(basis);
  return f;
}

void chi_check(bool ok, const char* what) {
  if (ok) return;
  ++chi_failures();
  throw ChiAdditivityError(std::string("Euler characteristic additivity failed in ") + what);
}

Hilbert operator-(Hilbert a, const Hilbert& b) { return {a.r - b.r, a.c - b.c}; }
Hilbert operator+(Hilbert a, const Hilbert& b) { return {a.r + b.r, a.c + b.c}; }

}  // namespace

KernelResult kernel(const SheafMap& f) {
  std::vector<QMat> basis;
  for (const auto& m : f.maps) basis.push_back(kernel_basis(m));
  KernelResult out;
  out.module = share(submodule(*f.source, f.d_lo, basis));
  out.inclusion = inclusion_map(out.module, f.source, f.d_lo, std::move(basis));
  return out;
}

CokernelResult cokernel(const SheafMap& f) {
  const int lo = f.d_lo, hi = f.d_hi();
  if (hi - lo < 2) throw WindowTooNarrow("cokernel: map window narrower than three degrees");
  std::vector<CokernelSplit> splits;
  std::vector<Index> kdims;
  for (const auto& m : f.maps) {
    splits.push_back(cokernel_split(m));
    // dim ker = cols - rank and rank = rows - dim coker.
    kdims.push_back(m.cols() - (m.rows() - splits.back().projection.rows()));
  }

  const Hilbert hs = hilbert(*f.source);
  const Hilbert ht = hilbert(*f.target);
  Hilbert hk;
  hk.r = kdims.back() - kdims[kdims.size() - 2];
  hk.c = kdims.back() - hk.r * hi;
  if (hk(hi - 2) != kdims[kdims.size() - 3]) throw WindowTooNarrow("cokernel: kernel dims not affine at top");
  const Hilbert hc = ht - hs + hk;

  // Trusted suffix: source sections regular and quotient dims on the polynomial.
  int s = hi + 1;
  for (int d = hi; d >= lo; --d) {
    const std::size_t k = static_cast<std::size_t>(d - lo);
    if (f.source->dim(d) != hs(d) || splits[k].projection.rows() != hc(d)) break;
    s = d;
  }
  if (hi - s < 2) throw WindowTooNarrow("cokernel: fewer than three trusted degrees");

  std::vector<Index> dims;
  std::vector<QMat> m0, m1;
  for (int d = s; d <= hi; ++d) dims.push_back(splits[static_cast<std::size_t>(d - lo)].projection.rows());
  for (int d = s; d < hi; ++d) {
    const auto& cur = splits[static_cast<std::size_t>(d - lo)];
    const auto& nxt = splits[static_cast<std::size_t>(d + 1 - lo)];
    m0.push_back(nxt.projection * f.target->mul0(d) * cur.section);
    m1.push_back(nxt.projection * f.target->mul1(d) * cur.section);
  }
  TailModule c(s, std::move(dims), std::move(m0), std::move(m1));
  c = down_extend(c, lo);

  CokernelResult out;
  out.module = share(std::move(c));
  out.section_lo = s;
  SheafMap p;
  p.source = f.target;
  p.target = out.module;
  p.d_lo = s;
  for (int d = s; d <= hi; ++d) {
    p.maps.push_back(splits[static_cast<std::size_t>(d - lo)].projection);
    out.sections.push_back(splits[static_cast<std::size_t>(d - lo)].section);
  }
  out.projection = down_extend_map(std::move(p));
  chi_check(hilbert(*out.module) == hc, "cokernel");
  return out;
}

ImageResult image(const SheafMap& f) {
  const CokernelResult c = cokernel(f);
  std::vector<QMat> basis;
  for (int d = f.d_lo; d <= f.d_hi(); ++d) basis.push_back(kernel_basis(c.projection.at(d)));
  ImageResult out;
  out.module = share(submodule(*f.target, f.d_lo, basis));
  out.inclusion = inclusion_map(out.module, f.target, f.d_lo, std::move(basis));
  SheafMap p;
  p.source = f.source;
  p.target = out.module;
  p.d_lo = f.d_lo;
  for (int d = f.d_lo; d <= f.d_hi(); ++d) {
    auto x = solve(out.inclusion.at(d), f.at(d));
    if (!x) throw InternalError("image: map does not factor through its image");
    p.maps.push_back(std::move(*x));
  }
  out.projection = std::move(p);
  const Hilbert hi = hilbert(*out.module);
  const Hilbert hk = hilbert(*kernel(f).module);
  chi_check(hilbert(*f.source) == hk + hi && hilbert(*f.target) == hi + hilbert(*c.module), "image");
  return out;
}

SheafMap induced_from_cokernel(const CokernelResult& c, const SheafMap& h) {
  SheafMap x;
  x.source = c.module;
  x.target = h.target;
  const int s = c.section_lo;
  const int hi = std::min(c.projection.d_hi(), h.d_hi());
  x.d_lo = s;
  for (int d = s; d <= hi; ++d) x.maps.push_back(h.at(d) * c.sections[static_cast<std::size_t>(d - s)]);
  return down_extend_map(std::move(x));
}

SheafMap lift_through(const SheafMap& incl, const SheafMap& h) {
  SheafMap x;
  x.source = h.source;
  x.target = incl.source;
  x.d_lo = std::max(incl.d_lo, h.d_lo);
  const int hi = std::min(incl.d_hi(), h.d_hi());
  for (int d = x.d_lo; d <= hi; ++d) {
    auto s = solve(incl.at(d), h.at(d));
    if (!s) throw InternalError("lift_through: map does not land in the subsheaf");
    x.maps.push_back(std::move(*s));
  }
  return x;
}

SheafMap restrict_map(const SheafMap& f, const SheafMap& k_incl, const SheafMap& l_incl) {
  return lift_through(l_incl, compose(f, k_incl));
}

DirectSum direct_sum(const std::vector<ModulePtr>& parts) {
  if (parts.empty()) throw std::invalid_argument("direct_sum: no summands");
  int lo = parts[0]->d_lo(), hi = parts[0]->d_hi();
  for (const auto& p : parts) {
    lo = std::max(lo, p->d_lo());
    hi = std::min(hi, p->d_hi());
  }
  if (hi < lo) throw WindowTooNarrow("direct_sum: windows do not overlap");
  std::vector<Index> dims;
  std::vector<QMat> m0, m1;
  for (int d = lo; d <= hi; ++d) {
    Index n = 0;
    for (const auto& p : parts) n += p->dim(d);
    dims.push_back(n);
  }
  for (int d = lo; d < hi; ++d) {
    QMat a(0, 0), b(0, 0);
    for (const auto& p : parts) {
      a = block_diag(a, p->mul0(d));
      b = block_diag(b, p->mul1(d));
    }
    m0.push_back(std::move(a));
    m1.push_back(std::move(b));
  }
  std::optional<Presentation> pres = Presentation{};
  for (const auto& p : parts) {
    if (!p->presentation()) {
      pres.reset();
      break;
    }
    const Presentation& q = *p->presentation();
    const std::size_t old_rels = pres->rels.size();
    for (std::size_t i = 0; i < pres->matrix.size(); ++i)
      for (int b : q.rels) pres->matrix[i].push_back(BinForm::zero_of_degree(pres->gens[i] - b));
    for (std::size_t i = 0; i < q.gens.size(); ++i) {
      std::vector<BinForm> row;
      for (std::size_t j = 0; j < old_rels; ++j) row.push_back(BinForm::zero_of_degree(q.gens[i] - pres->rels[j]));
      for (const auto& e : q.matrix[i]) row.push_back(e);
      pres->matrix.push_back(std::move(row));
    }
    pres->gens.insert(pres->gens.end(), q.gens.begin(), q.gens.end());
    pres->rels.insert(pres->rels.end(), q.rels.begin(), q.rels.end());
  }
  DirectSum out;
  out.module = share(TailModule(lo, dims, std::move(m0), std::move(m1), std::move(pres)));
  for (std::size_t k = 0; k < parts.size(); ++k) {
    SheafMap in, pr;
    in.source = parts[k];
    in.target = out.module;
    pr.source = out.module;
    pr.target = parts[k];
    in.d_lo = pr.d_lo = lo;
    for (int d = lo; d <= hi; ++d) {
      Index off = 0;
      for (std::size_t j = 0; j < k; ++j) off += parts[j]->dim(d);
      const Index n = parts[k]->dim(d);
      QMat i = QMat::Zero(out.module->dim(d), n);
      i.block(off, 0, n, n) = identity(n);
      pr.maps.push_back(i.transpose());
      in.maps.push_back(std::move(i));
    }
    out.inclusions.push_back(std::move(in));
    out.projections.push_back(std::move(pr));
  }
  return out;
}

TailModule direct_sum(const TailModule& a, const TailModule& b) {
  return *direct_sum({share(a), share(b)}).module;
}

SheafMap block_map(const DirectSum& src, const DirectSum& tgt,
                   const std::vector<std::vector<std::optional<SheafMap>>>& blocks) {
  SheafMap f;
  f.source = src.module;
  f.target = tgt.module;
  int lo = std::max(src.module->d_lo(), tgt.module->d_lo());
  int hi = std::min(src.module->d_hi(), tgt.module->d_hi());
  for (const auto& row : blocks)
    for (const auto& b : row)
      if (b) {
        lo = std::max(lo, b->d_lo);
        hi = std::min(hi, b->d_hi());
      }
  if (hi < lo) throw WindowTooNarrow("block_map: windows do not overlap");
  f.d_lo = lo;
  for (int d = lo; d <= hi; ++d) {
    QMat x = QMat::Zero(tgt.module->dim(d), src.module->dim(d));
    for (std::size_t i = 0; i < blocks.size(); ++i)
      for (std::size_t j = 0; j < blocks[i].size(); ++j)
        if (blocks[i][j]) x += tgt.inclusions[i].at(d) * blocks[i][j]->at(d) * src.projections[j].at(d);
    f.maps.push_back(std::move(x));
  }
  return f;
}

TailModule twist(const TailModule& f, int k) {
  std::vector<QMat> m0, m1;
  for (int d = f.d_lo(); d < f.d_hi(); ++d) {
    m0.push_back(f.mul0(d));
    m1.push_back(f.mul1(d));
  }
  std::optional<Presentation> p = f.presentation();
  if (p) {
    for (int& a : p->gens) a += k;
    for (int& b : p->rels) b += k;
  }
  return TailModule(f.d_lo() - k, f.dims(), std::move(m0), std::move(m1), std::move(p));
}

SheafMap twist(const SheafMap& f, ModulePtr source, ModulePtr target) {
  const int k = f.source->d_lo() - source->d_lo();
  SheafMap g = f;
  g.source = std::move(source);
  g.target = std::move(target);
  g.d_lo = f.d_lo - k;
  return g;
}

PushoutResult pushout(const SheafMap& f, const SheafMap& g) {
  const DirectSum ab = direct_sum({f.target, g.target});
  const SheafMap diff = add(compose(ab.inclusions[0], f), scale(compose(ab.inclusions[1], g), Rat(-1)));
  CokernelResult c = cokernel(diff);
  PushoutResult out;
  out.module = c.module;
  out.in_a = compose(c.projection, ab.inclusions[0]);
  out.in_b = compose(c.projection, ab.inclusions[1]);
  return out;
}

TailModule from_presentation(const Presentation& p, int d_lo, int d_hi) {
  if (p.matrix.size() != p.gens.size()) throw std::invalid_argument("from_presentation: row count mismatch");
  if (p.rels.empty()) {
    int hi = d_hi;
    for (int a : p.gens) hi = std::max(hi, -a + 2);
    TailModule m = free_module(p.gens, d_lo, std::max(hi, d_lo + 4));
    m.set_presentation(p);
    return m;
  }
  int hi = std::max(d_hi, d_lo + 4);
  for (int b : p.rels) hi = std::max(hi, -b + 3);
  for (int a : p.gens) hi = std::max(hi, -a + 3);
  for (int attempt = 0; attempt < 6; ++attempt, hi += 4) {
    auto p1 = share(free_module(p.rels, d_lo, hi));
    auto p0 = share(free_module(p.gens, d_lo, hi));
    const SheafMap rel = form_map(p1, p0, p.matrix);
    try {
      TailModule m = *cokernel(rel).module;
      m.set_presentation(p);
      return m;
    } catch (const WindowTooNarrow&) {
    }
  }
  throw WindowTooNarrow("from_presentation: cokernel did not stabilize");
}

}  // namespace p1pairs
