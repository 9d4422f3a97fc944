#include "p1pairs/pairchain.hpp"

#include <string>

namespace p1pairs {

namespace {

std::string idx(const char* name, int i) { return std::string(name) + "[" + std::to_string(i) + "]"; }

bool degreewise_injective(const SheafMap& f) {
  for (const auto& m : f.maps)
    if (rank(m) != m.cols()) return false;
  return true;
}

// Identity of a subsheaf of V (x) O expressed between two bases of it.
SheafMap change_of_basis(const KernelResult& from, const KernelResult& to) {
  return lift_through(to.inclusion, from.inclusion);
}

SheafMap draw_step(const PsiChain& c, Rng& rng, bool sparse, std::int64_t bound) {
  if (c.complete()) throw Exhausted("extend_chain: chain is already complete");
  const auto basis = hom_space(c.kernels.back().module, c.cokernels.back().module);
  if (basis.empty()) throw InternalError("extend_chain: no maps into a nonzero cokernel");
  std::vector<Rat> coeffs(basis.size(), Rat(0));
  if (sparse) {
    const auto k = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(basis.size()) - 1));
    std::int64_t v = 0;
    while (v == 0) v = rng.uniform(-bound, bound);
    coeffs[k] = Rat(v);
  } else {
    bool nonzero = false;
    while (!nonzero) {
      for (auto& x : coeffs) {
        x = Rat(rng.uniform(-bound, bound));
        nonzero = nonzero || !x.is_zero();
      }
    }
  }
  return combination(basis, coeffs);
}

}  // namespace

void StablePair::check() const {
  if (N < 2) throw std::invalid_argument("pair: N must be at least 2");
  if (n < 0) throw std::invalid_argument("pair: n must be nonnegative");
  if (static_cast<int>(forms.size()) != N) throw std::invalid_argument("pair: expected N forms");
  bool nonzero = false;
  for (const auto& f : forms) {
    if (f.degree() != n) throw std::invalid_argument("pair: form of wrong degree");
    nonzero = nonzero || !f.is_zero();
  }
  if (!nonzero) throw std::invalid_argument("pair: all forms vanish");
}

Window default_window(int N, int n) { return {0, n + N + 4}; }

PairAnalysis analyze(const StablePair& p) {
  p.check();
  const PsiChain c = make_chain(p);
  PairAnalysis out;
  const int via_image = static_cast<int>(rank_degree(*image(c.psi0).module).degree);
  const int via_gcd = p.n - gcd(p.forms).degree();
  if (via_image != via_gcd) throw InternalError("analyze: image degree disagrees with the gcd");
  out.deg_im = via_gcd;
  out.coker_length = p.n - out.deg_im;
  out.kernel_splitting = splitting_type(c.kernels[0].module);
  out.surjective = out.coker_length == 0;
  return out;
}

PsiChain make_chain(const StablePair& p) { return make_chain(p, default_window(p.N, p.n)); }

PsiChain make_chain(const StablePair& p, Window w) {
  p.check();
  PsiChain c;
  c.base = p;
  c.window = w;
  c.vo = share(free_module(std::vector<int>(static_cast<std::size_t>(p.N), 0), w.lo, w.hi));
  c.f = share(free_module({p.n}, w.lo, w.hi));
  c.psi0 = form_map(c.vo, c.f, {p.forms});
  c.kernels.push_back(kernel(c.psi0));
  c.cokernels.push_back(cokernel(c.psi0));
  return c;
}

void append_step(PsiChain& c, SheafMap step) {
  if (step.source != c.kernels.back().module || step.target != c.cokernels.back().module)
    throw std::invalid_argument("append_step: step must map the last kernel to the last cokernel");
  step = down_extend_map(std::move(step));
  const KernelResult k = kernel(step);
  c.kernels.push_back({k.module, compose(c.kernels.back().inclusion, k.inclusion)});
  c.cokernels.push_back(cokernel(step));
  c.steps.push_back(std::move(step));
}

ValidationReport validate_psi_chain(const PsiChain& c) {
  ValidationReport r;
  try {
    c.base.check();
    r.add("base", true);
  } catch (const std::exception& e) {
    r.add("base", false, e.what());
    return r;
  }
  r.add("psi[0] nonzero", !is_zero(c.psi0));
  const int m = c.length();
  for (int i = 1; i <= m; ++i) {
    const SheafMap& s = c.psi(i);
    const bool shaped = s.source == c.kernels[static_cast<std::size_t>(i - 1)].module &&
                        s.target == c.cokernels[static_cast<std::size_t>(i - 1)].module;
    r.add(idx("psi", i) + " shape", shaped);
    bool commutes = true;
    try {
      validate_map(s);
    } catch (const std::exception&) {
      commutes = false;
    }
    r.add(idx("psi", i) + " commutes", commutes);
    r.add(idx("psi", i) + " nonzero", !is_zero(s));
  }
  for (int i = 0; i < m; ++i)
    r.add(idx("coker psi", i) + " nonzero", !is_zero_module(*c.cokernels[static_cast<std::size_t>(i)].module),
          "coker psi_i vanishes before the chain ends");
  r.add("complete", c.complete(), "coker psi_m is nonzero but the chain ends");
  const Index l0 = torsion_length(c.cokernels[0].module);
  r.add("bounded", m <= l0, "length exceeds l(coker psi_0)");
  return r;
}

PhiChain psi_to_phi(const PsiChain& c) {
  PhiChain ph;
  ph.N = c.base.N;
  ph.n = c.base.n;
  ph.vo = c.vo;
  ph.modules.push_back(c.f);
  ph.maps.push_back(c.psi0);
  ph.images.push_back(image(c.psi0));
  ph.cokernels.push_back(c.cokernels[0]);
  ph.kernels.push_back(c.kernels[0]);
  // u : coker psi_i -> coker phi_i.
  SheafMap u = identity_map(c.cokernels[0].module);
  for (int i = 0; i < c.length(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    const KernelResult& ki = c.kernels[k];
    const SheafMap& step = c.steps[k];
    const DirectSum s = direct_sum({c.vo, c.cokernels[k].module});
    const SheafMap diff = add(compose(s.inclusions[0], ki.inclusion), scale(compose(s.inclusions[1], step), Rat(-1)));
    const CokernelResult po = cokernel(diff);
    const SheafMap phi = compose(po.projection, s.inclusions[0]);
    const SheafMap in_b = compose(po.projection, s.inclusions[1]);
    ph.alphas.push_back(compose(in_b, inverse(u)));
    ph.betas.push_back(induced_from_cokernel(po, compose(ph.images[k].projection, s.projections[0])));
    ph.modules.push_back(po.module);
    ph.maps.push_back(phi);
    ph.images.push_back(image(phi));
    ph.cokernels.push_back(cokernel(phi));
    ph.kernels.push_back(kernel(phi));

    if (!same_subsheaf(ph.kernels.back().inclusion, c.kernels[k + 1].inclusion))
      throw InternalError("psi_to_phi: ker psi and ker phi differ");
    u = induced_from_cokernel(c.cokernels[k + 1], compose(ph.cokernels.back().projection, in_b));
    if (!is_degreewise_bijective(u)) throw InternalError("psi_to_phi: coker psi and coker phi differ");
  }
  return ph;
}

ValidationReport validate_phi_chain(const PhiChain& c) {
  ValidationReport r;
  const int m = c.length();
  Index prev = -1;
  for (int i = 0; i <= m; ++i) {
    const Index l = torsion_length(c.cokernels[static_cast<std::size_t>(i)].module);
    if (i > 0) r.add(idx("length", i) + " drops", l < prev);
    prev = l;
  }
  r.add("complete", prev == 0);
  for (int i = 0; i < m; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const SheafMap& a = c.alphas[k];
    const SheafMap& b = c.betas[k];
    r.add(idx("beta phi = phi", i), equal(compose(b, c.maps[k + 1]), c.images[k].projection));
    r.add(idx("alpha injective", i), degreewise_injective(a));
    r.add(idx("beta surjective", i), is_surjective(b));
    bool middle = is_zero(compose(b, a));
    for (int d = std::max(a.d_lo, b.d_lo); middle && d <= std::min(a.d_hi(), b.d_hi()); ++d)
      middle = rank(a.at(d)) == c.modules[k + 1]->dim(d) - rank(b.at(d));
    r.add(idx("im alpha = ker beta", i), middle);
    const RankDegree f1 = rank_degree(*c.modules[k + 1]);
    const RankDegree f0 = rank_degree(*c.modules[k]);
    const RankDegree im = rank_degree(*c.images[k].module);
    const RankDegree co = rank_degree(*c.cokernels[k].module);
    r.add(idx("rank additive", i), f1.rank == im.rank + co.rank);
    r.add(idx("degree preserved", i), f1.degree == f0.degree && f1.degree == im.degree + co.degree);
  }
  return r;
}

PsiChain phi_to_psi(const PhiChain& c) {
  StablePair p;
  p.N = c.N;
  p.n = c.n;
  const std::vector<int> zeros(static_cast<std::size_t>(c.N), 0);
  p.forms = read_forms(c.maps[0], zeros, {c.n})[0];
  PsiChain out = make_chain(p, {c.vo->d_lo(), c.vo->d_hi()});
  // w : coker psi_i -> coker phi_i.
  SheafMap w = induced_from_cokernel(out.cokernels[0], c.cokernels[0].projection);
  for (int i = 0; i < c.length(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    const SheafMap r = compose(c.maps[k + 1], out.kernels[k].inclusion);
    SheafMap lifted;
    try {
      lifted = lift_through(c.alphas[k], r);
    } catch (const InternalError&) {
      throw std::invalid_argument("phi_to_psi: phi_{i+1} does not map ker phi_i into im alpha_i");
    }
    SheafMap step = compose(inverse(w), lifted);
    step.source = out.kernels[k].module;
    step.target = out.cokernels[k].module;
    append_step(out, std::move(step));
    w = induced_from_cokernel(out.cokernels[k + 1], compose(c.cokernels[k + 1].projection, compose(c.alphas[k], w)));
  }
  return out;
}

PsiChain extend_chain(const PsiChain& c, Rng& rng, std::int64_t bound) {
  PsiChain out = c;
  append_step(out, draw_step(c, rng, false, bound));
  if (!validate_psi_chain(out).passed("psi[" + std::to_string(out.length()) + "] nonzero"))
    throw InternalError("extend_chain: drew a zero step");
  return out;
}

PsiChain complete_chain(PsiChain c, Rng& rng, std::int64_t bound) {
  while (!c.complete()) c = extend_chain(c, rng, bound);
  return c;
}

PhiChain truncate(const PhiChain& c, int length) {
  if (length < 0 || length > c.length()) throw std::out_of_range("truncate: length out of range");
  const auto keep = static_cast<std::size_t>(length) + 1;
  PhiChain t = c;
  t.modules.resize(keep);
  t.maps.resize(keep);
  t.images.resize(keep);
  t.cokernels.resize(keep);
  t.kernels.resize(keep);
  t.alphas.resize(keep - 1);
  t.betas.resize(keep - 1);
  return t;
}

bool chain_equivalent(const PsiChain& a, const PsiChain& b) {
  if (a.length() != b.length() || a.base.N != b.base.N || a.base.n != b.base.n) return false;
  if (a.window.lo != b.window.lo || a.window.hi != b.window.hi) return false;
  Rat lambda;
  if (!proportional(a.psi0, b.psi0, &lambda)) return false;
  // u : target of psi_i(a) -> target of psi_i(b).
  SheafMap u = scale(identity_map(a.f), lambda);
  u.target = b.f;
  for (int i = 0; i < a.length(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!same_subsheaf(a.kernels[k].inclusion, b.kernels[k].inclusion)) return false;
    const SheafMap e = change_of_basis(a.kernels[k], b.kernels[k]);
    const SheafMap w = induced_from_cokernel(a.cokernels[k], compose(b.cokernels[k].projection, u));
    if (!proportional(compose(w, a.steps[k]), compose(b.steps[k], e))) return false;
    u = w;
  }
  return same_subsheaf(a.kernels.back().inclusion, b.kernels.back().inclusion);
}

StablePair random_pair(Rng& rng, int N, int n, int g, std::int64_t bound) {
  if (g < 0 || g > n) throw std::invalid_argument("random_pair: common factor degree out of range");
  StablePair p;
  p.N = N;
  p.n = n;
  BinForm h;
  do h = random_form(rng, g, bound);
  while (h.is_zero());
  while (true) {
    std::vector<BinForm> q;
    for (int j = 0; j < N; ++j) q.push_back(random_form(rng, n - g, bound));
    bool nonzero = false;
    for (const auto& f : q) nonzero = nonzero || !f.is_zero();
    if (!nonzero || gcd(q).degree() != 0) continue;
    p.forms.clear();
    for (const auto& f : q) p.forms.push_back(f.is_zero() ? BinForm::zero_of_degree(n) : f * h);
    return p;
  }
}

PsiChain random_chain(Rng& rng, int N, int n, int g, bool sparse, std::int64_t bound) {
  return random_chain(rng, random_pair(rng, N, n, g, bound), sparse, bound);
}

PsiChain random_chain(Rng& rng, const StablePair& p, bool sparse, std::int64_t bound) {
  PsiChain c = make_chain(p);
  while (!c.complete()) append_step(c, draw_step(c, rng, sparse, bound));
  return c;
}

}  // namespace p1pairs
