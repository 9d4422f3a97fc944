#include "p1pairs/duality.hpp"

#include <algorithm>

namespace p1pairs {

FramedBundle frame_bundle(ModulePtr e) {
  if (!is_locally_free(e)) throw NotLocallyFree("frame_bundle: sheaf has torsion");
  const PresentationResult p = minimal_presentation(e);
  if (!p.presentation.rels.empty() || !is_degreewise_bijective(p.generator_map))
    throw InternalError("frame_bundle: generators of a bundle are not a basis");
  FramedBundle b;
  b.e = std::move(e);
  b.twists = p.presentation.gens;
  b.frame = p.generator_map;
  b.dual = share(free_module(negate(b.twists), b.e->d_lo(), b.e->d_hi()));
  return b;
}

SheafMap dual_map(const SheafMap& f, const FramedBundle& a, const FramedBundle& b) {
  const SheafMap in_frames = compose(inverse(b.frame), compose(f, a.frame));
  return form_map(b.dual, a.dual, transpose(read_forms(in_frames, a.twists, b.twists)));
}

DualizedPair dualize_pair(const StablePair& p) { return dualize_pair(p, default_window(p.N, p.n)); }

DualizedPair dualize_pair(const StablePair& p, Window w) {
  p.check();
  auto vdual = share(free_module(std::vector<int>(static_cast<std::size_t>(p.N), 0), w.lo, w.hi));
  auto line = share(free_module({-p.n}, w.lo, w.hi));
  FormMatrix m;
  for (const auto& f : p.forms) m.push_back({f});
  const CokernelResult c = cokernel(form_map(line, vdual, m));
  return {c.projection, c.module};
}

namespace {

QuotLevel make_level(ModulePtr g) { return {g, torsion_filtration(g)}; }

std::vector<int> negated_sorted(std::vector<int> v) {
  v = negate(std::move(v));
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

QuotChain dual_chain(const PsiChain& c, Rng& rng) {
  QuotChain q;
  q.N = c.base.N;
  q.n = c.base.n;
  const DualizedPair d = dualize_pair(c.base, c.window);
  q.rho = d.rho;
  q.vdual = d.rho.source;
  q.levels.push_back(make_level(d.g0));

  std::vector<FramedBundle> k;
  for (const auto& kr : c.kernels) k.push_back(frame_bundle(kr.module));

  const auto check_level = [&](std::size_t i) {
    const QuotLevel& l = q.levels[i];
    if (!is_locally_free(l.split.free_part) ||
        splitting_type(l.split.free_part) != negated_sorted(splitting_type(k[i].e)))
      throw InternalError("dual_chain: torsion-free part is not the dual kernel");
    const ModulePtr t = c.cokernels[i].module;
    if (l.split.length != torsion_length(t)) throw InternalError("dual_chain: torsion length differs from l(T_i)");
    if (l.split.length > 0 && !iso_test(l.split.torsion, ext1(t), rng).is_iso())
      throw InternalError("dual_chain: torsion part is not Ext^1(T_i, O)");
  };
  check_level(0);

  for (int i = 0; i < c.length(); ++i) {
    const auto s = static_cast<std::size_t>(i);
    const SheafMap j = lift_through(c.kernels[s].inclusion, c.kernels[s + 1].inclusion);

    // (kext): 0 -> K_i^dual -> K_{i+1}^dual -> Ext^1(P_i, O) -> 0.
    const SheafMap jd = dual_map(j, k[s + 1], k[s]);
    const CokernelResult ext_p = cokernel(jd);

    // Resolution 0 -> E_1 -> K_i + O(gens) -> T_i -> 0 through psi_{i+1}.
    const ModulePtr t = c.cokernels[s].module;
    const PresentationResult tp = minimal_presentation(t);
    const DirectSum e0 = direct_sum({c.kernels[s].module, tp.generators});
    DirectSum one;
    one.module = t;
    one.inclusions = {identity_map(t)};
    one.projections = {identity_map(t)};
    const SheafMap onto_t = block_map(e0, one, {{c.steps[s], tp.generator_map}});
    const KernelResult e1 = kernel(onto_t);
    const FramedBundle f0 = frame_bundle(e0.module);
    const FramedBundle f1 = frame_bundle(e1.module);
    const CokernelResult ext_t = cokernel(dual_map(e1.inclusion, f1, f0));

    // The chain map K_{i+1} -> E_1 over K_i -> E_0 dualizes to alpha.
    const SheafMap lift = lift_through(e1.inclusion, compose(e0.inclusions[0], j));
    const SheafMap ld = dual_map(lift, k[s + 1], f1);
    const SheafMap alpha = induced_from_cokernel(ext_t, compose(ext_p.projection, ld));
    if (!is_surjective(alpha)) throw InternalError("dual_chain: alpha is not surjective");

    // G_{i+1} = K_{i+1}^dual x_{Ext^1(P_i)} Ext^1(T_i).
    const DirectSum sum = direct_sum({k[s + 1].dual, ext_t.module});
    DirectSum target;
    target.module = ext_p.module;
    target.inclusions = {identity_map(ext_p.module)};
    target.projections = {identity_map(ext_p.module)};
    const KernelResult g = kernel(block_map(sum, target, {{ext_p.projection, scale(alpha, Rat(-1))}}));

    QuotExtension z;
    z.in = lift_through(g.inclusion, compose(sum.inclusions[0], jd));
    z.out = compose(sum.projections[1], g.inclusion);
    q.extensions.push_back(std::move(z));
    q.levels.push_back(make_level(g.module));
    check_level(s + 1);
  }
  if (!is_locally_free(q.levels.back().g)) throw InternalError("dual_chain: last level has torsion");
  return q;
}

Report validate_quot_chain(const QuotChain& q) {
  Report r;
  r.add("rho surjective", is_surjective(q.rho));
  const int m = q.length();
  const Index l0 = q.levels[0].split.length;
  r.add("B_k", l0 <= q.n, "G_0 lies in B_k for k <= " + std::to_string(l0));
  r.add("extension count", static_cast<int>(q.extensions.size()) == m);
  for (int i = 0; i < m && i < static_cast<int>(q.extensions.size()); ++i) {
    const auto s = static_cast<std::size_t>(i);
    const std::string tag = "[" + std::to_string(i + 1) + "]";
    const QuotExtension& z = q.extensions[s];
    const bool exact = is_injective(z.in) && is_surjective(z.out) && is_zero(compose(z.out, z.in)) &&
                       same_subsheaf(kernel(z.out).inclusion, z.in);
    r.add("zeta" + tag + " exact", exact);
    const QuotLevel& prev = q.levels[s];
    bool ends = is_locally_free(z.in.source) && is_locally_free(prev.split.free_part) &&
                torsion_length(z.out.target) == prev.split.length && hilbert(*z.out.target).r == 0 &&
                hilbert(*z.out.target) == hilbert(*prev.split.torsion);
    ends = ends && splitting_type(z.in.source) == splitting_type(prev.split.free_part);
    r.add("zeta" + tag + " ends", ends);
    r.add("torsion drops" + tag, q.levels[s + 1].split.length < prev.split.length);
  }
  r.add("last locally free", q.levels.back().split.length == 0);
  bool earlier = true;
  for (int i = 0; i < m; ++i) earlier = earlier && q.levels[static_cast<std::size_t>(i)].split.length > 0;
  r.add("only last locally free", earlier);
  return r;
}

Report verify_duality(const PsiChain& c, const QuotChain& q, Rng& rng) {
  Report r;
  const bool same_length = q.length() == c.length();
  r.add("chain lengths", same_length);
  if (!same_length) return r;
  const DualizedPair d = dualize_pair(c.base, c.window);
  r.add("G_0", iso_test(d.g0, q.levels[0].g, rng).is_iso() && same_subsheaf(kernel(d.rho).inclusion, kernel(q.rho).inclusion));
  for (int i = 0; i <= c.length(); ++i) {
    const auto s = static_cast<std::size_t>(i);
    const std::string tag = "[" + std::to_string(i) + "]";
    const QuotLevel& l = q.levels[s];
    const ModulePtr t = c.cokernels[s].module;
    r.add("torsion length" + tag, l.split.length == torsion_length(t));
    r.add("torsion is Ext^1" + tag,
          l.split.length == 0 ? is_zero_module(*t) : iso_test(l.split.torsion, ext1(t), rng).is_iso());
    r.add("splitting" + tag, is_locally_free(l.split.free_part) &&
                                 splitting_type(l.split.free_part) ==
                                     negated_sorted(splitting_type(c.kernels[s].module)));
  }
  return r;
}

QuotChain with_split_extension(const QuotChain& q, int i) {
  if (i < 0 || i >= q.length()) throw std::out_of_range("with_split_extension: level out of range");
  const auto s = static_cast<std::size_t>(i);
  QuotChain out = q;
  const QuotLevel& prev = q.levels[s];
  const DirectSum sum = direct_sum({prev.split.free_part, prev.split.torsion});
  out.levels[s + 1] = make_level(sum.module);
  out.extensions[s] = {sum.inclusions[0], sum.projections[1]};
  return out;
}

}  // namespace p1pairs
