#include "p1pairs/expanded.hpp"

#include <algorithm>
#include <climits>

namespace p1pairs {

// ---- BiTailModule ----------------------------------------------------------

BiTailModule::BiTailModule(int a_lo, int a_hi, int b_lo, int b_hi)
    : a_lo_(a_lo), a_hi_(a_hi), b_lo_(b_lo), b_hi_(b_hi), zero_(share(zero_module(a_lo, a_hi))) {
  if (a_hi < a_lo || b_hi < b_lo) throw std::invalid_argument("BiTailModule: empty window");
}

std::vector<int> BiTailModule::weights(int b) const {
  std::vector<int> out;
  for (auto it = parts_.lower_bound({b, INT_MIN}); it != parts_.end() && it->first.first == b; ++it)
    out.push_back(it->first.second);
  return out;
}

ModulePtr BiTailModule::part(int b, int w) const {
  const auto it = parts_.find({b, w});
  return it == parts_.end() ? zero_ : it->second;
}

bool BiTailModule::has_part(int b, int w) const { return parts_.count({b, w}) > 0; }

SheafMap BiTailModule::mul_w0(int b, int w) const {
  const auto it = w0_.find({b, w});
  return it == w0_.end() ? zero_map(part(b, w), part(b + 1, w)) : it->second;
}

SheafMap BiTailModule::mul_w1(int b, int w) const {
  const auto it = w1_.find({b, w});
  return it == w1_.end() ? zero_map(part(b, w), part(b + 1, w + 1)) : it->second;
}

Index BiTailModule::dim(int a, int b) const {
  Index n = 0;
  for (int w : weights(b)) n += part(b, w)->dim(a);
  return n;
}

void BiTailModule::set_part(int b, int w, ModulePtr m) {
  if (b < b_lo_ || b > b_hi_) throw std::out_of_range("BiTailModule: row outside the window");
  if (m->d_lo() > a_lo_ || m->d_hi() < a_hi_) throw WindowTooNarrow("BiTailModule: piece narrower than the window");
  parts_[{b, w}] = std::move(m);
}

void BiTailModule::set_w0(int b, int w, SheafMap f) {
  if (f.source != part(b, w) || f.target != part(b + 1, w)) throw InternalError("set_w0: pieces do not match");
  w0_[{b, w}] = std::move(f);
}

void BiTailModule::set_w1(int b, int w, SheafMap f) {
  if (f.source != part(b, w) || f.target != part(b + 1, w + 1)) throw InternalError("set_w1: pieces do not match");
  w1_[{b, w}] = std::move(f);
}

void BiTailModule::validate() const {
  for (const auto& [key, f] : w0_) validate_map(f);
  for (const auto& [key, f] : w1_) validate_map(f);
  for (int b = b_lo_; b + 2 <= b_hi_; ++b)
    for (int w : weights(b))
      if (!equal(compose(mul_w1(b + 1, w), mul_w0(b, w)), compose(mul_w0(b + 1, w + 1), mul_w1(b, w))))
        throw InternalError("BiTailModule: w0 and w1 do not commute in row " + std::to_string(b));
}

// ---- equivariant maps ------------------------------------------------------

SheafMap EqSheafMap::at(int b, int w) const {
  const auto it = parts.find({b, w});
  return it == parts.end() ? zero_map(source->part(b, w), target->part(b, w)) : it->second;
}

void validate_map(const EqSheafMap& f) {
  const BiTailModule& s = *f.source;
  const BiTailModule& t = *f.target;
  for (const auto& [key, m] : f.parts) {
    if (m.source != s.part(key.first, key.second) || m.target != t.part(key.first, key.second))
      throw InternalError("EqSheafMap: piece does not match its modules");
    validate_map(m);
  }
  for (int b = s.b_lo(); b < s.b_hi(); ++b)
    for (int w : s.weights(b)) {
      if (!equal(compose(f.at(b + 1, w), s.mul_w0(b, w)), compose(t.mul_w0(b, w), f.at(b, w))))
        throw InternalError("EqSheafMap: w0 square fails at row " + std::to_string(b));
      if (!equal(compose(f.at(b + 1, w + 1), s.mul_w1(b, w)), compose(t.mul_w1(b, w), f.at(b, w))))
        throw InternalError("EqSheafMap: w1 square fails at row " + std::to_string(b));
    }
}

EqSheafMap compose(const EqSheafMap& g, const EqSheafMap& f) {
  EqSheafMap h{f.source, g.target, {}};
  for (int b = f.source->b_lo(); b <= f.source->b_hi(); ++b)
    for (int w : f.source->weights(b)) h.parts[{b, w}] = compose(g.at(b, w), f.at(b, w));
  return h;
}

BiKernel kernel(const EqSheafMap& f) {
  const BiTailModule& s = *f.source;
  auto k = std::make_shared<BiTailModule>(s.a_lo(), s.a_hi(), s.b_lo(), s.b_hi());
  std::map<std::pair<int, int>, SheafMap> incl;
  for (int b = s.b_lo(); b <= s.b_hi(); ++b)
    for (int w : s.weights(b)) {
      KernelResult kr = kernel(f.at(b, w));
      k->set_part(b, w, kr.module);
      incl[{b, w}] = kr.inclusion;
    }
  for (int b = s.b_lo(); b < s.b_hi(); ++b)
    for (int w : s.weights(b)) {
      const SheafMap& i0 = incl.at({b, w});
      if (s.has_part(b + 1, w)) k->set_w0(b, w, lift_through(incl.at({b + 1, w}), compose(s.mul_w0(b, w), i0)));
      if (s.has_part(b + 1, w + 1))
        k->set_w1(b, w, lift_through(incl.at({b + 1, w + 1}), compose(s.mul_w1(b, w), i0)));
    }
  BiKernel out{k, {k, f.source, std::move(incl)}};
  return out;
}

EqSheafMap lift_through(const EqSheafMap& incl, const EqSheafMap& f) {
  EqSheafMap h{f.source, incl.source, {}};
  for (int b = f.source->b_lo(); b <= f.source->b_hi(); ++b)
    for (int w : f.source->weights(b)) h.parts[{b, w}] = lift_through(incl.at(b, w), f.at(b, w));
  return h;
}

// ---- constructions ---------------------------------------------------------

BiTailModule pullback_from_X(ModulePtr f, int b_lo, int b_hi, int weight) {
  BiTailModule s(f->d_lo(), f->d_hi(), b_lo, b_hi);
  for (int b = std::max(b_lo, 0); b <= b_hi; ++b)
    for (int k = 0; k <= b; ++k) s.set_part(b, weight + k, f);
  const SheafMap id = identity_map(f);
  for (int b = std::max(b_lo, 0); b < b_hi; ++b)
    for (int k = 0; k <= b; ++k) {
      s.set_w0(b, weight + k, id);
      s.set_w1(b, weight + k, id);
    }
  return s;
}

BiTailModule twist_D(const BiTailModule& s, int k_minus, int k_plus) {
  const int k = k_minus + k_plus;
  BiTailModule t(s.a_lo(), s.a_hi(), s.b_lo() - k, s.b_hi() - k);
  for (int b = s.b_lo(); b <= s.b_hi(); ++b)
    for (int w : s.weights(b)) t.set_part(b - k, w - k_minus, s.part(b, w));
  for (int b = s.b_lo(); b < s.b_hi(); ++b)
    for (int w : s.weights(b)) {
      if (s.has_part(b + 1, w)) t.set_w0(b - k, w - k_minus, s.mul_w0(b, w));
      if (s.has_part(b + 1, w + 1)) t.set_w1(b - k, w - k_minus, s.mul_w1(b, w));
    }
  return t;
}

BiTailModule pushforward_D(ModulePtr t, int side, int weight, int a_lo, int a_hi, int b_lo, int b_hi) {
  if (side != 1 && side != -1) throw std::invalid_argument("pushforward_D: side must be +1 or -1");
  BiTailModule s(a_lo, a_hi, b_lo, b_hi);
  const auto w_of = [&](int b) { return side > 0 ? weight + b : weight; };
  for (int b = b_lo; b <= b_hi; ++b) s.set_part(b, w_of(b), t);
  const SheafMap id = identity_map(t);
  for (int b = b_lo; b < b_hi; ++b) {
    if (side > 0)
      s.set_w1(b, w_of(b), id);
    else
      s.set_w0(b, w_of(b), id);
  }
  return s;
}

// ---- restrictions ----------------------------------------------------------

std::vector<int> Restriction::support() const {
  std::vector<int> out;
  for (const auto& [w, c] : parts)
    if (!is_zero_module(*c.module)) out.push_back(w);
  return out;
}

ModulePtr Restriction::module(int w) const {
  const auto it = parts.find(w);
  if (it == parts.end()) return share(zero_module(0, 0));
  return it->second.module;
}

namespace {

Restriction restrict_at(const BiTailModule& s, int side, int row) {
  if (row <= s.b_lo() || row > s.b_hi()) throw WindowTooNarrow("restriction: row needs a row below it");
  Restriction r;
  r.row = row;
  r.side = side;
  for (int w : s.weights(row)) {
    if (side < 0)
      r.parts.emplace(w, cokernel(s.mul_w1(row - 1, w - 1)));
    else
      r.parts.emplace(w - row, cokernel(s.mul_w0(row - 1, w)));
  }
  return r;
}

bool same_shape(const Restriction& a, const Restriction& b) {
  if (a.support() != b.support()) return false;
  for (int w : a.support())
    if (!(hilbert(*a.module(w)) == hilbert(*b.module(w)))) return false;
  return true;
}

Restriction restrict_checked(const BiTailModule& s, int side) {
  Restriction top = restrict_at(s, side, s.b_hi());
  if (s.b_hi() - 2 >= s.b_lo() && !same_shape(top, restrict_at(s, side, s.b_hi() - 1)))
    throw WindowTooNarrow("restriction: not stable in the top rows");
  return top;
}

// The pieces of one row as a single module.
struct Row {
  std::vector<int> weights;
  DirectSum sum;

  std::optional<std::size_t> index(int w) const {
    const auto it = std::find(weights.begin(), weights.end(), w);
    if (it == weights.end()) return std::nullopt;
    return static_cast<std::size_t>(it - weights.begin());
  }
};

Row flatten(const BiTailModule& s, int b) {
  Row r;
  r.weights = s.weights(b);
  std::vector<ModulePtr> pieces;
  for (int w : r.weights) pieces.push_back(s.part(b, w));
  if (pieces.empty()) pieces.push_back(s.part(b, INT_MIN));
  r.sum = direct_sum(pieces);
  return r;
}

// x * w0 + y * w1 from row b to row b + 1.
SheafMap row_map(const BiTailModule& s, int b, const Row& src, const Row& tgt, const Rat& x, const Rat& y) {
  std::vector<std::vector<std::optional<SheafMap>>> blocks(
      tgt.sum.inclusions.size(), std::vector<std::optional<SheafMap>>(src.sum.inclusions.size()));
  for (std::size_t j = 0; j < src.weights.size(); ++j) {
    const int w = src.weights[j];
    if (auto i = tgt.index(w); i && !x.is_zero()) blocks[*i][j] = scale(s.mul_w0(b, w), x);
    if (auto i = tgt.index(w + 1); i && !y.is_zero()) {
      const SheafMap m = scale(s.mul_w1(b, w), y);
      blocks[*i][j] = blocks[*i][j] ? add(*blocks[*i][j], m) : m;
    }
  }
  return block_map(src.sum, tgt.sum, blocks);
}

Hilbert total_hilbert(const Restriction& r) {
  Hilbert h;
  for (const auto& [w, c] : r.parts) {
    const Hilbert p = hilbert(*c.module);
    h.r += p.r;
    h.c += p.c;
  }
  return h;
}

// S -> iota_* W, where W is the weight-w part of the restriction r of S.
EqSheafMap to_divisor(BiModulePtr s, const Restriction& r, int w) {
  const CokernelResult& c = r.parts.at(w);
  auto t = std::make_shared<BiTailModule>(
      pushforward_D(c.module, r.side, w, s->a_lo(), s->a_hi(), s->b_lo(), s->b_hi()));
  EqSheafMap f{s, t, {}};
  for (int b = s->b_lo(); b <= r.row; ++b) {
    const int sw = r.side > 0 ? w + b : w;
    if (!s->has_part(b, sw)) continue;
    SheafMap g = identity_map(s->part(b, sw));
    for (int k = b; k < r.row; ++k)
      g = compose(r.side > 0 ? s->mul_w1(k, k + w) : s->mul_w0(k, w), g);
    f.parts[{b, sw}] = compose(c.projection, g);
  }
  for (int b = r.row + 1; b <= s->b_hi(); ++b)
    if (s->has_part(b, r.side > 0 ? w + b : w))
      throw WindowTooNarrow("to_divisor: restriction row below the top");
  return f;
}

// iota_* h : iota_* A -> iota_* B for pushforwards built with the same side and weight.
EqSheafMap push_map(BiModulePtr a, BiModulePtr b, const SheafMap& h) {
  EqSheafMap f{a, b, {}};
  for (int r = a->b_lo(); r <= a->b_hi(); ++r)
    for (int w : a->weights(r)) f.parts[{r, w}] = h;
  return f;
}

bool iso_or_zero(ModulePtr a, ModulePtr b, Rng& rng) {
  const bool za = is_zero_module(*a), zb = is_zero_module(*b);
  if (za || zb) return za && zb;
  return iso_test(a, b, rng).is_iso();
}

bool support_ok(const Restriction& r) {
  for (int w : r.support())
    if (w != 0 && w != -1) return false;
  return true;
}

// The isomorphism theta with theta p1 = p2, for surjections with a common kernel.
std::optional<SheafMap> common_witness(const SheafMap& p1, const SheafMap& p2) {
  if (!is_surjective(p1) || !is_surjective(p2)) return std::nullopt;
  const KernelResult k = kernel(p1);
  if (!is_zero(compose(p2, k.inclusion))) return std::nullopt;
  const CokernelResult c = cokernel(k.inclusion);
  const SheafMap g1 = induced_from_cokernel(c, p1);
  const SheafMap g2 = induced_from_cokernel(c, p2);
  if (!is_degreewise_bijective(g1) || !is_degreewise_bijective(g2)) return std::nullopt;
  return compose(g2, inverse(g1));
}

}  // namespace

Restriction restrict_Dminus(const BiTailModule& s) { return restrict_checked(s, -1); }
Restriction restrict_Dminus(const BiTailModule& s, int row) { return restrict_at(s, -1, row); }
Restriction restrict_Dplus(const BiTailModule& s) { return restrict_checked(s, 1); }
Restriction restrict_Dplus(const BiTailModule& s, int row) { return restrict_at(s, 1, row); }

SheafMap Fiber::projection(int w) const {
  const auto it = std::find(weights.begin(), weights.end(), w);
  if (it == weights.end()) throw std::out_of_range("Fiber: no piece of this weight");
  return compose(quotient.projection, pieces.inclusions[static_cast<std::size_t>(it - weights.begin())]);
}

Fiber restrict_fiber(const BiTailModule& s, const Rat& c) { return restrict_fiber(s, c, s.b_hi()); }

Fiber restrict_fiber(const BiTailModule& s, const Rat& c, int row) {
  if (row <= s.b_lo() || row > s.b_hi()) throw WindowTooNarrow("restrict_fiber: row needs a row below it");
  const Row src = flatten(s, row - 1);
  const Row tgt = flatten(s, row);
  Fiber f;
  f.row = row;
  f.weights = tgt.weights;
  f.pieces = tgt.sum;
  f.quotient = cokernel(row_map(s, row - 1, src, tgt, Rat(1), -c));
  return f;
}

std::map<int, SheafMap> restrict_map(const EqSheafMap& f, const Restriction& src, const Restriction& tgt) {
  if (src.row != tgt.row || src.side != tgt.side) throw std::invalid_argument("restrict_map: restrictions differ");
  std::map<int, SheafMap> out;
  for (const auto& [w, c] : src.parts) {
    const auto it = tgt.parts.find(w);
    if (it == tgt.parts.end()) continue;
    const SheafMap h = compose(it->second.projection, f.at(src.row, src.source_weight(w)));
    out.emplace(w, induced_from_cokernel(c, h));
  }
  return out;
}

// ---- admissibility ---------------------------------------------------------

Modification elementary_modification(BiModulePtr s) {
  const Restriction rm = restrict_Dminus(*s);
  const Restriction rp = restrict_Dplus(*s);
  if (!support_ok(rm) || !support_ok(rp))
    throw std::invalid_argument("elementary_modification: restriction weights outside {0, -1}");
  Modification out{s, {s, s, {}}};
  for (int b = s->b_lo(); b <= s->b_hi(); ++b)
    for (int w : s->weights(b)) out.inclusion.parts[{b, w}] = identity_map(s->part(b, w));
  if (rm.parts.count(-1)) {
    const BiKernel k = kernel(to_divisor(s, rm, -1));
    out = {k.module, k.inclusion};
  }
  if (rp.parts.count(0)) {
    const BiKernel k = kernel(compose(to_divisor(s, rp, 0), out.inclusion));
    out = {k.module, compose(out.inclusion, k.inclusion)};
  }
  return out;
}

namespace {

// p^* G -> S at (b, w) for G = S(0, 0): w0^(b - w) then w1^w.
SheafMap natural_map(const BiTailModule& s, int b, int w) {
  SheafMap g = identity_map(s.part(0, 0));
  for (int k = 0; k < b - w; ++k) g = compose(s.mul_w0(k, 0), g);
  for (int k = 0; k < w; ++k) g = compose(s.mul_w1(b - w + k, k), g);
  return g;
}

}  // namespace

AdmissibleVerdict is_admissible(BiModulePtr s) {
  AdmissibleVerdict v;
  Modification e;
  try {
    e = elementary_modification(s);
  } catch (const std::invalid_argument& ex) {
    v.reason = ex.what();
    return v;
  }
  const BiTailModule t = twist_D(*e.module, 0, 1);
  if (t.b_lo() > 0 || t.b_hi() < 1) throw WindowTooNarrow("is_admissible: window misses row 0");
  for (int b = t.b_lo(); b <= t.b_hi(); ++b)
    for (int w : t.weights(b)) {
      const bool inside = b >= 0 && w >= 0 && w <= b;
      if (!inside) {
        if (!is_zero_module(*t.part(b, w))) {
          v.reason = "piece outside the pullback pattern at row " + std::to_string(b);
          return v;
        }
        continue;
      }
      if (!is_degreewise_bijective(natural_map(t, b, w))) {
        v.reason = "canonical map not bijective at row " + std::to_string(b) + ", weight " + std::to_string(w);
        return v;
      }
    }
  for (int b = std::max(t.b_lo(), 0); b <= t.b_hi(); ++b)
    for (int w = 0; w <= b; ++w)
      if (!t.has_part(b, w) && !is_zero_module(*t.part(0, 0))) {
        v.reason = "missing piece at row " + std::to_string(b);
        return v;
      }
  v.admissible = true;
  v.f = t.part(0, 0);
  return v;
}

bool is_trivial_admissible(const BiTailModule& s) {
  if (s.b_lo() > 0 || s.b_hi() < 1) throw WindowTooNarrow("is_trivial_admissible: window misses row 0");
  for (int b = s.b_lo(); b < 0; ++b)
    for (int w : s.weights(b))
      if (!is_zero_module(*s.part(b, w))) return false;
  const Row g = flatten(s, 0);
  for (int b = 0; b <= s.b_hi(); ++b) {
    // G (x) W_b with monomial k = w0^(b - k) w1^k.
    std::vector<ModulePtr> copies;
    for (int k = 0; k <= b; ++k) copies.push_back(g.sum.module);
    const DirectSum src = direct_sum(copies);
    const Row tgt = flatten(s, b);
    std::vector<std::vector<std::optional<SheafMap>>> blocks(
        tgt.sum.inclusions.size(), std::vector<std::optional<SheafMap>>(copies.size()));
    for (int k = 0; k <= b; ++k) {
      SheafMap m = identity_map(g.sum.module);
      Row cur = g;
      for (int row = 0; row < b; ++row) {
        const Row next = flatten(s, row + 1);
        const bool w1 = row >= b - k;
        m = compose(row_map(s, row, cur, next, Rat(w1 ? 0 : 1), Rat(w1 ? 1 : 0)), m);
        cur = next;
      }
      for (std::size_t i = 0; i < tgt.sum.projections.size(); ++i)
        blocks[i][static_cast<std::size_t>(k)] = compose(cur.sum.projections[i], m);
    }
    if (!is_degreewise_bijective(block_map(src, tgt.sum, blocks))) return false;
  }
  return true;
}

bool flatness_check(const BiTailModule& s, Rng& rng) {
  for (int b = s.b_lo(); b < s.b_hi(); ++b) {
    const Row src = flatten(s, b);
    const Row tgt = flatten(s, b + 1);
    std::vector<std::pair<Rat, Rat>> combos = {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
    for (int k = 0; k < 3; ++k) {
      Rat x(rng.uniform(1, 9)), y(rng.uniform(1, 9));
      if (rng.uniform(0, 1) == 1) y = -y;
      combos.emplace_back(x, y);
    }
    for (const auto& [x, y] : combos)
      if (!is_injective(row_map(s, b, src, tgt, x, y))) return false;
  }
  const Hilbert h = total_hilbert(restrict_Dminus(s));
  if (!(total_hilbert(restrict_Dplus(s)) == h)) return false;
  std::vector<std::int64_t> cs;
  while (cs.size() < 3) {
    const std::int64_t c = rng.uniform(-9, 9);
    if (c != 0 && std::find(cs.begin(), cs.end(), c) == cs.end()) cs.push_back(c);
  }
  for (auto c : cs)
    if (!(hilbert(*restrict_fiber(s, Rat(c)).quotient.module) == h)) return false;
  return true;
}

// ---- the sheaves K_i and F~_i ----------------------------------------------

TildeComponent build_tilde(const PhiChain& pc, int i, TildeOptions opt) {
  if (i < 0 || i > pc.length()) throw std::out_of_range("build_tilde: component index");
  const auto k = static_cast<std::size_t>(i);
  TildeComponent c;
  c.index = i;
  c.f = pc.modules[k];
  const int a_lo = c.f->d_lo(), a_hi = c.f->d_hi();
  auto ambient = std::make_shared<BiTailModule>(twist_D(pullback_from_X(c.f, opt.b_lo + 1, opt.b_hi + 1, 0), 1, 0));
  c.ambient = ambient;

  // mu^+ : restrict to D_+, then F_i -> T_i.
  const CokernelResult& t = pc.cokernels[k];
  const Restriction rp = restrict_Dplus(*ambient);
  auto tplus = std::make_shared<BiTailModule>(pushforward_D(t.module, 1, 0, a_lo, a_hi, opt.b_lo, opt.b_hi));
  const EqSheafMap to_p = to_divisor(ambient, rp, 0);
  const SheafMap theta_p = compose(t.projection, inverse(rp.parts.at(0).projection));
  const BiKernel kk = kernel(compose(push_map(to_p.target, tplus, theta_p), to_p));
  c.k = kk.module;
  validate_map(kk.inclusion);

  // mu^- : restrict K_i to D_-, then F_i -> R_{i-1}.
  c.tilde = c.k;
  c.inclusion = kk.inclusion;
  if (!opt.skip_minus) {
    const Restriction rm = restrict_Dminus(*c.k);
    const ModulePtr r_prev = i == 0 ? pc.modules[0] : pc.images[k - 1].module;
    const SheafMap beta = i == 0 ? identity_map(pc.modules[0]) : pc.betas[k - 1];
    // Restriction of K_i at D_- in weight -1 is its top-row piece, a subsheaf of F_i.
    const SheafMap into_f = kk.inclusion.at(rm.row, -1);
    const SheafMap theta_m = compose(compose(beta, into_f), inverse(rm.parts.at(-1).projection));
    auto rminus = std::make_shared<BiTailModule>(pushforward_D(r_prev, -1, -1, a_lo, a_hi, opt.b_lo, opt.b_hi));
    const EqSheafMap to_m = to_divisor(c.k, rm, -1);
    const BiKernel ft = kernel(compose(push_map(to_m.target, rminus, theta_m), to_m));
    c.tilde = ft.module;
    c.inclusion = compose(kk.inclusion, ft.inclusion);
  }

  // phi~_i = p^* phi_i (x) s^-.
  auto vo = std::make_shared<BiTailModule>(pullback_from_X(pc.vo, opt.b_lo, opt.b_hi, 0));
  c.vo = vo;
  EqSheafMap phi_amb{vo, ambient, {}};
  for (int b = vo->b_lo(); b <= vo->b_hi(); ++b)
    for (int w : vo->weights(b)) phi_amb.parts[{b, w}] = pc.maps[k];
  validate_map(phi_amb);
  try {
    c.phi = lift_through(c.inclusion, phi_amb);
  } catch (const std::exception& e) {
    throw InternalError(std::string("build_tilde: image of phi~ not contained in F~: ") + e.what());
  }
  return c;
}

std::vector<TildeComponent> build_all_tilde(const PhiChain& pc, TildeOptions opt) {
  std::vector<TildeComponent> out;
  for (int i = 0; i <= pc.length(); ++i) out.push_back(build_tilde(pc, i, opt));
  return out;
}

// ---- flatness and restrictions of F~_i -------------------------------------

Report verify_lemma_tFi(const PhiChain& pc, int i, Rng& rng, TildeOptions opt) {
  return verify_lemma_tFi(pc, build_tilde(pc, i, opt), rng);
}

Report verify_lemma_tFi(const PhiChain& pc, const TildeComponent& c, Rng& rng) {
  Report r;
  const auto k = static_cast<std::size_t>(c.index);
  const BiTailModule& s = *c.tilde;
  const int top = s.b_hi();
  r.add("(a) flat", flatness_check(s, rng));

  const Restriction rp = restrict_Dplus(s);
  r.add("(b) D+ weights", support_ok(rp));
  r.add("(b) D+ weight 0", iso_or_zero(rp.module(0), pc.images[k].module, rng));
  r.add("(b) D+ weight -1", iso_or_zero(rp.module(-1), pc.cokernels[k].module, rng));

  const Restriction rm = restrict_Dminus(s);
  const ModulePtr r_prev = c.index == 0 ? pc.modules[0] : pc.images[k - 1].module;
  const ModulePtr t_prev = c.index == 0 ? share(zero_module(0, 0)) : pc.cokernels[k - 1].module;
  r.add("(c) D- weights", support_ok(rm));
  r.add("(c) D- weight 0", iso_or_zero(rm.module(0), r_prev, rng));
  r.add("(c) D- weight -1", iso_or_zero(rm.module(-1), t_prev, rng));

  bool plus = rp.parts.count(0) > 0;
  if (plus) {
    const SheafMap p = compose(rp.parts.at(0).projection, c.phi.at(top, top));
    plus = is_surjective(p) && same_subsheaf(kernel(p).inclusion, pc.kernels[k].inclusion);
  }
  if (rp.parts.count(-1)) plus = plus && is_zero(compose(rp.parts.at(-1).projection, c.phi.at(top, top - 1)));
  r.add("(d) phi at D+", plus);

  bool minus = rm.parts.count(0) > 0;
  if (minus) {
    const SheafMap p = compose(rm.parts.at(0).projection, c.phi.at(top, 0));
    const SheafMap& ker_prev = pc.kernels[c.index == 0 ? 0 : k - 1].inclusion;
    minus = same_subsheaf(kernel(p).inclusion, ker_prev) && (c.index == 0 || is_surjective(p));
  }
  if (rm.parts.count(-1)) minus = minus && is_zero(compose(rm.parts.at(-1).projection, c.phi.at(top, -1)));
  r.add("(d) phi at D-", minus);
  return r;
}

// ---- gluing ----------------------------------------------------------------

Report glue_check(const std::vector<TildeComponent>& comps, Rng& rng) {
  Report r;
  for (std::size_t i = 0; i + 1 < comps.size(); ++i) {
    const std::string tag = "D[" + std::to_string(i) + "]";
    const BiTailModule& a = *comps[i].tilde;
    const BiTailModule& b = *comps[i + 1].tilde;
    const Restriction rp = restrict_Dplus(a);
    const Restriction rm = restrict_Dminus(b);
    const bool weights = support_ok(rp) && support_ok(rm) && rp.support() == rm.support();
    r.add(tag + " weights", weights);
    r.add(tag + " weight -1", iso_or_zero(rp.module(-1), rm.module(-1), rng));
    bool match = rp.parts.count(0) && rm.parts.count(0);
    if (match) {
      const SheafMap p1 = compose(rp.parts.at(0).projection, comps[i].phi.at(a.b_hi(), a.b_hi()));
      const SheafMap p2 = compose(rm.parts.at(0).projection, comps[i + 1].phi.at(b.b_hi(), 0));
      match = common_witness(p1, p2).has_value();
    }
    r.add(tag + " phi match", match);
  }
  return r;
}

Report glue_check(const PhiChain& pc, Rng& rng) { return glue_check(build_all_tilde(pc), rng); }

// ---- the maps gamma and beta ---------------------------------------------

Report lemma_cons_check(const TildeComponent& c) {
  Report r;
  const BiTailModule& s = *c.tilde;
  const int top = s.b_hi();
  const Fiber fib = restrict_fiber(s, Rat(1), top);

  // gamma : W_+^0 -> S|X_1, through the unique weight-0 lift one row down.
  const Restriction rp = restrict_Dplus(s, top - 1);
  const SheafMap& proj_p = rp.parts.at(0).projection;
  bool gamma_ok = is_degreewise_bijective(proj_p);
  if (gamma_ok) {
    const SheafMap gamma = compose(compose(fib.projection(top - 1), s.mul_w0(top - 1, top - 1)), inverse(proj_p));
    const SheafMap phi_plus = compose(proj_p, c.phi.at(top - 1, top - 1));
    const SheafMap phi_1 = compose(fib.projection(top - 1), c.phi.at(top, top - 1));
    gamma_ok = equal(compose(gamma, phi_plus), phi_1);
  }
  r.add("gamma phi+ = phi1", gamma_ok);

  // beta : S|X_1 -> W_-^0, through the unique weight-0 lift in S^e.
  const Modification e = elementary_modification(c.tilde);
  const Restriction rm = restrict_Dminus(s, top);
  const SheafMap incl = e.inclusion.at(top, 0);
  const SheafMap to_fiber = compose(fib.projection(0), incl);
  bool beta_ok = rm.parts.count(0) > 0 && is_degreewise_bijective(to_fiber);
  if (beta_ok) {
    const SheafMap& proj_m = rm.parts.at(0).projection;
    const SheafMap beta = compose(compose(proj_m, incl), inverse(to_fiber));
    const SheafMap phi_1 = compose(fib.projection(top - 1), c.phi.at(top, top - 1));
    const SheafMap phi_minus = compose(proj_m, c.phi.at(top, 0));
    beta_ok = equal(compose(beta, phi_1), phi_minus);
  }
  r.add("beta phi1 = phi-", beta_ok);
  return r;
}

// ---- endomorphisms ---------------------------------------------------------

namespace {

struct Unknown {
  int b = 0;
  int w = 0;
  SheafMap map;
};

// An endomorphism of the two top rows, piece by piece.
using Family = std::map<std::pair<int, int>, SheafMap>;

SheafMap piece(const Family& f, const BiTailModule& s, int b, int w) {
  const auto it = f.find({b, w});
  return it == f.end() ? zero_map(s.part(b, w), s.part(b, w)) : it->second;
}

// Columns: one per unknown; rows: entries of the constraint maps.
class System {
 public:
  explicit System(std::size_t unknowns) : cols_(unknowns) {}

  // values[u] is the value of one constraint on unknown u.
  void add(const std::vector<SheafMap>& values) {
    int lo = INT_MIN, hi = INT_MAX;
    for (const auto& v : values) {
      lo = std::max(lo, v.d_lo);
      hi = std::min(hi, v.d_hi());
    }
    if (hi < lo) throw WindowTooNarrow("endomorphisms: constraint windows do not overlap");
    Index n = 0;
    for (int d = lo; d <= hi; ++d) n += values[0].at(d).size();
    QMat block(n, static_cast<Index>(cols_));
    for (std::size_t u = 0; u < values.size(); ++u) {
      Index row = 0;
      for (int d = lo; d <= hi; ++d) {
        const QMat& x = values[u].at(d);
        for (Index j = 0; j < x.cols(); ++j)
          for (Index i = 0; i < x.rows(); ++i) block(row++, static_cast<Index>(u)) = x(i, j);
      }
    }
    m_ = vstack(m_.cols() == 0 && m_.rows() == 0 ? QMat(0, static_cast<Index>(cols_)) : m_, block);
  }

  QMat solutions() const {
    if (m_.rows() == 0) return identity(static_cast<Index>(cols_));
    return kernel_basis(m_);
  }

 private:
  std::size_t cols_;
  QMat m_;
};

// Endomorphisms of the rows top-1 and top commuting with w0 and w1.
std::vector<Family> two_row_endomorphisms(const BiTailModule& s) {
  const int top = s.b_hi();
  std::vector<Unknown> unk;
  for (int b = top - 1; b <= top; ++b)
    for (int w : s.weights(b)) {
      const ModulePtr p = s.part(b, w);
      if (is_zero_module(*p)) continue;
      for (auto& h : hom_space(p, p)) unk.push_back({b, w, std::move(h)});
    }
  System sys(unk.size());
  const auto value = [&](const Unknown& u, int b, int w) {
    return u.b == b && u.w == w ? u.map : zero_map(s.part(b, w), s.part(b, w));
  };
  for (int w : s.weights(top - 1)) {
    std::vector<SheafMap> v0, v1;
    for (const auto& u : unk) {
      v0.push_back(add(compose(value(u, top, w), s.mul_w0(top - 1, w)),
                       scale(compose(s.mul_w0(top - 1, w), value(u, top - 1, w)), Rat(-1))));
      v1.push_back(add(compose(value(u, top, w + 1), s.mul_w1(top - 1, w)),
                       scale(compose(s.mul_w1(top - 1, w), value(u, top - 1, w)), Rat(-1))));
    }
    if (!unk.empty()) {
      sys.add(v0);
      sys.add(v1);
    }
  }
  std::vector<Family> out;
  const QMat sol = sys.solutions();
  for (Index k = 0; k < sol.cols(); ++k) {
    Family f;
    for (std::size_t u = 0; u < unk.size(); ++u) {
      const Rat& x = sol(static_cast<Index>(u), k);
      if (x.is_zero()) continue;
      const auto key = std::make_pair(unk[u].b, unk[u].w);
      const SheafMap term = scale(unk[u].map, x);
      const auto it = f.find(key);
      if (it == f.end())
        f.emplace(key, term);
      else
        it->second = add(it->second, term);
    }
    out.push_back(std::move(f));
  }
  return out;
}

SheafMap restricted(const Family& e, const BiTailModule& s, const Restriction& r, int w) {
  const CokernelResult& c = r.parts.at(w);
  return induced_from_cokernel(c, compose(c.projection, piece(e, s, r.row, r.source_weight(w))));
}

}  // namespace

Index glued_endomorphism_dim(const PhiChain& pc, const std::vector<TildeComponent>& comps) {
  // Unknowns: the two-row endomorphisms of each component, then lambda.
  std::vector<std::vector<Family>> fams;
  std::vector<std::size_t> offset;
  std::size_t total = 0;
  for (const auto& c : comps) {
    offset.push_back(total);
    fams.push_back(two_row_endomorphisms(*c.tilde));
    total += fams.back().size();
  }
  const std::size_t lambda = total++;
  System sys(total);

  // e_i phi~_i = lambda phi~_i.
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const BiTailModule& s = *comps[i].tilde;
    const BiTailModule& v = *comps[i].vo;
    for (int b = s.b_hi() - 1; b <= s.b_hi(); ++b)
      for (int w : v.weights(b)) {
        const SheafMap phi = comps[i].phi.at(b, w);
        const SheafMap zero = zero_map(phi.source, phi.target);
        std::vector<SheafMap> vals(total, zero);
        for (std::size_t k = 0; k < fams[i].size(); ++k) vals[offset[i] + k] = compose(piece(fams[i][k], s, b, w), phi);
        vals[lambda] = scale(phi, Rat(-1));
        sys.add(vals);
      }
  }

  // theta res_+(e_i) = res_-(e_{i+1}) theta along D_i.
  for (std::size_t i = 0; i + 1 < comps.size(); ++i) {
    const BiTailModule& a = *comps[i].tilde;
    const BiTailModule& b = *comps[i + 1].tilde;
    const Restriction rp = restrict_Dplus(a);
    const Restriction rm = restrict_Dminus(b);
    std::map<int, SheafMap> theta;
    if (rp.parts.count(0) && rm.parts.count(0)) {
      const SheafMap p1 = compose(rp.parts.at(0).projection, comps[i].phi.at(a.b_hi(), a.b_hi()));
      const SheafMap p2 = compose(rm.parts.at(0).projection, comps[i + 1].phi.at(b.b_hi(), 0));
      const auto w = common_witness(p1, p2);
      if (!w) throw InternalError("glued_endomorphism_dim: components do not glue in weight 0");
      theta.emplace(0, *w);
    }
    if (rp.parts.count(-1) && rm.parts.count(-1)) {
      // T_i from both sides: F_i / R_i at D_+ and alpha_i(T_i) at D_-.
      const CokernelResult& t = pc.cokernels[i];
      const SheafMap sp = induced_from_cokernel(rp.parts.at(-1),
                                                compose(t.projection, comps[i].inclusion.at(a.b_hi(), a.b_hi() - 1)));
      const SheafMap sm = compose(rm.parts.at(-1).projection,
                                  lift_through(comps[i + 1].inclusion.at(b.b_hi(), -1), pc.alphas[i]));
      if (!is_degreewise_bijective(sp) || !is_degreewise_bijective(sm))
        throw InternalError("glued_endomorphism_dim: torsion identifications are not bijective");
      theta.emplace(-1, compose(sm, sp));
    }
    for (const auto& [w, th] : theta) {
      if (is_zero_module(*th.source)) continue;
      std::vector<SheafMap> vals(total, zero_map(th.source, th.target));
      for (std::size_t k = 0; k < fams[i].size(); ++k)
        vals[offset[i] + k] = compose(th, restricted(fams[i][k], a, rp, w));
      for (std::size_t k = 0; k < fams[i + 1].size(); ++k)
        vals[offset[i + 1] + k] = scale(compose(restricted(fams[i + 1][k], b, rm, w), th), Rat(-1));
      sys.add(vals);
    }
  }
  return sys.solutions().cols();
}

// ---- the criterion ---------------------------------------------------------

Report criterion_check(const PhiChain& pc, Rng& rng, TildeOptions opt) {
  Report r;
  const auto comps = build_all_tilde(pc, opt);
  const int m = pc.length();
  for (int i = 0; i <= m; ++i) {
    const auto& c = comps[static_cast<std::size_t>(i)];
    const std::string tag = "[" + std::to_string(i) + "]";
    const AdmissibleVerdict v = is_admissible(c.tilde);
    r.add("(1) admissible" + tag, v.admissible, v.reason);
    r.add("(1) not trivial" + tag, !is_trivial_admissible(*c.tilde));

    const BiTailModule& s = *c.tilde;
    const Restriction rp = restrict_Dplus(s);
    bool image = rp.parts.count(0) > 0 && is_surjective(compose(rp.parts.at(0).projection, c.phi.at(s.b_hi(), s.b_hi())));
    r.add("(2) image is weight 0 at D" + tag, image);
    if (i == m) {
      bool onto = image;
      for (int w : rp.support()) onto = onto && w == 0;
      r.add("(2) surjective at D_m", onto);
    }
    r.merge(lemma_cons_check(c), "lemma" + tag + " ");
  }
  r.merge(glue_check(comps, rng), "glue ");
  const Index e = glued_endomorphism_dim(pc, comps);
  r.add("endomorphisms are scalars", e == 1, "dimension " + std::to_string(e));
  return r;
}

}  // namespace p1pairs
