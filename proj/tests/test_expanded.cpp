#include "doctest.h"

#include "p1pairs/expanded.hpp"

using namespace p1pairs;

namespace {

BinForm form(std::initializer_list<long> c) {
  std::vector<Rat> v;
  for (long x : c) v.emplace_back(x);
  return BinForm(static_cast<int>(v.size()) - 1, v);
}

StablePair pair(int n, std::vector<BinForm> forms) {
  return {static_cast<int>(forms.size()), n, std::move(forms)};
}

StablePair z0_factor() { return pair(2, {form({1, 0, 0}), form({0, 1, 0})}); }

ModulePtr line(int k) { return share(free_module({k}, 0, 8)); }

ModulePtr fat_point() {
  Presentation p{{0}, {-2}, {{form({1, 0, 0})}}};
  return share(from_presentation(p, 0, 8));
}

PhiChain z0_factor_chain() {
  Rng rng(8);
  return psi_to_phi(extend_chain(make_chain(z0_factor()), rng));
}

// (z0^2, 0) completed through a non-surjective first step: lengths 2 > 1 > 0.
PhiChain length_two_chain() {
  Rng rng(8);
  PsiChain c = make_chain(pair(2, {form({1, 0, 0}), BinForm::zero_of_degree(2)}));
  for (const auto& h : hom_space(c.kernels[0].module, c.cokernels[0].module)) {
    PsiChain t = c;
    append_step(t, h);
    if (!t.complete()) return psi_to_phi(complete_chain(t, rng));
  }
  FAIL("no non-surjective step");
  return {};
}

bool same_layout(const BiTailModule& a, const BiTailModule& b) {
  if (a.b_lo() != b.b_lo() || a.b_hi() != b.b_hi()) return false;
  for (int r = a.b_lo(); r <= a.b_hi(); ++r) {
    if (a.weights(r) != b.weights(r)) return false;
    for (int w : a.weights(r))
      for (int d = a.a_lo(); d <= a.a_hi(); ++d)
        if (a.part(r, w)->dim(d) != b.part(r, w)->dim(d)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("pullbacks and twists") {
  const BiTailModule o = pullback_from_X(line(0), 0, 3, 0);
  o.validate();
  for (int a = 0; a <= 8; ++a)
    for (int b = 0; b <= 3; ++b) CHECK(o.dim(a, b) == (a + 1) * (b + 1));
  CHECK(o.weights(3) == std::vector<int>{0, 1, 2, 3});

  const BiTailModule t = pullback_from_X(fat_point(), 0, 3, 0);
  for (int b = 0; b <= 3; ++b) CHECK(t.dim(5, b) == 2 * (b + 1));

  // Normal weights: O(D_-) on D_- has weight -1, O(D_+) on D_+ weight +1.
  const BiTailModule big = pullback_from_X(line(0), -1, 5, 0);
  const Restriction rm = restrict_Dminus(twist_D(big, 1, 0));
  CHECK(rm.support() == std::vector<int>{-1});
  CHECK(rank_degree(*rm.module(-1)) == RankDegree{1, 0});
  const Restriction rp = restrict_Dplus(twist_D(big, 0, 1));
  CHECK(rp.support() == std::vector<int>{1});

  CHECK(same_layout(twist_D(o, 0, 0), o));
  CHECK(same_layout(twist_D(twist_D(big, 1, 0), 0, 1), twist_D(big, 1, 1)));
  twist_D(big, 1, 1).validate();
}

TEST_CASE("restrictions of pullbacks") {
  Rng rng(3);
  const ModulePtr f = line(2);
  const BiTailModule s = pullback_from_X(f, 0, 3, 0);
  const Restriction rm = restrict_Dminus(s);
  CHECK(rm.support() == std::vector<int>{0});
  CHECK(iso_test(rm.module(0), f, rng).is_iso());
  const Restriction rp = restrict_Dplus(s);
  CHECK(rp.support() == std::vector<int>{0});
  for (long c : {1, -3, 7}) {
    const Fiber x = restrict_fiber(s, Rat(c));
    CHECK(iso_test(x.quotient.module, f, rng).is_iso());
  }
  CHECK(flatness_check(s, rng));
  CHECK_FALSE(flatness_check(pushforward_D(fat_point(), 1, 0, 0, 8, 0, 3), rng));
}

TEST_CASE("elementary modification and admissibility") {
  const ModulePtr f = line(1);
  auto s = std::make_shared<BiTailModule>(pullback_from_X(f, -1, 4, 0));
  const Modification e = elementary_modification(s);
  validate_map(e.inclusion);
  // p^* F (x) O(-D_+) has rows shifted up by one with the same weights.
  const BiTailModule expect = twist_D(pullback_from_X(f, 0, 5, 0), 0, -1);
  for (int b = 0; b <= 4; ++b)
    for (int w = -1; w <= b + 1; ++w)
      for (int d = 0; d <= 8; ++d) CHECK(e.module->part(b, w)->dim(d) == expect.part(b, w)->dim(d));

  const AdmissibleVerdict v = is_admissible(s);
  CHECK(v.admissible);
  CHECK(rank_degree(*v.f) == RankDegree{1, 1});
  CHECK(is_trivial_admissible(*s));

  auto heavy = std::make_shared<BiTailModule>(pullback_from_X(f, -1, 4, 2));
  CHECK_THROWS_AS(elementary_modification(heavy), std::invalid_argument);
  CHECK_FALSE(is_admissible(heavy).admissible);
}

TEST_CASE("the sheaves F~_i over (z0^2, z0 z1)") {
  Rng rng(11);
  const PhiChain pc = z0_factor_chain();
  REQUIRE(pc.length() == 1);

  const TildeComponent c0 = build_tilde(pc, 0);
  c0.tilde->validate();
  validate_map(c0.phi);
  const Restriction rp = restrict_Dplus(*c0.tilde);
  CHECK(rp.support() == std::vector<int>{-1, 0});
  CHECK(rank_degree(*rp.module(0)) == RankDegree{1, 1});
  CHECK(hilbert(*rp.module(-1)) == Hilbert{0, 1});
  const Restriction rm = restrict_Dminus(*c0.tilde);
  CHECK(rm.support() == std::vector<int>{0});
  CHECK(iso_test(rm.module(0), pc.modules[0], rng).is_iso());

  for (int i = 0; i <= 1; ++i) {
    const TildeComponent c = build_tilde(pc, i);
    const Hilbert h = hilbert(*pc.modules[static_cast<std::size_t>(i)]);
    CHECK(hilbert(*restrict_fiber(*c.tilde, Rat(2)).quotient.module) == h);
    CHECK(hilbert(*restrict_fiber(*c.tilde, Rat(-5)).quotient.module) == h);
    const Report r = verify_lemma_tFi(pc, i, rng);
    for (const auto& cl : r.clauses) {
      INFO(cl.name);
      CHECK(cl.pass);
    }
    CHECK(is_admissible(c.tilde).admissible);
    CHECK_FALSE(is_trivial_admissible(*c.tilde));
    CHECK(lemma_cons_check(c).ok());
  }

  TildeOptions skip;
  skip.skip_minus = true;
  const Report bad = verify_lemma_tFi(pc, 1, rng, skip);
  CHECK_FALSE(bad.passed("(c) D- weight -1"));
  CHECK(bad.passed("(b) D+ weight 0"));
}

TEST_CASE("gluing and the criterion") {
  Rng rng(21);
  const PhiChain pb = z0_factor_chain();
  CHECK(glue_check(pb, rng).ok());
  const Report rb = criterion_check(pb, rng);
  for (const auto& cl : rb.clauses) {
    INFO(cl.name << " " << cl.detail);
    CHECK(cl.pass);
  }

  const PhiChain p2 = length_two_chain();
  REQUIRE(p2.length() == 2);
  const Report r2 = criterion_check(p2, rng);
  for (const auto& cl : r2.clauses) {
    INFO(cl.name << " " << cl.detail);
    CHECK(cl.pass);
  }

  const Report cut = criterion_check(truncate(p2, 1), rng);
  CHECK_FALSE(cut.passed("(2) surjective at D_m"));

  // A component from a chain with a different image does not glue.
  const PhiChain other = psi_to_phi(complete_chain(make_chain(pair(2, {form({0, 0, 1}), form({0, 1, 0})})), rng));
  std::vector<TildeComponent> spliced = {build_tilde(pb, 0), build_tilde(other, other.length())};
  CHECK_FALSE(glue_check(spliced, rng).ok());

  const PhiChain single = psi_to_phi(make_chain(pair(1, {BinForm::z0(), BinForm::z1()})));
  CHECK(glue_check(single, rng).ok());
}

TEST_CASE("a zero step makes a component trivial") {
  Rng rng(4);
  PsiChain c = make_chain(pair(2, {form({1, 0, 0}), BinForm::zero_of_degree(2)}));
  append_step(c, zero_map(c.kernels[0].module, c.cokernels[0].module));
  c = complete_chain(c, rng);
  const PhiChain pc = psi_to_phi(c);
  const Report r = criterion_check(pc, rng);
  CHECK_FALSE(r.passed("(1) not trivial[1]"));
}
