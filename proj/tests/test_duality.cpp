#include "doctest.h"

#include "p1pairs/duality.hpp"

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

}  // namespace

TEST_CASE("dual of a pair") {
  Rng rng(2);
  // Dual Euler sequence: O(-1) -> O^2 -> O(1).
  const DualizedPair e = dualize_pair(pair(1, {BinForm::z0(), BinForm::z1()}));
  CHECK(is_locally_free(e.g0));
  CHECK(splitting_type(e.g0) == std::vector<int>{1});

  const DualizedPair b = dualize_pair(pair(2, {form({1, 0, 0}), form({0, 1, 0})}));
  CHECK(rank_degree(*b.g0) == RankDegree{1, 2});
  const TorsionResult t = torsion_filtration(b.g0);
  CHECK(t.length == 1);
  CHECK(splitting_type(t.free_part) == std::vector<int>{1});

  for (int n = 1; n <= 3; ++n) {
    std::vector<Rat> c(static_cast<std::size_t>(n) + 1);
    c[0] = Rat(1);
    const DualizedPair z = dualize_pair(pair(n, {BinForm(n, c), BinForm::zero_of_degree(n)}));
    CHECK(torsion_length(z.g0) == n);
    CHECK(rank_degree(*z.g0) == RankDegree{1, n});
  }
}

TEST_CASE("framed bundles dualize maps") {
  auto a = share(free_module({-1, -2}, 0, 8));
  auto b = share(free_module({0}, 0, 8));
  const SheafMap f = form_map(a, b, {{BinForm::z0(), form({1, 0, 1})}});
  const FramedBundle fa = frame_bundle(a), fb = frame_bundle(b);
  const SheafMap fd = dual_map(f, fa, fb);
  CHECK(splitting_type(fd.source) == std::vector<int>{0});
  CHECK(splitting_type(fd.target) == std::vector<int>{1, 2});
  // The transpose of a map of rank one has rank one at the generic point.
  CHECK(is_injective(fd));
}

TEST_CASE("(z0^2, z0 z1) dualizes with lengths 1, 0") {
  Rng rng(8);
  const PsiChain c = extend_chain(make_chain(pair(2, {form({1, 0, 0}), form({0, 1, 0})})), rng);
  const QuotChain q = dual_chain(c, rng);
  REQUIRE(q.length() == 1);
  CHECK(q.levels[0].split.length == 1);
  CHECK(q.levels[1].split.length == 0);
  CHECK(splitting_type(q.levels[0].split.free_part) == std::vector<int>{1});
  CHECK(splitting_type(c.kernels[0].module) == std::vector<int>{-1});
  // K_1 has colength 1 in K_0 = O(-1).
  CHECK(splitting_type(c.kernels[1].module) == std::vector<int>{-2});
  CHECK(splitting_type(q.levels[1].g) == std::vector<int>{2});
  const Report v = validate_quot_chain(q);
  for (const auto& cl : v.clauses) {
    INFO(cl.name);
    CHECK(cl.pass);
  }
  CHECK(verify_duality(c, q, rng).ok());
  CHECK_FALSE(validate_quot_chain(with_split_extension(q, 0)).passed("torsion drops[1]"));
}

TEST_CASE("random chains dualize") {
  Rng rng(17);
  for (int k = 0; k < 6; ++k) {
    const int n = 2 + k % 2;
    const PsiChain c = random_chain(rng, 2 + k % 2, n, 1 + k % n, k % 2 == 0);
    const QuotChain q = dual_chain(c, rng);
    CHECK(q.length() == c.length());
    CHECK(validate_quot_chain(q).ok());
    CHECK(verify_duality(c, q, rng).ok());
    if (q.length() >= 1) CHECK_FALSE(validate_quot_chain(with_split_extension(q, 0)).ok());
  }

  const PsiChain single = make_chain(pair(1, {BinForm::z0(), BinForm::z1()}));
  const QuotChain q = dual_chain(single, rng);
  CHECK(q.length() == 0);
  CHECK(validate_quot_chain(q).ok());

  CHECK_FALSE(verify_duality(extend_chain(make_chain(pair(2, {form({1, 0, 0}), form({0, 1, 0})})), rng), q, rng).ok());
}
