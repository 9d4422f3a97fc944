#include "doctest.h"

#include "p1pairs/collin.hpp"

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

QMat mat(std::initializer_list<std::initializer_list<long>> rows) {
  QMat m(static_cast<Index>(rows.size()), static_cast<Index>(rows.begin()->size()));
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (long v : row) m(i, j++) = Rat(v);
    ++i;
  }
  return m;
}

// Rank of the span of the products f_j * x^i z^(m-i) written out by hand.
Index image_span_rank(const StablePair& p, int m) {
  QMat cols(p.n + m + 1, 0);
  for (const auto& f : p.forms)
    for (int i = 0; i <= m; ++i) {
      if (f.is_zero()) continue;
      const BinForm prod = f * BinForm::monomial(m, i, Rat(1));
      cols = hstack(cols, prod.vector());
    }
  return rank(cols);
}

}  // namespace

TEST_CASE("gamma examples") {
  const QMat g = gamma(pair(1, {BinForm::z0(), BinForm::z1()}), 0);
  CHECK(g == identity(2));
  const StablePair b = pair(2, {form({1, 0, 0}), form({0, 1, 0})});
  CHECK(rank(gamma(b, 1)) == 3);
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const StablePair p = random_pair(rng, 2 + static_cast<int>(rng.uniform(0, 1)), 2, static_cast<int>(rng.uniform(0, 2)));
    Index prev = 0;
    for (int m = 0; m <= 4; ++m) {
      const Index r = rank(gamma(p, m));
      CHECK(r >= prev);
      CHECK(r == image_span_rank(p, m));
      prev = r;
    }
  }
}

TEST_CASE("rank formula and strata") {
  CHECK(m0_bound(2) == 0);
  CHECK(m0_bound(0) == -2);
  CHECK(rank_formula_check(pair(1, {BinForm::z0(), BinForm::z1()}), 2));
  CHECK(rank(gamma(pair(2, {form({1, 0, 0}), form({0, 1, 0})}), 2)) == 4);
  CHECK(rank(gamma(pair(2, {form({1, 0, 0}), form({2, 0, 0})}), 2)) == 3);
  CHECK(stratum_index(pair(2, {form({1, 0, 0}), form({0, 0, 1})}), 3) == 2);
  CHECK(stratum_index(pair(3, {form({1, 0, 0, 0}), form({-2, 0, 0, 0}), form({5, 0, 0, 0})}), 4) == 0);
  CHECK(stratum_index(pair(2, {form({1, 0, 0}), form({0, 1, 0})}), 3) == 1);
  CHECK_THROWS(rank_formula_check(pair(3, {form({1, 0, 0, 0}), form({0, 0, 0, 1})}), 1));

  Rng rng(17);
  for (int t = 0; t < 30; ++t) {
    const int n = static_cast<int>(rng.uniform(1, 4));
    const StablePair p = random_pair(rng, 2 + static_cast<int>(rng.uniform(0, 1)), n, static_cast<int>(rng.uniform(0, n)));
    const int j = stratum_index(p, n - 1);
    for (int m = n - 1; m <= n + 1; ++m) {
      CHECK(rank_formula_check(p, m));
      CHECK(stratum_index(p, m) == j);
    }
    // All (m+2+j)-minors vanish and some (m+1+j)-minor does not.
    const int m = n - 1;
    const QMat g = gamma(p, m);
    const Index r = m + 1 + j;
    if (r + 1 <= std::min(g.rows(), g.cols())) CHECK(is_zero(exterior_power<Rat>(g, r + 1)));
    CHECK_FALSE(is_zero(exterior_power<Rat>(g, r)));
  }
}

TEST_CASE("the map g") {
  const StablePair out = stratum_map_g(pair(1, {BinForm::z0(), BinForm::z1()}), BinForm::z1());
  CHECK(out.forms[0] == form({0, 1, 0}));
  CHECK(out.forms[1] == form({0, 0, 1}));
  CHECK(stratum_index(out, 3) == 1);
  const StablePair same = stratum_map_g(pair(1, {BinForm::z0(), BinForm::z1()}), BinForm::constant(Rat(1)));
  CHECK(same.forms[0] == BinForm::z0());
  CHECK_THROWS(stratum_map_g(same, BinForm::zero()));

  Rng rng(31);
  for (int t = 0; t < 20; ++t) {
    const int k = static_cast<int>(rng.uniform(0, 2));
    const StablePair pk = random_pair(rng, 2, k, static_cast<int>(rng.uniform(0, k)));
    BinForm s;
    do s = random_form(rng, static_cast<int>(rng.uniform(0, 2)), 4);
    while (s.is_zero());
    const StablePair pn = stratum_map_g(pk, s);
    CHECK(gcd(pn.forms).degree() == s.degree() + gcd(pk.forms).degree());
    const int jk = stratum_index(pk, k + 1), jn = stratum_index(pn, pn.n + 1);
    CHECK(jk == jn);
    for (int j = 0; j <= k; ++j) CHECK((jn <= j) == (jk <= j));
  }
}

TEST_CASE("collineation chains") {
  CollineationChain cc;
  cc.levels.push_back(make_level(mat({{1, 0}, {0, 0}})));
  cc.levels.push_back(make_level(mat({{3}})));
  CHECK(validate_collineation(cc).ok());
  CHECK(cc.length() == 1);

  CollineationChain one;
  one.levels.push_back(make_level(identity(3)));
  CHECK(validate_collineation(one).ok());
  one.levels.push_back(make_level(QMat(0, 0)));
  CHECK_FALSE(validate_collineation(one).ok());

  Rng rng(3);
  const PsiChain b = extend_chain(make_chain(pair(2, {form({1, 0, 0}), form({0, 1, 0})})), rng);
  const CollineationChain eb = embed_chain(b, 3);
  REQUIRE(eb.length() == 1);
  CHECK(eb.levels[1].map.cols() == 3);
  CHECK(eb.levels[1].map.rows() == 1);
  CHECK(validate_collineation(eb).ok());

  const CollineationChain es = embed_chain(make_chain(pair(1, {BinForm::z0(), BinForm::z1()})), 2);
  CHECK(es.length() == 0);
  CHECK(rank(es.levels[0].map) == es.levels[0].map.rows());

  for (int t = 0; t < 8; ++t) {
    const int n = static_cast<int>(rng.uniform(1, 3));
    const PsiChain c = random_chain(rng, 2 + static_cast<int>(rng.uniform(0, 1)), n, static_cast<int>(rng.uniform(0, n)), t % 2 == 0);
    const CollineationChain e = embed_chain(c, n + 1);
    CHECK(e.length() == c.length());
    CHECK(validate_collineation(e).ok());
  }
}

TEST_CASE("stratum tangent dimensions") {
  Rng rng(0);
  struct Case {
    int N, n, j;
  };
  for (const Case& k : {Case{2, 2, 0}, Case{2, 2, 1}, Case{3, 2, 0}}) {
    for (int t = 0; t < 2; ++t) {
      const StablePair p = random_pair(rng, k.N, k.n, k.n - k.j);
      const auto d = tangent_dim_at(p, k.n + 1, 2);
      CHECK(d.stratum == k.j);
      CHECK(d.jac_dim == expected_stratum_dim(k.N, k.n, k.j));
      CHECK(d.param_rank == expected_stratum_dim(k.N, k.n, k.j));
    }
  }
  CHECK(expected_stratum_dim(2, 2, 0) == 3);
  CHECK(expected_stratum_dim(2, 2, 1) == 4);
  CHECK(expected_stratum_dim(3, 2, 0) == 4);
  CHECK_THROWS(tangent_dim_at(pair(1, {BinForm::z0(), BinForm::z1()}), 2));
}
