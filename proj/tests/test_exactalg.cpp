#include "doctest.h"

#include "p1pairs/linalg.hpp"

using namespace p1pairs;

namespace {

QMat mat(std::initializer_list<std::initializer_list<long>> rows) {
  const Index r = static_cast<Index>(rows.size());
  const Index c = r ? static_cast<Index>(rows.begin()->size()) : 0;
  QMat m(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (long v : row) m(i, j++) = Rat(v);
    ++i;
  }
  return m;
}

// Rank by brute force: the largest r with a nonzero r x r minor.
Index brute_rank(const QMat& m) {
  for (Index r = std::min(m.rows(), m.cols()); r > 0; --r)
    for (const auto& rs : subsets(m.rows(), r))
      for (const auto& cs : subsets(m.cols(), r)) {
        QMat sub(r, r);
        for (Index a = 0; a < r; ++a)
          for (Index b = 0; b < r; ++b) sub(a, b) = m(rs[a], cs[b]);
        if (!determinant<Rat>(sub).is_zero()) return r;
      }
  return 0;
}

}  // namespace

TEST_CASE("rationals stay in lowest terms") {
  Rat a(6, 4);
  CHECK(a.num() == 3);
  CHECK(a.den() == 2);
  CHECK(Rat(3, -6) == Rat(-1, 2));
  CHECK((Rat(2, 3) * Rat(3, 2)) == Rat(1));
  CHECK(Rat::parse("-2/3") == Rat(-2, 3));
  CHECK(Rat::parse("7").str() == "7");
  CHECK(Rat(-5, 10).str() == "-1/2");
  CHECK_THROWS(Rat::parse("1/0"));
  CHECK_THROWS(Rat::parse("x"));
  CHECK_THROWS(Rat(1) / Rat(0));
}

TEST_CASE("rref examples") {
  auto r = rref(identity(2));
  CHECK(r.rank == 2);
  CHECK(r.reduced == identity(2));
  CHECK(r.pivot_cols == std::vector<Index>{0, 1});

  r = rref(zeros(2, 2));
  CHECK(r.rank == 0);
  CHECK(r.pivot_cols.empty());

  r = rref(mat({{1, 2}, {2, 4}}));
  CHECK(r.rank == 1);
  CHECK(r.reduced == mat({{1, 2}, {0, 0}}));
  CHECK(r.pivot_cols == std::vector<Index>{0});

  r = rref(mat({{0, 2, 4}, {3, 0, 3}}));
  CHECK(r.reduced == mat({{1, 0, 1}, {0, 1, 2}}));
}

TEST_CASE("kernel examples") {
  CHECK(kernel_basis(identity(3)).cols() == 0);
  const QMat k = kernel_basis(mat({{1, 1}}));
  REQUIRE(k.cols() == 1);
  CHECK(k(0, 0) == -k(1, 0));
  CHECK(kernel_basis(zeros(2, 2)).cols() == 2);
  CHECK(rank(kernel_basis(zeros(2, 2))) == 2);
}

TEST_CASE("image and cokernel examples") {
  CHECK(cokernel_projection(identity(3)).rows() == 0);
  CHECK(cokernel_projection(mat({{1, 1}})).rows() == 0);
  CHECK(image_basis(mat({{1, 1}})).cols() == 1);
  const QMat p = cokernel_projection(mat({{1}, {0}}));
  CHECK(p == mat({{0, 1}}));
  const auto cs = cokernel_split(mat({{1}, {1}}));
  CHECK(cs.projection * cs.section == identity(1));
}

TEST_CASE("exterior powers") {
  CHECK(exterior_power<Rat>(identity(3), 2) == identity(3));
  const QMat e = exterior_power<Rat>(mat({{1, 2}, {2, 4}}), 2);
  CHECK(e.rows() == 1);
  CHECK(e(0, 0).is_zero());
  CHECK(exterior_power<Rat>(mat({{1, 0}, {0, 0}}), 1) == mat({{1, 0}, {0, 0}}));
  CHECK_THROWS_AS(exterior_power<Rat>(identity(2), 3), std::out_of_range);
}

TEST_CASE("random matrices are deterministic") {
  Rng a(42), b(42);
  CHECK(random_matrix(a, 3, 3, 9) == random_matrix(b, 3, 3, 9));
  Rng c(7);
  const QMat m = random_matrix(c, 5, 5, 1);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j) CHECK(abs(m(i, j)) <= Rat(1));
  Rng d(42), e(42);
  e.next();
  CHECK(random_matrix(d, 3, 3, 9) != random_matrix(e, 3, 3, 9));
  CHECK(Rng(1).child(3).next() == Rng(1).child(3).next());
  CHECK(child_seed(1, 3) != child_seed(1, 4));
}

TEST_CASE("rank-nullity and cokernel identities on random matrices") {
  Rng rng(11);
  for (int t = 0; t < 40; ++t) {
    const Index r = 1 + static_cast<Index>(rng.uniform(0, 4));
    const Index c = 1 + static_cast<Index>(rng.uniform(0, 4));
    const Index k = static_cast<Index>(rng.uniform(0, 3));
    // Product of random factors: rank at most k.
    const QMat m = random_matrix(rng, r, k, 3) * random_matrix(rng, k, c, 3);
    const QMat ker = kernel_basis(m);
    CHECK(rank(m) + ker.cols() == c);
    CHECK(is_zero(m * ker));
    const QMat p = cokernel_projection(m);
    CHECK(is_zero(p * m));
    CHECK(rank(p) + rank(m) == r);
    CHECK(rank(m) == brute_rank(m));
  }
}

TEST_CASE("exterior power vanishes exactly below the rank") {
  Rng rng(5);
  for (int t = 0; t < 30; ++t) {
    const Index k = static_cast<Index>(rng.uniform(0, 4));
    const QMat m = random_matrix(rng, 4, k, 2) * random_matrix(rng, k, 4, 2);
    const Index rk = rank(m);
    for (Index r = 1; r <= 4; ++r) CHECK(is_zero(exterior_power<Rat>(m, r)) == (rk < r));
  }
}

TEST_CASE("solve and span intersection") {
  const QMat a = mat({{1, 0}, {0, 1}, {1, 1}});
  auto x = solve(a, mat({{2}, {3}, {5}}));
  REQUIRE(x.has_value());
  CHECK(*x == mat({{2}, {3}}));
  CHECK_FALSE(solve(a, mat({{2}, {3}, {6}})).has_value());
  const QMat i = intersect_spans(mat({{1, 0}, {0, 1}, {0, 0}}), mat({{0, 0}, {1, 0}, {0, 1}}));
  CHECK(i.cols() == 1);
  Rat lambda;
  CHECK(proportional(mat({{1, 2}}), mat({{3, 6}}), &lambda));
  CHECK(lambda == Rat(3));
  CHECK_FALSE(proportional(mat({{1, 2}}), mat({{3, 5}})));
  CHECK(subsets(4, 2).size() == 6);
}
