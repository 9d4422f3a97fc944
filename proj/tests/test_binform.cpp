#include "doctest.h"

#include "p1pairs/binform.hpp"

using namespace p1pairs;

namespace {

BinForm form(std::initializer_list<long> c) {
  std::vector<Rat> v;
  for (long x : c) v.emplace_back(x);
  return BinForm(static_cast<int>(v.size()) - 1, v);
}

}  // namespace

TEST_CASE("products and sums") {
  const BinForm p = BinForm::z0() * BinForm::z1();
  CHECK(p.degree() == 2);
  CHECK(p == form({0, 1, 0}));
  CHECK((BinForm::z0() * BinForm::zero()).is_zero());
  const BinForm s = BinForm::z0() + BinForm::z1();
  CHECK(s * s == form({1, 2, 1}));
  CHECK_THROWS(BinForm::z0() + form({1, 0, 0}));
  CHECK((s - s).is_zero());
}

TEST_CASE("gcd examples") {
  CHECK(gcd(form({1, 0, 0}), form({0, 1, 0})) == BinForm::z0());
  CHECK(gcd(form({2, 4}), BinForm::zero()) == form({1, 2}));
  CHECK(gcd(form({1, 0, 1}), form({1, 1})) == form({1}));
  CHECK_THROWS(gcd(BinForm::zero(), BinForm::zero()));
  // z1^2 (z0 + z1) and z1 (z0 + z1)^2 share z1 (z0 + z1).
  const BinForm l = form({1, 1});
  const BinForm z1 = BinForm::z1();
  CHECK(gcd(z1 * z1 * l, z1 * l * l) == monic(z1 * l));
}

TEST_CASE("gcd divides and scales with common factors") {
  Rng rng(3);
  for (int t = 0; t < 40; ++t) {
    const BinForm f = random_form(rng, static_cast<int>(rng.uniform(0, 3)), 4);
    const BinForm g = random_form(rng, static_cast<int>(rng.uniform(0, 3)), 4);
    const BinForm h = random_form(rng, static_cast<int>(rng.uniform(0, 2)), 4);
    if (f.is_zero() || g.is_zero() || h.is_zero()) continue;
    const BinForm d = gcd(f, g);
    CHECK(divide_exact(f, d).has_value());
    CHECK(divide_exact(g, d).has_value());
    CHECK(gcd(f * h, g * h).degree() == h.degree() + d.degree());
  }
}

TEST_CASE("multiplication matrices") {
  CHECK(mult_map(form({1}), 3) == identity(4));
  QMat expect = QMat::Zero(3, 2);
  expect(0, 0) = 1;
  expect(1, 1) = 1;
  CHECK(mult_map(BinForm::z0(), 1) == expect);
  Rng rng(9);
  for (int t = 0; t < 20; ++t) {
    const BinForm f = random_form(rng, 2, 5);
    const BinForm g = random_form(rng, 1, 5);
    if (f.is_zero() || g.is_zero()) continue;
    CHECK(rank(mult_map(f, 3)) == 4);
    CHECK(mult_map(f * g, 2) == mult_map(f, 3) * mult_map(g, 2));
  }
  CHECK_THROWS(mult_map(BinForm::zero(), 1));
}

TEST_CASE("evaluation") {
  CHECK(eval(BinForm::z0(), {Rat(1), Rat(0)}) == Rat(1));
  CHECK(eval(form({0, 1, 0}), {Rat(1), Rat(1)}) == Rat(1));
  CHECK(eval(form({1, 0, 1}), {Rat(1), Rat(-1)}) == Rat(2));
}

TEST_CASE("exact division") {
  const BinForm a = form({1, 1}), b = form({1, -2});
  auto q = divide_exact(a * b, b);
  REQUIRE(q.has_value());
  CHECK(*q == a);
  CHECK_FALSE(divide_exact(a, b).has_value());
}
