#include "doctest.h"

#include "p1pairs/io.hpp"

using namespace p1pairs;

namespace {

const char* kZ0Factor =
    R"({"schema":"1","N":2,"n":2,"forms":[{"degree":2,"coeffs":["1","0","0"]},{"degree":2,"coeffs":["0","1","0"]}]})";

}  // namespace

TEST_CASE("pair files") {
  const StablePair p = pair_from_json(parse_json(kZ0Factor));
  CHECK(p.N == 2);
  CHECK(p.n == 2);
  CHECK(p.forms[0] == BinForm::monomial(2, 0));
  CHECK(p.forms[1] == BinForm::monomial(2, 1));
  CHECK(pair_to_json(p) == parse_json(kZ0Factor));

  const StablePair z{3, 2, {BinForm::monomial(2, 0, Rat(-3, 2)), BinForm::zero_of_degree(2), BinForm::z1() * BinForm::z1()}};
  const Json j = pair_to_json(z);
  CHECK(j["forms"][0]["coeffs"][0] == "-3/2");
  CHECK(j["forms"][1]["coeffs"] == Json::array({"0", "0", "0"}));
  const StablePair back = pair_from_json(j);
  for (int k = 0; k < 3; ++k) CHECK(back.forms[static_cast<std::size_t>(k)] == z.forms[static_cast<std::size_t>(k)]);
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_json("{\"schema\":"), InputError);
  Json j = parse_json(kZ0Factor);
  j["schema"] = "2";
  CHECK_THROWS_AS(pair_from_json(j), InputError);
  j = parse_json(kZ0Factor);
  j["forms"][0]["coeffs"][1] = "x";
  CHECK_THROWS_AS(pair_from_json(j), InputError);
  j = parse_json(kZ0Factor);
  j["forms"].erase(1);
  CHECK_THROWS_AS(pair_from_json(j), InputError);
  j = parse_json(kZ0Factor);
  j["forms"][0]["coeffs"] = Json::array({"0", "0", "0"});
  j["forms"][1]["coeffs"] = Json::array({"0", "0", "0"});
  CHECK_THROWS_AS(pair_from_json(j), InputError);
  CHECK_THROWS_AS(read_json_file("/nonexistent/pair.json"), InputError);
  CHECK_THROWS_AS(matrix_from_json(parse_json(R"({"rows":2,"cols":2,"entries":["1"]})")), InputError);
}

TEST_CASE("matrices keep their shape") {
  const QMat e(0, 3);
  const QMat back = matrix_from_json(to_json(e));
  CHECK(back.rows() == 0);
  CHECK(back.cols() == 3);
  QMat m(2, 2);
  m << Rat(1), Rat(-2, 3), Rat(0), Rat(5);
  CHECK(matrix_from_json(to_json(m)) == m);
}

TEST_CASE("chain files round trip") {
  Rng rng(2);
  const PsiChain c = random_chain(rng, 3, 3, 2, true);
  const Json j = chain_to_json(c);
  CHECK(j["window"]["hi"] == c.window.hi);
  CHECK(j["steps"].size() == static_cast<std::size_t>(c.length()));
  const PsiChain back = chain_from_json(parse_json(j.dump()));
  CHECK(back.length() == c.length());
  CHECK(chain_equivalent(back, c));
  CHECK(chain_to_json(back).dump() == j.dump());

  Json bad = j;
  bad["steps"].push_back(j["steps"][0]);
  if (c.length() > 0) CHECK_THROWS_AS(chain_from_json(bad), InputError);
  bad = j;
  bad["window"]["hi"] = 2;
  CHECK_THROWS_AS(chain_from_json(bad), InputError);
}

TEST_CASE("quotient chain files") {
  Rng rng(5);
  const PsiChain c = random_chain(rng, 2, 2, 1, false);
  const QuotChain q = dual_chain(c, rng);
  const Json j = quot_chain_to_json(c, q);
  CHECK(j["schema"] == kSchema);
  REQUIRE(j["levels"].size() == static_cast<std::size_t>(c.length() + 1));
  CHECK(j["levels"][0]["torsion_length"] == 1);
  CHECK(j["levels"].back()["torsion_length"] == 0);
  CHECK(j["levels"][0]["rank"] == 1);
}

TEST_CASE("atomic writes") {
  const std::string path = "io_test_output.json";
  write_file_atomic(path, "{}\n");
  CHECK(read_json_file(path) == Json::object());
  std::remove(path.c_str());
  CHECK_THROWS(write_file_atomic("/nonexistent/dir/out.json", "{}"));
}
