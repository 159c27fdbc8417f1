#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ozcheck/blocks.hpp"
#include "ozcheck/io.hpp"

using namespace ozcheck;

namespace {

bool bitwise_equal(const MatFun& a, const MatFun& b) {
  if (a.grid() != b.grid() || a.dim() != b.dim()) return false;
  for (std::size_t j = 0; j < a.size(); ++j)
    if ((a[j].array() != b[j].array()).any()) return false;
  return true;
}

}  // namespace

TEST_CASE("PL functions round trip through JSON", "[io]") {
  for (const PLFunc& f : {shapes::d(), shapes::f(), shapes::g(), shapes::h(), shapes::h_iterate(3)}) {
    const Json j = to_json(f);
    CHECK(plfunc_from_json(Json::parse(j.dump())) == f);
  }
  // Numerators beyond int64 are written as strings.
  const BigInt big = pow(BigInt(3), 50);
  const PLFunc tiny({{0, 0}, {Rational(1, big), 1}, {1, 1}});
  const Json j = to_json(tiny);
  CHECK(j[1][0][1].is_string());
  CHECK(plfunc_from_json(j) == tiny);
}

TEST_CASE("PL function JSON errors", "[io]") {
  CHECK_THROWS_AS(plfunc_from_json(Json::object()), FormatError);
  CHECK_THROWS_AS(plfunc_from_json(Json::parse("[[[0,1],[0,1]],[[1,0],[1,1]]]")), FormatError);
  CHECK_THROWS_AS(plfunc_from_json(Json::parse("[[[0,1],[0,1]],[[\"x\",1],[1,1]]]")), FormatError);
  CHECK_THROWS_AS(plfunc_from_json(Json::parse("[[[0,1],[0,1]],[[1,2],[1,1]]]")), DomainError);
}

TEST_CASE("matrix-valued functions round trip exactly", "[io]") {
  const GridSpec grid(17);
  const Witness z = z_witness(2, grid);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Mat a(2, 2);
  for (Eigen::Index k = 0; k < 4; ++k) a(k / 2, k % 2) = Cplx(g(rng), g(rng));
  const MatFun x = z.phi.image(a);

  const MatFun from_json = matfun_from_json(Json::parse(to_json(x).dump()));
  CHECK(bitwise_equal(from_json, x));
  CHECK(from_json.block() == x.block());

  const MatFun from_csv = matfun_from_csv(to_csv(x), x.block());
  CHECK(bitwise_equal(from_csv, x));
  CHECK(to_csv(from_csv) == to_csv(x));
}

TEST_CASE("matrix-valued function format errors", "[io]") {
  const MatFun x = MatFun::identity(GridSpec(3), 2);
  Json j = to_json(x);
  j["schema"] = 99;
  CHECK_THROWS_AS(matfun_from_json(j), FormatError);
  j = to_json(x);
  j["samples"].erase(0);
  CHECK_THROWS_AS(matfun_from_json(j), FormatError);
  CHECK_THROWS_AS(matfun_from_csv(""), FormatError);
  CHECK_THROWS_AS(matfun_from_csv("t,re_0_0,im_0_0,re_0_1\n"), FormatError);
  CHECK_THROWS_AS(matfun_from_csv("t,re_0_0,im_0_0\n0,1,0\n1,abc,0\n"), FormatError);
  CHECK_THROWS_AS(matfun_from_csv("t,re_0_0,im_0_0\n0,1\n1,1,0\n"), FormatError);
}

TEST_CASE("symbolic connectors round trip through JSON", "[io]") {
  const ConnectorSymbolic c = connector_symbolic(2, 2);
  const ConnectorSymbolic back = connector_from_json(Json::parse(to_json(c).dump()));
  CHECK(back.entry_count() == c.entry_count());
  CHECK(back.nonconstant_fraction() == c.nonconstant_fraction());
  REQUIRE(back.distinct() == c.distinct());
  for (std::size_t k = 0; k < c.distinct(); ++k) {
    CHECK(back.entries()[k].fn == c.entries()[k].fn);
    CHECK(back.entries()[k].multiplicity == c.entries()[k].multiplicity);
  }
  CHECK(to_json(back).dump() == to_json(c).dump());
}
