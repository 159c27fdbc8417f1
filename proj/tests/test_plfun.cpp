#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "ozcheck/connector.hpp"
#include "ozcheck/pl_identities.hpp"
#include "ozcheck/plfun.hpp"

using namespace ozcheck;
using ozcheck::make_rational;

namespace {

Rational r(std::int64_t n, std::int64_t d = 1) { return make_rational(n, d); }

// Random PL function with values in [0,1] and dyadic-ish rational breakpoints.
PLFunc random_pl(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(0, 5);
  std::uniform_int_distribution<int> num(1, 63);
  std::uniform_int_distribution<int> val(0, 64);
  std::vector<Rational> xs{0, 1};
  const int interior = count(rng);
  for (int k = 0; k < interior; ++k) xs.push_back(r(num(rng), 64));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Breakpoint> pts;
  for (const auto& x : xs) pts.push_back({x, r(val(rng), 64)});
  return PLFunc(std::move(pts));
}

}  // namespace

TEST_CASE("eval at reference points", "[plfun]") {
  CHECK(shapes::d()(r(0)) == 0);
  CHECK(shapes::f()(r(3, 8)) == r(1, 2));
  CHECK(shapes::h()(r(5, 8)) == r(1, 2));
  CHECK(shapes::d()(r(3, 32)) == r(1, 2));
  CHECK(shapes::f()(0.375) == 0.5);
}

TEST_CASE("eval outside [0,1] is a domain error", "[plfun]") {
  CHECK_THROWS_AS(shapes::f()(r(-1, 10)), DomainError);
  CHECK_THROWS_AS(shapes::f()(1.5), DomainError);
}

TEST_CASE("malformed breakpoint lists are rejected", "[plfun]") {
  CHECK_THROWS_AS(PLFunc({{0, 0}}), DomainError);
  CHECK_THROWS_AS(PLFunc({{r(1, 4), 0}, {1, 1}}), DomainError);
  CHECK_THROWS_AS(PLFunc({{0, 0}, {r(1, 2), 0}, {r(1, 2), 1}, {1, 1}}), DomainError);
}

TEST_CASE("canonical shapes carry the reference breakpoints", "[plfun]") {
  const std::vector<Breakpoint> d{{0, 0}, {r(3, 16), 1}, {1, 1}};
  const std::vector<Breakpoint> f{{0, 0}, {r(1, 4), 0}, {r(1, 2), 1}, {1, 1}};
  const std::vector<Breakpoint> g{{0, 0}, {r(1, 4), 0}, {r(1, 2), 1}, {r(3, 4), 0}, {1, 0}};
  const std::vector<Breakpoint> h{{0, 0}, {r(1, 2), 0}, {r(3, 4), 1}, {1, 1}};
  CHECK(shapes::d().breakpoints() == d);
  CHECK(shapes::f().breakpoints() == f);
  CHECK(shapes::g().breakpoints() == g);
  CHECK(shapes::h().breakpoints() == h);
  CHECK(shapes::h_indexed(5, 5) == shapes::h());
  CHECK(shapes::h_indexed(1, 2)(r(0)) == r(1, 2));
}

TEST_CASE("compose(h, h) is clamp(16t - 10)", "[plfun]") {
  const PLFunc hh = compose(shapes::h(), shapes::h());
  const std::vector<Breakpoint> expected{{0, 0}, {r(10, 16), 0}, {r(11, 16), 1}, {1, 1}};
  CHECK(hh.breakpoints() == expected);

  // Dense-grid oracle: h(h(t)) evaluated pointwise against the closed form.
  const PLFunc H = shapes::h();
  Rational worst = 0;
  constexpr int points = 100000;
  for (int i = 0; i <= points; i += 7) {
    const Rational t = r(i, points);
    Rational closed = 16 * t - 10;
    if (closed < 0) closed = 0;
    if (closed > 1) closed = 1;
    Rational dev = H(H(t)) - closed;
    if (dev < 0) dev = -dev;
    if (dev > worst) worst = dev;
    CHECK(hh(t) == closed);
  }
  CHECK(worst == 0);
}

TEST_CASE("compose with identity", "[plfun]") {
  CHECK(compose(shapes::f(), PLFunc::identity()) == shapes::f());
  CHECK(compose(PLFunc::identity(), shapes::g()) == shapes::g());
}

TEST_CASE("compose rejects inner functions leaving [0,1]", "[plfun]") {
  const PLFunc too_high({{0, 0}, {1, 2}});
  CHECK_THROWS_AS(compose(shapes::f(), too_high), DomainError);
  const PLFunc negative = PLFunc::constant(r(-1, 3));
  CHECK_THROWS_AS(compose(shapes::f(), negative), DomainError);
}

TEST_CASE("iterated h: slope 4^n and offsets l_{n+1} = 4 l_n + 2", "[plfun]") {
  BigInt expected_offset = 2;
  for (unsigned n = 1; n <= 8; ++n) {
    const RampForm ramp = ramp_form(shapes::h_iterate(n));
    CHECK(ramp.slope == Rational(pow(BigInt(4), n)));
    CHECK(ramp.offset == Rational(expected_offset));
    expected_offset = 4 * expected_offset + 2;
  }
  CHECK(ramp_form(shapes::h_iterate(2)).offset == 10);
}

TEST_CASE("composition agrees with pointwise evaluation (property)", "[plfun][property]") {
  std::mt19937_64 rng(20240917);
  std::uniform_int_distribution<int> num(0, 1 << 20);
  for (int trial = 0; trial < 40; ++trial) {
    const PLFunc a = random_pl(rng);
    const PLFunc b = random_pl(rng);
    const PLFunc ab = compose(a, b);
    for (int k = 0; k < 250; ++k) {
      const Rational t = r(num(rng), 1 << 20);
      REQUIRE(ab(t) == a(b(t)));
      const double tf = to_double(t);
      REQUIRE(std::abs(ab(tf) - a(b(tf))) <= 1e-14);
    }
  }
}

TEST_CASE("composite with a constant factor is constant", "[plfun][property]") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const PLFunc a = random_pl(rng);
    const PLFunc c = PLFunc::constant(r(static_cast<int>(rng() % 17), 16));
    CHECK(compose(a, c).is_constant());
    CHECK(compose(c, a).is_constant());
  }
}

TEST_CASE("reference product identities hold exactly", "[plfun]") {
  const RelationReport report = verify_pl_identities();
  REQUIRE(report.size() == 6);
  for (const auto& e : report.entries()) {
    INFO(e.name);
    CHECK(e.pass);
    CHECK(e.residual == 0.0);
  }
}

TEST_CASE("support and unit sets", "[plfun]") {
  CHECK(support_closure(shapes::h()) == IntervalSet{{r(1, 2), 1}});
  CHECK(unit_set(shapes::f()) == IntervalSet{{r(1, 2), 1}});
  CHECK(unit_set(shapes::d_bar()) == IntervalSet{{0, r(13, 16)}});
  CHECK(fractional_support_closure(shapes::f()) == IntervalSet{{r(1, 4), r(1, 2)}});
  // d(t(1-t)) = 1 exactly where t(1-t) >= 3/16.
  CHECK(shapes::d_hat().unit_set() == IntervalSet{{r(1, 4), r(3, 4)}});
  CHECK(support_closure(shapes::g()) == IntervalSet{{r(1, 4), r(3, 4)}});
}

TEST_CASE("dominance check reports failures and where they occur", "[plfun]") {
  // f·g = g fails: f < 1 on [1/4,1/2).
  const PLFunc F = shapes::f();
  const PLFunc G = shapes::g();
  auto ev = [](const PLFunc& fn) {
    return std::function<Rational(const Rational&)>([fn](const Rational& t) { return fn(t); });
  };
  const DominanceCheck c = check_dominance(unit_set(F), support_closure(G), ev(F), ev(G));
  CHECK_FALSE(c.holds);
  CHECK(c.residual > 0.1);
  REQUIRE(c.worst_t.has_value());
  CHECK(*c.worst_t > r(1, 4));
  CHECK(*c.worst_t < r(1, 2));
}

TEST_CASE("lambda sequence for q = 2", "[plfun][lambda]") {
  const ConnectorSymbolic lam = lambda_sequence(2);
  CHECK(lam.entry_count() == 12);
  CHECK(lam.nonconstant_count() == 4);
  CHECK(lam.nonconstant_fraction() == r(1, 3));
  // Oracle: list the definition entry by entry.
  std::vector<PLFunc> listed;
  for (int k = 0; k < 8; ++k) listed.push_back(PLFunc::constant(r(1, 2)));
  listed.push_back(shapes::h());
  listed.push_back(shapes::h());
  listed.push_back(shapes::h_indexed(1, 2));
  listed.push_back(shapes::h_indexed(2, 2));
  CHECK(listed.size() == 12);
  CHECK(12 * 6 == 8 * 9);
  for (const auto& e : lam.entries()) {
    const auto matches = std::count(listed.begin(), listed.end(), e.fn);
    CHECK(BigInt(matches) == e.multiplicity);
  }
}

TEST_CASE("lambda sequence dimension bookkeeping", "[plfun][lambda]") {
  for (unsigned q : {2u, 3u, 5u, 8u}) {
    const BigInt Q = q;
    const ConnectorSymbolic lam = lambda_sequence(q);
    CHECK(lam.entry_count() == Q * Q * Q * (Q - 1) + Q * (Q - 1) + Q);
    CHECK(lam.entry_count() * Q * (Q + 1) == Q * Q * Q * (Q * Q * Q + 1));
  }
  for (unsigned q : {2u, 3u, 8u}) {
    CHECK(lambda_sequence(q).nonconstant_fraction() == r(1, q * q - q + 1));
  }
  CHECK_THROWS_AS(lambda_sequence(1), DomainError);
}
