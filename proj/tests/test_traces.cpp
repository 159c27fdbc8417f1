#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <random>

#include "ozcheck/tower.hpp"
#include "ozcheck/traces.hpp"

using namespace ozcheck;

namespace {

TraceMeasure random_measure(GridSpec grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(grid.size());
  double total = 0.0;
  for (double& x : w) total += (x = u(rng));
  for (double& x : w) x /= total;
  return TraceMeasure(grid, std::move(w));
}

Mat random_hermitian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Cplx(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

// Oracle: largest gap of the sorted values fn(i/Q) together with 0 and 1.
Rational brute_covering_radius(const PLFunc& fn, unsigned q) {
  std::vector<Rational> pts{0, 1};
  for (unsigned i = 1; i < q; ++i) pts.push_back(fn(make_rational(i, q)));
  std::sort(pts.begin(), pts.end());
  Rational gap = 0;
  for (std::size_t k = 1; k < pts.size(); ++k) gap = std::max(gap, Rational(pts[k] - pts[k - 1]));
  return gap;
}

}  // namespace

TEST_CASE("trace of the unit and of phi(1)", "[traces]") {
  const GridSpec grid(257);
  const Witness z = z_witness(2, grid);
  const MatFun p1 = z.phi.unit();
  std::mt19937_64 rng(3);
  CHECK(trace_of(random_measure(grid, rng), MatFun::identity(grid, 6)) == Catch::Approx(1.0).margin(1e-14));
  for (double t : {0.0, 0.25, 0.3, 0.77, 1.0}) {
    INFO("t = " << t);
    CHECK(trace_of(TraceMeasure::dirac(grid, t), p1) == Catch::Approx((4 + 2 * (1 - t)) / 6).margin(1e-13));
  }
  CHECK(trace_of(TraceMeasure::uniform(grid), p1) == Catch::Approx(5.0 / 6.0).margin(1e-14));
  CHECK_THROWS_AS(trace_of(TraceMeasure::uniform(GridSpec(65)), p1), StructuralError);
}

TEST_CASE("trace measures validate their weights", "[traces]") {
  const GridSpec grid(5);
  CHECK_THROWS_AS(TraceMeasure(grid, {0.5, 0.5, 0.0, 0.0}), StructuralError);
  CHECK_THROWS_AS(TraceMeasure(grid, {1.5, -0.5, 0.0, 0.0, 0.0}), DomainError);
  CHECK_THROWS_AS(TraceMeasure(grid, {0.5, 0.0, 0.0, 0.0, 0.0}), DomainError);
  const TraceMeasure d = TraceMeasure::dirac(grid, 0.3);
  CHECK(d.weights()[1] == Catch::Approx(0.8));
  CHECK(d.weights()[2] == Catch::Approx(0.2));
}

TEST_CASE("trace is linear and positive", "[traces]") {
  const GridSpec grid(65);
  std::mt19937_64 rng(11);
  const Witness w = w_witness(2, grid);
  const MatFun x = w.phi.image(random_hermitian(2, rng));
  const MatFun y = w.psi.image(random_hermitian(2, rng));
  const TraceMeasure mu = random_measure(grid, rng);
  CHECK(trace_of(mu, 2.0 * x + y) == Catch::Approx(2 * trace_of(mu, x) + trace_of(mu, y)).margin(1e-12));
  const TraceMeasure nu = random_measure(grid, rng);
  std::vector<double> mix(grid.size());
  for (std::size_t j = 0; j < mix.size(); ++j) mix[j] = 0.25 * mu.weights()[j] + 0.75 * nu.weights()[j];
  CHECK(trace_of(TraceMeasure(grid, mix), x) ==
        Catch::Approx(0.25 * trace_of(mu, x) + 0.75 * trace_of(nu, x)).margin(1e-12));
  const MatFun pos = x * x.adjoint();
  CHECK(trace_of(mu, pos) >= -1e-12);
}

TEST_CASE("pullback of the Dirac measure at 0", "[traces][pullback]") {
  const GridSpec grid(257);
  const TraceMeasure pulled = pullback_trace(TraceMeasure::dirac(grid, 0.0), lambda_sequence(2));
  CHECK(pulled.weights()[0] == Catch::Approx(0.25).margin(1e-15));
  CHECK(pulled.weights()[128] == Catch::Approx(0.75).margin(1e-15));
  double rest = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (j != 0 && j != 128) rest += pulled.weights()[j];
  CHECK(rest == 0.0);
}

TEST_CASE("pullback preserves mass and constants", "[traces][pullback]") {
  const GridSpec grid(129);
  std::mt19937_64 rng(5);
  const Mat c = random_hermitian(6, rng);
  for (unsigned q : {2u, 3u}) {
    const TraceMeasure nu = random_measure(grid, rng);
    const TraceMeasure pulled = pullback_trace(nu, lambda_sequence(q));
    CHECK(pulled.total_mass() == Catch::Approx(1.0).margin(1e-12));
    const MatFun x = MatFun::constant(grid, c);
    CHECK(trace_of(pulled, x) == Catch::Approx(trace_of(nu, x)).margin(1e-12));
  }
}

TEST_CASE("pulled-back Dirac traces agree with the connecting map", "[traces][pullback]") {
  const GridSpec grid(257);
  const Witness z = z_witness(2, grid);
  const ConnectorSymbolic lam = lambda_sequence(2);
  std::mt19937_64 rng(17);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const Mat a = random_hermitian(2, rng);
    const MatFun pa = z.phi.image(a);
    for (std::size_t j : {0u, 37u, 64u, 100u, 128u, 200u, 256u}) {
      const double t = grid.t(j);
      const double lhs = trace_of(pullback_trace(TraceMeasure::dirac(grid, t), lam), pa);
      const double rhs = normalized_trace(alpha_t_phi(2, a, t)).real();
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("trace collapse bound", "[traces][collapse]") {
  const GridSpec grid(257);
  const Witness z = z_witness(2, grid);
  const MatFun b = z.phi.unit();

  const CollapseResult one = collapse_check(2, 1, b);
  CHECK(one.factor == make_rational(1, 3));
  CHECK(one.ratio <= 1.0);
  CHECK(one.sup_difference > 0.0);
  CHECK(one.report.all_pass());

  const CollapseResult two = collapse_check(2, 2, b);
  CHECK(two.factor == make_rational(1, 171));
  CHECK(two.sup_difference <= 2 * two.b_norm / 171);
  CHECK(two.report.all_pass());

  // Independent oracle: spread of pulled-back Dirac traces over all grid points.
  const ConnectorSymbolic lam = lambda_sequence(2);
  double lo = 1e300, hi = -1e300;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double v = trace_of(pullback_trace(TraceMeasure::dirac(grid, grid.t(j)), lam), b);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  CHECK(one.sup_difference == Catch::Approx(hi - lo).margin(1e-12));

  const CollapseResult flat = collapse_check(2, 1, MatFun::identity(grid, 6));
  CHECK(flat.sup_difference <= 1e-15);
  CHECK(collapse_check(3, 1, b).factor == make_rational(1, 7));
}

TEST_CASE("W boundedness partial products", "[traces][boundedness]") {
  const BoundednessResult r = w_boundedness_check(2, 3);
  REQUIRE(r.partial_products.size() == 3);
  CHECK(r.partial_products[0] == make_rational(1, 3));
  CHECK(r.partial_products[1] == make_rational(1, 171));
  CHECK(r.partial_products[2] == Rational(1) / (Rational(171) * (512 * 512 - 512 + 1)));
  CHECK(r.report.all_pass());
  const BoundednessResult r3 = w_boundedness_check(3, 2);
  CHECK(r3.partial_products[1] == Rational(1) / (7 * 703));
  CHECK(r3.report.all_pass());
  CHECK_THROWS_AS(w_boundedness_check(2, 0), DomainError);
}

TEST_CASE("simplicity witness", "[traces][simplicity]") {
  const SimplicityResult s1 = simplicity_witness(2, 0.6, 1);
  CHECK(s1.q_steps == 8);
  CHECK(s1.covering_radius == make_rational(1, 2));
  CHECK(s1.covering_radius == brute_covering_radius(shapes::h(), 8));
  CHECK(s1.criterion);  // 1/8 < 0.6/4
  CHECK_FALSE(simplicity_witness(2, 0.4, 1).criterion);

  const SimplicityResult s2 = simplicity_witness(2, 0.05, 2);
  CHECK(s2.q_steps == 512);
  CHECK(s2.ramp.slope == 16);
  CHECK(s2.ramp.offset == 10);
  CHECK(s2.covering_radius == make_rational(1, 32));
  CHECK(s2.covering_radius == brute_covering_radius(shapes::h_iterate(2), 512));
  CHECK(s2.criterion);
  CHECK(s2.report.all_pass());

  const SimplicityResult s3 = simplicity_witness(2, 0.05, 3);
  CHECK(s3.criterion_value == Rational(64) / Rational(pow(BigInt(2), 27)));
  CHECK(to_double(s3.criterion_value) == Catch::Approx(4.76837158203125e-7));
  CHECK(s3.covering_radius == s3.criterion_value);
  CHECK(s3.report.all_pass());

  // Covering radius of a 3-adic level, checked by enumeration.
  CHECK(simplicity_witness(3, 0.5, 1).covering_radius == brute_covering_radius(shapes::h(), 27));
  CHECK_THROWS_AS(simplicity_witness(2, 0.0, 1), DomainError);
  CHECK_THROWS_AS(simplicity_witness(2, 1.0, 1), DomainError);
}

TEST_CASE("ramp offsets follow l_{n+1} = 4 l_n + 2", "[traces][simplicity]") {
  const auto l = ramp_offsets(6);
  REQUIRE(l.size() == 6);
  CHECK(l[0] == 2);
  for (std::size_t k = 1; k < l.size(); ++k) CHECK(l[k] == 4 * l[k - 1] + 2);
}
