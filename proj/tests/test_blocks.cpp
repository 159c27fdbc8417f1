#include <catch2/catch_amalgamated.hpp>

#include "ozcheck/blocks.hpp"

using namespace ozcheck;

namespace {

double sup_diff(const MatFun& a, const MatFun& b) { return sup_norm(a - b); }

Mat e33_corner(std::size_t n) { return kron(identity(n), matrix_unit(n + 1, n, n)); }

double max_membership(const std::vector<MatFun>& images) {
  double worst = 0.0;
  for (const auto& x : images) worst = std::max(worst, membership_residual(x));
  return worst;
}

const std::vector<double> kInterior{0.125, 0.25, 0.5, 0.625, 0.875};

// Oracle: rank of the stacked, flattened words, enumerated without pruning.
std::size_t brute_span(const std::vector<MatFun>& gens, double t, std::size_t max_len) {
  const auto j = gens.front().grid().index_of(t).value();
  std::vector<Mat> letters;
  for (const auto& g : gens) {
    letters.push_back(g[j]);
    letters.push_back(g[j].adjoint());
  }
  std::vector<Mat> words = letters;
  std::vector<Mat> all = letters;
  for (std::size_t len = 2; len <= max_len; ++len) {
    std::vector<Mat> next;
    for (const auto& a : letters)
      for (const auto& w : words) next.push_back(a * w);
    all.insert(all.end(), next.begin(), next.end());
    words = std::move(next);
  }
  const Eigen::Index d2 = letters.front().size();
  Mat stacked(d2, static_cast<Eigen::Index>(all.size()));
  for (std::size_t k = 0; k < all.size(); ++k)
    stacked.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Vec>(all[k].data(), d2);
  return static_cast<std::size_t>(numerical_rank(stacked, 1e-9));
}

}  // namespace

TEST_CASE("Z(2) generator: unit and defect", "[blocks][z]") {
  const GridSpec grid(257);
  const Witness z = z_witness(2, grid);
  const MatFun p1 = z.phi.unit();
  const MatFun defect = MatFun::identity(grid, 6) - p1;
  const MatFun expected = MatFun::sample(grid, [](double t) -> Mat { return t * e33_corner(2); });
  CHECK(sup_diff(defect, expected) <= 1e-12);
  for (std::size_t j : {0u, 64u, 128u, 256u}) {
    const double t = grid.t(j);
    const Eigen::VectorXd ev = hermitian_eigenvalues(p1[j]);
    CHECK(ev(0) == Catch::Approx(1 - t).margin(1e-12));
    CHECK(ev(1) == Catch::Approx(1 - t).margin(1e-12));
    for (int k = 2; k < 6; ++k) CHECK(ev(k) == Catch::Approx(1.0).margin(1e-12));
  }
  // vv* computed by hand is t·Σ_j f_j f_j* ⊗ e33.
  CHECK(sup_diff(z.psi.image(0, 0), expected) <= 1e-12);
}

TEST_CASE("Z(2) link at t = 1 lies in 1 ⊗ M_3", "[blocks][z]") {
  const Witness z = z_witness(2, GridSpec(65));
  const Mat v1 = z.v[64];
  CHECK((v1 - kron(identity(2), matrix_unit(3, 2, 0))).norm() <= 1e-14);
  CHECK(z.v[0].norm() == 0.0);
}

TEST_CASE("Z(n) witness images lie in Z(n, n+1)", "[blocks][z]") {
  for (std::size_t n : {2u, 3u}) {
    const Witness z = z_witness(n, GridSpec(129));
    CHECK(max_membership(witness_generators(z.phi, z.psi)) <= 1e-11);
    CHECK(validate_R(z.phi, z.psi, 1e-10).all_pass());
    CHECK(validate_support(z.phi).all_pass());
  }
}

TEST_CASE("Z(n) closed form agrees with the sampled witness", "[blocks][z]") {
  const GridSpec grid(17);
  const Witness z = z_witness(3, grid);
  const Mat a = matrix_unit(3, 1, 2) + 0.5 * matrix_unit(3, 0, 0);
  for (std::size_t j = 0; j < grid.size(); ++j) CHECK((z_phi_at(3, a, grid.t(j)) - z.phi.at(a, j)).norm() <= 1e-14);
}

TEST_CASE("W(2) link and psi(e12)", "[blocks][w]") {
  const GridSpec grid(65);
  const Witness w = w_witness(2, grid);
  const MatFun expected = MatFun::sample(grid, [](double t) -> Mat {
    return t * (1 - t) * (kron(matrix_unit(2, 0, 0), matrix_unit(3, 2, 0)) + kron(matrix_unit(2, 1, 0), matrix_unit(3, 2, 1)));
  });
  CHECK(sup_diff(w.psi.image(0, 1), expected) <= 1e-12);
  CHECK(sup_norm(w.v * w.v) == 0.0);
  CHECK(max_membership(witness_generators(w.phi, w.psi)) <= 1e-12);
}

TEST_CASE("W(3) witness satisfies the nonunital relations", "[blocks][w]") {
  const Witness w = w_witness(3, GridSpec(129));
  CHECK(w.phi.dim() == 12);
  CHECK(validate_Rhat(w.phi, w.psi, 1e-11).all_pass());
}

TEST_CASE("W central element equals t(1-t)", "[blocks][w]") {
  const GridSpec grid(65);
  const RelationReport r2 = w_center_check(2, grid);
  CHECK(r2.all_pass());
  CHECK(r2.at("z = t(1-t) 1").residual <= 1e-12);
  CHECK(w_center_check(3, grid, 1e-11).all_pass());

  // Hand computation at t = 1/2: v*v = t(1-t) e11⊗(1 - e33) and
  // Σ_i x_i*(v*v)x_i = t(1-t)·1_2⊗(1 - e33), so z = 1/4.
  const Witness w = w_witness(2, grid);
  const auto j = grid.index_of(0.5).value();
  const auto x = cone_generators(w.phi);
  Mat z = w.v[j] * w.v[j].adjoint();
  for (const auto& xi : x) z += (w.v[j] * xi[j]).adjoint() * (w.v[j] * xi[j]);
  CHECK((z - 0.25 * identity(6)).norm() <= 1e-12);
  Mat z0 = w.v[0] * w.v[0].adjoint();
  CHECK(z0.norm() == 0.0);
}

TEST_CASE("alt1 witness", "[blocks][alt1]") {
  const GridSpec grid(129);
  const Alt1Witness a = alt1_witness(2, grid);
  const RelationReport r = validate_alt1(a.phi, a.psi, a.h);
  CHECK(r.all_pass());
  CHECK(r.at("h(1 - phi(1)) = 1 - phi(1)").residual <= 1e-15);
  CHECK(r.at("[h, phi(e_ij)] = 0").residual <= 1e-15);
  std::vector<MatFun> gens = witness_generators(a.phi, a.psi);
  gens.push_back(a.h);
  CHECK(max_membership(gens) <= 1e-11);
  // ψ(e11) = ν·1⊗e33 with ν = 1 on [1/2, 1].
  const MatFun s11 = a.psi.image(0, 0);
  for (std::size_t j = 64; j < grid.size(); ++j) CHECK((s11[j] - e33_corner(2)).norm() <= 1e-12);
  CHECK(validate_alt1(a.phi, a.psi, a.h).all_pass());
}

TEST_CASE("alt1 witness for n = 3", "[blocks][alt1]") {
  const Alt1Witness a = alt1_witness(3, GridSpec(65));
  CHECK(validate_alt1(a.phi, a.psi, a.h).all_pass());
}


TEST_CASE("fibre span of the W(2) witness", "[blocks][span]") {
  const GridSpec grid(257);
  const Witness w = w_witness(2, grid);
  const auto gens = witness_generators(w.phi, w.psi);
  REQUIRE(gens.size() == 3);
  // Words of length <= 4 in x_1, x_2, v and adjoints miss three directions;
  // length 5 reaches all of M_2 ⊗ M_3.
  CHECK(fibre_span_check(gens, 0.5) == brute_span(gens, 0.5, 4));
  CHECK(fibre_span_check(gens, 0.5) == 33);
  CHECK(fibre_span_check(gens, 0.5, 5) == 36);
  CHECK(fibre_algebra_dimension(gens, 0.5) == 36);
  CHECK(fibre_span_check(gens, 0.0) == 4);
  CHECK(fibre_algebra_dimension(gens, 0.0) == 4);
  CHECK(fibre_span_check({MatFun::identity(grid, 6)}, 0.5) == 1);
  CHECK_THROWS_AS(fibre_span_check(gens, 0.3), DomainError);
}

TEST_CASE("witnesses generate full fibres at interior points", "[blocks][span]") {
  const GridSpec grid(257);
  for (std::size_t n : {2u, 3u}) {
    const std::size_t full = n * n * (n + 1) * (n + 1);
    const Witness z = z_witness(n, grid);
    const Witness w = w_witness(n, grid);
    const Alt1Witness a = alt1_witness(n, grid);
    auto alt = witness_generators(a.phi, a.psi);
    alt.push_back(a.h);
    for (double t : kInterior) {
      INFO("n = " << n << ", t = " << t);
      CHECK(fibre_algebra_dimension(witness_generators(z.phi, z.psi), t) == full);
      CHECK(fibre_algebra_dimension(witness_generators(w.phi, w.psi), t) == full);
      CHECK(fibre_algebra_dimension(alt, t) == full);
      if (n == 2) CHECK(fibre_span_check(witness_generators(w.phi, w.psi), t, 5) == full);
    }
  }
}

TEST_CASE("witness constructors reject n < 2", "[blocks]") {
  CHECK_THROWS_AS(z_witness(1), DomainError);
  CHECK_THROWS_AS(w_witness(1), DomainError);
  CHECK_THROWS_AS(alt1_witness(1), DomainError);
}
