#include <doctest.h>

#include <cmath>

#include "hqr/error.hpp"
#include "hqr/oracle.hpp"
#include "hqr/solver.hpp"
#include "hqr/verify.hpp"
#include "oracles.hpp"

namespace o = hqr::oracle;
using hqr::ImplicitConcaveInstance;
using hqr::LinearOperator;
using hqr::Potential;
using hqr::PotentialKind;
using hqr::ReconstructionProblem;
using hqr::Vector;

namespace {

double sq_norm(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return s;
}

o::DenseMatrix mat(std::size_t r, std::size_t c, Vector values) {
  o::DenseMatrix m(r, c);
  m.data = std::move(values);
  return m;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("fd_gradient") {
  const Vector g = o::fd_gradient(sq_norm, Vector{1, 2}, 1e-5);
  CHECK(std::abs(g[0] - 2) <= 1e-8);
  CHECK(std::abs(g[1] - 4) <= 1e-8);
  const Vector z = o::fd_gradient([](auto) { return 3.0; }, Vector{1, 2, 3}, 1e-5);
  for (double v : z) CHECK(v == 0.0);
  CHECK_THROWS_AS(o::fd_gradient([](auto) { return NAN; }, Vector{1}, 1e-5), hqr::NumericalError);
}

TEST_CASE("numeric_hessian") {
  const auto h = o::numeric_hessian(sq_norm, Vector{0.3, -1, 2}, 1e-4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(h(i, j) - (i == j ? 2.0 : 0.0)) <= 1e-6);
  const auto lin = o::numeric_hessian([](std::span<const double> x) { return 3 * x[0] - x[1]; },
                                      Vector{1, 1}, 1e-4);
  for (double v : lin.data) CHECK(std::abs(v) <= 1e-6);

  hqr::Rng rng(41);
  const auto inst = hqr::verify::random_instance(hqr::verify::catalog()[0], 3, rng);
  const auto hf = o::numeric_hessian([&](auto x) { return inst.f_value(x); },
                                     hqr::verify::random_point(inst, rng), 1e-4);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(hf(i, j) == hf(j, i));
}

TEST_CASE("stencils against the analytic Hessian") {
  auto f = [](std::span<const double> x) { return std::sin(x[0]) * std::exp(x[1]) + x[0] * x[1] * x[1]; };
  const Vector x{0.4, -0.2};
  const double h00 = -std::sin(0.4) * std::exp(-0.2);
  const double h01 = std::cos(0.4) * std::exp(-0.2) + 2 * -0.2;
  const double h11 = std::sin(0.4) * std::exp(-0.2) + 2 * 0.4;
  const Vector exact{h00, h01, h01, h11};
  const auto c = o::numeric_hessian(f, x, 1e-4);
  const auto m = o::numeric_hessian(f, x, Vector{1e-4, 1e-4},
                                    std::vector<o::Stencil>{o::Stencil::Forward, o::Stencil::Backward});
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(c.data[i] - exact[i]) <= 1e-6);
    // first order in h
    CHECK(std::abs(m.data[i] - exact[i]) <= 1e-3);
  }
}

TEST_CASE("min_eigenvalue examples") {
  const o::DenseMatrix id = mat(3, 3, {1, 0, 0, 0, 1, 0, 0, 0, 1});
  CHECK(o::min_eigenvalue(id) == doctest::Approx(1.0));
  const o::DenseMatrix d = mat(2, 2, {-1, 0, 0, 2});
  CHECK(o::min_eigenvalue(d) == doctest::Approx(-1.0));
  const o::DenseMatrix bad = mat(2, 2, {1, 2, 0, 1});
  CHECK_THROWS_AS(o::min_eigenvalue(bad), hqr::ConfigError);
}

TEST_CASE("min_eigenvalue matches inertia bisection") {
  hqr::Rng rng(42);
  for (int t = 0; t < 20; ++t) {
    oracle_ref::Mat m(6, Vector(6));
    o::DenseMatrix dm(6, 6);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j <= i; ++j) {
        const double v = rng.normal();
        m[i][j] = m[j][i] = v;
        dm(i, j) = dm(j, i) = v;
      }
    CHECK(std::abs(o::min_eigenvalue(dm) - oracle_ref::smallest_eigenvalue_bisect(m)) <= 1e-6);
  }
}

TEST_CASE("Gram matrices of regularisers are PSD") {
  for (const auto& g : hqr::make_gradient_2d(3, 3)) {
    const auto dense = oracle_ref::to_dense(g);
    const auto gram = oracle_ref::matmul(oracle_ref::transpose(dense), dense);
    Vector flat;
    for (const auto& row : gram) flat.insert(flat.end(), row.begin(), row.end());
    const o::DenseMatrix dm = mat(9, 9, flat);
    CHECK(o::min_eigenvalue(dm) >= -1e-10);
  }
}

TEST_CASE("conjugate_by_grid examples") {
  CHECK(std::abs(o::conjugate_by_grid(Potential(PotentialKind::LogSquare), 1, 50, 100000) - 1) <= 1e-4);
  CHECK(std::abs(o::conjugate_by_grid(Potential(PotentialKind::ExpSquare), 1, 50, 100000)) <= 1e-4);
  CHECK(std::abs(o::conjugate_by_grid(Potential(PotentialKind::SineClip), 1, 50, 100000)) <= 1e-4);
  CHECK(std::abs(o::conjugate_by_grid(Potential(PotentialKind::GemanMcClure), 1, 50, 100000)) <= 1e-4);
  CHECK_THROWS_AS(o::conjugate_by_grid(Potential(PotentialKind::ExpSquare), 2, 50, 100000), hqr::DomainError);
  CHECK_THROWS_AS(o::conjugate_by_grid(Potential(PotentialKind::ExpSquare), 0.5, 50, 10), hqr::ConfigError);
}

TEST_CASE("scalar instance: both Hessians PSD at the minimiser") {
  const ImplicitConcaveInstance inst(ReconstructionProblem{LinearOperator::identity(1), Vector{1},
                                                           {LinearOperator::identity(1)}, 1.0,
                                                           Potential(PotentialKind::ExpSquare)});
  hqr::SolverConfig cfg = hqr::verify::tight_solver_config();
  const auto r = hqr::solve(inst, cfg);
  const auto h = o::hessian_correspondence_check(inst, r.x, r.sigma, 1e-5);
  CHECK(h.vgrad_hessian_nonsingular);
  CHECK(h.psd_f);
  CHECK(h.psd_L);
  CHECK(h.equivalence_ok);
}

TEST_CASE("small instances converge to local minima") {
  hqr::Rng rng(43);
  int seen = 0;
  for (int t = 0; t < 40 && seen < 10; ++t) {
    const auto inst = hqr::verify::random_small_instance(hqr::verify::catalog()[1], 2, 2, rng);
    const auto r = hqr::solve(inst, hqr::verify::tight_solver_config());
    const auto h = o::hessian_correspondence_check(inst, r.x, r.sigma, 1e-5);
    if (!h.vgrad_hessian_nonsingular) continue;
    ++seen;
    CHECK(h.min_eig_f >= -1e-6);
    CHECK(h.min_eig_L >= -1e-6 * (1 + h.norm_L));
    CHECK(h.psd_f == h.psd_L);
  }
  CHECK(seen == 10);
}

TEST_CASE("clipped sine abstains from the equivalence") {
  // Data far apart so the difference sits on the clipped branch.
  const ImplicitConcaveInstance inst(ReconstructionProblem{LinearOperator::identity(2), Vector{0, 5},
                                                           hqr::make_difference_1d(2), 0.5,
                                                           Potential(PotentialKind::SineClip)});
  const auto r = hqr::solve(inst, hqr::verify::tight_solver_config());
  CHECK(r.sigma[0] == 0.0);
  const auto h = o::hessian_correspondence_check(inst, r.x, r.sigma, 1e-5);
  CHECK_FALSE(h.vgrad_hessian_nonsingular);
  CHECK_FALSE(h.equivalence_checked);
}

TEST_CASE("preconditions") {
  const ImplicitConcaveInstance inst(ReconstructionProblem{LinearOperator::identity(2), Vector{0, 1},
                                                           hqr::make_difference_1d(2), 0.5,
                                                           Potential(PotentialKind::ExpSquare)});
  const Vector x{0.7, 0.1};
  CHECK_THROWS_AS(o::hessian_correspondence_check(inst, x, inst.sigma_update(x), 1e-5),
                  hqr::PreconditionError);
  const ImplicitConcaveInstance big(ReconstructionProblem{LinearOperator::identity(40), Vector(40),
                                                          hqr::make_difference_1d(40), 0.5,
                                                          Potential(PotentialKind::ExpSquare)});
  const Vector z(40, 0.0);
  CHECK_THROWS_AS(o::hessian_correspondence_check(big, z, big.sigma_update(z), 1e-5),
                  hqr::PreconditionError);
}

TEST_CASE("v_second_derivative") {
  const Potential exp(PotentialKind::ExpSquare);
  CHECK(o::v_second_derivative(exp, 1.0) == doctest::Approx(-std::exp(-1.0)).epsilon(1e-6));
  CHECK(std::abs(o::v_second_derivative(Potential(PotentialKind::SineClip), 3.0)) < 1e-12);
}

}  // TEST_SUITE
