#include <doctest.h>

#include <cmath>

#include "hqr/error.hpp"
#include "hqr/icf.hpp"
#include "hqr/oracle.hpp"
#include "hqr/verify.hpp"
#include "oracles.hpp"

using hqr::ImplicitConcaveInstance;
using hqr::LinearOperator;
using hqr::Potential;
using hqr::PotentialKind;
using hqr::ReconstructionProblem;
using hqr::SigmaVector;
using hqr::Vector;

namespace {

ImplicitConcaveInstance scalar_instance(double b, double beta, PotentialKind k) {
  return ImplicitConcaveInstance(ReconstructionProblem{
      LinearOperator::identity(1), Vector{b}, {LinearOperator::identity(1)}, beta, Potential(k)});
}

}  // namespace

TEST_SUITE("icf") {

TEST_CASE("f_value examples") {
  const auto inst = scalar_instance(0.0, 1.0, PotentialKind::ExpSquare);
  CHECK(inst.f_value(Vector{0}) == 0.0);
  CHECK(inst.f_value(Vector{1}) == doctest::Approx(1.0 + (1.0 - std::exp(-1.0))).epsilon(1e-15));
  CHECK(std::abs(inst.f_value(Vector{1}) - 1.63212) < 1e-5);

  const ImplicitConcaveInstance gm(ReconstructionProblem{
      LinearOperator::identity(2), Vector{1, 1}, {LinearOperator::dense(1, 2, {1, -1})}, 2.0,
      Potential(PotentialKind::GemanMcClure)});
  CHECK(gm.f_value(Vector{1, 1}) == 0.0);
}

TEST_CASE("f_value agrees with a dense recomputation") {
  hqr::Rng rng(21);
  for (const Potential& p : hqr::verify::catalog()) {
    for (int t = 0; t < 20; ++t) {
      const auto inst = hqr::verify::random_instance(p, 6, rng);
      const Vector x = hqr::verify::random_point(inst, rng);
      CHECK(inst.f_value(x) == doctest::Approx(oracle_ref::naive_f(inst, x)).epsilon(1e-12));
    }
  }
}

TEST_CASE("augmented_value examples") {
  const auto inst = scalar_instance(0.0, 1.0, PotentialKind::ExpSquare);
  const Potential& p = inst.potential();
  CHECK(std::abs(inst.augmented_value(Vector{0}, SigmaVector({1.0}, p))) < 1e-15);
  hqr::Rng rng(22);
  for (const Potential& q : hqr::verify::catalog()) {
    const auto r = hqr::verify::random_instance(q, 8, rng);
    for (int t = 0; t < 100; ++t) {
      const Vector x = hqr::verify::random_point(r, rng);
      CHECK(std::abs(r.augmented_value(x, r.sigma_update(x)) - r.f_value(x)) <= 1e-9);
      const SigmaVector s = hqr::verify::random_sigma(q, r.m(), rng);
      CHECK(r.f_value(x) <= r.augmented_value(x, s) + 1e-9);
    }
  }
}

TEST_CASE("sigma vectors reject values outside the domain") {
  const Potential exp(PotentialKind::ExpSquare);
  CHECK_THROWS_AS(SigmaVector({0.5, 1.2}, exp), hqr::DomainError);
  CHECK_THROWS_AS(SigmaVector({-0.1}, Potential(PotentialKind::SineClip)), hqr::DomainError);
  CHECK_THROWS_AS(SigmaVector({0.0}, Potential(PotentialKind::LogSquare)), hqr::DomainError);
  CHECK_NOTHROW(SigmaVector({0.0, 1.0}, exp));
}

TEST_CASE("sigma_update examples") {
  const auto exp = scalar_instance(0.0, 1.0, PotentialKind::ExpSquare);
  CHECK(exp.sigma_update(Vector{0})[0] == 1.0);
  CHECK(exp.sigma_update(Vector{1})[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  const auto sine = scalar_instance(0.0, 1.0, PotentialKind::SineClip);
  CHECK(sine.sigma_update(Vector{2})[0] == 0.0);
}

TEST_CASE("sigma_update minimises L in sigma") {
  hqr::Rng rng(23);
  for (const Potential& p : hqr::verify::catalog()) {
    const auto inst = hqr::verify::random_instance(p, 5, rng);
    for (int t = 0; t < 100; ++t) {
      const Vector x = hqr::verify::random_point(inst, rng);
      const SigmaVector best = inst.sigma_update(x);
      for (double v : best.values()) CHECK(v >= 0.0);
      const SigmaVector other = hqr::verify::random_sigma(p, inst.m(), rng);
      CHECK(inst.augmented_value(x, best) <= inst.augmented_value(x, other) + 1e-12);
    }
  }
}

TEST_CASE("f_grad examples and finite differences") {
  const auto inst = scalar_instance(0.0, 1.0, PotentialKind::ExpSquare);
  CHECK(inst.f_grad(Vector{0}) == Vector{0});
  hqr::Rng rng(24);
  for (const Potential& p : hqr::verify::catalog()) {
    for (int t = 0; t < 50; ++t) {
      const auto r = hqr::verify::random_instance(p, 8, rng);
      const Vector x = hqr::verify::random_point(r, rng);
      const Vector fd = hqr::oracle::fd_gradient([&](auto z) { return r.f_value(z); }, x, 1e-5);
      const Vector g = r.f_grad(x);
      double err = 0;
      for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(g[i] - fd[i]));
      CHECK(err / std::max(1.0, hqr::norm_inf(g)) <= 1e-5);
    }
  }
}

TEST_CASE("augmented gradient at the update") {
  hqr::Rng rng(25);
  for (const Potential& p : hqr::verify::catalog()) {
    const auto inst = hqr::verify::random_instance(p, 7, rng);
    for (int t = 0; t < 30; ++t) {
      const Vector x = hqr::verify::random_point(inst, rng);
      const SigmaVector s = inst.sigma_update(x);
      bool interior = true;
      for (double v : s.values()) interior = interior && p.sigma_domain().interior(v);
      if (!interior) continue;
      const auto g = inst.augmented_grad(x, s);
      CHECK(hqr::norm_inf(g.sigma) <= 1e-8);
      const Vector gf = inst.f_grad(x);
      for (std::size_t i = 0; i < gf.size(); ++i) CHECK(std::abs(g.x[i] - gf[i]) <= 1e-8);
    }
  }
}

TEST_CASE("augmented gradient at the sine boundary uses the seam") {
  const auto sine = scalar_instance(0.0, 1.0, PotentialKind::SineClip);
  const auto g = sine.augmented_grad(Vector{2.0}, SigmaVector({0.0}, sine.potential()));
  CHECK(g.sigma[0] == doctest::Approx(4.0 - std::numbers::pi / 2.0));
}

TEST_CASE("stationarity report") {
  hqr::Rng rng(26);
  const auto inst = hqr::verify::random_instance(hqr::verify::catalog()[0], 6, rng);
  const Vector x = hqr::verify::random_point(inst, rng);
  const auto at_update = inst.stationarity_report(x, inst.sigma_update(x), 1e-5);
  CHECK(at_update.value_gap <= 1e-9);
  CHECK(at_update.grad_f_inf > 1e-5);
  CHECK_FALSE(at_update.correspondence_ok);

  const SigmaVector other = hqr::verify::random_sigma(inst.potential(), inst.m(), rng);
  const auto off = inst.stationarity_report(x, other, 1e-5);
  CHECK(off.value_gap > 0.0);
  CHECK(off.f <= off.L);
}

TEST_CASE("invalid instances") {
  const Potential p(PotentialKind::ExpSquare);
  using hqr::ConfigError;
  using hqr::DimensionError;
  CHECK_THROWS_AS(ImplicitConcaveInstance(ReconstructionProblem{LinearOperator::identity(3), Vector(3),
                                                                hqr::make_difference_1d(3), 0.0, p}),
                  ConfigError);
  CHECK_THROWS_AS(ImplicitConcaveInstance(ReconstructionProblem{LinearOperator::identity(3), Vector(2),
                                                                hqr::make_difference_1d(3), 1.0, p}),
                  DimensionError);
  CHECK_THROWS_AS(ImplicitConcaveInstance(ReconstructionProblem{LinearOperator::identity(3), Vector(3),
                                                                hqr::make_difference_1d(4), 1.0, p}),
                  DimensionError);
  const auto inst = ImplicitConcaveInstance(
      ReconstructionProblem{LinearOperator::identity(3), Vector(3), hqr::make_difference_1d(3), 1.0, p});
  CHECK_THROWS_AS(inst.f_value(Vector(2)), DimensionError);
  CHECK_THROWS_AS(inst.augmented_value(Vector(3), SigmaVector({1.0}, p)), DimensionError);
}

TEST_CASE("boundedness for nonnegative potentials") {
  hqr::Rng rng(27);
  for (const Potential& p : hqr::verify::catalog()) {
    if (p.kind() == PotentialKind::LogSquare) continue;
    const auto inst = hqr::verify::random_instance(p, 8, rng);
    for (int t = 0; t < 100; ++t) {
      const Vector x = hqr::verify::random_point(inst, rng);
      CHECK(inst.f_value(x) >= 0.0);
      CHECK(inst.augmented_value(x, inst.sigma_update(x)) >= -1e-9);
    }
  }
}

}  // TEST_SUITE
