#include "hqr/icf.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hqr/error.hpp"

namespace hqr {

SigmaVector::SigmaVector(Vector values, const Potential& p) : values_(std::move(values)) {
  const SigmaDomain d = p.sigma_domain();
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!d.contains(values_[i])) {
      throw DomainError("sigma[" + std::to_string(i) + "] = " + std::to_string(values_[i]) +
                        " lies outside the sigma domain of '" + std::string(p.id()) + "'");
    }
  }
}

ImplicitConcaveInstance::ImplicitConcaveInstance(ReconstructionProblem problem)
    : problem_(std::move(problem)) {
  if (!(problem_.beta > 0.0) || !std::isfinite(problem_.beta)) {
    throw ConfigError("beta must be positive and finite");
  }
  if (problem_.b.size() != problem_.A.out_dim()) {
    throw DimensionError("b has length " + std::to_string(problem_.b.size()) +
                         " but A has " + std::to_string(problem_.A.out_dim()) + " rows");
  }
  if (!all_finite(problem_.b)) throw ConfigError("b has non-finite entries");
  if (problem_.G.empty()) throw DimensionError("at least one regularization operator is needed");
  s_ = problem_.G.front().out_dim();
  for (std::size_t i = 0; i < problem_.G.size(); ++i) {
    const auto& g = problem_.G[i];
    if (g.in_dim() != n()) {
      throw DimensionError("G[" + std::to_string(i) + "] has input dimension " +
                           std::to_string(g.in_dim()) + ", expected " + std::to_string(n()));
    }
    if (g.out_dim() != s_) {
      throw DimensionError("all G_i must share one output dimension");
    }
  }
}

void ImplicitConcaveInstance::check_x(std::size_t size) const {
  if (size != n()) {
    throw DimensionError("x has length " + std::to_string(size) + ", expected " +
                         std::to_string(n()));
  }
}

void ImplicitConcaveInstance::check_sigma(const SigmaVector& sigma) const {
  if (sigma.size() != m()) {
    throw DimensionError("sigma has length " + std::to_string(sigma.size()) + ", expected " +
                         std::to_string(m()));
  }
}

Vector ImplicitConcaveInstance::phi(std::span<const double> x) const {
  check_x(x.size());
  Vector out(m());
  Vector g(s_);
  for (std::size_t i = 0; i < m(); ++i) {
    problem_.G[i].apply_into(x, g);
    out[i] = squared_norm(g);
  }
  return out;
}

Vector ImplicitConcaveInstance::residual(std::span<const double> x) const {
  Vector r = problem_.A.apply(x);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= problem_.b[i];
  return r;
}

double ImplicitConcaveInstance::data_term(std::span<const double> x) const {
  check_x(x.size());
  return squared_norm(residual(x));
}

double ImplicitConcaveInstance::f_value(std::span<const double> x) const {
  const double data = data_term(x);
  double reg = 0.0;
  for (double y : phi(x)) reg += potential().v(y);
  return data + beta() * reg;
}

double ImplicitConcaveInstance::augmented_value(std::span<const double> x,
                                                const SigmaVector& sigma) const {
  check_sigma(sigma);
  const double data = data_term(x);
  const Vector y = phi(x);
  double reg = 0.0;
  for (std::size_t i = 0; i < m(); ++i) reg += sigma[i] * y[i] - potential().v_conj(sigma[i]);
  return data + beta() * reg;
}

SigmaVector ImplicitConcaveInstance::sigma_update(std::span<const double> x) const {
  Vector y = phi(x);
  for (double& v : y) v = potential().weight_from_square(v);
  return SigmaVector(std::move(y), potential());
}

Vector ImplicitConcaveInstance::weighted_gradient(std::span<const double> x,
                                                  std::span<const double> weights) const {
  const Vector r = residual(x);
  Vector grad(n(), 0.0);
  problem_.A.adjoint_accumulate(r, grad, 2.0);
  Vector g(s_);
  for (std::size_t i = 0; i < m(); ++i) {
    if (weights[i] == 0.0) continue;
    problem_.G[i].apply_into(x, g);
    problem_.G[i].adjoint_accumulate(g, grad, 2.0 * beta() * weights[i]);
  }
  return grad;
}

Vector ImplicitConcaveInstance::f_grad(std::span<const double> x) const {
  Vector w = phi(x);
  for (double& v : w) v = potential().weight_from_square(v);
  return weighted_gradient(x, w);
}

AugmentedGradient ImplicitConcaveInstance::augmented_grad(std::span<const double> x,
                                                          const SigmaVector& sigma) const {
  check_sigma(sigma);
  AugmentedGradient out;
  out.x = weighted_gradient(x, sigma.values());
  out.sigma = phi(x);
  for (std::size_t i = 0; i < m(); ++i) {
    out.sigma[i] = beta() * (out.sigma[i] - potential().v_conj_grad(sigma[i]));
  }
  return out;
}

StationarityReport ImplicitConcaveInstance::stationarity_report(std::span<const double> x,
                                                                const SigmaVector& sigma,
                                                                double tol) const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  StationarityReport r;
  r.tol = tol;
  r.grad_f_inf = r.grad_x_inf = r.grad_sigma_inf = r.value_gap = inf;
  r.f = r.L = std::numeric_limits<double>::quiet_NaN();
  try {
    r.grad_f_inf = norm_inf(f_grad(x));
  } catch (const Error&) {
  }
  try {
    r.grad_x_inf = norm_inf(weighted_gradient(x, sigma.values()));
    const AugmentedGradient g = augmented_grad(x, sigma);
    // Projected: a sigma held at an edge of D only violates stationarity
    // when the gradient points out of D.
    const SigmaDomain dom = problem_.potential.sigma_domain();
    double worst = 0.0;
    for (std::size_t i = 0; i < g.sigma.size(); ++i) {
      double gi = g.sigma[i];
      if (sigma[i] == dom.lo) gi = std::min(gi, 0.0);
      if (sigma[i] == dom.hi) gi = std::max(gi, 0.0);
      worst = std::max(worst, std::abs(gi));
    }
    r.grad_sigma_inf = worst;
  } catch (const Error&) {
  }
  try {
    r.f = f_value(x);
    r.L = augmented_value(x, sigma);
    r.value_gap = std::abs(r.f - r.L);
  } catch (const Error&) {
  }
  auto ok = [tol](double v) { return std::isfinite(v) && v <= tol; };
  r.correspondence_ok =
      ok(r.grad_f_inf) && ok(r.grad_x_inf) && ok(r.grad_sigma_inf) && ok(r.value_gap);
  return r;
}

void ImplicitConcaveInstance::normal_apply(std::span<const double> weights, double mu,
                                           std::span<const double> x,
                                           std::span<double> out) const {
  check_x(x.size());
  std::fill(out.begin(), out.end(), 0.0);
  const Vector ax = problem_.A.apply(x);
  problem_.A.adjoint_accumulate(ax, out, 1.0);
  Vector g(s_);
  for (std::size_t i = 0; i < m(); ++i) {
    if (weights[i] == 0.0) continue;
    problem_.G[i].apply_into(x, g);
    problem_.G[i].adjoint_accumulate(g, out, beta() * weights[i]);
  }
  if (mu != 0.0) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += mu * x[i];
  }
}

Vector ImplicitConcaveInstance::normal_rhs() const {
  return problem_.A.apply_adjoint(problem_.b);
}

}  // namespace hqr
