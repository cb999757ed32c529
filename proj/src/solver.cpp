#include "hqr/solver.hpp"

#include <cmath>
#include <string>

namespace hqr {

void SolverConfig::validate() const {
  if (max_outer_iters == 0) throw ConfigError("max_outer_iters must be >= 1");
  if (!(outer_tol_rel_obj > 0.0)) throw ConfigError("outer_tol_rel_obj must be > 0");
  if (!(outer_tol_rel_x > 0.0)) throw ConfigError("outer_tol_rel_x must be > 0");
  if (!(cg_tol > 0.0)) throw ConfigError("cg_tol must be > 0");
  if (!(tikhonov_mu >= 0.0) || !std::isfinite(tikhonov_mu)) {
    throw ConfigError("tikhonov_mu must be a nonnegative finite number");
  }
}

std::size_t SolverConfig::effective_cg_max_iters(std::size_t n) const {
  return cg_max_iters == 0 ? 10 * n : cg_max_iters;
}

namespace {

// Plain CG from x; returns the recurrence residual norm.
double cg_pass(const MatVec& matvec, std::span<const double> rhs, Vector& x, double target,
               std::size_t max_iters, std::size_t& iters) {
  const std::size_t n = rhs.size();
  Vector r(n), p(n), mp(n);
  matvec(x, mp);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - mp[i];
  double rr = squared_norm(r);
  p = r;
  while (std::sqrt(rr) > target && iters < max_iters) {
    matvec(p, mp);
    const double curvature = dot(p, mp);
    const double pp = squared_norm(p);
    if (curvature < -1e-12 * pp) {
      throw NumericalError("conjugate gradient met negative curvature " +
                           std::to_string(curvature) + "; the system is not PSD");
    }
    if (!(curvature > 0.0)) break;  // stagnation on a null direction
    const double alpha = rr / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * mp[i];
    }
    const double rr_new = squared_norm(r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    ++iters;
  }
  return std::sqrt(rr);
}

}  // namespace

CgResult cg(const MatVec& matvec, std::span<const double> rhs, std::span<const double> x0,
            double tol, std::size_t max_iters) {
  if (x0.size() != rhs.size()) throw DimensionError("cg: x0 and rhs lengths differ");
  const double rhs_norm = norm(rhs);
  const double scale = rhs_norm > 0.0 ? rhs_norm : 1.0;
  const double target = tol * scale;

  CgResult out;
  out.x.assign(x0.begin(), x0.end());
  Vector mx(rhs.size());
  // The recurrence residual drifts from the true one; a couple of restarts
  // from the current iterate close the gap.
  for (int restart = 0; restart < 4; ++restart) {
    cg_pass(matvec, rhs, out.x, target, max_iters, out.iters);
    matvec(out.x, mx);
    double true_rr = 0.0;
    for (std::size_t i = 0; i < rhs.size(); ++i) {
      const double d = rhs[i] - mx[i];
      true_rr += d * d;
    }
    out.residual = std::sqrt(true_rr) / scale;
    if (!std::isfinite(out.residual)) throw NumericalError("conjugate gradient diverged");
    out.converged = out.residual <= tol;
    if (out.converged || out.iters >= max_iters) break;
  }
  return out;
}

SigmaVector sigma_step(const ImplicitConcaveInstance& inst, std::span<const double> x) {
  return inst.sigma_update(x);
}

XStepResult x_step(const ImplicitConcaveInstance& inst, const SigmaVector& sigma,
                   std::span<const double> x_warm, const SolverConfig& cfg) {
  if (sigma.size() != inst.m()) throw DimensionError("x_step: sigma has the wrong length");
  if (x_warm.size() != inst.n()) throw DimensionError("x_step: warm start has the wrong length");
  const auto weights = sigma.values();
  const double mu = cfg.tikhonov_mu;
  MatVec matvec = [&](std::span<const double> in, std::span<double> out) {
    inst.normal_apply(weights, mu, in, out);
  };
  const Vector rhs = inst.normal_rhs();
  CgResult res = cg(matvec, rhs, x_warm, cfg.cg_tol, cfg.effective_cg_max_iters(inst.n()));
  if (!res.converged) {
    throw NotConverged("x-step conjugate gradient stopped at relative residual " +
                       std::to_string(res.residual) + " after " + std::to_string(res.iters) +
                       " iterations");
  }
  return {std::move(res.x), res.iters};
}

namespace {

Vector initial_point(const ImplicitConcaveInstance& inst, const SolverConfig& cfg) {
  const auto& prob = inst.problem();
  const InitMode mode = cfg.init_mode.value_or(prob.A.is_identity() ? InitMode::FromObservation
                                                                     : InitMode::FromAdjoint);
  switch (mode) {
    case InitMode::FromObservation:
      if (prob.b.size() != inst.n()) {
        throw ConfigError("initialisation from the observation needs a square system");
      }
      return prob.b;
    case InitMode::FromAdjoint:
      return inst.normal_rhs();
    case InitMode::Zero:
      return Vector(inst.n(), 0.0);
    case InitMode::Given:
      if (cfg.x0.size() != inst.n()) throw DimensionError("given x0 has the wrong length");
      return cfg.x0;
  }
  return Vector(inst.n(), 0.0);
}

void require_finite(double v, const char* what, std::size_t iter) {
  if (!std::isfinite(v)) {
    throw NumericalError(std::string("non-finite ") + what + " at outer iteration " +
                         std::to_string(iter));
  }
}

}  // namespace

SolveResult solve(const ImplicitConcaveInstance& inst, const SolverConfig& cfg) {
  cfg.validate();
  SolveResult res;
  res.x = initial_point(inst, cfg);
  if (!all_finite(res.x)) throw NumericalError("initial point has non-finite entries");

  // A LogSquare iterate can fall below the epsilon guard; that is a
  // numerical breakdown of the iteration rather than a caller error.
  auto guarded = [](auto&& fn) {
    try {
      return fn();
    } catch (const DomainError& e) {
      throw NumericalError(std::string("iterate left the potential's domain: ") + e.what());
    }
  };

  auto observe = [&](std::size_t k, const SigmaVector& sig) {
    if (cfg.observer) cfg.observer(k, res.x, sig);
  };

  SigmaVector sigma = guarded([&] { return sigma_step(inst, res.x); });
  observe(0, sigma);
  {
    TraceRow row;
    row.f = guarded([&] { return inst.f_value(res.x); });
    row.L = guarded([&] { return inst.augmented_value(res.x, sigma); });
    row.grad_inf = guarded([&] { return norm_inf(inst.f_grad(res.x)); });
    row.L_after_sigma = row.L;
    require_finite(row.f, "objective", 0);
    require_finite(row.L, "augmented objective", 0);
    res.trace.rows.push_back(row);
  }

  auto finish = [&] {
    res.sigma = guarded([&] { return sigma_step(inst, res.x); });
    observe(res.trace.rows.back().iter + 1, res.sigma);
  };

  for (std::size_t k = 1; k <= cfg.max_outer_iters; ++k) {
    TraceRow row;
    row.iter = k;
    if (k > 1) {
      sigma = guarded([&] { return sigma_step(inst, res.x); });
      observe(k, sigma);
    }
    row.L_after_sigma = guarded([&] { return inst.augmented_value(res.x, sigma); });

    XStepResult xs;
    try {
      xs = x_step(inst, sigma, res.x, cfg);
    } catch (const NotConverged& e) {
      finish();
      throw NotConverged(e.what(), std::make_shared<const SolveResult>(res));
    }
    if (!all_finite(xs.x)) throw NumericalError("non-finite x at outer iteration " + std::to_string(k));

    row.dx = distance(xs.x, res.x);
    row.cg_iters = xs.cg_iters;
    res.x = std::move(xs.x);
    row.f = guarded([&] { return inst.f_value(res.x); });
    row.L = guarded([&] { return inst.augmented_value(res.x, sigma); });
    row.grad_inf = guarded([&] { return norm_inf(inst.f_grad(res.x)); });
    require_finite(row.f, "objective", k);
    require_finite(row.L, "augmented objective", k);
    require_finite(row.grad_inf, "gradient", k);

    const double L_prev = res.trace.rows.back().L;
    res.trace.rows.push_back(row);

    const bool obj_ok = std::abs(row.L - L_prev) <= cfg.outer_tol_rel_obj * (1.0 + std::abs(row.L));
    const bool x_ok = row.dx <= cfg.outer_tol_rel_x * (1.0 + norm(res.x));
    if (obj_ok && x_ok) {
      res.converged = true;
      finish();
      return res;
    }
  }

  finish();
  throw NotConverged("no convergence within " + std::to_string(cfg.max_outer_iters) +
                         " outer iterations",
                     std::make_shared<const SolveResult>(res));
}

}  // namespace hqr
