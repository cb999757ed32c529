#include "hqr/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hqr/error.hpp"

namespace hqr::oracle {

double DenseMatrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < cols; ++j) s += std::abs((*this)(i, j));
    best = std::max(best, s);
  }
  return best;
}

namespace {

double eval(const ScalarField& func, std::span<const double> x) {
  const double v = func(x);
  if (!std::isfinite(v)) throw NumericalError("oracle: non-finite function evaluation");
  return v;
}

}  // namespace

Vector fd_gradient(const ScalarField& func, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw ConfigError("fd_gradient: step must be positive");
  Vector g(x.size());
  Vector p(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    p[i] = x[i] + h;
    const double fp = eval(func, p);
    p[i] = x[i] - h;
    const double fm = eval(func, p);
    p[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

DenseMatrix numeric_hessian(const ScalarField& func, std::span<const double> x, double h) {
  const Vector steps(x.size(), h);
  const std::vector<Stencil> stencils(x.size(), Stencil::Central);
  return numeric_hessian(func, x, steps, stencils);
}

DenseMatrix numeric_hessian(const ScalarField& func, std::span<const double> x,
                            std::span<const double> steps, std::span<const Stencil> stencils) {
  const std::size_t n = x.size();
  if (steps.size() != n || stencils.size() != n) {
    throw DimensionError("numeric_hessian: one step and stencil per coordinate");
  }
  for (double h : steps) {
    if (!(h > 0.0)) throw ConfigError("numeric_hessian: steps must be positive");
  }

  // Signed offsets per coordinate: central uses {-h, +h}; one-sided uses
  // {0, s h} with s the stencil direction.
  Vector p(x.begin(), x.end());
  auto at = [&](std::size_t i, double di, std::size_t j, double dj) {
    p[i] += di;
    p[j] += dj;
    const double v = eval(func, p);
    p[i] = x[i];
    p[j] = x[j];
    return v;
  };
  auto signed_step = [&](std::size_t i) {
    return stencils[i] == Stencil::Backward ? -steps[i] : steps[i];
  };

  const double f0 = eval(func, p);
  DenseMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = signed_step(i);
    if (stencils[i] == Stencil::Central) {
      h(i, i) = (at(i, hi, i, 0.0) - 2.0 * f0 + at(i, -hi, i, 0.0)) / (hi * hi);
    } else {
      h(i, i) = (f0 - 2.0 * at(i, hi, i, 0.0) + at(i, 2.0 * hi, i, 0.0)) / (hi * hi);
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const double hj = signed_step(j);
      const bool ci = stencils[i] == Stencil::Central;
      const bool cj = stencils[j] == Stencil::Central;
      double v = 0.0;
      if (ci && cj) {
        v = (at(i, hi, j, hj) - at(i, hi, j, -hj) - at(i, -hi, j, hj) + at(i, -hi, j, -hj)) /
            (4.0 * hi * hj);
      } else if (ci) {
        v = (at(i, hi, j, hj) - at(i, -hi, j, hj) - at(i, hi, j, 0.0) + at(i, -hi, j, 0.0)) /
            (2.0 * hi * hj);
      } else if (cj) {
        v = (at(i, hi, j, hj) - at(i, hi, j, -hj) - at(i, 0.0, j, hj) + at(i, 0.0, j, -hj)) /
            (2.0 * hi * hj);
      } else {
        v = (at(i, hi, j, hj) - at(i, hi, j, 0.0) - at(i, 0.0, j, hj) + f0) / (hi * hj);
      }
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

Vector symmetric_eigenvalues(const DenseMatrix& m) {
  if (m.rows != m.cols) throw ConfigError("eigenvalues: matrix must be square");
  const std::size_t n = m.rows;
  double scale = 0.0;
  for (double v : m.data) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-8 * (1.0 + scale)) {
        throw ConfigError("eigenvalues: matrix is not symmetric");
      }
    }
  }

  DenseMatrix a = m;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (m(i, j) + m(j, i));
  }
  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) s += a(i, j) * a(i, j);
      }
    }
    return std::sqrt(s);
  };
  double frob = 0.0;
  for (double v : a.data) frob += v * v;
  const double target = std::max(1e-10, 1e-15 * std::sqrt(frob));

  for (int sweep = 0; sweep < 100 && off_norm() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  Vector eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

double min_eigenvalue(const DenseMatrix& m) {
  if (m.rows == 0) throw ConfigError("min_eigenvalue: empty matrix");
  return symmetric_eigenvalues(m).front();
}

double conjugate_by_grid(const Potential& p, double sigma, double y_max, std::size_t steps) {
  if (!p.sigma_domain().contains(sigma)) {
    throw DomainError("conjugate_by_grid: sigma " + std::to_string(sigma) +
                      " outside the sigma domain of '" + std::string(p.id()) + "'");
  }
  if (!(y_max > 0.0)) throw ConfigError("conjugate_by_grid: y_max must be positive");
  if (steps < 1000) throw ConfigError("conjugate_by_grid: needs at least 1000 steps");

  auto objective = [&](double y) {
    try {
      return y * sigma - p.v(y);
    } catch (const DomainError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  const double dy = y_max / static_cast<double>(steps);
  std::size_t best = 0;
  double best_val = objective(0.0);
  for (std::size_t j = 1; j <= steps; ++j) {
    const double v = objective(static_cast<double>(j) * dy);
    if (v < best_val) {
      best_val = v;
      best = j;
    }
  }

  double lo = best == 0 ? 0.0 : static_cast<double>(best - 1) * dy;
  double hi = std::min(y_max, static_cast<double>(best + 1) * dy);
  constexpr double kInvPhi = 0.6180339887498949;
  double a = hi - kInvPhi * (hi - lo);
  double b = lo + kInvPhi * (hi - lo);
  double fa = objective(a);
  double fb = objective(b);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - kInvPhi * (hi - lo);
      fa = objective(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + kInvPhi * (hi - lo);
      fb = objective(b);
    }
  }
  return std::min({best_val, fa, fb});
}

double v_second_derivative(const Potential& p, double y) {
  const double h = 1e-6 * (1.0 + std::abs(y));
  if (y >= h) return (p.v_grad(y + h) - p.v_grad(y - h)) / (2.0 * h);
  return (p.v_grad(y + h) - p.v_grad(y)) / h;
}

HessianReport hessian_correspondence_check(const ImplicitConcaveInstance& inst,
                                           std::span<const double> x_star,
                                           const SigmaVector& sigma_star, double tol) {
  const std::size_t n = inst.n();
  const std::size_t m = inst.m();
  if (n + m > 64) {
    throw PreconditionError("hessian check limited to n + m <= 64, got " + std::to_string(n + m));
  }
  const StationarityReport st = inst.stationarity_report(x_star, sigma_star, tol);
  if (!st.correspondence_ok) {
    throw PreconditionError("hessian check needs a stationary pair (grad f = " +
                            std::to_string(st.grad_f_inf) + ")");
  }

  HessianReport rep;
  const double h = 1e-4 * (1.0 + norm_inf(x_star));

  const ScalarField f = [&](std::span<const double> x) { return inst.f_value(x); };
  const DenseMatrix hf = numeric_hessian(f, x_star, h);

  // L over z = (x, sigma). Sigma coordinates near the edge of the domain
  // use shorter or one-sided steps so every evaluation stays inside it.
  const SigmaDomain dom = inst.potential().sigma_domain();
  Vector z(x_star.begin(), x_star.end());
  z.insert(z.end(), sigma_star.values().begin(), sigma_star.values().end());
  Vector steps(n + m, h);
  std::vector<Stencil> stencils(n + m, Stencil::Central);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = sigma_star[i];
    const double room_lo = s - dom.lo;
    const double room_hi = dom.hi - s;
    double step = h;
    if (room_lo >= 2.0 * step && room_hi >= 2.0 * step) {
      // central fits
    } else if (std::min(room_lo, room_hi) >= 1e-3 * h) {
      step = 0.5 * std::min(room_lo, room_hi);
    } else {
      stencils[n + i] = room_hi > room_lo ? Stencil::Forward : Stencil::Backward;
      step = std::min(h, 0.25 * std::max(room_lo, room_hi));
    }
    steps[n + i] = step;
  }
  const ScalarField L = [&](std::span<const double> zz) {
    const Vector sig(zz.begin() + static_cast<std::ptrdiff_t>(n), zz.end());
    return inst.augmented_value(zz.first(n), SigmaVector(sig, inst.potential()));
  };
  const DenseMatrix hl = numeric_hessian(L, z, steps, stencils);

  rep.norm_f = hf.norm_inf();
  rep.norm_L = hl.norm_inf();
  rep.min_eig_f = min_eigenvalue(hf);
  rep.min_eig_L = min_eigenvalue(hl);
  rep.psd_f = rep.min_eig_f >= -1e-6 * (1.0 + rep.norm_f);
  rep.psd_L = rep.min_eig_L >= -1e-6 * (1.0 + rep.norm_L);

  rep.vgrad_hessian_nonsingular = true;
  for (double y : inst.phi(x_star)) {
    if (!(std::abs(v_second_derivative(inst.potential(), y)) >= 1e-8)) {
      rep.vgrad_hessian_nonsingular = false;
    }
  }
  rep.equivalence_checked = rep.vgrad_hessian_nonsingular;
  rep.equivalence_ok = !rep.equivalence_checked || rep.psd_f == rep.psd_L;
  return rep;
}

}  // namespace hqr::oracle
