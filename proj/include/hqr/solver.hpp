#ifndef HQR_SOLVER_HPP
#define HQR_SOLVER_HPP

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hqr/error.hpp"
#include "hqr/icf.hpp"
#include "hqr/vector.hpp"

namespace hqr {

enum class InitMode { FromObservation, FromAdjoint, Zero, Given };

/// Called after every sigma-step with the iterate x the step was computed
/// from and the resulting sigma (so sigma == sigma_update(x)).
using IterationObserver =
    std::function<void(std::size_t iter, std::span<const double> x, const SigmaVector& sigma)>;

struct SolverConfig {
  std::size_t max_outer_iters = 200;
  double outer_tol_rel_obj = 1e-8;  // |L_k - L_{k-1}| <= tol (1 + |L_k|)
  double outer_tol_rel_x = 1e-6;    // ||x_k - x_{k-1}|| <= tol (1 + ||x_k||)
  double cg_tol = 1e-10;            // relative residual of the x-step
  std::size_t cg_max_iters = 0;     // 0 selects 10 n
  double tikhonov_mu = 0.0;
  /// Unset: x0 = b when A is the identity, x0 = A^T b otherwise.
  std::optional<InitMode> init_mode;
  Vector x0;  // read when init_mode == Given
  IterationObserver observer;

  /// Throws ConfigError on non-positive tolerances or zero iteration caps.
  void validate() const;
  std::size_t effective_cg_max_iters(std::size_t n) const;
};

/// One outer iteration k. The pair (x_k, sigma_k) has sigma_k computed from
/// x_{k-1}; row 0 holds the initial point with its own sigma update.
struct TraceRow {
  std::size_t iter = 0;
  double f = 0.0;              // f(x_k)
  double L = 0.0;              // L(x_k, sigma_k)
  double grad_inf = 0.0;       // ||grad f(x_k)||_inf
  double dx = 0.0;             // ||x_k - x_{k-1}||
  std::size_t cg_iters = 0;
  double L_after_sigma = 0.0;  // L(x_{k-1}, sigma_k), equal to f(x_{k-1})
};

struct SolverTrace {
  std::vector<TraceRow> rows;
};

struct SolveResult {
  Vector x;
  SigmaVector sigma;  // sigma_update(x): the returned pair satisfies f = L
  SolverTrace trace;
  bool converged = false;
};

/// Iteration budget exhausted. Carries the last iterate and its trace when
/// raised by solve(); a bare CG failure carries nothing.
class NotConverged : public Error {
 public:
  explicit NotConverged(const std::string& what, std::shared_ptr<const SolveResult> partial = {})
      : Error(ErrorKind::NotConverged, what), partial_(std::move(partial)) {}

  const SolveResult* partial() const noexcept { return partial_.get(); }

 private:
  std::shared_ptr<const SolveResult> partial_;
};

using MatVec = std::function<void(std::span<const double>, std::span<double>)>;

struct CgResult {
  Vector x;
  std::size_t iters = 0;
  double residual = 0.0;  // ||rhs - M x|| / ||rhs|| (absolute when rhs = 0)
  bool converged = false;
};

/// Conjugate gradient for a symmetric positive semidefinite matvec. Stops
/// once the relative residual is <= tol or after max_iters iterations.
/// Throws NumericalError on negative curvature <p, M p> < -1e-12 ||p||^2.
CgResult cg(const MatVec& matvec, std::span<const double> rhs, std::span<const double> x0,
            double tol, std::size_t max_iters);

/// Closed-form sigma block minimiser; identical to sigma_update.
SigmaVector sigma_step(const ImplicitConcaveInstance& inst, std::span<const double> x);

struct XStepResult {
  Vector x;
  std::size_t cg_iters = 0;
};

/// Minimises L(., sigma) by CG on
///   (A^T A + beta sum_i sigma_i G_i^T G_i + mu I) x = A^T b
/// warm-started at x_warm. Throws NotConverged if CG runs out of iterations.
XStepResult x_step(const ImplicitConcaveInstance& inst, const SigmaVector& sigma,
                   std::span<const double> x_warm, const SolverConfig& cfg);

/// Half-quadratic block coordinate descent: alternate sigma_step and x_step
/// until both relative stopping criteria hold. Throws NotConverged (with the
/// partial result) when max_outer_iters is exhausted and NumericalError on
/// non-finite iterates.
SolveResult solve(const ImplicitConcaveInstance& inst, const SolverConfig& cfg);

}  // namespace hqr

#endif  // HQR_SOLVER_HPP
