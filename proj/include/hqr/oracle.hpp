#ifndef HQR_ORACLE_HPP
#define HQR_ORACLE_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hqr/icf.hpp"
#include "hqr/potential.hpp"
#include "hqr/vector.hpp"

// Independent numerical ground truth. Nothing here calls the analytic
// gradients, conjugates or Hessians it is used to check.
namespace hqr::oracle {

using ScalarField = std::function<double(std::span<const double>)>;

/// Row-major dense square or rectangular matrix.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vector data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  /// Maximum absolute row sum.
  double norm_inf() const;
};

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h. NumericalError on
/// non-finite evaluations.
Vector fd_gradient(const ScalarField& func, std::span<const double> x, double h);

enum class Stencil { Central, Forward, Backward };

/// Second-order difference Hessian, symmetrised as (H + H^T) / 2.
DenseMatrix numeric_hessian(const ScalarField& func, std::span<const double> x, double h);

/// Per-coordinate steps and stencils; one-sided stencils keep evaluations
/// on one side of x_i (used at the boundary of a domain).
DenseMatrix numeric_hessian(const ScalarField& func, std::span<const double> x,
                            std::span<const double> steps, std::span<const Stencil> stencils);

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending. ConfigError if M is not symmetric to 1e-8.
Vector symmetric_eigenvalues(const DenseMatrix& m);
double min_eigenvalue(const DenseMatrix& m);

/// inf_{0 <= y <= y_max} (y sigma - V(y)) by a uniform grid of `steps`
/// intervals followed by golden-section refinement around the best node.
double conjugate_by_grid(const Potential& p, double sigma, double y_max, std::size_t steps);

/// V''(y) by differencing V'. Forward differences near y = 0.
double v_second_derivative(const Potential& p, double y);

struct HessianReport {
  double min_eig_f = 0.0;
  double min_eig_L = 0.0;
  double norm_f = 0.0;  // ||H_f||_inf
  double norm_L = 0.0;
  bool psd_f = false;
  bool psd_L = false;
  bool vgrad_hessian_nonsingular = false;
  /// Whether psd_f == psd_L was asserted (only with a nonsingular V'').
  bool equivalence_checked = false;
  bool equivalence_ok = true;
};

/// Second-order comparison of f at x_star and L at (x_star, sigma_star)
/// using numeric Hessians. Requires stationarity at `tol` and n + m <= 64
/// (PreconditionError otherwise).
HessianReport hessian_correspondence_check(const ImplicitConcaveInstance& inst,
                                           std::span<const double> x_star,
                                           const SigmaVector& sigma_star, double tol);

}  // namespace hqr::oracle

#endif  // HQR_ORACLE_HPP
