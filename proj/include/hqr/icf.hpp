#ifndef HQR_ICF_HPP
#define HQR_ICF_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "hqr/linops.hpp"
#include "hqr/potential.hpp"
#include "hqr/vector.hpp"

namespace hqr {

/// Data of the edge-preserving reconstruction problem
///   f(x) = ||A x - b||^2 + beta * sum_i psi(||G_i x||).
struct ReconstructionProblem {
  LinearOperator A;
  Vector b;
  std::vector<LinearOperator> G;
  double beta;
  Potential potential;
};

/// Augmented variables sigma, one per regularization operator. Entries are
/// validated against the potential's sigma domain on construction, which
/// also guarantees sigma >= 0.
class SigmaVector {
 public:
  SigmaVector() = default;
  /// Throws DomainError if any entry lies outside p.sigma_domain().
  SigmaVector(Vector values, const Potential& p);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  Vector values_;
};

struct AugmentedGradient {
  Vector x;      // 2 A^T (A x - b) + 2 beta sum_i sigma_i G_i^T G_i x
  Vector sigma;  // beta (||G_i x||^2 - (V*)'(sigma_i))
};

struct StationarityReport {
  double grad_f_inf = 0.0;
  double grad_x_inf = 0.0;
  double grad_sigma_inf = 0.0;  // projected onto D at its edges
  double value_gap = 0.0;  // |f(x) - L(x, sigma)|
  double f = 0.0;
  double L = 0.0;
  double tol = 0.0;
  bool correspondence_ok = false;
};

inline constexpr double kDefaultStationarityTol = 1e-5;

/// f(x) = V(Phi(x)) specialised to Phi_i(x) = ||G_i x||^2, with its
/// augmented function
///   L(x, sigma) = ||A x - b||^2 + beta * sum_i (sigma_i ||G_i x||^2 - V*(sigma_i)).
///
/// Immutable after construction; every member is a pure function of its
/// arguments.
class ImplicitConcaveInstance {
 public:
  /// Validates beta > 0, |b| == rows(A), a common input dimension n and a
  /// common output dimension s across the G_i. Throws ConfigError or
  /// DimensionError.
  explicit ImplicitConcaveInstance(ReconstructionProblem problem);

  const ReconstructionProblem& problem() const noexcept { return problem_; }
  const Potential& potential() const noexcept { return problem_.potential; }
  double beta() const noexcept { return problem_.beta; }
  std::size_t n() const noexcept { return problem_.A.in_dim(); }
  std::size_t m() const noexcept { return problem_.G.size(); }
  std::size_t s() const noexcept { return s_; }

  /// Phi_i(x) = ||G_i x||^2 for every i.
  Vector phi(std::span<const double> x) const;
  double data_term(std::span<const double> x) const;

  double f_value(std::span<const double> x) const;
  double augmented_value(std::span<const double> x, const SigmaVector& sigma) const;

  /// sigma_i = V'(||G_i x||^2), the exact minimiser of L(x, .).
  SigmaVector sigma_update(std::span<const double> x) const;

  Vector f_grad(std::span<const double> x) const;
  AugmentedGradient augmented_grad(std::span<const double> x, const SigmaVector& sigma) const;

  /// Never throws on numerical trouble: quantities that cannot be evaluated
  /// are reported as +inf and fail the check.
  StationarityReport stationarity_report(std::span<const double> x, const SigmaVector& sigma,
                                         double tol = kDefaultStationarityTol) const;

  /// out = (A^T A + beta sum_i w_i G_i^T G_i + mu I) x, the Hessian of the
  /// x-subproblem divided by two.
  void normal_apply(std::span<const double> weights, double mu, std::span<const double> x,
                    std::span<double> out) const;
  /// A^T b
  Vector normal_rhs() const;

 private:
  void check_x(std::size_t size) const;
  void check_sigma(const SigmaVector& sigma) const;
  Vector residual(std::span<const double> x) const;  // A x - b
  /// 2 A^T (A x - b) + 2 beta sum_i w_i G_i^T G_i x
  Vector weighted_gradient(std::span<const double> x, std::span<const double> weights) const;

  ReconstructionProblem problem_;
  std::size_t s_ = 0;
};

}  // namespace hqr

#endif  // HQR_ICF_HPP
