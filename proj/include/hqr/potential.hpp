#ifndef HQR_POTENTIAL_HPP
#define HQR_POTENTIAL_HPP

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <utility>

namespace hqr {

/// The four edge-preserving potentials of the catalog.
enum class PotentialKind {
  ExpSquare,     // psi(t) = 1 - exp(-t^2)
  GemanMcClure,  // psi(t) = t^2 / (1 + t^2)
  LogSquare,     // psi(t) = log(t^2)
  SineClip,      // psi(t) = sin(t^2) for t^2 <= pi/2, 1 beyond
};

/// Set of admissible augmented variables: the closure of the range of the
/// concave lift's derivative over y >= 0.
struct SigmaDomain {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = true;
  bool hi_closed = true;

  bool contains(double sigma) const noexcept;
  bool interior(double sigma) const noexcept;
};

inline constexpr double kDefaultLogEpsilon = 1e-8;

/// An edge-preserving potential psi(t) = V(t^2) together with its concave
/// lift V, the derivative of V, the concave conjugate
///   V*(sigma) = inf_{y >= 0} (y * sigma - V(y))
/// and the half-quadratic weight psi'(t) / (2t) = V'(t^2).
///
/// LogSquare is not bounded below at the origin. Its arguments are floored
/// at log_epsilon before V and V' are evaluated, so V' is capped at
/// 1 / log_epsilon; weight() refuses t^2 below the floor.
///
/// Values are immutable after construction.
class Potential {
 public:
  explicit Potential(PotentialKind kind, double log_epsilon = kDefaultLogEpsilon);

  /// Lowercase id: "exp", "geman-mcclure", "log", "sine". Throws ConfigError
  /// on unknown ids.
  static Potential from_id(std::string_view id, double log_epsilon = kDefaultLogEpsilon);

  PotentialKind kind() const noexcept { return kind_; }
  std::string_view id() const noexcept;
  double log_epsilon() const noexcept { return log_epsilon_; }

  /// lim_{t -> 0+} psi'(t) / (2t). Infinite for LogSquare.
  double zero_limit_weight() const noexcept;
  SigmaDomain sigma_domain() const noexcept;

  double psi(double t) const;
  double v(double y) const;
  double v_grad(double y) const;
  double v_conj(double sigma) const;

  /// Derivative of V*, i.e. the y >= 0 with V'(y) = sigma. On the boundary
  /// sigma = 0 of SineClip this is the attaining y = pi/2; for ExpSquare and
  /// GemanMcClure sigma = 0 has no finite preimage and throws DomainError.
  double v_conj_grad(double sigma) const;

  /// psi'(t) / (2t) for t >= 0, with the analytic limit at t = 0.
  double weight(double t) const;

  /// weight() expressed in y = t^2, the form the solver uses to avoid a
  /// square root round trip.
  double weight_from_square(double y) const;

 private:
  PotentialKind kind_;
  double log_epsilon_;
};

/// Numeric evaluation of the regularity and edge-preserving assumptions
/// on a sample grid.
struct AssumptionReport {
  bool psi_nonnegative = false;      // psi(t) >= 0
  bool psi_zero_at_origin = false;   // psi(0) = 0
  bool psi_symmetric = false;        // psi(t) = psi(-t)
  bool psi_c1 = false;               // psi' matches 2 t weight(t)
  bool derivative_nonnegative = false;
  bool weight_decreasing = false;    // strictly where positive, never increasing
  bool weight_vanishes = false;      // weight(100) < 1e-3
  bool zero_limit_finite = false;    // 0 < M < inf and weight(t) -> M

  static constexpr std::size_t kClauseCount = 8;
  std::array<std::pair<const char*, bool>, kClauseCount> clauses() const;
  bool all_pass() const;
};

/// t_grid must be sorted, strictly positive and hold at least 10 points
/// (ConfigError otherwise). Failures are reported, not thrown.
AssumptionReport check_assumptions(const Potential& p, std::span<const double> t_grid);

}  // namespace hqr

#endif  // HQR_POTENTIAL_HPP
