#ifndef HQR_LINOPS_HPP
#define HQR_LINOPS_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "hqr/vector.hpp"

namespace hqr {

enum class OperatorKind { Identity, Dense, Diff1D, Grad2D, Blur };

/// Matrix-free linear map R^in_dim -> R^out_dim with an exact adjoint.
///
/// Grid-shaped operators index pixels row-major, p = r * w + c. All
/// boundaries are replicate (Neumann): forward differences that would leave
/// the grid are 0, and the blur clamps sample positions to the edge.
///
/// Operators are immutable; copies share their payload.
class LinearOperator {
 public:
  static LinearOperator identity(std::size_t n);
  /// row_major.size() must equal rows * cols.
  static LinearOperator dense(std::size_t rows, std::size_t cols, std::vector<double> row_major);
  /// Single row e_{i+1} - e_i acting on R^n.
  static LinearOperator difference(std::size_t n, std::size_t i);
  /// Forward-difference gradient (horizontal, vertical) at pixel (row, col).
  static LinearOperator pixel_gradient(std::size_t h, std::size_t w, std::size_t row,
                                       std::size_t col);
  /// Separable convolution of an h x w grid with an odd-length kernel that
  /// sums to 1, applied along rows then columns.
  static LinearOperator blur(std::span<const double> kernel, std::size_t h, std::size_t w);

  OperatorKind kind() const noexcept { return kind_; }
  std::size_t in_dim() const noexcept { return in_dim_; }
  std::size_t out_dim() const noexcept { return out_dim_; }
  bool is_identity() const noexcept { return kind_ == OperatorKind::Identity; }

  Vector apply(std::span<const double> x) const;
  Vector apply_adjoint(std::span<const double> y) const;

  /// out = Op x; out.size() == out_dim.
  void apply_into(std::span<const double> x, std::span<double> out) const;
  /// out += scale * Op^T y; out.size() == in_dim.
  void adjoint_accumulate(std::span<const double> y, std::span<double> out, double scale) const;

 private:
  LinearOperator(OperatorKind kind, std::size_t in_dim, std::size_t out_dim)
      : kind_(kind), in_dim_(in_dim), out_dim_(out_dim) {}

  void check_in(std::size_t n) const;
  void check_out(std::size_t n) const;

  OperatorKind kind_;
  std::size_t in_dim_;
  std::size_t out_dim_;
  // Diff1D: index_ = i. Grad2D: index_ = pixel, width_/height_ the grid.
  std::size_t index_ = 0;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  // Dense entries (row-major) or blur taps.
  std::shared_ptr<const std::vector<double>> data_;
};

/// n - 1 single-row operators G_i x = x_{i+1} - x_i. Requires n >= 2.
std::vector<LinearOperator> make_difference_1d(std::size_t n);

/// One two-row operator per pixel of an h x w grid. Requires h, w >= 2.
std::vector<LinearOperator> make_gradient_2d(std::size_t h, std::size_t w);

/// Throws ConfigError for even-length kernels or kernels not summing to 1.
LinearOperator make_blur(std::span<const double> kernel, std::size_t h, std::size_t w);

}  // namespace hqr

#endif  // HQR_LINOPS_HPP
