#include "hqr/linops.hpp"

#include <cmath>
#include <string>

#include "hqr/error.hpp"

namespace hqr {

namespace {

std::size_t clamp_index(std::ptrdiff_t i, std::size_t n) {
  if (i < 0) return 0;
  if (static_cast<std::size_t>(i) >= n) return n - 1;
  return static_cast<std::size_t>(i);
}

}  // namespace

LinearOperator LinearOperator::identity(std::size_t n) {
  if (n == 0) throw DimensionError("identity operator needs n >= 1");
  return LinearOperator(OperatorKind::Identity, n, n);
}

LinearOperator LinearOperator::dense(std::size_t rows, std::size_t cols,
                                     std::vector<double> row_major) {
  if (rows == 0 || cols == 0) throw DimensionError("dense operator needs positive dimensions");
  if (row_major.size() != rows * cols) {
    throw DimensionError("dense operator: expected " + std::to_string(rows * cols) +
                         " entries, got " + std::to_string(row_major.size()));
  }
  LinearOperator op(OperatorKind::Dense, cols, rows);
  op.data_ = std::make_shared<const std::vector<double>>(std::move(row_major));
  return op;
}

LinearOperator LinearOperator::difference(std::size_t n, std::size_t i) {
  if (n < 2 || i + 1 >= n) throw DimensionError("difference operator index out of range");
  LinearOperator op(OperatorKind::Diff1D, n, 1);
  op.index_ = i;
  return op;
}

LinearOperator LinearOperator::pixel_gradient(std::size_t h, std::size_t w, std::size_t row,
                                              std::size_t col) {
  if (h < 2 || w < 2) throw DimensionError("gradient operator needs h, w >= 2");
  if (row >= h || col >= w) throw DimensionError("gradient operator pixel out of range");
  LinearOperator op(OperatorKind::Grad2D, h * w, 2);
  op.index_ = row * w + col;
  op.height_ = h;
  op.width_ = w;
  return op;
}

LinearOperator LinearOperator::blur(std::span<const double> kernel, std::size_t h, std::size_t w) {
  if (h == 0 || w == 0) throw DimensionError("blur operator needs positive grid dimensions");
  if (kernel.empty() || kernel.size() % 2 == 0) {
    throw ConfigError("blur kernel must have odd length, got " + std::to_string(kernel.size()));
  }
  double sum = 0.0;
  for (double k : kernel) {
    if (!std::isfinite(k)) throw ConfigError("blur kernel has a non-finite tap");
    sum += k;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("blur kernel taps must sum to 1");
  LinearOperator op(OperatorKind::Blur, h * w, h * w);
  op.height_ = h;
  op.width_ = w;
  op.data_ = std::make_shared<const std::vector<double>>(kernel.begin(), kernel.end());
  return op;
}

void LinearOperator::check_in(std::size_t n) const {
  if (n != in_dim_) {
    throw DimensionError("operator input has length " + std::to_string(n) + ", expected " +
                         std::to_string(in_dim_));
  }
}

void LinearOperator::check_out(std::size_t n) const {
  if (n != out_dim_) {
    throw DimensionError("operator output has length " + std::to_string(n) + ", expected " +
                         std::to_string(out_dim_));
  }
}

Vector LinearOperator::apply(std::span<const double> x) const {
  Vector out(out_dim_);
  apply_into(x, out);
  return out;
}

Vector LinearOperator::apply_adjoint(std::span<const double> y) const {
  Vector out(in_dim_, 0.0);
  adjoint_accumulate(y, out, 1.0);
  return out;
}

void LinearOperator::apply_into(std::span<const double> x, std::span<double> out) const {
  check_in(x.size());
  check_out(out.size());
  switch (kind_) {
    case OperatorKind::Identity:
      std::copy(x.begin(), x.end(), out.begin());
      return;
    case OperatorKind::Dense: {
      const auto& a = *data_;
      for (std::size_t r = 0; r < out_dim_; ++r) {
        double s = 0.0;
        const double* row = a.data() + r * in_dim_;
        for (std::size_t c = 0; c < in_dim_; ++c) s += row[c] * x[c];
        out[r] = s;
      }
      return;
    }
    case OperatorKind::Diff1D:
      out[0] = x[index_ + 1] - x[index_];
      return;
    case OperatorKind::Grad2D: {
      const std::size_t r = index_ / width_;
      const std::size_t c = index_ % width_;
      out[0] = c + 1 < width_ ? x[index_ + 1] - x[index_] : 0.0;
      out[1] = r + 1 < height_ ? x[index_ + width_] - x[index_] : 0.0;
      return;
    }
    case OperatorKind::Blur: {
      const auto& k = *data_;
      const auto half = static_cast<std::ptrdiff_t>(k.size() / 2);
      Vector tmp(in_dim_, 0.0);
      for (std::size_t r = 0; r < height_; ++r) {
        for (std::size_t c = 0; c < width_; ++c) {
          double s = 0.0;
          for (std::size_t j = 0; j < k.size(); ++j) {
            const auto cc = static_cast<std::ptrdiff_t>(c) + half - static_cast<std::ptrdiff_t>(j);
            s += k[j] * x[r * width_ + clamp_index(cc, width_)];
          }
          tmp[r * width_ + c] = s;
        }
      }
      for (std::size_t r = 0; r < height_; ++r) {
        for (std::size_t c = 0; c < width_; ++c) {
          double s = 0.0;
          for (std::size_t j = 0; j < k.size(); ++j) {
            const auto rr = static_cast<std::ptrdiff_t>(r) + half - static_cast<std::ptrdiff_t>(j);
            s += k[j] * tmp[clamp_index(rr, height_) * width_ + c];
          }
          out[r * width_ + c] = s;
        }
      }
      return;
    }
  }
}

void LinearOperator::adjoint_accumulate(std::span<const double> y, std::span<double> out,
                                        double scale) const {
  check_out(y.size());
  check_in(out.size());
  switch (kind_) {
    case OperatorKind::Identity:
      for (std::size_t i = 0; i < in_dim_; ++i) out[i] += scale * y[i];
      return;
    case OperatorKind::Dense: {
      const auto& a = *data_;
      for (std::size_t r = 0; r < out_dim_; ++r) {
        const double yr = scale * y[r];
        const double* row = a.data() + r * in_dim_;
        for (std::size_t c = 0; c < in_dim_; ++c) out[c] += row[c] * yr;
      }
      return;
    }
    case OperatorKind::Diff1D:
      out[index_ + 1] += scale * y[0];
      out[index_] -= scale * y[0];
      return;
    case OperatorKind::Grad2D: {
      const std::size_t r = index_ / width_;
      const std::size_t c = index_ % width_;
      if (c + 1 < width_) {
        out[index_ + 1] += scale * y[0];
        out[index_] -= scale * y[0];
      }
      if (r + 1 < height_) {
        out[index_ + width_] += scale * y[1];
        out[index_] -= scale * y[1];
      }
      return;
    }
    case OperatorKind::Blur: {
      // Transpose of the column pass, then of the row pass.
      const auto& k = *data_;
      const auto half = static_cast<std::ptrdiff_t>(k.size() / 2);
      Vector tmp(in_dim_, 0.0);
      for (std::size_t r = 0; r < height_; ++r) {
        for (std::size_t c = 0; c < width_; ++c) {
          const double v = y[r * width_ + c];
          for (std::size_t j = 0; j < k.size(); ++j) {
            const auto rr = static_cast<std::ptrdiff_t>(r) + half - static_cast<std::ptrdiff_t>(j);
            tmp[clamp_index(rr, height_) * width_ + c] += k[j] * v;
          }
        }
      }
      for (std::size_t r = 0; r < height_; ++r) {
        for (std::size_t c = 0; c < width_; ++c) {
          const double v = scale * tmp[r * width_ + c];
          for (std::size_t j = 0; j < k.size(); ++j) {
            const auto cc = static_cast<std::ptrdiff_t>(c) + half - static_cast<std::ptrdiff_t>(j);
            out[r * width_ + clamp_index(cc, width_)] += k[j] * v;
          }
        }
      }
      return;
    }
  }
}

std::vector<LinearOperator> make_difference_1d(std::size_t n) {
  if (n < 2) throw DimensionError("make_difference_1d needs n >= 2");
  std::vector<LinearOperator> ops;
  ops.reserve(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) ops.push_back(LinearOperator::difference(n, i));
  return ops;
}

std::vector<LinearOperator> make_gradient_2d(std::size_t h, std::size_t w) {
  if (h < 2 || w < 2) throw DimensionError("make_gradient_2d needs h, w >= 2");
  std::vector<LinearOperator> ops;
  ops.reserve(h * w);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) ops.push_back(LinearOperator::pixel_gradient(h, w, r, c));
  }
  return ops;
}

LinearOperator make_blur(std::span<const double> kernel, std::size_t h, std::size_t w) {
  return LinearOperator::blur(kernel, h, w);
}

}  // namespace hqr
