#ifndef HQR_GRID_HPP
#define HQR_GRID_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include "hqr/vector.hpp"

namespace hqr {

/// Row-major buffer of a 1D signal (width 1) or a 2D image. Values are
/// nominally in [0, 1].
struct Grid {
  std::size_t height = 0;
  std::size_t width = 0;
  Vector data;

  Grid() = default;
  /// Throws DimensionError if data.size() != h * w and ConfigError on
  /// non-finite entries.
  Grid(std::size_t h, std::size_t w, Vector values);

  std::size_t size() const noexcept { return data.size(); }
  bool is_1d() const noexcept { return width == 1; }
};

enum class GridFormat { Csv, Pgm };

/// "csv" or "pgm"; ConfigError otherwise.
GridFormat parse_grid_format(std::string_view name);
/// .pgm/.pnm selects Pgm, anything else Csv.
GridFormat grid_format_from_path(std::string_view path);

/// CSV: one value per line (1D) or comma-separated rows (2D).
/// PGM: P2 or P5, maxval <= 65535, pixels divided by maxval.
/// IOError when the file cannot be opened, FormatError (with line or byte
/// position) on malformed content.
Grid read_grid(const std::string& path, GridFormat format);

/// CSV values use 17 significant digits. PGM output is P5 with maxval 255;
/// values are clamped to [0, 1] and rounded half away from zero.
void write_grid(const Grid& g, const std::string& path, GridFormat format);

/// Adds N(0, std^2) noise from Rng(seed), one deviate per entry in buffer
/// order. std == 0 returns the grid unchanged.
Grid add_noise(const Grid& g, double std_dev, std::uint64_t seed);

struct Metrics {
  double mse = 0.0;
  double psnr = 0.0;  // +inf when mse < 1e-30
};

/// PSNR for unit peak: 10 log10(1 / mse). DimensionError on shape mismatch.
Metrics metrics(const Grid& out, const Grid& ref);

/// "%.17g", or "inf" for infinite values.
std::string format_real(double v);

}  // namespace hqr

#endif  // HQR_GRID_HPP
