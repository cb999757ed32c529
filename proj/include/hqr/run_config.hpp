#ifndef HQR_RUN_CONFIG_HPP
#define HQR_RUN_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hqr/grid.hpp"
#include "hqr/potential.hpp"
#include "hqr/solver.hpp"

namespace hqr {

/// Settings of a denoise or deblur run. Populated from a flat key=value
/// file and command-line overrides; the last assignment of a key wins.
///
/// Keys (dashes and underscores are interchangeable):
///   potential, beta, operator (auto|diff1d|grad2d), kernel (comma list),
///   noise_std, seed, simulate (0|1), log_epsilon, format (csv|pgm),
///   input, output, clean, max_iters, tol_obj, tol_x, cg_tol,
///   cg_max_iters, mu, init (observation|adjoint|zero)
struct RunConfig {
  std::string potential = "exp";
  double beta = 0.5;
  std::string op = "auto";
  std::vector<double> kernel = {0.25, 0.5, 0.25};
  double noise_std = 0.0;
  std::uint64_t seed = 0;
  /// Deblur only: blur the input before reconstruction (the input is then
  /// a clean signal). When false the input is taken as already blurred.
  bool simulate = true;
  double log_epsilon = kDefaultLogEpsilon;
  std::optional<GridFormat> format;
  std::string input;
  std::string output;
  std::string clean;
  SolverConfig solver;

  /// Throws ConfigError on unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  /// Reads key=value lines; '#' starts a comment. IOError / ConfigError.
  void load_file(const std::string& path);
  /// Cross-field checks (beta > 0, noise >= 0, kernel, solver settings).
  void validate() const;
};

}  // namespace hqr

#endif  // HQR_RUN_CONFIG_HPP
