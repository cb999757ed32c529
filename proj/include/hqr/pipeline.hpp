#ifndef HQR_PIPELINE_HPP
#define HQR_PIPELINE_HPP

#include <optional>
#include <string>

#include "hqr/error.hpp"
#include "hqr/grid.hpp"
#include "hqr/run_config.hpp"
#include "hqr/solver.hpp"

namespace hqr {

enum class Command { Denoise, Deblur };

/// Process exit codes.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitVerifyFailed = 1,
  kExitConfig = 2,
  kExitIO = 3,
  kExitNotConverged = 4,
  kExitNumerical = 5,
};

int exit_code_for(ErrorKind kind) noexcept;

struct RunOutcome {
  int exit_code = kExitSuccess;
  bool converged = false;
  std::size_t outer_iters = 0;
  Grid observation;      // b as handed to the solver
  Grid reconstruction;
  std::optional<Metrics> vs_clean;
  std::optional<Metrics> observation_vs_clean;
  Metrics vs_input;
  std::string trace_path;
  std::string metrics_path;
  std::string warning_path;  // empty unless the solver did not converge
};

/// Reads the input, synthesises the observation (blur when deblurring with
/// `simulate`, then seeded noise), solves, and writes
///   <output>            reconstruction in the input format
///   <output>.trace.csv  iter,f,L,grad_inf,dx,cg_iters
///   <output>.metrics.txt key=value lines
///   <output>.warning    only when the iteration budget ran out.
/// Errors before the solve (config, I/O, format) throw and write nothing.
/// Non-convergence is reported through exit_code = kExitNotConverged.
RunOutcome run_reconstruction(const RunConfig& cfg, Command cmd);

}  // namespace hqr

#endif  // HQR_PIPELINE_HPP
