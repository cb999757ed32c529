#include "hqr/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hqr/icf.hpp"
#include "hqr/linops.hpp"

namespace hqr {

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config:
    case ErrorKind::Domain:
    case ErrorKind::Dimension:
      return kExitConfig;
    case ErrorKind::IO:
    case ErrorKind::Format:
      return kExitIO;
    case ErrorKind::NotConverged:
      return kExitNotConverged;
    case ErrorKind::Numerical:
    case ErrorKind::Precondition:
      return kExitNumerical;
  }
  return kExitNumerical;
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IOError("failed writing '" + path + "'");
}

std::string trace_csv(const SolverTrace& trace) {
  std::ostringstream os;
  os << "iter,f,L,grad_inf,dx,cg_iters\n";
  for (const TraceRow& r : trace.rows) {
    os << r.iter << ',' << format_real(r.f) << ',' << format_real(r.L) << ','
       << format_real(r.grad_inf) << ',' << format_real(r.dx) << ',' << r.cg_iters << '\n';
  }
  return os.str();
}

std::vector<LinearOperator> regularizers(const RunConfig& cfg, const Grid& g) {
  const std::string op = cfg.op == "auto" ? (g.is_1d() ? "diff1d" : "grad2d") : cfg.op;
  if (op == "diff1d") return make_difference_1d(g.size());
  return make_gradient_2d(g.height, g.width);
}

}  // namespace

RunOutcome run_reconstruction(const RunConfig& cfg, Command cmd) {
  cfg.validate();
  if (cfg.input.empty()) throw ConfigError("an input path is required");
  if (cfg.output.empty()) throw ConfigError("an output path is required");
  const GridFormat format = cfg.format.value_or(grid_format_from_path(cfg.input));
  const Potential potential = Potential::from_id(cfg.potential, cfg.log_epsilon);

  const Grid input = read_grid(cfg.input, format);
  std::optional<Grid> clean;
  if (!cfg.clean.empty()) {
    clean = read_grid(cfg.clean, cfg.format.value_or(grid_format_from_path(cfg.clean)));
    if (clean->height != input.height || clean->width != input.width) {
      throw DimensionError("clean reference shape differs from the input");
    }
  }

  const LinearOperator A = cmd == Command::Denoise
                               ? LinearOperator::identity(input.size())
                               : make_blur(cfg.kernel, input.height, input.width);
  Grid observed = input;
  if (cmd == Command::Deblur && cfg.simulate) observed.data = A.apply(input.data);
  observed = add_noise(observed, cfg.noise_std, cfg.seed);

  const ImplicitConcaveInstance inst(
      ReconstructionProblem{A, observed.data, regularizers(cfg, input), cfg.beta, potential});

  RunOutcome out;
  SolveResult result;
  try {
    result = solve(inst, cfg.solver);
    out.exit_code = kExitSuccess;
  } catch (const NotConverged& e) {
    if (e.partial() == nullptr) throw;
    result = *e.partial();
    out.exit_code = kExitNotConverged;
  }
  out.converged = result.converged;
  out.outer_iters = result.trace.rows.empty() ? 0 : result.trace.rows.back().iter;
  out.observation = observed;
  out.reconstruction = Grid(input.height, input.width, result.x);
  out.vs_input = metrics(out.reconstruction, input);
  if (clean) {
    out.vs_clean = metrics(out.reconstruction, *clean);
    out.observation_vs_clean = metrics(observed, *clean);
  }

  std::ostringstream m;
  m << "command=" << (cmd == Command::Denoise ? "denoise" : "deblur") << '\n'
    << "potential=" << potential.id() << '\n'
    << "beta=" << format_real(cfg.beta) << '\n'
    << "noise_std=" << format_real(cfg.noise_std) << '\n'
    << "seed=" << cfg.seed << '\n'
    << "n=" << inst.n() << '\n'
    << "m=" << inst.m() << '\n'
    << "converged=" << (out.converged ? 1 : 0) << '\n'
    << "outer_iters=" << out.outer_iters << '\n';
  if (!result.trace.rows.empty()) {
    const TraceRow& last = result.trace.rows.back();
    m << "final_f=" << format_real(last.f) << '\n'
      << "final_L=" << format_real(last.L) << '\n'
      << "final_grad_inf=" << format_real(last.grad_inf) << '\n';
  }
  m << "reference=" << (clean ? "clean" : "input-only") << '\n'
    << "mse_vs_input=" << format_real(out.vs_input.mse) << '\n'
    << "psnr_vs_input=" << format_real(out.vs_input.psnr) << '\n';
  if (clean) {
    m << "mse_vs_clean=" << format_real(out.vs_clean->mse) << '\n'
      << "psnr_vs_clean=" << format_real(out.vs_clean->psnr) << '\n'
      << "mse_observation_vs_clean=" << format_real(out.observation_vs_clean->mse) << '\n'
      << "psnr_observation_vs_clean=" << format_real(out.observation_vs_clean->psnr) << '\n';
  }

  write_grid(out.reconstruction, cfg.output, format);
  out.trace_path = cfg.output + ".trace.csv";
  out.metrics_path = cfg.output + ".metrics.txt";
  write_text(out.trace_path, trace_csv(result.trace));
  write_text(out.metrics_path, m.str());
  if (out.converged) {
    std::error_code ec;
    std::filesystem::remove(cfg.output + ".warning", ec);
  } else {
    out.warning_path = cfg.output + ".warning";
    write_text(out.warning_path, "not_converged=1\nouter_iters=" +
                                     std::to_string(out.outer_iters) + '\n');
  }
  return out;
}

}  // namespace hqr
