// hqr command-line front end. Talks to the library only through hqr.h.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hqr/hqr.h"

namespace {

struct RunFlags {
  std::string config;
  // (config key, value) pairs in command-line order.
  std::vector<std::pair<std::string, std::optional<std::string>>> overrides;
};

void add_override(CLI::App* cmd, RunFlags& flags, const std::string& flag, const std::string& key,
                  const std::string& help) {
  flags.overrides.emplace_back(key, std::nullopt);
  const std::size_t slot = flags.overrides.size() - 1;
  cmd->add_option_function<std::string>(
      flag, [&flags, slot](const std::string& v) { flags.overrides[slot].second = v; }, help);
}

void add_run_options(CLI::App* cmd, RunFlags& flags) {
  cmd->add_option("--config", flags.config, "key=value config file; flags override it");
  add_override(cmd, flags, "--input", "input", "input grid (.csv, .pgm)");
  add_override(cmd, flags, "--output", "output", "reconstruction path");
  add_override(cmd, flags, "--clean", "clean", "clean reference for metrics");
  add_override(cmd, flags, "--potential", "potential", "exp | geman-mcclure | log | sine");
  add_override(cmd, flags, "--beta", "beta", "regularisation weight, > 0");
  add_override(cmd, flags, "--noise-std", "noise_std", "Gaussian noise added to the observation");
  add_override(cmd, flags, "--seed", "seed", "noise seed");
  add_override(cmd, flags, "--format", "format", "csv | pgm (default: from extension)");
  add_override(cmd, flags, "--operator", "operator", "auto | diff1d | grad2d");
  add_override(cmd, flags, "--kernel", "kernel", "blur taps, comma separated");
  add_override(cmd, flags, "--simulate", "simulate", "blur the input before deblurring (1|0)");
  add_override(cmd, flags, "--log-epsilon", "log_epsilon", "guard for the log potential");
  add_override(cmd, flags, "--max-iters", "max_iters", "outer iteration budget");
  add_override(cmd, flags, "--tol-obj", "tol_obj", "relative objective change tolerance");
  add_override(cmd, flags, "--tol-x", "tol_x", "relative step tolerance");
  add_override(cmd, flags, "--cg-tol", "cg_tol", "x-step relative residual");
  add_override(cmd, flags, "--cg-max-iters", "cg_max_iters", "x-step iteration cap, 0 = 10 n");
  add_override(cmd, flags, "--mu", "mu", "Tikhonov shift of the x-step");
  add_override(cmd, flags, "--init", "init", "auto | observation | adjoint | zero");
}

int report(hqr_status s) {
  std::fprintf(stderr, "hqr: %s error: %s\n", hqr_status_name(s), hqr_last_error());
  return hqr_exit_code(s);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int run_command(const RunFlags& flags, hqr_command cmd) {
  hqr_run_config* cfg = nullptr;
  hqr_status s = hqr_run_config_create(&cfg);
  if (s != HQR_OK) return report(s);
  if (!flags.config.empty()) s = hqr_run_config_load(cfg, flags.config.c_str());
  for (const auto& [key, value] : flags.overrides) {
    if (s != HQR_OK) break;
    if (value) s = hqr_run_config_set(cfg, key.c_str(), value->c_str());
  }
  if (s != HQR_OK) {
    hqr_run_config_destroy(cfg);
    return report(s);
  }

  hqr_run_summary sum{};
  s = hqr_run(cfg, cmd, &sum);
  hqr_run_config_destroy(cfg);
  if (s != HQR_OK && s != HQR_E_NOT_CONVERGED) return report(s);

  std::printf("converged=%d outer_iters=%zu psnr_vs_input=%s", sum.converged, sum.outer_iters,
              fmt(sum.psnr_vs_input).c_str());
  if (sum.has_clean) {
    std::printf(" psnr_vs_clean=%s psnr_observation_vs_clean=%s", fmt(sum.psnr_vs_clean).c_str(),
                fmt(sum.psnr_observation_vs_clean).c_str());
  }
  std::printf("\n");
  if (s == HQR_E_NOT_CONVERGED) std::fprintf(stderr, "hqr: warning: %s\n", hqr_last_error());
  return hqr_exit_code(s);
}

int verify_command(const std::string& suite, std::uint64_t seed) {
  const hqr_status s = hqr_verify(
      suite.c_str(), seed, [](const char* line, void*) { std::printf("%s\n", line); }, nullptr);
  if (s == HQR_OK || s == HQR_E_VERIFY) return hqr_exit_code(s);
  return report(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Half-quadratic edge-preserving reconstruction"};
  app.set_version_flag("--version", hqr_version());
  app.require_subcommand(1);

  RunFlags denoise_flags;
  CLI::App* denoise = app.add_subcommand("denoise", "denoise a signal or image");
  add_run_options(denoise, denoise_flags);

  RunFlags deblur_flags;
  CLI::App* deblur = app.add_subcommand("deblur", "deblur a signal or image");
  add_run_options(deblur, deblur_flags);

  std::string suite = "all";
  std::uint64_t verify_seed = 1;
  CLI::App* verify = app.add_subcommand("verify", "run the seeded property suites");
  verify->add_option("suite", suite, "fenchel | stationarity | hessian | conjugate | assumptions | all")
      ->check(CLI::IsMember({"fenchel", "stationarity", "hessian", "conjugate", "assumptions", "all"}));
  verify->add_option("--seed", verify_seed, "suite seed");

  std::uint64_t conj_seed = 1;
  CLI::App* conj = app.add_subcommand("conjugate-check", "same as: verify conjugate");
  conj->add_option("--seed", conj_seed, "suite seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : hqr_exit_code(HQR_E_CONFIG);
  }

  if (denoise->parsed()) return run_command(denoise_flags, HQR_CMD_DENOISE);
  if (deblur->parsed()) return run_command(deblur_flags, HQR_CMD_DEBLUR);
  if (verify->parsed()) return verify_command(suite, verify_seed);
  return verify_command("conjugate", conj_seed);
}
