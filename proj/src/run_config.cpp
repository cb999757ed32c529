#include "hqr/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "hqr/error.hpp"

namespace hqr {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("invalid real for '" + std::string(key) + "': '" + std::string(v) + "'");
  }
  return out;
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError("invalid integer for '" + std::string(key) + "': '" + std::string(v) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError("invalid boolean for '" + std::string(key) + "': '" + std::string(v) + "'");
}

std::vector<double> parse_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    out.push_back(parse_real(key, trim(v.substr(start, comma - start))));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

void RunConfig::set(std::string_view raw_key, std::string_view raw_value) {
  std::string key(trim(raw_key));
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  const std::string_view v = trim(raw_value);

  if (key == "potential") {
    Potential::from_id(v);  // validates the id
    potential = std::string(v);
  } else if (key == "beta") {
    beta = parse_real(key, v);
  } else if (key == "operator") {
    if (v != "auto" && v != "diff1d" && v != "grad2d") {
      throw ConfigError("operator must be auto, diff1d or grad2d");
    }
    op = std::string(v);
  } else if (key == "kernel") {
    kernel = parse_list(key, v);
  } else if (key == "noise_std") {
    noise_std = parse_real(key, v);
  } else if (key == "seed") {
    seed = parse_uint(key, v);
  } else if (key == "simulate") {
    simulate = parse_bool(key, v);
  } else if (key == "log_epsilon") {
    log_epsilon = parse_real(key, v);
  } else if (key == "format") {
    format = parse_grid_format(v);
  } else if (key == "input") {
    input = std::string(v);
  } else if (key == "output") {
    output = std::string(v);
  } else if (key == "clean") {
    clean = std::string(v);
  } else if (key == "max_iters") {
    solver.max_outer_iters = parse_uint(key, v);
  } else if (key == "tol_obj") {
    solver.outer_tol_rel_obj = parse_real(key, v);
  } else if (key == "tol_x") {
    solver.outer_tol_rel_x = parse_real(key, v);
  } else if (key == "cg_tol") {
    solver.cg_tol = parse_real(key, v);
  } else if (key == "cg_max_iters") {
    solver.cg_max_iters = parse_uint(key, v);
  } else if (key == "mu") {
    solver.tikhonov_mu = parse_real(key, v);
  } else if (key == "init") {
    if (v == "observation") {
      solver.init_mode = InitMode::FromObservation;
    } else if (v == "adjoint") {
      solver.init_mode = InitMode::FromAdjoint;
    } else if (v == "zero") {
      solver.init_mode = InitMode::Zero;
    } else if (v == "auto") {
      solver.init_mode.reset();
    } else {
      throw ConfigError("init must be auto, observation, adjoint or zero");
    }
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open config '" + path + "'");
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s(line);
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    try {
      set(s.substr(0, eq), s.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void RunConfig::validate() const {
  if (!(beta > 0.0)) throw ConfigError("beta must be > 0");
  if (!(noise_std >= 0.0)) throw ConfigError("noise_std must be >= 0");
  if (!(log_epsilon > 0.0)) throw ConfigError("log_epsilon must be > 0");
  if (kernel.empty() || kernel.size() % 2 == 0) throw ConfigError("kernel must have odd length");
  double sum = 0.0;
  for (double k : kernel) sum += k;
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("kernel taps must sum to 1");
  solver.validate();
}

}  // namespace hqr
