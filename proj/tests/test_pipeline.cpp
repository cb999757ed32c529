#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hqr/error.hpp"
#include "hqr/grid.hpp"
#include "hqr/pipeline.hpp"
#include "hqr/run_config.hpp"

namespace fs = std::filesystem;
using hqr::Grid;
using hqr::GridFormat;
using hqr::RunConfig;
using hqr::Vector;

namespace {

fs::path workdir() {
  const fs::path dir = fs::temp_directory_path() / "hqr_pipeline_tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Grid piecewise_signal() {
  Vector v(256);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i < 64 ? 0.2 : i < 128 ? 0.8 : i < 192 ? 0.4 : 0.9;
  return Grid(256, 1, v);
}

Grid step_image() {
  Vector v(32 * 32);
  for (std::size_t r = 0; r < 32; ++r)
    for (std::size_t c = 0; c < 32; ++c) v[r * 32 + c] = c >= 16 ? 0.9 : 0.1;
  return Grid(32, 32, v);
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config keys and overrides") {
  RunConfig c;
  c.set("potential", "sine");
  c.set("noise-std", "0.25");
  c.set("kernel", "0.2, 0.6, 0.2");
  c.set("max_iters", "17");
  c.set("tol-x", "1e-9");
  c.set("init", "zero");
  c.set("format", "pgm");
  CHECK(c.potential == "sine");
  CHECK(c.noise_std == 0.25);
  CHECK(c.kernel == std::vector<double>{0.2, 0.6, 0.2});
  CHECK(c.solver.max_outer_iters == 17);
  CHECK(c.solver.outer_tol_rel_x == 1e-9);
  CHECK(c.solver.init_mode == hqr::InitMode::Zero);
  CHECK(c.format == GridFormat::Pgm);
  CHECK_THROWS_AS(c.set("beta", "abc"), hqr::ConfigError);
  CHECK_THROWS_AS(c.set("colour", "red"), hqr::ConfigError);
  CHECK_THROWS_AS(c.set("seed", "-3"), hqr::ConfigError);

  RunConfig bad;
  bad.beta = 0;
  CHECK_THROWS_AS(bad.validate(), hqr::ConfigError);
  bad = RunConfig{};
  bad.kernel = {0.5, 0.6, 0.2};
  CHECK_THROWS_AS(bad.validate(), hqr::ConfigError);
}

TEST_CASE("config files") {
  const fs::path p = workdir() / "run.cfg";
  std::ofstream(p) << "# comment\npotential = geman-mcclure\nbeta=0.125  # trailing\n\nseed=9\n";
  RunConfig c;
  c.load_file(p.string());
  CHECK(c.potential == "geman-mcclure");
  CHECK(c.beta == 0.125);
  CHECK(c.seed == 9);
  std::ofstream(p) << "beta 0.1\n";
  CHECK_THROWS_AS(c.load_file(p.string()), hqr::ConfigError);
  CHECK_THROWS_AS(c.load_file((workdir() / "nope.cfg").string()), hqr::IOError);
}

TEST_CASE("noise-free input with negligible beta is returned unchanged") {
  const fs::path in = workdir() / "clean.csv", out = workdir() / "same.csv";
  hqr::write_grid(piecewise_signal(), in.string(), GridFormat::Csv);
  RunConfig c;
  c.input = in.string();
  c.output = out.string();
  c.beta = 1e-20;
  const auto r = hqr::run_reconstruction(c, hqr::Command::Denoise);
  CHECK(r.exit_code == hqr::kExitSuccess);
  for (std::size_t i = 0; i < 256; ++i) CHECK(std::abs(r.reconstruction.data[i] - r.observation.data[i]) <= 1e-5);
  CHECK(std::isinf(r.vs_input.psnr));
  const std::string metrics = slurp(out.string() + ".metrics.txt");
  CHECK(metrics.find("psnr_vs_input=inf") != std::string::npos);
  CHECK(metrics.find("reference=input-only") != std::string::npos);
  CHECK(slurp(out.string() + ".trace.csv").rfind("iter,f,L,grad_inf,dx,cg_iters\n", 0) == 0);
}

TEST_CASE("unit kernel deblur without noise is the identity") {
  const fs::path in = workdir() / "img.pgm", out = workdir() / "img_out.csv";
  hqr::write_grid(step_image(), in.string(), GridFormat::Pgm);
  RunConfig c;
  c.input = in.string();
  c.output = out.string();
  c.format = GridFormat::Pgm;
  c.kernel = {1.0};
  c.beta = 1e-20;
  const auto r = hqr::run_reconstruction(c, hqr::Command::Deblur);
  const Grid input = hqr::read_grid(in.string(), GridFormat::Pgm);
  for (std::size_t i = 0; i < input.size(); ++i) CHECK(std::abs(r.reconstruction.data[i] - input.data[i]) <= 1e-5);
}

TEST_CASE("seeded denoise improves PSNR and is reproducible") {
  const fs::path in = workdir() / "sig.csv";
  hqr::write_grid(piecewise_signal(), in.string(), GridFormat::Csv);
  RunConfig c;
  c.input = in.string();
  c.clean = in.string();
  c.noise_std = 0.1;
  c.seed = 42;
  c.beta = 0.5;
  c.output = (workdir() / "den_a.csv").string();
  const auto a = hqr::run_reconstruction(c, hqr::Command::Denoise);
  REQUIRE(a.vs_clean);
  CHECK(a.vs_clean->psnr > a.observation_vs_clean->psnr);
  c.output = (workdir() / "den_b.csv").string();
  (void)hqr::run_reconstruction(c, hqr::Command::Denoise);
  for (const char* suffix : {"", ".trace.csv", ".metrics.txt"}) {
    CHECK(slurp(workdir() / (std::string("den_a.csv") + suffix)) ==
          slurp(workdir() / (std::string("den_b.csv") + suffix)));
  }
}

TEST_CASE("seeded deblur improves PSNR") {
  const fs::path in = workdir() / "step.pgm";
  hqr::write_grid(step_image(), in.string(), GridFormat::Pgm);
  RunConfig c;
  c.input = in.string();
  c.clean = in.string();
  c.output = (workdir() / "deb.pgm").string();
  c.noise_std = 0.02;
  c.seed = 7;
  c.beta = 0.05;
  const auto r = hqr::run_reconstruction(c, hqr::Command::Deblur);
  REQUIRE(r.vs_clean);
  CHECK(r.vs_clean->psnr > r.observation_vs_clean->psnr);
  CHECK(hqr::read_grid(c.output, GridFormat::Pgm).width == 32);
}

TEST_CASE("missing input writes nothing") {
  RunConfig c;
  c.input = (workdir() / "absent.csv").string();
  c.output = (workdir() / "never.csv").string();
  CHECK_THROWS_AS(hqr::run_reconstruction(c, hqr::Command::Denoise), hqr::IOError);
  CHECK_FALSE(fs::exists(c.output));
  CHECK_FALSE(fs::exists(c.output + ".trace.csv"));
  CHECK_FALSE(fs::exists(c.output + ".metrics.txt"));
}

TEST_CASE("exhausted budget writes outputs and a warning marker") {
  const fs::path in = workdir() / "sig2.csv";
  hqr::write_grid(piecewise_signal(), in.string(), GridFormat::Csv);
  RunConfig c;
  c.input = in.string();
  c.output = (workdir() / "nc.csv").string();
  c.noise_std = 0.1;
  c.solver.max_outer_iters = 1;
  const auto r = hqr::run_reconstruction(c, hqr::Command::Denoise);
  CHECK(r.exit_code == hqr::kExitNotConverged);
  CHECK_FALSE(r.converged);
  CHECK(fs::exists(c.output));
  CHECK(fs::exists(c.output + ".warning"));
  CHECK(slurp(c.output + ".metrics.txt").find("converged=0") != std::string::npos);

  c.solver.max_outer_iters = 200;
  const auto ok = hqr::run_reconstruction(c, hqr::Command::Denoise);
  CHECK(ok.converged);
  CHECK_FALSE(fs::exists(c.output + ".warning"));
}

TEST_CASE("mismatched clean reference") {
  const fs::path in = workdir() / "sig3.csv", other = workdir() / "short.csv";
  hqr::write_grid(piecewise_signal(), in.string(), GridFormat::Csv);
  hqr::write_grid(Grid(3, 1, Vector{1, 2, 3}), other.string(), GridFormat::Csv);
  RunConfig c;
  c.input = in.string();
  c.clean = other.string();
  c.output = (workdir() / "mm.csv").string();
  CHECK_THROWS_AS(hqr::run_reconstruction(c, hqr::Command::Denoise), hqr::DimensionError);
}

TEST_CASE("exit codes by error kind") {
  using hqr::ErrorKind;
  CHECK(hqr::exit_code_for(ErrorKind::Config) == 2);
  CHECK(hqr::exit_code_for(ErrorKind::Domain) == 2);
  CHECK(hqr::exit_code_for(ErrorKind::IO) == 3);
  CHECK(hqr::exit_code_for(ErrorKind::Format) == 3);
  CHECK(hqr::exit_code_for(ErrorKind::NotConverged) == 4);
  CHECK(hqr::exit_code_for(ErrorKind::Numerical) == 5);
}

}  // TEST_SUITE
