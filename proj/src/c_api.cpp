#include "hqr/hqr.h"

#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hqr/error.hpp"
#include "hqr/icf.hpp"
#include "hqr/linops.hpp"
#include "hqr/oracle.hpp"
#include "hqr/pipeline.hpp"
#include "hqr/potential.hpp"
#include "hqr/run_config.hpp"
#include "hqr/solver.hpp"
#include "hqr/verify.hpp"

struct hqr_potential {
  hqr::Potential p;
};
struct hqr_operator {
  hqr::LinearOperator op;
};
struct hqr_operator_set {
  std::vector<hqr::LinearOperator> ops;
};
struct hqr_problem {
  hqr::ImplicitConcaveInstance inst;
};
struct hqr_solver_config {
  hqr::SolverConfig cfg;
};
struct hqr_solution {
  hqr::SolveResult result;
};
struct hqr_run_config {
  hqr::RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

hqr_status status_for(hqr::ErrorKind kind) {
  using hqr::ErrorKind;
  switch (kind) {
    case ErrorKind::Domain: return HQR_E_DOMAIN;
    case ErrorKind::Dimension: return HQR_E_DIMENSION;
    case ErrorKind::Config: return HQR_E_CONFIG;
    case ErrorKind::IO: return HQR_E_IO;
    case ErrorKind::Format: return HQR_E_FORMAT;
    case ErrorKind::NotConverged: return HQR_E_NOT_CONVERGED;
    case ErrorKind::Numerical: return HQR_E_NUMERICAL;
    case ErrorKind::Precondition: return HQR_E_PRECONDITION;
  }
  return HQR_E_INTERNAL;
}

hqr_status fail(hqr_status s, std::string msg) {
  g_last_error = std::move(msg);
  return s;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
hqr_status guard(Fn&& fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const hqr::Error& e) {
    return fail(status_for(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(HQR_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(HQR_E_INTERNAL, e.what());
  } catch (...) {
    return fail(HQR_E_INTERNAL, "unknown exception");
  }
}

#define HQR_REQUIRE(cond)                                                   \
  do {                                                                      \
    if (!(cond)) return fail(HQR_E_ARGUMENT, "invalid argument: " #cond);   \
  } while (0)

std::span<const double> view(const double* p, std::size_t n) { return {p, n}; }

hqr::SigmaVector sigma_of(const hqr_problem* prob, const double* sigma, std::size_t m) {
  return hqr::SigmaVector(hqr::Vector(sigma, sigma + m), prob->inst.potential());
}

void copy_out(const hqr::Vector& v, double* out) { std::copy(v.begin(), v.end(), out); }

}  // namespace

extern "C" {

const char* hqr_version(void) { return "0.1.0"; }

const char* hqr_status_name(hqr_status status) {
  switch (status) {
    case HQR_OK: return "ok";
    case HQR_E_VERIFY: return "verify_failed";
    case HQR_E_CONFIG: return "config";
    case HQR_E_IO: return "io";
    case HQR_E_NOT_CONVERGED: return "not_converged";
    case HQR_E_NUMERICAL: return "numerical";
    case HQR_E_DOMAIN: return "domain";
    case HQR_E_DIMENSION: return "dimension";
    case HQR_E_FORMAT: return "format";
    case HQR_E_PRECONDITION: return "precondition";
    case HQR_E_ARGUMENT: return "argument";
    case HQR_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* hqr_last_error(void) { return g_last_error.c_str(); }

int hqr_exit_code(hqr_status status) {
  switch (status) {
    case HQR_OK: return 0;
    case HQR_E_VERIFY: return 1;
    case HQR_E_CONFIG:
    case HQR_E_DOMAIN:
    case HQR_E_DIMENSION:
    case HQR_E_ARGUMENT: return 2;
    case HQR_E_IO:
    case HQR_E_FORMAT: return 3;
    case HQR_E_NOT_CONVERGED: return 4;
    case HQR_E_NUMERICAL:
    case HQR_E_PRECONDITION:
    case HQR_E_INTERNAL: return 5;
  }
  return 5;
}

// ---- Potentials

hqr_status hqr_potential_create(const char* id, double log_epsilon, hqr_potential** out) {
  HQR_REQUIRE(id != nullptr && out != nullptr);
  *out = nullptr;
  return guard([&] {
    const double eps = log_epsilon > 0.0 ? log_epsilon : hqr::kDefaultLogEpsilon;
    *out = new hqr_potential{hqr::Potential::from_id(id, eps)};
    return HQR_OK;
  });
}

void hqr_potential_destroy(hqr_potential* p) { delete p; }

hqr_status hqr_potential_eval(const hqr_potential* p, hqr_potential_fn fn, double arg, double* out) {
  HQR_REQUIRE(p != nullptr && out != nullptr);
  return guard([&] {
    switch (fn) {
      case HQR_FN_PSI: *out = p->p.psi(arg); break;
      case HQR_FN_V: *out = p->p.v(arg); break;
      case HQR_FN_V_GRAD: *out = p->p.v_grad(arg); break;
      case HQR_FN_V_CONJ: *out = p->p.v_conj(arg); break;
      case HQR_FN_V_CONJ_GRAD: *out = p->p.v_conj_grad(arg); break;
      case HQR_FN_WEIGHT: *out = p->p.weight(arg); break;
      default: return fail(HQR_E_ARGUMENT, "unknown potential function selector");
    }
    return HQR_OK;
  });
}

hqr_status hqr_potential_zero_limit(const hqr_potential* p, double* out) {
  HQR_REQUIRE(p != nullptr && out != nullptr);
  *out = p->p.zero_limit_weight();
  return HQR_OK;
}

hqr_status hqr_potential_sigma_domain(const hqr_potential* p, double* lo, double* hi,
                                      int* lo_closed, int* hi_closed) {
  HQR_REQUIRE(p != nullptr);
  const hqr::SigmaDomain d = p->p.sigma_domain();
  if (lo != nullptr) *lo = d.lo;
  if (hi != nullptr) *hi = d.hi;
  if (lo_closed != nullptr) *lo_closed = d.lo_closed ? 1 : 0;
  if (hi_closed != nullptr) *hi_closed = d.hi_closed ? 1 : 0;
  return HQR_OK;
}

hqr_status hqr_potential_check_assumptions(const hqr_potential* p, const double* t_grid,
                                           size_t len, uint32_t* failed) {
  HQR_REQUIRE(p != nullptr && t_grid != nullptr && failed != nullptr);
  return guard([&] {
    const hqr::AssumptionReport r = hqr::check_assumptions(p->p, view(t_grid, len));
    uint32_t mask = 0;
    const auto clauses = r.clauses();
    for (std::size_t i = 0; i < clauses.size(); ++i) {
      if (!clauses[i].second) mask |= uint32_t{1} << i;
    }
    *failed = mask;
    return HQR_OK;
  });
}

hqr_status hqr_conjugate_by_grid(const hqr_potential* p, double sigma, double y_max, size_t steps,
                                 double* out) {
  HQR_REQUIRE(p != nullptr && out != nullptr);
  return guard([&] {
    *out = hqr::oracle::conjugate_by_grid(p->p, sigma, y_max, steps);
    return HQR_OK;
  });
}

// ---- Operators

hqr_status hqr_operator_identity(size_t n, hqr_operator** out) {
  HQR_REQUIRE(out != nullptr);
  *out = nullptr;
  return guard([&] {
    *out = new hqr_operator{hqr::LinearOperator::identity(n)};
    return HQR_OK;
  });
}

hqr_status hqr_operator_dense(size_t rows, size_t cols, const double* row_major, hqr_operator** out) {
  HQR_REQUIRE(out != nullptr && (row_major != nullptr || rows * cols == 0));
  *out = nullptr;
  return guard([&] {
    std::vector<double> data(row_major, row_major + rows * cols);
    *out = new hqr_operator{hqr::LinearOperator::dense(rows, cols, std::move(data))};
    return HQR_OK;
  });
}

hqr_status hqr_operator_blur(const double* kernel, size_t len, size_t h, size_t w,
                             hqr_operator** out) {
  HQR_REQUIRE(out != nullptr && kernel != nullptr);
  *out = nullptr;
  return guard([&] {
    *out = new hqr_operator{hqr::make_blur(view(kernel, len), h, w)};
    return HQR_OK;
  });
}

void hqr_operator_destroy(hqr_operator* op) { delete op; }

size_t hqr_operator_in_dim(const hqr_operator* op) { return op ? op->op.in_dim() : 0; }
size_t hqr_operator_out_dim(const hqr_operator* op) { return op ? op->op.out_dim() : 0; }

hqr_status hqr_operator_apply(const hqr_operator* op, const double* x, size_t x_len, double* y,
                              size_t y_len) {
  HQR_REQUIRE(op != nullptr && x != nullptr && y != nullptr);
  return guard([&] {
    if (y_len != op->op.out_dim()) throw hqr::DimensionError("output buffer has the wrong length");
    op->op.apply_into(view(x, x_len), std::span<double>(y, y_len));
    return HQR_OK;
  });
}

hqr_status hqr_operator_apply_adjoint(const hqr_operator* op, const double* y, size_t y_len,
                                      double* x, size_t x_len) {
  HQR_REQUIRE(op != nullptr && x != nullptr && y != nullptr);
  return guard([&] {
    if (x_len != op->op.in_dim()) throw hqr::DimensionError("output buffer has the wrong length");
    copy_out(op->op.apply_adjoint(view(y, y_len)), x);
    return HQR_OK;
  });
}

hqr_status hqr_operator_set_create(hqr_operator_set** out) {
  HQR_REQUIRE(out != nullptr);
  *out = nullptr;
  return guard([&] {
    *out = new hqr_operator_set{};
    return HQR_OK;
  });
}

hqr_status hqr_operator_set_diff1d(size_t n, hqr_operator_set** out) {
  HQR_REQUIRE(out != nullptr);
  *out = nullptr;
  return guard([&] {
    *out = new hqr_operator_set{hqr::make_difference_1d(n)};
    return HQR_OK;
  });
}

hqr_status hqr_operator_set_grad2d(size_t h, size_t w, hqr_operator_set** out) {
  HQR_REQUIRE(out != nullptr);
  *out = nullptr;
  return guard([&] {
    *out = new hqr_operator_set{hqr::make_gradient_2d(h, w)};
    return HQR_OK;
  });
}

hqr_status hqr_operator_set_push(hqr_operator_set* set, const hqr_operator* op) {
  HQR_REQUIRE(set != nullptr && op != nullptr);
  return guard([&] {
    set->ops.push_back(op->op);
    return HQR_OK;
  });
}

size_t hqr_operator_set_size(const hqr_operator_set* set) { return set ? set->ops.size() : 0; }

void hqr_operator_set_destroy(hqr_operator_set* set) { delete set; }

// ---- Problems

hqr_status hqr_problem_create(const hqr_potential* p, double beta, const hqr_operator* a,
                              const double* b, size_t b_len, const hqr_operator_set* regularizers,
                              hqr_problem** out) {
  HQR_REQUIRE(p != nullptr && a != nullptr && regularizers != nullptr && out != nullptr);
  HQR_REQUIRE(b != nullptr || b_len == 0);
  *out = nullptr;
  return guard([&] {
    hqr::ReconstructionProblem prob{a->op, hqr::Vector(b, b + b_len), regularizers->ops, beta, p->p};
    *out = new hqr_problem{hqr::ImplicitConcaveInstance(std::move(prob))};
    return HQR_OK;
  });
}

void hqr_problem_destroy(hqr_problem* prob) { delete prob; }

size_t hqr_problem_n(const hqr_problem* prob) { return prob ? prob->inst.n() : 0; }
size_t hqr_problem_m(const hqr_problem* prob) { return prob ? prob->inst.m() : 0; }

hqr_status hqr_problem_f(const hqr_problem* prob, const double* x, size_t n, double* out) {
  HQR_REQUIRE(prob != nullptr && x != nullptr && out != nullptr);
  return guard([&] {
    *out = prob->inst.f_value(view(x, n));
    return HQR_OK;
  });
}

hqr_status hqr_problem_augmented(const hqr_problem* prob, const double* x, size_t n,
                                 const double* sigma, size_t m, double* out) {
  HQR_REQUIRE(prob != nullptr && x != nullptr && sigma != nullptr && out != nullptr);
  return guard([&] {
    *out = prob->inst.augmented_value(view(x, n), sigma_of(prob, sigma, m));
    return HQR_OK;
  });
}

hqr_status hqr_problem_sigma_update(const hqr_problem* prob, const double* x, size_t n,
                                    double* sigma, size_t m) {
  HQR_REQUIRE(prob != nullptr && x != nullptr && sigma != nullptr);
  return guard([&] {
    if (m != prob->inst.m()) throw hqr::DimensionError("sigma buffer has the wrong length");
    const hqr::SigmaVector s = prob->inst.sigma_update(view(x, n));
    std::copy(s.values().begin(), s.values().end(), sigma);
    return HQR_OK;
  });
}

hqr_status hqr_problem_f_grad(const hqr_problem* prob, const double* x, size_t n, double* grad) {
  HQR_REQUIRE(prob != nullptr && x != nullptr && grad != nullptr);
  return guard([&] {
    copy_out(prob->inst.f_grad(view(x, n)), grad);
    return HQR_OK;
  });
}

hqr_status hqr_problem_augmented_grad(const hqr_problem* prob, const double* x, size_t n,
                                      const double* sigma, size_t m, double* grad_x,
                                      double* grad_sigma) {
  HQR_REQUIRE(prob != nullptr && x != nullptr && sigma != nullptr);
  HQR_REQUIRE(grad_x != nullptr && grad_sigma != nullptr);
  return guard([&] {
    const hqr::AugmentedGradient g = prob->inst.augmented_grad(view(x, n), sigma_of(prob, sigma, m));
    copy_out(g.x, grad_x);
    copy_out(g.sigma, grad_sigma);
    return HQR_OK;
  });
}

hqr_status hqr_problem_stationarity(const hqr_problem* prob, const double* x, size_t n,
                                    const double* sigma, size_t m, double tol,
                                    hqr_stationarity* out) {
  HQR_REQUIRE(prob != nullptr && x != nullptr && sigma != nullptr && out != nullptr);
  return guard([&] {
    const hqr::StationarityReport r =
        prob->inst.stationarity_report(view(x, n), sigma_of(prob, sigma, m), tol);
    *out = hqr_stationarity{r.grad_f_inf, r.grad_x_inf, r.grad_sigma_inf, r.value_gap,
                            r.f,          r.L,          r.correspondence_ok ? 1 : 0};
    return HQR_OK;
  });
}

hqr_status hqr_hessian_check(const hqr_problem* prob, const double* x, size_t n,
                             const double* sigma, size_t m, double tol, hqr_hessian_report* out) {
  HQR_REQUIRE(prob != nullptr && x != nullptr && sigma != nullptr && out != nullptr);
  return guard([&] {
    const hqr::oracle::HessianReport r =
        hqr::oracle::hessian_correspondence_check(prob->inst, view(x, n), sigma_of(prob, sigma, m), tol);
    *out = hqr_hessian_report{r.min_eig_f,
                              r.min_eig_L,
                              r.psd_f ? 1 : 0,
                              r.psd_L ? 1 : 0,
                              r.vgrad_hessian_nonsingular ? 1 : 0,
                              r.equivalence_checked ? 1 : 0,
                              r.equivalence_ok ? 1 : 0};
    return HQR_OK;
  });
}

// ---- Solver

hqr_status hqr_solver_config_create(hqr_solver_config** out) {
  HQR_REQUIRE(out != nullptr);
  *out = nullptr;
  return guard([&] {
    *out = new hqr_solver_config{};
    return HQR_OK;
  });
}

void hqr_solver_config_destroy(hqr_solver_config* cfg) { delete cfg; }

hqr_status hqr_solver_config_set_max_iters(hqr_solver_config* cfg, size_t v) {
  HQR_REQUIRE(cfg != nullptr && v > 0);
  cfg->cfg.max_outer_iters = v;
  return HQR_OK;
}

hqr_status hqr_solver_config_set_tol_obj(hqr_solver_config* cfg, double v) {
  HQR_REQUIRE(cfg != nullptr && v > 0.0);
  cfg->cfg.outer_tol_rel_obj = v;
  return HQR_OK;
}

hqr_status hqr_solver_config_set_tol_x(hqr_solver_config* cfg, double v) {
  HQR_REQUIRE(cfg != nullptr && v > 0.0);
  cfg->cfg.outer_tol_rel_x = v;
  return HQR_OK;
}

hqr_status hqr_solver_config_set_cg_tol(hqr_solver_config* cfg, double v) {
  HQR_REQUIRE(cfg != nullptr && v > 0.0);
  cfg->cfg.cg_tol = v;
  return HQR_OK;
}

hqr_status hqr_solver_config_set_cg_max_iters(hqr_solver_config* cfg, size_t v) {
  HQR_REQUIRE(cfg != nullptr);
  cfg->cfg.cg_max_iters = v;
  return HQR_OK;
}

hqr_status hqr_solver_config_set_mu(hqr_solver_config* cfg, double v) {
  HQR_REQUIRE(cfg != nullptr && v >= 0.0);
  cfg->cfg.tikhonov_mu = v;
  return HQR_OK;
}

hqr_status hqr_solver_config_set_init(hqr_solver_config* cfg, hqr_init_mode mode, const double* x0,
                                      size_t n) {
  HQR_REQUIRE(cfg != nullptr);
  return guard([&] {
    switch (mode) {
      case HQR_INIT_AUTO: cfg->cfg.init_mode.reset(); break;
      case HQR_INIT_OBSERVATION: cfg->cfg.init_mode = hqr::InitMode::FromObservation; break;
      case HQR_INIT_ADJOINT: cfg->cfg.init_mode = hqr::InitMode::FromAdjoint; break;
      case HQR_INIT_ZERO: cfg->cfg.init_mode = hqr::InitMode::Zero; break;
      case HQR_INIT_GIVEN:
        if (x0 == nullptr) return fail(HQR_E_ARGUMENT, "HQR_INIT_GIVEN needs x0");
        cfg->cfg.init_mode = hqr::InitMode::Given;
        cfg->cfg.x0.assign(x0, x0 + n);
        break;
      default: return fail(HQR_E_ARGUMENT, "unknown init mode");
    }
    return HQR_OK;
  });
}

hqr_status hqr_solve(const hqr_problem* prob, const hqr_solver_config* cfg, hqr_solution** out) {
  HQR_REQUIRE(prob != nullptr && out != nullptr);
  *out = nullptr;
  return guard([&] {
    const hqr::SolverConfig defaults;
    const hqr::SolverConfig& c = cfg != nullptr ? cfg->cfg : defaults;
    try {
      *out = new hqr_solution{hqr::solve(prob->inst, c)};
      return HQR_OK;
    } catch (const hqr::NotConverged& e) {
      if (e.partial() != nullptr) *out = new hqr_solution{*e.partial()};
      return fail(HQR_E_NOT_CONVERGED, e.what());
    }
  });
}

void hqr_solution_destroy(hqr_solution* sol) { delete sol; }

int hqr_solution_converged(const hqr_solution* sol) { return sol && sol->result.converged ? 1 : 0; }

const double* hqr_solution_x(const hqr_solution* sol, size_t* n) {
  if (sol == nullptr) return nullptr;
  if (n != nullptr) *n = sol->result.x.size();
  return sol->result.x.data();
}

const double* hqr_solution_sigma(const hqr_solution* sol, size_t* m) {
  if (sol == nullptr) return nullptr;
  if (m != nullptr) *m = sol->result.sigma.size();
  return sol->result.sigma.values().data();
}

size_t hqr_solution_trace_length(const hqr_solution* sol) {
  return sol ? sol->result.trace.rows.size() : 0;
}

hqr_status hqr_solution_trace_row(const hqr_solution* sol, size_t k, hqr_trace_row* out) {
  HQR_REQUIRE(sol != nullptr && out != nullptr);
  if (k >= sol->result.trace.rows.size()) return fail(HQR_E_ARGUMENT, "trace row out of range");
  const hqr::TraceRow& r = sol->result.trace.rows[k];
  *out = hqr_trace_row{r.iter, r.f, r.L, r.grad_inf, r.dx, r.cg_iters, r.L_after_sigma};
  return HQR_OK;
}

// ---- File-driven runs

hqr_status hqr_run_config_create(hqr_run_config** out) {
  HQR_REQUIRE(out != nullptr);
  *out = nullptr;
  return guard([&] {
    *out = new hqr_run_config{};
    return HQR_OK;
  });
}

void hqr_run_config_destroy(hqr_run_config* cfg) { delete cfg; }

hqr_status hqr_run_config_set(hqr_run_config* cfg, const char* key, const char* value) {
  HQR_REQUIRE(cfg != nullptr && key != nullptr && value != nullptr);
  return guard([&] {
    cfg->cfg.set(key, value);
    return HQR_OK;
  });
}

hqr_status hqr_run_config_load(hqr_run_config* cfg, const char* path) {
  HQR_REQUIRE(cfg != nullptr && path != nullptr);
  return guard([&] {
    cfg->cfg.load_file(path);
    return HQR_OK;
  });
}

hqr_status hqr_run(const hqr_run_config* cfg, hqr_command cmd, hqr_run_summary* out) {
  HQR_REQUIRE(cfg != nullptr);
  HQR_REQUIRE(cmd == HQR_CMD_DENOISE || cmd == HQR_CMD_DEBLUR);
  return guard([&] {
    const hqr::RunOutcome r = hqr::run_reconstruction(
        cfg->cfg, cmd == HQR_CMD_DENOISE ? hqr::Command::Denoise : hqr::Command::Deblur);
    if (out != nullptr) {
      hqr_run_summary s{};
      s.exit_code = r.exit_code;
      s.converged = r.converged ? 1 : 0;
      s.outer_iters = r.outer_iters;
      s.mse_vs_input = r.vs_input.mse;
      s.psnr_vs_input = r.vs_input.psnr;
      s.has_clean = r.vs_clean.has_value() ? 1 : 0;
      if (r.vs_clean) {
        s.mse_vs_clean = r.vs_clean->mse;
        s.psnr_vs_clean = r.vs_clean->psnr;
        s.mse_observation_vs_clean = r.observation_vs_clean->mse;
        s.psnr_observation_vs_clean = r.observation_vs_clean->psnr;
      }
      *out = s;
    }
    if (!r.converged) {
      return fail(HQR_E_NOT_CONVERGED, "iteration budget exhausted; outputs written with " +
                                           r.warning_path);
    }
    return HQR_OK;
  });
}

// ---- Property suites

hqr_status hqr_verify(const char* suite, uint64_t seed, hqr_line_sink sink, void* user) {
  HQR_REQUIRE(suite != nullptr);
  return guard([&] {
    const hqr::verify::Report report = hqr::verify::run(hqr::verify::parse_suite(suite), seed);
    if (sink != nullptr) {
      std::ostringstream os;
      hqr::verify::write_report(report, os);
      std::istringstream lines(os.str());
      std::string line;
      while (std::getline(lines, line)) sink(line.c_str(), user);
    }
    if (!report.all_pass()) return fail(HQR_E_VERIFY, "one or more properties failed");
    return HQR_OK;
  });
}

}  // extern "C"
