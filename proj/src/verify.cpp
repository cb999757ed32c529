#include "hqr/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "hqr/error.hpp"
#include "hqr/grid.hpp"
#include "hqr/linops.hpp"
#include "hqr/oracle.hpp"

namespace hqr::verify {

Suite parse_suite(std::string_view name) {
  if (name == "fenchel") return Suite::Fenchel;
  if (name == "stationarity") return Suite::Stationarity;
  if (name == "hessian") return Suite::Hessian;
  if (name == "conjugate") return Suite::Conjugate;
  if (name == "assumptions") return Suite::Assumptions;
  if (name == "all") return Suite::All;
  throw ConfigError("unknown verify suite '" + std::string(name) + "'");
}

const char* suite_name(Suite s) {
  switch (s) {
    case Suite::Fenchel: return "fenchel";
    case Suite::Stationarity: return "stationarity";
    case Suite::Hessian: return "hessian";
    case Suite::Conjugate: return "conjugate";
    case Suite::Assumptions: return "assumptions";
    case Suite::All: return "all";
  }
  return "unknown";
}

bool Report::all_pass() const {
  return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

const std::vector<Potential>& catalog() {
  static const std::vector<Potential> potentials = {
      Potential(PotentialKind::ExpSquare), Potential(PotentialKind::GemanMcClure),
      Potential(PotentialKind::LogSquare), Potential(PotentialKind::SineClip)};
  return potentials;
}

// ---------------------------------------------------------------------------
// Generators

namespace {

bool bounded_below(const Potential& p) { return p.kind() != PotentialKind::LogSquare; }

LinearOperator random_square_operator(std::size_t n, double spread, Rng& rng) {
  if (rng.uniform() < 0.5) return LinearOperator::identity(n);
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a[i * n + j] = (i == j ? 1.0 : 0.0) + spread * rng.uniform(-1.0, 1.0) / std::sqrt(double(n));
    }
  }
  return LinearOperator::dense(n, n, std::move(a));
}

// Unit steps centred on zero.
Vector increasing_data(std::size_t n, Rng& rng) {
  Vector b(n);
  const double mid = 0.5 * static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<double>(i) - mid + rng.uniform(-0.1, 0.1);
  return b;
}

}  // namespace

double random_interior_sigma(const Potential& p, Rng& rng) {
  if (p.kind() == PotentialKind::LogSquare) return rng.uniform(0.05, 5.0);
  return rng.uniform(0.01, 0.99);
}

SigmaVector random_sigma(const Potential& p, std::size_t m, Rng& rng) {
  Vector s(m);
  for (double& v : s) v = random_interior_sigma(p, rng);
  return SigmaVector(std::move(s), p);
}

ImplicitConcaveInstance random_instance(const Potential& p, std::size_t n, Rng& rng) {
  Vector b(n);
  if (p.kind() == PotentialKind::LogSquare) {
    b = increasing_data(n, rng);
  } else {
    for (double& v : b) v = rng.uniform();
  }
  return ImplicitConcaveInstance(ReconstructionProblem{
      random_square_operator(n, 0.3, rng), std::move(b), make_difference_1d(n),
      rng.uniform(0.1, 1.0), p});
}

Vector random_point(const ImplicitConcaveInstance& inst, Rng& rng) {
  Vector x(inst.n());
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (double& v : x) v = rng.uniform(-2.0, 2.0);
    if (inst.potential().kind() != PotentialKind::LogSquare) return x;
    const Vector y = inst.phi(x);
    if (*std::min_element(y.begin(), y.end()) >= 1e-4) return x;
  }
  throw NumericalError("random_point: could not clear the log guard");
}

ImplicitConcaveInstance random_solvable_instance(const Potential& p, Rng& rng) {
  const auto n = static_cast<std::size_t>(4 + rng.next_u64() % 13);
  Vector b(n);
  double beta = 0.0;
  // log(t^2) is unbounded below, so the start point has to sit in the basin
  // of a local minimum: A stays close to the identity.
  double spread = 0.2;
  if (p.kind() == PotentialKind::LogSquare) {
    spread = 0.01;
    b = increasing_data(n, rng);
    beta = rng.uniform(0.005, 0.02);
  } else {
    const std::size_t jump = 1 + rng.next_u64() % (n - 1);
    const double lo = rng.uniform(0.0, 0.5);
    const double hi = rng.uniform(0.5, 1.0);
    for (std::size_t i = 0; i < n; ++i) b[i] = (i < jump ? lo : hi) + 0.05 * rng.normal();
    beta = rng.uniform(0.05, 0.5);
  }
  return ImplicitConcaveInstance(ReconstructionProblem{
      random_square_operator(n, spread, rng), std::move(b), make_difference_1d(n), beta, p});
}

ImplicitConcaveInstance random_small_instance(const Potential& p, std::size_t n, std::size_t m,
                                              Rng& rng) {
  std::vector<LinearOperator> g;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> row(n);
    for (double& v : row) v = rng.normal();
    g.push_back(LinearOperator::dense(1, n, std::move(row)));
  }
  const bool log = p.kind() == PotentialKind::LogSquare;
  Vector b(n);
  for (double& v : b) v = rng.uniform(-2.0, 2.0) * (log ? 3.0 : 1.0);
  const double beta = log ? rng.uniform(0.02, 0.2) : rng.uniform(0.1, 1.0);
  return ImplicitConcaveInstance(
      ReconstructionProblem{random_square_operator(n, 0.3, rng), std::move(b), std::move(g), beta, p});
}

SolverConfig tight_solver_config() {
  SolverConfig cfg;
  cfg.max_outer_iters = 20000;
  cfg.outer_tol_rel_obj = 1e-14;
  cfg.outer_tol_rel_x = 1e-11;
  cfg.cg_tol = 1e-12;
  cfg.cg_max_iters = 2000;
  return cfg;
}

SolveResult audited_solve(const ImplicitConcaveInstance& inst, SolverConfig cfg, RunAudit& audit) {
  audit = RunAudit{};
  audit.min_sigma = std::numeric_limits<double>::infinity();
  audit.min_value = std::numeric_limits<double>::infinity();
  const SigmaDomain dom = inst.potential().sigma_domain();
  IterationObserver inner = cfg.observer;
  cfg.observer = [&](std::size_t k, std::span<const double> x, const SigmaVector& sigma) {
    for (double s : sigma.values()) {
      audit.min_sigma = std::min(audit.min_sigma, s);
      if (!dom.contains(s)) audit.sigma_in_domain = false;
    }
    const double gap = std::abs(inst.f_value(x) - inst.augmented_value(x, sigma));
    audit.max_eq6_gap = std::max(audit.max_eq6_gap, gap);
    if (inner) inner(k, x, sigma);
  };

  auto audit_trace = [&](const SolveResult& r) {
    const auto& rows = r.trace.rows;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const TraceRow& row = rows[k];
      for (double v : {row.f, row.L, row.grad_inf, row.dx, row.L_after_sigma}) {
        if (!std::isfinite(v)) audit.all_finite = false;
      }
      audit.min_value = std::min({audit.min_value, row.f, row.L});
      if (k > 0) {
        audit.max_L_increase = std::max({audit.max_L_increase, row.L_after_sigma - rows[k - 1].L,
                                         row.L - row.L_after_sigma});
      }
    }
    if (!all_finite(r.x)) audit.all_finite = false;
  };

  try {
    SolveResult r = solve(inst, cfg);
    audit_trace(r);
    return r;
  } catch (const NotConverged& e) {
    if (e.partial() != nullptr) audit_trace(*e.partial());
    throw;
  }
}

// ---------------------------------------------------------------------------
// Suites

namespace {

struct Collector {
  Report& report;
  const char* suite;

  void add(std::string name, bool passed, double worst, double tol, std::string note = {}) {
    report.results.push_back({suite, std::move(name), passed, worst, tol, std::move(note)});
  }
  // worst <= tol
  void bound(std::string name, double worst, double tol, std::string note = {}) {
    add(std::move(name), std::isfinite(worst) && worst <= tol, worst, tol, std::move(note));
  }
};

std::string pid(const Potential& p) { return std::string(p.id()); }

void fenchel_suite(Report& report, std::uint64_t seed) {
  Collector c{report, "fenchel"};
  for (const Potential& p : catalog()) {
    Rng rng(seed ^ 0xF3A1ULL ^ (static_cast<std::uint64_t>(p.kind()) << 32));
    double worst_violation = -std::numeric_limits<double>::infinity();
    double worst_tight = 0.0;
    double worst_point = -std::numeric_limits<double>::infinity();
    for (int batch = 0; batch < 10; ++batch) {
      const ImplicitConcaveInstance inst = random_instance(p, 8, rng);
      for (int s = 0; s < 100; ++s) {
        const Vector x = random_point(inst, rng);
        const SigmaVector sigma = random_sigma(p, inst.m(), rng);
        const double f = inst.f_value(x);
        worst_violation = std::max(worst_violation, f - inst.augmented_value(x, sigma));
        worst_tight = std::max(worst_tight, std::abs(inst.augmented_value(x, inst.sigma_update(x)) - f));
        const double y = bounded_below(p) ? rng.uniform(0.0, 10.0) : rng.uniform(1e-3, 10.0);
        const double sg = random_interior_sigma(p, rng);
        worst_point = std::max(worst_point, p.v(y) - (y * sg - p.v_conj(sg)));
      }
    }
    c.bound("inequality." + pid(p), worst_violation, 1e-9, "max f - L over 1000 samples");
    c.bound("tight." + pid(p), worst_tight, 1e-9, "max |L(x, sigma_update(x)) - f(x)|");
    c.bound("pointwise." + pid(p), worst_point, 1e-9, "max V(y) - y sigma + V*(sigma)");
  }
}

double relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  double diff = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
  }
  return diff / std::max(1.0, norm_inf(analytic));
}

void stationarity_suite(Report& report, std::uint64_t seed) {
  Collector c{report, "stationarity"};
  for (const Potential& p : catalog()) {
    Rng rng(seed ^ 0x57A7ULL ^ (static_cast<std::uint64_t>(p.kind()) << 32));

    // Inverse gradient relation between V' and (V*)'.
    double worst_inverse = 0.0;
    for (int s = 0; s < 50; ++s) {
      const double sigma = random_interior_sigma(p, rng);
      worst_inverse = std::max(worst_inverse, std::abs(p.v_grad(p.v_conj_grad(sigma)) - sigma));
    }
    c.bound("inverse_gradient." + pid(p), worst_inverse, 1e-8);

    // Analytic gradients against central differences.
    double worst_fg = 0.0;
    double worst_lg = 0.0;
    for (int s = 0; s < 50; ++s) {
      const auto n = static_cast<std::size_t>(2 + rng.next_u64() % 15);
      const ImplicitConcaveInstance inst = random_instance(p, n, rng);
      const Vector x = random_point(inst, rng);
      const double h = 1e-5 * (1.0 + norm_inf(x));
      const Vector fd = oracle::fd_gradient([&](auto z) { return inst.f_value(z); }, x, h);
      worst_fg = std::max(worst_fg, relative_error(inst.f_grad(x), fd));

      const SigmaVector sigma = random_sigma(p, inst.m(), rng);
      Vector z(x);
      z.insert(z.end(), sigma.values().begin(), sigma.values().end());
      const double hz = std::min(h, 1e-3);
      const Vector fdz = oracle::fd_gradient(
          [&](std::span<const double> zz) {
            const Vector sg(zz.begin() + static_cast<std::ptrdiff_t>(n), zz.end());
            return inst.augmented_value(zz.first(n), SigmaVector(sg, p));
          },
          z, hz);
      const AugmentedGradient g = inst.augmented_grad(x, sigma);
      Vector gz = g.x;
      gz.insert(gz.end(), g.sigma.begin(), g.sigma.end());
      worst_lg = std::max(worst_lg, relative_error(gz, fdz));
    }
    c.bound("gradient_f." + pid(p), worst_fg, 1e-5, "relative to max(1, |grad|_inf)");
    c.bound("gradient_L." + pid(p), worst_lg, 1e-5, "both blocks");

    // Solver runs.
    double worst_grad = 0.0;
    double worst_gap = 0.0;
    double worst_increase = 0.0;
    double worst_eq6 = 0.0;
    double min_sigma = std::numeric_limits<double>::infinity();
    double min_value = std::numeric_limits<double>::infinity();
    bool in_domain = true;
    bool finite = true;
    int failures = 0;
    for (int run = 0; run < 20; ++run) {
      const ImplicitConcaveInstance inst = random_solvable_instance(p, rng);
      RunAudit audit;
      try {
        const SolveResult r = audited_solve(inst, tight_solver_config(), audit);
        const StationarityReport st = inst.stationarity_report(r.x, r.sigma, 1e-5);
        worst_grad = std::max({worst_grad, st.grad_f_inf, st.grad_x_inf, st.grad_sigma_inf});
        worst_gap = std::max(worst_gap, st.value_gap);
        if (!st.correspondence_ok) ++failures;
      } catch (const Error&) {
        ++failures;
        worst_grad = std::numeric_limits<double>::infinity();
      }
      worst_increase = std::max(worst_increase, audit.max_L_increase);
      worst_eq6 = std::max(worst_eq6, audit.max_eq6_gap);
      min_sigma = std::min(min_sigma, audit.min_sigma);
      min_value = std::min(min_value, audit.min_value);
      in_domain = in_domain && audit.sigma_in_domain;
      finite = finite && audit.all_finite;
    }
    c.bound("solver_stationary." + pid(p), worst_grad, 1e-5,
            std::to_string(failures) + " of 20 runs failed");
    c.bound("value_gap." + pid(p), worst_gap, 1e-9);
    c.bound("monotone_descent." + pid(p), worst_increase, 1e-12);
    c.bound("trajectory_eq6." + pid(p), worst_eq6, 1e-9);
    c.add("sigma_nonnegative." + pid(p), in_domain && min_sigma >= 0.0, -min_sigma, 0.0,
          in_domain ? "all iterates inside the sigma domain" : "iterate left the sigma domain");
    c.add("finite." + pid(p), finite, finite ? 0.0 : 1.0, 0.0);
    if (bounded_below(p)) c.bound("bounded_below." + pid(p), -min_value, 1e-9);
  }
}

void hessian_suite(Report& report, std::uint64_t seed) {
  Collector c{report, "hessian"};
  for (const Potential& p : catalog()) {
    Rng rng(seed ^ 0x4E55ULL ^ (static_cast<std::uint64_t>(p.kind()) << 32));
    int accepted = 0;
    int mismatches = 0;
    int attempts = 0;
    double worst_min_eig = std::numeric_limits<double>::infinity();
    while (accepted < 20 && attempts < 400) {
      ++attempts;
      const auto n = static_cast<std::size_t>(1 + rng.next_u64() % 3);
      const auto m = static_cast<std::size_t>(1 + rng.next_u64() % 2);
      const ImplicitConcaveInstance inst = random_small_instance(p, n, m, rng);
      try {
        const SolveResult r = solve(inst, tight_solver_config());
        const oracle::HessianReport h = oracle::hessian_correspondence_check(inst, r.x, r.sigma, 1e-5);
        if (!h.vgrad_hessian_nonsingular) continue;
        ++accepted;
        if (!h.equivalence_ok) ++mismatches;
        worst_min_eig = std::min({worst_min_eig, h.min_eig_f, h.min_eig_L});
      } catch (const Error&) {
        continue;
      }
    }
    c.add("equivalence." + pid(p), accepted == 20 && mismatches == 0, mismatches, 0.0,
          std::to_string(accepted) + " converged instances, " + std::to_string(attempts) +
              " drawn; smallest eigenvalue " + format_real(worst_min_eig));
  }
}

double table_conjugate(const Potential& p, double s) {
  switch (p.kind()) {
    case PotentialKind::ExpSquare: return -s * (std::log(s) - 1.0);
    case PotentialKind::GemanMcClure: {
      const double d = s - std::sqrt(s);
      return d * d / s;
    }
    case PotentialKind::LogSquare: return 1.0 + std::log(s);
    case PotentialKind::SineClip: return s * std::acos(s) - std::sin(std::acos(s)) - 1.0;
  }
  return 0.0;
}

void conjugate_suite(Report& report, std::uint64_t seed) {
  Collector c{report, "conjugate"};
  for (const Potential& p : catalog()) {
    Rng rng(seed ^ 0xC0CAULL ^ (static_cast<std::uint64_t>(p.kind()) << 32));
    double worst = 0.0;
    double table_gap = 0.0;
    for (int s = 0; s < 50; ++s) {
      const double sigma = random_interior_sigma(p, rng);
      const double closed = p.v_conj(sigma);
      worst = std::max(worst, std::abs(closed - oracle::conjugate_by_grid(p, sigma, 50.0, 100000)));
      table_gap = std::max(table_gap, std::abs(closed - table_conjugate(p, sigma)));
    }
    c.bound("grid." + pid(p), worst, 1e-4, "max |closed form - grid infimum| over 50 sigma");
    if (p.kind() == PotentialKind::LogSquare) {
      c.add("table_exact." + pid(p), table_gap == 0.0, table_gap, 0.0, "matches 1 + log(sigma)");
    } else {
      c.add("table_discrepancy." + pid(p), true, table_gap, 0.0,
            "reported only: max |derived - tabulated| = " + format_real(table_gap));
    }
  }
}

void assumptions_suite(Report& report) {
  Collector c{report, "assumptions"};
  Vector grid(100);
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = 0.1 * static_cast<double>(i + 1);
  for (const Potential& p : catalog()) {
    const AssumptionReport r = check_assumptions(p, grid);
    std::string failing;
    for (const auto& [name, ok] : r.clauses()) {
      if (!ok) failing += (failing.empty() ? "" : ",") + std::string(name);
    }
    // LogSquare is expected to violate psi(0) = 0; the others satisfy all.
    const bool expected = bounded_below(p) ? r.all_pass() : !r.psi_zero_at_origin;
    c.add(pid(p), expected, failing.empty() ? 0.0 : 1.0, 0.0,
          failing.empty() ? "all clauses hold" : "failing: " + failing);
  }
}

}  // namespace

Report run(Suite suite, std::uint64_t seed) {
  Report r;
  const bool all = suite == Suite::All;
  if (all || suite == Suite::Fenchel) fenchel_suite(r, seed);
  if (all || suite == Suite::Stationarity) stationarity_suite(r, seed);
  if (all || suite == Suite::Hessian) hessian_suite(r, seed);
  if (all || suite == Suite::Conjugate) conjugate_suite(r, seed);
  if (all || suite == Suite::Assumptions) assumptions_suite(r);
  return r;
}

void write_report(const Report& report, std::ostream& os) {
  for (const auto& r : report.results) {
    os << (r.passed ? "PASS " : "FAIL ") << r.suite << '/' << r.name
       << "  worst=" << format_real(r.worst) << " tol=" << format_real(r.tolerance);
    if (!r.note.empty()) os << "  (" << r.note << ')';
    os << '\n';
  }
  os << '\n';
  for (const auto& r : report.results) {
    const std::string key = r.suite + '.' + r.name;
    os << key << ".pass=" << (r.passed ? 1 : 0) << '\n' << key << ".worst=" << format_real(r.worst) << '\n';
  }
  os << "summary.pass=" << (report.all_pass() ? 1 : 0) << '\n';
}

}  // namespace hqr::verify
