#ifndef HQR_VERIFY_HPP
#define HQR_VERIFY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hqr/icf.hpp"
#include "hqr/potential.hpp"
#include "hqr/rng.hpp"
#include "hqr/solver.hpp"

// Seeded property suites over the whole library, plus the random instance
// generators they share with the test programs.
namespace hqr::verify {

enum class Suite { Fenchel, Stationarity, Hessian, Conjugate, Assumptions, All };

/// "fenchel", "stationarity", "hessian", "conjugate", "assumptions", "all".
Suite parse_suite(std::string_view name);
const char* suite_name(Suite s);

struct PropertyResult {
  std::string suite;
  std::string name;       // e.g. "inequality.exp"
  bool passed = false;
  double worst = 0.0;     // worst residual observed
  double tolerance = 0.0;
  std::string note;
};

struct Report {
  std::vector<PropertyResult> results;
  bool all_pass() const;
};

Report run(Suite suite, std::uint64_t seed);

/// Human-readable lines followed by key=value lines:
///   <suite>.<name>.pass=0|1, <suite>.<name>.worst=<real>, summary.pass=0|1
void write_report(const Report& report, std::ostream& os);

const std::vector<Potential>& catalog();

/// Sigma drawn uniformly from a compact subset of the domain interior.
double random_interior_sigma(const Potential& p, Rng& rng);
SigmaVector random_sigma(const Potential& p, std::size_t m, Rng& rng);

/// n-dimensional problem with first differences, used for pointwise checks
/// (Fenchel gap, gradients). A is either the identity or a random dense
/// square matrix.
ImplicitConcaveInstance random_instance(const Potential& p, std::size_t n, Rng& rng);

/// Random x for `inst`; for LogSquare it is redrawn until every
/// ||G_i x||^2 clears the guard comfortably.
Vector random_point(const ImplicitConcaveInstance& inst, Rng& rng);

/// Instance for which the half-quadratic iteration reaches a stationary
/// point: n in [4, 16], piecewise-constant data for the bounded potentials
/// and well-separated increasing data with weak regularisation for
/// LogSquare.
ImplicitConcaveInstance random_solvable_instance(const Potential& p, Rng& rng);

/// n <= 3 unknowns, m <= 2 single-row dense regularisers.
ImplicitConcaveInstance random_small_instance(const Potential& p, std::size_t n, std::size_t m,
                                              Rng& rng);

/// Tight stopping rule used by the property suites.
SolverConfig tight_solver_config();

/// Trace and iterate audit of one solver run.
struct RunAudit {
  double max_L_increase = 0.0;   // worst step-to-step increase, both half-steps
  double max_eq6_gap = 0.0;      // max |f(x) - L(x, sigma_update(x))| along the run
  double min_sigma = 0.0;        // smallest sigma entry seen
  bool sigma_in_domain = true;
  double min_value = 0.0;        // smallest f or L in the trace
  bool all_finite = true;
};

/// Solves with an observer attached and audits every iterate.
SolveResult audited_solve(const ImplicitConcaveInstance& inst, SolverConfig cfg, RunAudit& audit);

}  // namespace hqr::verify

#endif  // HQR_VERIFY_HPP
