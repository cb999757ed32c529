#include "hqr/potential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "hqr/error.hpp"

namespace hqr {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_value(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

[[noreturn]] void throw_domain(std::string_view op, std::string_view id, double x) {
  throw DomainError(std::string(op) + "(" + std::string(id) + "): argument " + fmt_value(x) +
                    " outside the domain");
}

}  // namespace

bool SigmaDomain::contains(double sigma) const noexcept {
  if (!std::isfinite(sigma)) return false;
  const bool above = lo_closed ? sigma >= lo : sigma > lo;
  const bool below = hi_closed ? sigma <= hi : sigma < hi;
  return above && below;
}

bool SigmaDomain::interior(double sigma) const noexcept {
  return std::isfinite(sigma) && sigma > lo && sigma < hi;
}

Potential::Potential(PotentialKind kind, double log_epsilon)
    : kind_(kind), log_epsilon_(log_epsilon) {
  if (!(log_epsilon > 0.0) || !std::isfinite(log_epsilon)) {
    throw ConfigError("log_epsilon must be a positive finite number");
  }
}

Potential Potential::from_id(std::string_view id, double log_epsilon) {
  if (id == "exp") return Potential(PotentialKind::ExpSquare, log_epsilon);
  if (id == "geman-mcclure") return Potential(PotentialKind::GemanMcClure, log_epsilon);
  if (id == "log") return Potential(PotentialKind::LogSquare, log_epsilon);
  if (id == "sine") return Potential(PotentialKind::SineClip, log_epsilon);
  throw ConfigError("unknown potential '" + std::string(id) +
                    "' (expected exp, geman-mcclure, log or sine)");
}

std::string_view Potential::id() const noexcept {
  switch (kind_) {
    case PotentialKind::ExpSquare: return "exp";
    case PotentialKind::GemanMcClure: return "geman-mcclure";
    case PotentialKind::LogSquare: return "log";
    case PotentialKind::SineClip: return "sine";
  }
  return "unknown";
}

double Potential::zero_limit_weight() const noexcept {
  return kind_ == PotentialKind::LogSquare ? kInf : 1.0;
}

SigmaDomain Potential::sigma_domain() const noexcept {
  switch (kind_) {
    case PotentialKind::ExpSquare:
    case PotentialKind::GemanMcClure:
    case PotentialKind::SineClip:
      return {0.0, 1.0, true, true};
    case PotentialKind::LogSquare:
      return {0.0, kInf, false, false};
  }
  return {};
}

double Potential::psi(double t) const {
  if (!std::isfinite(t)) throw_domain("psi", id(), t);
  if (kind_ == PotentialKind::LogSquare && t == 0.0) throw_domain("psi", id(), t);
  return v(t * t);
}

double Potential::v(double y) const {
  if (!(y >= 0.0) || !std::isfinite(y)) throw_domain("v", id(), y);
  switch (kind_) {
    case PotentialKind::ExpSquare:
      return -std::expm1(-y);
    case PotentialKind::GemanMcClure:
      return y / (1.0 + y);
    case PotentialKind::LogSquare:
      if (y == 0.0) throw_domain("v", id(), y);
      return std::log(std::max(y, log_epsilon_));
    case PotentialKind::SineClip:
      return y <= kHalfPi ? std::sin(y) : 1.0;
  }
  return 0.0;
}

double Potential::v_grad(double y) const {
  if (!(y >= 0.0) || !std::isfinite(y)) throw_domain("v_grad", id(), y);
  switch (kind_) {
    case PotentialKind::ExpSquare:
      return std::exp(-y);
    case PotentialKind::GemanMcClure: {
      const double d = 1.0 + y;
      return 1.0 / (d * d);
    }
    case PotentialKind::LogSquare:
      if (y == 0.0) throw_domain("v_grad", id(), y);
      return 1.0 / std::max(y, log_epsilon_);
    case PotentialKind::SineClip:
      return y <= kHalfPi ? std::cos(y) : 0.0;
  }
  return 0.0;
}

double Potential::v_conj(double sigma) const {
  if (!sigma_domain().contains(sigma)) throw_domain("v_conj", id(), sigma);
  switch (kind_) {
    case PotentialKind::ExpSquare:
      // y = -log(sigma); the sigma -> 0 limit is -1.
      if (sigma == 0.0) return -1.0;
      return sigma * (1.0 - std::log(sigma)) - 1.0;
    case PotentialKind::GemanMcClure: {
      // y = 1/sqrt(sigma) - 1
      const double d = 1.0 - std::sqrt(sigma);
      return -d * d;
    }
    case PotentialKind::LogSquare:
      return 1.0 + std::log(sigma);
    case PotentialKind::SineClip:
      // y = arccos(sigma)
      return sigma * std::acos(sigma) - std::sqrt((1.0 - sigma) * (1.0 + sigma));
  }
  return 0.0;
}

double Potential::v_conj_grad(double sigma) const {
  if (!sigma_domain().contains(sigma)) throw_domain("v_conj_grad", id(), sigma);
  switch (kind_) {
    case PotentialKind::ExpSquare:
      if (sigma == 0.0) throw_domain("v_conj_grad", id(), sigma);
      return -std::log(sigma);
    case PotentialKind::GemanMcClure:
      if (sigma == 0.0) throw_domain("v_conj_grad", id(), sigma);
      return 1.0 / std::sqrt(sigma) - 1.0;
    case PotentialKind::LogSquare:
      return 1.0 / sigma;
    case PotentialKind::SineClip:
      return std::acos(sigma);
  }
  return 0.0;
}

double Potential::weight(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw_domain("weight", id(), t);
  return weight_from_square(t * t);
}

double Potential::weight_from_square(double y) const {
  if (!(y >= 0.0) || !std::isfinite(y)) throw_domain("weight", id(), y);
  if (kind_ == PotentialKind::LogSquare) {
    if (y < log_epsilon_) throw_domain("weight", id(), y);
    return v_grad(y);
  }
  if (y == 0.0) return zero_limit_weight();
  return v_grad(y);
}

// ---------------------------------------------------------------------------

std::array<std::pair<const char*, bool>, AssumptionReport::kClauseCount>
AssumptionReport::clauses() const {
  return {{
      {"psi_nonnegative", psi_nonnegative},
      {"psi_zero_at_origin", psi_zero_at_origin},
      {"psi_symmetric", psi_symmetric},
      {"psi_c1", psi_c1},
      {"derivative_nonnegative", derivative_nonnegative},
      {"weight_decreasing", weight_decreasing},
      {"weight_vanishes", weight_vanishes},
      {"zero_limit_finite", zero_limit_finite},
  }};
}

bool AssumptionReport::all_pass() const {
  const auto cs = clauses();
  return std::all_of(cs.begin(), cs.end(), [](const auto& c) { return c.second; });
}

namespace {

// Evaluates pred, treating a DomainError as a failed clause.
template <class Pred>
bool holds(Pred&& pred) {
  try {
    return pred();
  } catch (const DomainError&) {
    return false;
  }
}

}  // namespace

AssumptionReport check_assumptions(const Potential& p, std::span<const double> t_grid) {
  if (t_grid.size() < 10) throw ConfigError("assumption grid needs at least 10 points");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0) || !std::isfinite(t_grid[i]) ||
        (i > 0 && !(t_grid[i] > t_grid[i - 1]))) {
      throw ConfigError("assumption grid must be positive, finite and strictly increasing");
    }
  }

  AssumptionReport r;
  r.psi_zero_at_origin = holds([&] { return p.psi(0.0) == 0.0; });
  r.psi_nonnegative = holds([&] {
    if (p.psi(0.0) < 0.0) return false;
    return std::all_of(t_grid.begin(), t_grid.end(),
                       [&](double t) { return p.psi(t) >= 0.0 && p.psi(-t) >= 0.0; });
  });
  r.psi_symmetric = holds([&] {
    return std::all_of(t_grid.begin(), t_grid.end(),
                       [&](double t) { return p.psi(t) == p.psi(-t); });
  });
  r.psi_c1 = holds([&] {
    for (double t : t_grid) {
      const double h = 1e-6 * (1.0 + t);
      const double fd = (p.psi(t + h) - p.psi(t - h)) / (2.0 * h);
      const double analytic = 2.0 * t * p.weight(t);
      if (!(std::abs(fd - analytic) <= 1e-5 * (1.0 + std::abs(analytic)))) return false;
    }
    return true;
  });
  r.derivative_nonnegative = holds([&] {
    return std::all_of(t_grid.begin(), t_grid.end(), [&](double t) { return p.weight(t) >= 0.0; });
  });
  r.weight_decreasing = holds([&] {
    double prev = p.weight(t_grid[0]);
    for (std::size_t i = 1; i < t_grid.size(); ++i) {
      const double w = p.weight(t_grid[i]);
      if (w > prev) return false;
      if (prev > 0.0 && !(w < prev)) return false;
      prev = w;
    }
    return true;
  });
  r.weight_vanishes = holds([&] { return p.weight(100.0) < 1e-3; });
  r.zero_limit_finite = holds([&] {
    const double m = p.zero_limit_weight();
    if (!(m > 0.0) || !std::isfinite(m)) return false;
    return p.weight(0.0) == m && std::abs(p.weight(1e-4) - m) <= 1e-6;
  });
  return r;
}

}  // namespace hqr
