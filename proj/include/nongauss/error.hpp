#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nongauss {

enum class ErrorKind {
  invalid_dimension,
  shape_mismatch,
  domain,
  numeric_integrity,
  synthesis_failure,
  conditioning,
  convergence,
  validation,
  parse,
  io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_dimension: return "invalid-dimension";
    case ErrorKind::shape_mismatch: return "shape-mismatch";
    case ErrorKind::domain: return "domain";
    case ErrorKind::numeric_integrity: return "numeric-integrity";
    case ErrorKind::synthesis_failure: return "synthesis-failure";
    case ErrorKind::conditioning: return "conditioning";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::validation: return "validation";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Process exit code used by the command-line tool for each error kind.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::numeric_integrity:
    case ErrorKind::synthesis_failure:
    case ErrorKind::convergence:
      return 3;
    case ErrorKind::io:
      return 4;
    default:
      return 2;
  }
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised when an iterative search stops on its budget; carries the best iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_value, std::vector<double> best_point)
      : Error(ErrorKind::convergence, what),
        best_value_(best_value),
        best_point_(std::move(best_point)) {}

  double best_value() const noexcept { return best_value_; }
  const std::vector<double>& best_point() const noexcept { return best_point_; }

 private:
  double best_value_;
  std::vector<double> best_point_;
};

/// Non-fatal status bits that travel with states and results.
enum class Flag : std::uint32_t {
  truncation_guard = 1u << 0,     // a builder's energy guard was violated
  boundary_population = 1u << 1,  // non-negligible weight on the top Fock level
  trace_deficit = 1u << 2,        // trace deficit above the tail budget
  lower_bound = 1u << 3,          // value is a lower bound from a finite search
  above_half = 1u << 4,           // single-mode delta above 1/2, needs review
  closed_form_only = 1u << 5,     // no numeric cross-check was run
  budget_exhausted = 1u << 6,
  moment_tolerance = 1u << 7,     // reference moments matched only to 1e-5
};

class Flags {
 public:
  constexpr Flags() = default;
  constexpr Flags(Flag f) : bits_(static_cast<std::uint32_t>(f)) {}  // NOLINT

  constexpr bool test(Flag f) const { return (bits_ & static_cast<std::uint32_t>(f)) != 0; }
  constexpr void set(Flag f) { bits_ |= static_cast<std::uint32_t>(f); }
  constexpr void clear(Flag f) { bits_ &= ~static_cast<std::uint32_t>(f); }
  constexpr bool any() const { return bits_ != 0; }
  constexpr std::uint32_t bits() const { return bits_; }

  constexpr Flags& operator|=(Flags other) {
    bits_ |= other.bits_;
    return *this;
  }
  friend constexpr Flags operator|(Flags a, Flags b) { return a |= b; }
  friend constexpr bool operator==(Flags a, Flags b) { return a.bits_ == b.bits_; }

  /// Names of the set bits joined by '|', or "none".
  std::string to_string() const {
    static constexpr std::pair<Flag, const char*> names[] = {
        {Flag::truncation_guard, "truncation-guard"},
        {Flag::boundary_population, "boundary-population"},
        {Flag::trace_deficit, "trace-deficit"},
        {Flag::lower_bound, "lower-bound"},
        {Flag::above_half, "above-half"},
        {Flag::closed_form_only, "closed-form-only"},
        {Flag::budget_exhausted, "budget-exhausted"},
        {Flag::moment_tolerance, "moment-tolerance"},
    };
    std::string out;
    for (const auto& [flag, name] : names) {
      if (!test(flag)) continue;
      if (!out.empty()) out += '|';
      out += name;
    }
    return out.empty() ? "none" : out;
  }

 private:
  std::uint32_t bits_ = 0;
};

}  // namespace nongauss
