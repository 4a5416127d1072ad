#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace persuasion {

// Exact arithmetic backend for rational-mode evaluation.  All file inputs are
// finite decimals or p/q fractions, so they embed exactly.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(double x) { return x; }

// Parses "p/q", "-12", "0.25" (finite decimals only) into an exact rational.
Rational rational_from_string(const std::string& text);

// Recovers the decimal a double was written as (shortest round-trip form) and
// rationalizes that, so a JSON literal like 0.4 becomes exactly 2/5.
Rational rational_from_double(double x);

std::string rational_to_string(const Rational& q);

enum class Errc {
  PriorNotNormalized,
  TypesNotPartition,
  MissingUtility,
  DeviationBoundOutOfRange,
  UnknownAgent,
  InfeasibleDeviation,
  DuplicateAgent,
  ZeroProbabilitySignal,
  UncoveredDeviation,
  NoBlockingWitness,
  InfeasibleSolution,
  KernelNotNormalized,
  FormatError,
  FileNotFound,
};

const char* errc_name(Errc c);

// Input / model errors. `field` names the offending entity where applicable.
class ModelError : public std::runtime_error {
 public:
  ModelError(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

// Thrown when an enumeration would exceed the configured cap.  The tool is
// expected to fail loudly instead of hanging on exponential regimes.
class GuardExceeded : public std::runtime_error {
 public:
  GuardExceeded(const std::string& what_space, std::uint64_t needed, std::uint64_t cap)
      : std::runtime_error("explosion guard: " + what_space + " needs " +
                           std::to_string(needed) + " > cap " + std::to_string(cap)),
        needed_(needed), cap_(cap) {}
  std::uint64_t needed() const { return needed_; }
  std::uint64_t cap() const { return cap_; }

 private:
  std::uint64_t needed_, cap_;
};

struct Limits {
  std::uint64_t enumeration_cap = 10'000'000;  // deviations, blocking profiles, permutations
  std::uint64_t max_pivots = 1'000'000;
};

// Multiplies a running count, saturating at the cap check.
inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* space,
                                 std::uint64_t cap) {
  if (b != 0 && a > cap / b) throw GuardExceeded(space, cap + 1, cap);
  return a * b;
}

}  // namespace persuasion
