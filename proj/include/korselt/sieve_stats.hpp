#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "korselt/arith.hpp"
#include "korselt/rational.hpp"

namespace korselt::sieve_stats {

/// Number of primes <= x, exact.
std::uint64_t pi(std::uint64_t x);

/// Number of primes a < p <= x for which p - a has no prime factor > y.
std::uint64_t pi_shifted_smooth(std::uint64_t x, std::uint64_t y, std::int64_t a);

/// Number of primes p <= x with p == a (mod d).
std::uint64_t pi_progression(std::uint64_t x, std::uint64_t d, std::int64_t a);

/// The primes q in (y^theta / log y, y^theta] whose shift q - 1 is y-smooth.
/// Interval endpoints are decided exactly: the upper bound by integer power
/// comparison, the lower one by bracketed high-precision evaluation.
struct SmoothPrimeWindow {
    std::uint64_t y = 0;
    Rational theta;
    double lower_bound = 0;  // y^theta / log y (informational)
    double upper_bound = 0;  // y^theta (informational)
    std::vector<std::uint64_t> primes;
};

SmoothPrimeWindow select_smooth_window(std::uint64_t y, const Rational& theta);

/// An exact sieve count next to an analytic bound evaluated at user-supplied
/// constants. Reports are diagnostics: the bounds are asymptotic statements
/// whose thresholds are unknowable, so nothing here asserts.
struct BoundReport {
    std::string kind;  // "eq1" or "eq2"
    std::vector<std::pair<std::string, std::string>> inputs;
    std::uint64_t lhs = 0;
    double rhs = 0;
    std::string rhs_formula;
    double ratio = 0;  // lhs / rhs
};

/// lhs = count of primes p <= x with p - a floor(x^(1-E))-smooth;
/// rhs = gamma * x / log x. Requires 0 < E < 1 - 1/(2 sqrt(e)), gamma > 0.
BoundReport shifted_smooth_report(std::uint64_t x, const Rational& E,
                                  std::int64_t a, const Rational& gamma);

/// lhs = pi(y; d, a); rhs = pi(y) / (2 phi(d)). Requires gcd(a, d) = 1.
BoundReport progression_report(std::uint64_t y, std::uint64_t d, std::int64_t a);

}  // namespace korselt::sieve_stats
