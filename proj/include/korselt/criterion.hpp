#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "korselt/arith.hpp"

namespace korselt::criterion {

/// The shift pair (a, b): n is accepted when n is squarefree, composite,
/// n != b and (p - a) | (n - b) for every prime p | n.
/// (1,1) gives classical Carmichael numbers, (-1,-1) Lucas-Carmichael ones.
/// a = 0 is permitted by the arithmetic but has no pseudoprimality reading.
struct KorseltParams {
    std::int64_t a = -1;
    std::int64_t b = 1;
    friend bool operator==(const KorseltParams&, const KorseltParams&) = default;
};

struct WitnessEntry {
    mpz_class p;         // prime divisor of n
    mpz_class divisor;   // p - a (sign kept; divisibility is up to sign)
    mpz_class quotient;  // (n - b) / (p - a), exact
};

struct CarmichaelWitness {
    arith::FactoredInteger n;
    KorseltParams params;
    std::vector<WitnessEntry> entries;  // one per prime divisor, ascending
};

enum class Reject {
    none,
    not_composite,   // n = 1 or n prime
    not_squarefree,
    equals_b,
    divisibility,    // some (p - a) fails to divide (n - b)
};

struct CheckResult {
    bool accepted = false;
    Reject reason = Reject::none;
    // every prime whose divisor test failed (p = a included: 0 divides nothing
    // except 0, and n = b is rejected separately)
    std::vector<mpz_class> failing_primes;
    std::optional<CarmichaelWitness> witness;

    std::string reason_text() const;
};

CheckResult check(const mpz_class& n, const KorseltParams& params);
CheckResult check(const arith::FactoredInteger& n, const KorseltParams& params);

/// Stream every accepted n <= limit in ascending order; return false from the
/// callback to stop early. Runs a segmented divide-out sieve, so each n is
/// factored from table state rather than individually.
void enumerate(std::uint64_t limit, const KorseltParams& params,
               const std::function<bool(const CarmichaelWitness&)>& fn);

std::vector<std::uint64_t> enumerate_values(std::uint64_t limit,
                                            const KorseltParams& params);

std::uint64_t count(std::uint64_t x, const KorseltParams& params);

/// True iff base^n == base (mod n) for every supplied base. Meaningful for
/// n accepted with (a,b) = (1,1).
bool fermat_spot_check(const mpz_class& n, const std::vector<mpz_class>& bases);

/// Deterministic pseudorandom bases in [2, n-2] (n > 4), for spot checks.
std::vector<mpz_class> pseudorandom_bases(const mpz_class& n, int how_many,
                                          std::uint64_t seed);

}  // namespace korselt::criterion
