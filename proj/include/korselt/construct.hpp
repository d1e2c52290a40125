#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "korselt/arith.hpp"
#include "korselt/criterion.hpp"
#include "korselt/groups.hpp"
#include "korselt/rational.hpp"
#include "korselt/sieve_stats.hpp"

namespace korselt::construct {

/// Everything the pipeline needs: where the seed primes come from, how far
/// the prime harvest reaches (x_cap), the multiplier scan ceiling, and the
/// subsequence-search knobs.
struct ConstructionConfig {
    std::vector<std::uint64_t> q_primes;  // explicit seed primes, or empty
    std::optional<std::uint64_t> y;       // window mode: q from (y, theta)
    std::optional<Rational> theta;

    std::uint64_t x_cap = 1'000'000;  // harvested primes must not exceed this
    std::int64_t a = -1;              // shift: harvested p = d*k + a
    std::uint64_t k_max = 1'000;      // multiplier scan ceiling
    std::size_t t_cap = 16;           // max subsequence length
    std::uint64_t budget = 50'000'000;
    std::size_t max_results = 64;
};

/// Product of distinct primes; rejects duplicates.
arith::FactoredInteger build_modulus(const std::vector<std::uint64_t>& q_primes);

struct MultiplierResult {
    std::uint64_t k = 1;
    std::uint64_t hit_count = 0;
    // (d, p) with d | L and p = d*k + a prime, ascending in d
    std::vector<std::pair<std::uint64_t, std::uint64_t>> hits;
};

/// Scan k = 1..k_max with gcd(k, a*L) = 1 and return the k maximizing the
/// number of divisors d | L with d*k + a prime and <= x_cap; ties go to the
/// smaller k.
MultiplierResult find_multiplier(const arith::FactoredInteger& L,
                                 std::uint64_t x_cap, std::int64_t a,
                                 std::uint64_t k_max);

/// All primes p <= x_cap of the form p = d*k + a with d | L, ascending.
std::vector<std::uint64_t> harvest_primes(const arith::FactoredInteger& L,
                                          std::uint64_t k, std::uint64_t x_cap,
                                          std::int64_t a);

/// Set difference P \ Q, order preserved.
std::vector<std::uint64_t> remove_seed_primes(const std::vector<std::uint64_t>& P,
                                              const std::vector<std::uint64_t>& Q);

struct ConstructedNumber {
    mpz_class n;
    criterion::CarmichaelWitness korselt_witness;
    groups::SubsequenceWitness product_witness;
};

struct ProductSearchResult {
    std::vector<ConstructedNumber> found;  // ascending by n
    groups::SearchStatus status = groups::SearchStatus::exhausted;
    std::uint64_t products_computed = 0;
    std::vector<std::uint64_t> dropped_nonunits;  // members sharing a factor with L
};

/// Search even-size subsets S of P_prime with product congruent to 1 mod L;
/// every find is independently re-verified: product 1 mod k, mod kL, each
/// p + 1 divides n - 1, and the full (-1,1) criterion check.
ProductSearchResult search_identity_products(
    const std::vector<std::uint64_t>& P_prime, const arith::FactoredInteger& L,
    std::uint64_t k, std::size_t t_cap, std::uint64_t budget,
    std::size_t max_results, std::uint64_t seed = 0x6b6f7273656c74ULL);

struct ConstructionReport {
    ConstructionConfig config;
    std::optional<sieve_stats::SmoothPrimeWindow> window;  // when (y, theta) used
    std::vector<std::uint64_t> q_primes;
    arith::FactoredInteger L;
    mpz_class lambda_L;
    mpz_class group_order;  // 2 phi(L)
    mpz_class max_order;    // lcm(lambda(L), 2)
    double identity_free_bound = 0;
    std::uint64_t k = 1;
    std::uint64_t hit_count = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> hits;
    std::vector<std::uint64_t> P;
    std::vector<std::uint64_t> P_prime;
    std::vector<std::uint64_t> dropped_nonunits;
    std::vector<ConstructedNumber> found;
    groups::SearchStatus search_status = groups::SearchStatus::exhausted;
    std::uint64_t products_computed = 0;

    // diagnostics
    double log_L = 0;
    std::size_t q_count = 0;
    double elapsed_ms = 0;
    // asymptotic context, derived from the caps (not used as constraints)
    double implied_B = 0;                  // 1 - log(k_max)/log(x_cap)
    std::optional<double> implied_E;       // 1 - 1/theta (window mode)
    std::optional<double> log_x_theory;    // y^(1+delta), delta = eps*theta/(4B)
    std::optional<double> log_t_theory;    // y^(1+delta/2), with eps = E*B/2
};

ConstructionReport run_pipeline(const ConstructionConfig& config);

/// The shipped demo: Q = {3,5,7,11,13}, x_cap = 10^6, k_max = 1000. Lands on
/// k = 8 with 17 divisor-prime hits and an exhaustive search over the 16
/// harvested primes.
ConstructionConfig demo_config();

}  // namespace korselt::construct
