#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace korselt::arith {

// ---------------------------------------------------------------------------
// 64-bit helpers
// ---------------------------------------------------------------------------

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);

/// Deterministic primality for any 64-bit integer (Miller-Rabin with a base
/// set proven complete below 2^64).
bool is_prime_u64(std::uint64_t n);

/// Simple sieve: all primes <= n, ascending.
std::vector<std::uint32_t> small_primes_upto(std::uint32_t n);

/// Visit every prime in [lo, hi] in ascending order (segmented sieve).
void for_each_prime(std::uint64_t lo, std::uint64_t hi,
                    const std::function<void(std::uint64_t)>& fn);

// ---------------------------------------------------------------------------
// Factored integers
// ---------------------------------------------------------------------------

/// A positive integer together with its complete prime factorization.
/// Primes are strictly ascending, exponents >= 1; value 1 has no factors.
struct FactoredInteger {
    mpz_class value = 1;
    std::vector<std::pair<mpz_class, unsigned>> factors;

    static FactoredInteger one() { return FactoredInteger{}; }

    bool is_squarefree() const {
        for (const auto& [p, e] : factors)
            if (e > 1) return false;
        return true;
    }

    /// Throws std::logic_error if any structural invariant is broken.
    void validate() const;
};

bool is_prime(const mpz_class& n);

/// Complete factorization; trial division then Pollard rho with Brent
/// cycling. Throws std::invalid_argument for n < 1.
FactoredInteger factorize(const mpz_class& n);

bool is_squarefree(const mpz_class& n);

/// True iff every prime factor of n is <= y.
bool is_smooth(const mpz_class& n, const mpz_class& y);

/// lcm of (q - 1) over the prime divisors q of squarefree L; the maximal
/// element order in (Z/LZ)*. Rejects non-squarefree input.
mpz_class carmichael_lambda(const FactoredInteger& L);
mpz_class carmichael_lambda(const mpz_class& L);

mpz_class euler_phi(const FactoredInteger& n);

/// Primes p with lo < p <= hi, ascending.
std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi);

// ---------------------------------------------------------------------------
// Sieve tables
// ---------------------------------------------------------------------------

/// Smallest-prime-factor table over [lo, hi], built in segments so a narrow
/// window high up costs only the window plus the base primes.
class SieveTable {
  public:
    // Entries are 32-bit so hi must stay below 2^32 when the window can
    // contain primes; base primes never exceed 2^32 anyway.
    SieveTable(std::uint64_t lo, std::uint64_t hi,
               std::size_t segment_len = kDefaultSegment);

    static constexpr std::size_t kDefaultSegment = std::size_t{1} << 22;

    std::uint64_t lo() const { return lo_; }
    std::uint64_t hi() const { return hi_; }

    /// Least prime factor of n (n itself when prime). spf(1) = 1, spf(0) = 0.
    std::uint64_t spf(std::uint64_t n) const;

    bool is_prime(std::uint64_t n) const { return n >= 2 && spf(n) == n; }

    const std::vector<std::uint32_t>& raw() const { return entries_; }

    /// Rebuild a table from externally persisted entries (validated sizes
    /// only; callers are expected to checksum the payload).
    static SieveTable from_raw(std::uint64_t lo, std::uint64_t hi,
                               std::vector<std::uint32_t> entries);

  private:
    SieveTable() = default;
    std::uint64_t lo_ = 0, hi_ = 0;
    std::vector<std::uint32_t> entries_;  // 0 = no prime factor <= sqrt(hi)
};

/// Plain primality bitmap over [0, n]; one bit per integer.
class PrimeFlags {
  public:
    explicit PrimeFlags(std::uint64_t limit);
    std::uint64_t limit() const { return limit_; }
    bool is_prime(std::uint64_t n) const {
        return n <= limit_ && (bits_[n >> 6] >> (n & 63) & 1) != 0;
    }

  private:
    std::uint64_t limit_;
    std::vector<std::uint64_t> bits_;
};

}  // namespace korselt::arith
