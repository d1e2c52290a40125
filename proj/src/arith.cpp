#include "korselt/arith.hpp"
#include "korselt/rational.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace korselt {

Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("rational: empty string");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::int64_t n = std::stoll(text.substr(0, slash));
        std::int64_t d = std::stoll(text.substr(slash + 1));
        return Rational(n, d);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(std::stoll(text), 1);
    std::string digits = text.substr(0, dot) + text.substr(dot + 1);
    std::size_t frac_len = text.size() - dot - 1;
    if (frac_len == 0 || frac_len > 17)
        throw std::invalid_argument("rational: bad decimal '" + text + "'");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    return Rational(std::stoll(digits), den);
}

}  // namespace korselt

namespace korselt::arith {

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
    if (mod == 1) return 0;
    std::uint64_t result = 1;
    base %= mod;
    while (exp > 0) {
        if (exp & 1) result = mulmod(result, base, mod);
        base = mulmod(base, base, mod);
        exp >>= 1;
    }
    return result;
}

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                            19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n % p == 0) return n == p;
    }
    if (n < 41 * 41) return true;

    std::uint64_t d = n - 1;
    int r = 0;
    while ((d & 1) == 0) { d >>= 1; ++r; }

    // complete for n < 3.3 * 10^24, in particular for all 64-bit n
    for (std::uint64_t a : {2ull, 325ull, 9375ull, 28178ull, 450775ull,
                            9780504ull, 1795265022ull}) {
        std::uint64_t x = powmod(a % n, d, n);
        if (x == 0 || x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 0; i + 1 < r; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

std::vector<std::uint32_t> small_primes_upto(std::uint32_t n) {
    std::vector<std::uint32_t> primes;
    if (n < 2) return primes;
    std::vector<bool> composite(static_cast<std::size_t>(n) + 1, false);
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        primes.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
    }
    return primes;
}

namespace {

std::uint64_t isqrt_u64(std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n && (r + 1) != 0) ++r;
    return r;
}

}  // namespace

void for_each_prime(std::uint64_t lo, std::uint64_t hi,
                    const std::function<void(std::uint64_t)>& fn) {
    if (hi < 2 || hi < lo) return;
    lo = std::max<std::uint64_t>(lo, 2);
    const auto base = small_primes_upto(static_cast<std::uint32_t>(isqrt_u64(hi)));
    constexpr std::uint64_t kBlock = 1 << 20;
    std::vector<char> composite;
    for (std::uint64_t blo = lo; blo <= hi; blo += kBlock) {
        const std::uint64_t bhi = std::min(hi, blo + kBlock - 1);
        const std::size_t len = static_cast<std::size_t>(bhi - blo + 1);
        composite.assign(len, 0);
        for (std::uint64_t p : base) {
            std::uint64_t start = std::max<std::uint64_t>(p * p, (blo + p - 1) / p * p);
            for (std::uint64_t m = start; m <= bhi; m += p)
                composite[static_cast<std::size_t>(m - blo)] = 1;
        }
        for (std::uint64_t n = blo; n <= bhi; ++n)
            if (!composite[static_cast<std::size_t>(n - blo)]) fn(n);
    }
}

std::vector<std::uint64_t> primes_in_range(std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> out;
    if (hi <= lo) return out;
    for_each_prime(lo + 1, hi, [&](std::uint64_t p) { out.push_back(p); });
    return out;
}

// ---------------------------------------------------------------------------
// Primality and factorization over mpz
// ---------------------------------------------------------------------------

namespace {

const std::vector<std::uint32_t>& trial_primes() {
    static const std::vector<std::uint32_t> primes = small_primes_upto(1'000'000);
    return primes;
}

bool fits_u64(const mpz_class& n) { return mpz_sizeinbase(n.get_mpz_t(), 2) <= 64; }

std::uint64_t to_u64(const mpz_class& n) {
    std::uint64_t lo = mpz_getlimbn(n.get_mpz_t(), 0);
    return lo;  // limbs are 64-bit on this platform
}

// Strong-pseudoprime battery for inputs beyond the proven 64-bit range:
// trial-division prefilter plus Miller-Rabin to the first 25 prime bases.
// Deterministic; desk-scale outputs are re-verified by full factorization
// wherever they are emitted.
bool is_probable_prime_mpz(const mpz_class& n) {
    static const unsigned bases[] = {2,  3,  5,  7,  11, 13, 17, 19, 23,
                                     29, 31, 37, 41, 43, 47, 53, 59, 61,
                                     67, 71, 73, 79, 83, 89, 97};
    for (unsigned p : bases) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return n == p;
    }
    for (std::uint32_t p = 101; p <= 9973; p += 2) {
        if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
    }
    mpz_class d = n - 1;
    unsigned long r = mpz_scan1(d.get_mpz_t(), 0);
    mpz_tdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), r);
    mpz_class x, nm1 = n - 1;
    for (unsigned a : bases) {
        mpz_class base = a;
        mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
        if (x == 1 || x == nm1) continue;
        bool witness = true;
        for (unsigned long i = 0; i + 1 < r; ++i) {
            x = x * x % n;
            if (x == nm1) { witness = false; break; }
        }
        if (witness) return false;
    }
    return true;
}

std::uint64_t pollard_brent_u64(std::uint64_t n) {
    // n odd composite, no factor <= 10^6
    for (std::uint64_t c = 1;; ++c) {
        std::uint64_t x = 2, y = 2, d = 1, q = 1;
        std::uint64_t ys = y;
        const unsigned m = 128;
        for (std::uint64_t r = 1; d == 1; r <<= 1) {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) y = (mulmod(y, y, n) + c) % n;
            for (std::uint64_t k = 0; k < r && d == 1; k += m) {
                ys = y;
                const std::uint64_t bound = std::min<std::uint64_t>(m, r - k);
                for (std::uint64_t i = 0; i < bound; ++i) {
                    y = (mulmod(y, y, n) + c) % n;
                    q = mulmod(q, x > y ? x - y : y - x, n);
                }
                d = std::gcd(q, n);
            }
        }
        if (d == n) {
            // backtrack one step at a time
            do {
                ys = (mulmod(ys, ys, n) + c) % n;
                d = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (d == 1);
        }
        if (d != n) return d;
        // cycle degenerated; retry with the next polynomial constant
    }
}

mpz_class pollard_brent_mpz(const mpz_class& n) {
    for (unsigned long c = 1;; ++c) {
        mpz_class x = 2, y = 2, d = 1, q = 1, ys = 2, diff;
        const unsigned m = 128;
        for (std::uint64_t r = 1; d == 1; r <<= 1) {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) y = (y * y + c) % n;
            for (std::uint64_t k = 0; k < r && d == 1; k += m) {
                ys = y;
                const std::uint64_t bound = std::min<std::uint64_t>(m, r - k);
                for (std::uint64_t i = 0; i < bound; ++i) {
                    y = (y * y + c) % n;
                    diff = x > y ? x - y : y - x;
                    q = q * diff % n;
                }
                mpz_gcd(d.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            }
        }
        if (d == n) {
            do {
                ys = (ys * ys + c) % n;
                diff = x > ys ? x - ys : ys - x;
                mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
            } while (d == 1);
        }
        if (d != n) return d;
    }
}

}  // namespace

bool is_prime(const mpz_class& n) {
    if (n < 2) return false;
    if (fits_u64(n)) return is_prime_u64(to_u64(n));
    return is_probable_prime_mpz(n);
}

void FactoredInteger::validate() const {
    if (value < 1) throw std::logic_error("FactoredInteger: value must be >= 1");
    mpz_class prod = 1;
    const mpz_class* prev = nullptr;
    for (const auto& [p, e] : factors) {
        if (e < 1) throw std::logic_error("FactoredInteger: exponent < 1");
        if (prev && !(*prev < p))
            throw std::logic_error("FactoredInteger: primes not ascending");
        if (!is_prime(p)) throw std::logic_error("FactoredInteger: non-prime factor");
        for (unsigned i = 0; i < e; ++i) prod *= p;
        prev = &p;
    }
    if (prod != value) throw std::logic_error("FactoredInteger: product mismatch");
    if ((value == 1) != factors.empty())
        throw std::logic_error("FactoredInteger: value 1 iff factors empty");
}

FactoredInteger factorize(const mpz_class& n) {
    if (n < 1) throw std::invalid_argument("factorize: n must be >= 1");
    FactoredInteger out;
    out.value = n;
    if (n == 1) return out;

    std::map<mpz_class, unsigned> acc;
    mpz_class rem = n;
    for (std::uint32_t p : trial_primes()) {
        if (mpz_class(p) * p > rem) break;
        if (mpz_divisible_ui_p(rem.get_mpz_t(), p)) {
            unsigned e = 0;
            do {
                mpz_divexact_ui(rem.get_mpz_t(), rem.get_mpz_t(), p);
                ++e;
            } while (mpz_divisible_ui_p(rem.get_mpz_t(), p));
            acc[mpz_class(p)] += e;
        }
    }

    std::vector<mpz_class> stack;
    if (rem > 1) stack.push_back(rem);
    while (!stack.empty()) {
        mpz_class m = stack.back();
        stack.pop_back();
        if (is_prime(m)) {
            acc[m] += 1;
            continue;
        }
        // perfect powers of a prime would loop in rho; peel them here
        if (mpz_perfect_square_p(m.get_mpz_t())) {
            mpz_class r;
            mpz_sqrt(r.get_mpz_t(), m.get_mpz_t());
            stack.push_back(r);
            stack.push_back(r);
            continue;
        }
        mpz_class d = fits_u64(m) ? mpz_class(pollard_brent_u64(to_u64(m)))
                                  : pollard_brent_mpz(m);
        stack.push_back(d);
        stack.push_back(m / d);
    }

    for (auto& [p, e] : acc) out.factors.emplace_back(p, e);
    out.validate();
    return out;
}

bool is_squarefree(const mpz_class& n) { return factorize(n).is_squarefree(); }

bool is_smooth(const mpz_class& n, const mpz_class& y) {
    if (n < 1 || y < 1) throw std::invalid_argument("is_smooth: need n, y >= 1");
    const auto f = factorize(n);
    for (const auto& [p, e] : f.factors)
        if (p > y) return false;
    return true;
}

mpz_class carmichael_lambda(const FactoredInteger& L) {
    if (!L.is_squarefree())
        throw std::invalid_argument("carmichael_lambda: modulus must be squarefree");
    mpz_class lam = 1;
    for (const auto& [q, e] : L.factors) {
        mpz_class qm1 = q - 1;
        mpz_lcm(lam.get_mpz_t(), lam.get_mpz_t(), qm1.get_mpz_t());
    }
    return lam;
}

mpz_class carmichael_lambda(const mpz_class& L) {
    return carmichael_lambda(factorize(L));
}

mpz_class euler_phi(const FactoredInteger& n) {
    mpz_class phi = 1;
    for (const auto& [p, e] : n.factors) {
        phi *= p - 1;
        for (unsigned i = 1; i < e; ++i) phi *= p;
    }
    return phi;
}

// ---------------------------------------------------------------------------
// SieveTable
// ---------------------------------------------------------------------------

SieveTable::SieveTable(std::uint64_t lo, std::uint64_t hi, std::size_t segment_len)
    : lo_(lo), hi_(hi) {
    if (hi < lo) throw std::invalid_argument("SieveTable: hi < lo");
    if (hi >= (std::uint64_t{1} << 32))
        throw std::invalid_argument("SieveTable: hi must be below 2^32");
    if (segment_len == 0) segment_len = kDefaultSegment;
    entries_.assign(static_cast<std::size_t>(hi - lo + 1), 0);
    const auto base = small_primes_upto(static_cast<std::uint32_t>(isqrt_u64(hi)));
    for (std::uint64_t slo = lo; slo <= hi; slo += segment_len) {
        const std::uint64_t shi = std::min<std::uint64_t>(hi, slo + segment_len - 1);
        for (std::uint32_t p : base) {
            // start at 2p so that p itself keeps the prime sentinel
            std::uint64_t start = std::max<std::uint64_t>(
                std::uint64_t{p} * 2, (slo + p - 1) / p * p);
            for (std::uint64_t m = start; m <= shi; m += p) {
                auto& slot = entries_[static_cast<std::size_t>(m - lo_)];
                if (slot == 0) slot = p;
            }
        }
        if (shi == hi) break;
    }
}

std::uint64_t SieveTable::spf(std::uint64_t n) const {
    if (n < lo_ || n > hi_) throw std::out_of_range("SieveTable::spf: n outside table");
    if (n < 2) return n;
    const std::uint32_t e = entries_[static_cast<std::size_t>(n - lo_)];
    return e == 0 ? n : e;
}

SieveTable SieveTable::from_raw(std::uint64_t lo, std::uint64_t hi,
                                std::vector<std::uint32_t> entries) {
    if (hi < lo || entries.size() != static_cast<std::size_t>(hi - lo + 1))
        throw std::invalid_argument("SieveTable::from_raw: size mismatch");
    SieveTable t;
    t.lo_ = lo;
    t.hi_ = hi;
    t.entries_ = std::move(entries);
    return t;
}

PrimeFlags::PrimeFlags(std::uint64_t limit) : limit_(limit) {
    bits_.assign(static_cast<std::size_t>(limit / 64 + 1), 0);
    for_each_prime(2, limit, [&](std::uint64_t p) {
        bits_[p >> 6] |= std::uint64_t{1} << (p & 63);
    });
}

}  // namespace korselt::arith
