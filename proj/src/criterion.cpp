#include "korselt/criterion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace korselt::criterion {

namespace {

using i128 = __int128;

bool divides(const mpz_class& d, const mpz_class& m) {
    if (d == 0) return m == 0;
    return mpz_divisible_p(m.get_mpz_t(), d.get_mpz_t()) != 0;
}

}  // namespace

std::string CheckResult::reason_text() const {
    switch (reason) {
        case Reject::none: return "accepted";
        case Reject::not_composite: return "not composite";
        case Reject::not_squarefree: return "not squarefree";
        case Reject::equals_b: return "n equals b";
        case Reject::divisibility: {
            std::string s = "divisor test failed for prime(s)";
            for (const auto& p : failing_primes) s += " " + p.get_str();
            return s;
        }
    }
    return "?";
}

CheckResult check(const arith::FactoredInteger& n, const KorseltParams& params) {
    CheckResult res;
    const bool composite = n.factors.size() >= 2 ||
                           (n.factors.size() == 1 && n.factors[0].second >= 2);
    if (!composite) {
        res.reason = Reject::not_composite;
        return res;
    }
    if (!n.is_squarefree()) {
        res.reason = Reject::not_squarefree;
        return res;
    }
    if (n.value == params.b) {
        res.reason = Reject::equals_b;
        return res;
    }
    const mpz_class target = n.value - params.b;
    CarmichaelWitness w{n, params, {}};
    for (const auto& [p, e] : n.factors) {
        mpz_class d = p - params.a;
        if (d == 0 || !divides(d, target)) {
            res.failing_primes.push_back(p);
            continue;
        }
        mpz_class q;
        mpz_divexact(q.get_mpz_t(), target.get_mpz_t(), d.get_mpz_t());
        w.entries.push_back({p, d, q});
    }
    if (!res.failing_primes.empty()) {
        res.reason = Reject::divisibility;
        return res;
    }
    res.accepted = true;
    res.witness = std::move(w);
    return res;
}

CheckResult check(const mpz_class& n, const KorseltParams& params) {
    if (n < 1) throw std::invalid_argument("check: n must be >= 1");
    return check(arith::factorize(n), params);
}

void enumerate(std::uint64_t limit, const KorseltParams& params,
               const std::function<bool(const CarmichaelWitness&)>& fn) {
    if (limit < 2) return;
    const auto base = arith::small_primes_upto(
        static_cast<std::uint32_t>(std::sqrt(static_cast<double>(limit)) + 1));
    constexpr std::uint64_t kSegment = std::uint64_t{1} << 22;

    std::vector<std::uint64_t> rem;
    std::vector<std::uint8_t> dead;
    std::vector<std::uint8_t> nfac;

    const i128 a = params.a, b = params.b;

    for (std::uint64_t lo = 2; lo <= limit; lo += kSegment) {
        const std::uint64_t hi = std::min(limit, lo + kSegment - 1);
        const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
        rem.resize(len);
        for (std::size_t i = 0; i < len; ++i) rem[i] = lo + i;
        dead.assign(len, 0);
        nfac.assign(len, 0);

        for (std::uint32_t p : base) {
            if (std::uint64_t{p} * p > hi) break;
            std::uint64_t start = std::max<std::uint64_t>(p, (lo + p - 1) / p * p);
            const i128 div = i128{p} - a;
            for (std::uint64_t m = start; m <= hi; m += p) {
                const std::size_t i = static_cast<std::size_t>(m - lo);
                if (dead[i]) continue;
                std::uint64_t r = rem[i] / p;
                if (r % p == 0) {  // p^2 | n
                    dead[i] = 1;
                    continue;
                }
                rem[i] = r;
                if (div == 0 || (i128{m} - b) % div != 0) {
                    dead[i] = 1;
                    continue;
                }
                ++nfac[i];
            }
        }

        for (std::size_t i = 0; i < len; ++i) {
            if (dead[i]) continue;
            const std::uint64_t n = lo + i;
            std::uint8_t k = nfac[i];
            if (rem[i] > 1) {  // one prime cofactor > sqrt(limit)
                const i128 div = i128{rem[i]} - a;
                if (div == 0 || (i128{n} - b) % div != 0) continue;
                ++k;
            }
            if (k < 2) continue;  // 1 or prime
            if (i128{n} == b) continue;
            auto res = check(mpz_class(static_cast<unsigned long>(n)), params);
            if (!res.accepted)
                throw std::logic_error("enumerate: sieve accepted n=" +
                                       std::to_string(n) + " but check rejects it");
            if (!fn(*res.witness)) return;
        }
    }
}

std::vector<std::uint64_t> enumerate_values(std::uint64_t limit,
                                            const KorseltParams& params) {
    std::vector<std::uint64_t> out;
    enumerate(limit, params, [&](const CarmichaelWitness& w) {
        out.push_back(w.n.value.get_ui());
        return true;
    });
    return out;
}

std::uint64_t count(std::uint64_t x, const KorseltParams& params) {
    std::uint64_t c = 0;
    enumerate(x, params, [&](const CarmichaelWitness&) {
        ++c;
        return true;
    });
    return c;
}

bool fermat_spot_check(const mpz_class& n, const std::vector<mpz_class>& bases) {
    if (n < 2) throw std::invalid_argument("fermat_spot_check: n must be >= 2");
    mpz_class x, want;
    for (const auto& base : bases) {
        mpz_powm(x.get_mpz_t(), base.get_mpz_t(), n.get_mpz_t(), n.get_mpz_t());
        want = base % n;
        if (want < 0) want += n;
        if (x != want) return false;
    }
    return true;
}

std::vector<mpz_class> pseudorandom_bases(const mpz_class& n, int how_many,
                                          std::uint64_t seed) {
    if (n <= 4) throw std::invalid_argument("pseudorandom_bases: n must exceed 4");
    std::mt19937_64 rng(seed);
    const mpz_class span = n - 3;  // bases in [2, n-2]
    std::vector<mpz_class> out;
    out.reserve(static_cast<std::size_t>(how_many));
    for (int i = 0; i < how_many; ++i) {
        mpz_class r;
        // enough 64-bit words to cover span, then reduce
        const std::size_t words = mpz_sizeinbase(span.get_mpz_t(), 2) / 64 + 1;
        for (std::size_t w = 0; w < words; ++w) {
            r <<= 64;
            r += mpz_class(static_cast<unsigned long>(rng()));
        }
        out.push_back(2 + r % span);
    }
    return out;
}

}  // namespace korselt::criterion
