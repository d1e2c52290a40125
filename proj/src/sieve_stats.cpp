#include "korselt/sieve_stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <mpfr.h>

namespace korselt::sieve_stats {

namespace {

using i128 = __int128;

std::uint64_t isqrt(std::uint64_t n) {
    if (n == 0) return 0;
    std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n && (r + 1) != 0) ++r;
    return r;
}

// floor(root) of y^theta computed exactly: largest q with q^den <= y^num.
std::uint64_t pow_floor_exact(std::uint64_t y, const Rational& theta) {
    mpz_class ypow, root;
    mpz_ui_pow_ui(ypow.get_mpz_t(), y, static_cast<unsigned long>(theta.num));
    mpz_root(root.get_mpz_t(), ypow.get_mpz_t(),
             static_cast<unsigned long>(theta.den));
    if (!root.fits_ulong_p())
        throw std::invalid_argument("window upper bound does not fit in 64 bits");
    return root.get_ui();
}

// Decide q > y^theta / log(y) with bracketed rounding; precision is raised
// until the two directed evaluations agree on the comparison.
bool above_lower_bound(std::uint64_t q, std::uint64_t y, const Rational& theta) {
    for (mpfr_prec_t prec = 256; prec <= 1 << 13; prec *= 2) {
        bool verdict[2];
        bool agreed = true;
        for (int dir = 0; dir < 2; ++dir) {
            const mpfr_rnd_t rnd = dir == 0 ? MPFR_RNDD : MPFR_RNDU;
            mpfr_t yb, ex, pw, lg, bound;
            mpfr_inits2(prec, yb, ex, pw, lg, bound, static_cast<mpfr_ptr>(nullptr));
            mpfr_set_ui(yb, static_cast<unsigned long>(y), rnd);
            mpfr_set_si(ex, static_cast<long>(theta.num), rnd);
            mpfr_div_si(ex, ex, static_cast<long>(theta.den), rnd);
            mpfr_pow(pw, yb, ex, rnd);
            // dividing by log(y): round the divisor the opposite way
            mpfr_log(lg, yb, dir == 0 ? MPFR_RNDU : MPFR_RNDD);
            mpfr_div(bound, pw, lg, rnd);
            verdict[dir] = mpfr_cmp_ui(bound, static_cast<unsigned long>(q)) < 0;
            mpfr_clears(yb, ex, pw, lg, bound, static_cast<mpfr_ptr>(nullptr));
        }
        agreed = verdict[0] == verdict[1];
        if (agreed) return verdict[0];
    }
    throw std::runtime_error("window lower bound undecidable at max precision");
}

double lower_bound_double(std::uint64_t y, const Rational& theta) {
    const double ly = std::log(static_cast<double>(y));
    return std::pow(static_cast<double>(y), theta.value()) / ly;
}

}  // namespace

std::uint64_t pi(std::uint64_t x) {
    std::uint64_t c = 0;
    arith::for_each_prime(2, x, [&](std::uint64_t) { ++c; });
    return c;
}

std::uint64_t pi_shifted_smooth(std::uint64_t x, std::uint64_t y, std::int64_t a) {
    if (x < 1 || y < 1)
        throw std::invalid_argument("pi_shifted_smooth: need x, y >= 1");
    if (a == 0) throw std::invalid_argument("pi_shifted_smooth: a must be non-zero");
    const i128 m_max_s = i128{x} - a;
    if (m_max_s < 1) return 0;
    const std::uint64_t m_max = static_cast<std::uint64_t>(m_max_s);

    const arith::PrimeFlags prime(x);
    const auto base = arith::small_primes_upto(static_cast<std::uint32_t>(isqrt(m_max)));

    std::uint64_t count = 0;
    constexpr std::uint64_t kBlock = std::uint64_t{1} << 21;
    std::vector<std::uint64_t> rem;
    std::vector<std::uint8_t> rough;  // some prime factor > y found
    for (std::uint64_t lo = 1; lo <= m_max; lo += kBlock) {
        const std::uint64_t hi = std::min(m_max, lo + kBlock - 1);
        const std::size_t len = static_cast<std::size_t>(hi - lo + 1);
        rem.resize(len);
        for (std::size_t i = 0; i < len; ++i) rem[i] = lo + i;
        rough.assign(len, 0);
        for (std::uint32_t p : base) {
            std::uint64_t start = std::max<std::uint64_t>(p, (lo + p - 1) / p * p);
            const bool over = p > y;
            for (std::uint64_t m = start; m <= hi; m += p) {
                const std::size_t i = static_cast<std::size_t>(m - lo);
                if (over) rough[i] = 1;
                std::uint64_t r = rem[i];
                while (r % p == 0) r /= p;
                rem[i] = r;
            }
        }
        for (std::size_t i = 0; i < len; ++i) {
            const std::uint64_t m = lo + i;
            const i128 pc = i128{m} + a;
            if (pc < 2 || pc > i128{x}) continue;
            if (!prime.is_prime(static_cast<std::uint64_t>(pc))) continue;
            if (rough[i]) continue;
            if (rem[i] > 1 && rem[i] > y) continue;
            ++count;
        }
    }
    return count;
}

std::uint64_t pi_progression(std::uint64_t x, std::uint64_t d, std::int64_t a) {
    if (x < 1 || d < 1) throw std::invalid_argument("pi_progression: need x, d >= 1");
    const std::uint64_t target =
        static_cast<std::uint64_t>(((a % static_cast<std::int64_t>(d)) +
                                    static_cast<std::int64_t>(d)) %
                                   static_cast<std::int64_t>(d));
    std::uint64_t c = 0;
    arith::for_each_prime(2, x, [&](std::uint64_t p) {
        if (p % d == target) ++c;
    });
    return c;
}

SmoothPrimeWindow select_smooth_window(std::uint64_t y, const Rational& theta) {
    if (y < 3) throw std::invalid_argument("select_smooth_window: need y >= 3");
    if (theta.num <= theta.den || theta.num <= 0)
        throw std::invalid_argument("select_smooth_window: need theta > 1");

    SmoothPrimeWindow win;
    win.y = y;
    win.theta = theta;
    const std::uint64_t hi = pow_floor_exact(y, theta);
    win.upper_bound = std::pow(static_cast<double>(y), theta.value());
    win.lower_bound = lower_bound_double(y, theta);

    // generous candidate floor, trimmed by the exact comparison below
    const double margin = win.lower_bound * 1e-9 + 2.0;
    const std::uint64_t cand_lo =
        win.lower_bound > margin + 1
            ? static_cast<std::uint64_t>(win.lower_bound - margin) - 1
            : 0;
    const mpz_class ycap = static_cast<unsigned long>(y);
    for (std::uint64_t q : arith::primes_in_range(cand_lo, hi)) {
        const double qd = static_cast<double>(q);
        if (qd < win.lower_bound - margin) continue;
        // only candidates hugging the boundary need the bracketed evaluation
        if (qd <= win.lower_bound + margin && !above_lower_bound(q, y, theta))
            continue;
        if (!arith::is_smooth(mpz_class(static_cast<unsigned long>(q - 1)), ycap))
            continue;
        win.primes.push_back(q);
    }
    return win;
}

BoundReport shifted_smooth_report(std::uint64_t x, const Rational& E,
                                  std::int64_t a, const Rational& gamma) {
    if (x < 2) throw std::invalid_argument("shifted_smooth_report: need x >= 2");
    const long double e_hi = 1.0L - 0.5L * std::exp(-0.5L);  // 1 - 1/(2 sqrt(e))
    const long double e_val =
        static_cast<long double>(E.num) / static_cast<long double>(E.den);
    if (!(e_val > 0.0L && e_val < e_hi))
        throw std::invalid_argument("E must lie in (0, 1 - 1/(2 sqrt(e)))");
    if (gamma.num <= 0) throw std::invalid_argument("gamma must be positive");

    // y = floor(x^(1-E)), exact via integer roots
    const Rational one_minus_e(E.den - E.num, E.den);
    const std::uint64_t y = pow_floor_exact(x, one_minus_e);

    BoundReport r;
    r.kind = "eq1";
    r.lhs = pi_shifted_smooth(x, std::max<std::uint64_t>(y, 1), a);
    const double xd = static_cast<double>(x);
    r.rhs = gamma.value() * xd / std::log(xd);
    r.rhs_formula = "gamma*x/log(x)";
    r.ratio = r.rhs > 0 ? static_cast<double>(r.lhs) / r.rhs : 0;
    r.inputs = {{"x", std::to_string(x)},
                {"E", E.str()},
                {"a", std::to_string(a)},
                {"gamma", gamma.str()},
                {"y", std::to_string(y)}};
    return r;
}

BoundReport progression_report(std::uint64_t y, std::uint64_t d, std::int64_t a) {
    if (y < 1 || d < 1) throw std::invalid_argument("progression_report: need y, d >= 1");
    const std::uint64_t amod = static_cast<std::uint64_t>(
        ((a % static_cast<std::int64_t>(d)) + static_cast<std::int64_t>(d)) %
        static_cast<std::int64_t>(d));
    if (std::gcd(amod, d) != 1)
        throw std::invalid_argument("progression_report: need gcd(a, d) = 1");

    const std::uint64_t piy = pi(y);
    const mpz_class phi =
        arith::euler_phi(arith::factorize(mpz_class(static_cast<unsigned long>(d))));

    BoundReport r;
    r.kind = "eq2";
    r.lhs = pi_progression(y, d, a);
    r.rhs = static_cast<double>(piy) / (2.0 * phi.get_d());
    r.rhs_formula = "pi(y)/(2*phi(d))";
    r.ratio = r.rhs > 0 ? static_cast<double>(r.lhs) / r.rhs : 0;
    r.inputs = {{"y", std::to_string(y)},
                {"d", std::to_string(d)},
                {"a", std::to_string(a)},
                {"pi_y", std::to_string(piy)},
                {"phi_d", phi.get_str()}};
    return r;
}

}  // namespace korselt::sieve_stats
