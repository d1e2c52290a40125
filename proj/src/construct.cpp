#include "korselt/construct.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_set>

namespace korselt::construct {

namespace {

using i128 = __int128;

constexpr std::size_t kMaxSeedPrimes = 24;  // divisor enumeration is 2^|Q|

// sorted divisors of the squarefree product of primes, capped
std::vector<std::uint64_t> divisors_upto(const std::vector<std::uint64_t>& primes,
                                         std::uint64_t cap) {
    if (primes.size() > kMaxSeedPrimes)
        throw std::invalid_argument("divisor enumeration limited to " +
                                    std::to_string(kMaxSeedPrimes) + " seed primes");
    std::vector<std::uint64_t> divs{1};
    for (std::uint64_t q : primes) {
        const std::size_t sz = divs.size();
        for (std::size_t i = 0; i < sz; ++i) {
            const i128 d = i128{divs[i]} * q;
            if (d <= cap) divs.push_back(static_cast<std::uint64_t>(d));
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

std::vector<std::uint64_t> prime_list(const arith::FactoredInteger& L) {
    std::vector<std::uint64_t> qs;
    for (const auto& [q, e] : L.factors) {
        if (e != 1) throw std::invalid_argument("modulus must be squarefree");
        if (!q.fits_ulong_p())
            throw std::invalid_argument("seed primes must fit in 64 bits");
        qs.push_back(q.get_ui());
    }
    return qs;
}

bool coprime_to_aL(std::uint64_t k, std::int64_t a, const mpz_class& L) {
    mpz_class aL = L * a;
    mpz_class g, kz = static_cast<unsigned long>(k);
    mpz_abs(aL.get_mpz_t(), aL.get_mpz_t());
    mpz_gcd(g.get_mpz_t(), kz.get_mpz_t(), aL.get_mpz_t());
    return g == 1;
}

std::uint64_t count_hits(const std::vector<std::uint64_t>& divs, std::uint64_t k,
                         std::int64_t a, std::uint64_t x_cap,
                         const arith::PrimeFlags& prime,
                         std::vector<std::pair<std::uint64_t, std::uint64_t>>* out) {
    std::uint64_t c = 0;
    for (std::uint64_t d : divs) {
        const i128 p = i128{d} * k + a;
        if (p > i128{x_cap}) break;  // divisors ascend, so later ones only grow
        if (p < 2) continue;
        const auto pv = static_cast<std::uint64_t>(p);
        if (prime.is_prime(pv)) {
            ++c;
            if (out) out->emplace_back(d, pv);
        }
    }
    return c;
}

}  // namespace

arith::FactoredInteger build_modulus(const std::vector<std::uint64_t>& q_primes) {
    std::set<std::uint64_t> seen;
    arith::FactoredInteger L;
    L.value = 1;
    std::vector<std::uint64_t> sorted = q_primes;
    std::sort(sorted.begin(), sorted.end());
    for (std::uint64_t q : sorted) {
        if (!seen.insert(q).second)
            throw std::invalid_argument("build_modulus: duplicate prime " +
                                        std::to_string(q));
        if (!arith::is_prime_u64(q))
            throw std::invalid_argument("build_modulus: " + std::to_string(q) +
                                        " is not prime");
        L.value *= static_cast<unsigned long>(q);
        L.factors.emplace_back(mpz_class(static_cast<unsigned long>(q)), 1);
    }
    L.validate();
    return L;
}

MultiplierResult find_multiplier(const arith::FactoredInteger& L,
                                 std::uint64_t x_cap, std::int64_t a,
                                 std::uint64_t k_max) {
    if (k_max < 1) throw std::invalid_argument("find_multiplier: k_max >= 1");
    if (x_cap < 1) throw std::invalid_argument("find_multiplier: x_cap >= 1");
    const auto qs = prime_list(L);
    const std::uint64_t dcap = static_cast<std::uint64_t>(
        std::max<i128>(1, i128{x_cap} - a));  // d*1 + a <= x_cap
    const auto divs = divisors_upto(qs, dcap);
    const arith::PrimeFlags prime(x_cap);

    MultiplierResult best;
    bool have = false;
    for (std::uint64_t k = 1; k <= k_max; ++k) {
        if (!coprime_to_aL(k, a, L.value)) continue;
        const std::uint64_t c = count_hits(divs, k, a, x_cap, prime, nullptr);
        if (!have || c > best.hit_count) {
            best.k = k;
            best.hit_count = c;
            have = true;
        }
    }
    if (!have)
        throw std::invalid_argument("find_multiplier: no k <= k_max coprime to a*L");
    count_hits(divs, best.k, a, x_cap, prime, &best.hits);
    return best;
}

std::vector<std::uint64_t> harvest_primes(const arith::FactoredInteger& L,
                                          std::uint64_t k, std::uint64_t x_cap,
                                          std::int64_t a) {
    if (!coprime_to_aL(k, a, L.value))
        throw std::invalid_argument("harvest_primes: gcd(k, a*L) != 1");
    const auto qs = prime_list(L);
    const std::uint64_t dcap = static_cast<std::uint64_t>(
        std::max<i128>(1, (i128{x_cap} - a) / k));
    const auto divs = divisors_upto(qs, dcap);
    const arith::PrimeFlags prime(x_cap);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> hits;
    count_hits(divs, k, a, x_cap, prime, &hits);
    std::vector<std::uint64_t> P;
    P.reserve(hits.size());
    for (const auto& [d, p] : hits) P.push_back(p);  // ascending in d => in p
    return P;
}

std::vector<std::uint64_t> remove_seed_primes(const std::vector<std::uint64_t>& P,
                                              const std::vector<std::uint64_t>& Q) {
    const std::unordered_set<std::uint64_t> drop(Q.begin(), Q.end());
    std::vector<std::uint64_t> out;
    out.reserve(P.size());
    for (std::uint64_t p : P)
        if (!drop.count(p)) out.push_back(p);
    return out;
}

ProductSearchResult search_identity_products(
    const std::vector<std::uint64_t>& P_prime, const arith::FactoredInteger& L,
    std::uint64_t k, std::size_t t_cap, std::uint64_t budget,
    std::size_t max_results, std::uint64_t seed) {
    ProductSearchResult result;
    const mpz_class& Lv = L.value;

    // members sharing a factor with L can never appear in a product that is
    // 1 mod L; set them aside rather than reject the whole call
    std::vector<groups::LabeledElement> elems;
    mpz_class g;
    for (std::uint64_t p : P_prime) {
        mpz_class pz = static_cast<unsigned long>(p);
        mpz_gcd(g.get_mpz_t(), pz.get_mpz_t(), Lv.get_mpz_t());
        if (Lv > 1 && g != 1) {
            result.dropped_nonunits.push_back(p);
            continue;
        }
        elems.push_back({p, pz % Lv, 1});
    }

    const auto spec = groups::GroupSpec::units_mod(L, true);
    groups::SearchOptions opts;
    opts.len_min = 2;
    opts.len_max = t_cap;
    opts.max_results = max_results;
    opts.budget = budget;
    opts.seed = seed;
    auto search = groups::find_identity_subsequences(elems, spec, opts);
    result.status = search.status;
    result.products_computed = search.products_computed;

    const mpz_class kL = Lv * static_cast<unsigned long>(k);
    for (auto& w : search.witnesses) {
        if (w.labels.size() % 2 != 0)
            throw std::logic_error("identity product with odd subset size");
        mpz_class n = 1;
        for (std::uint64_t p : w.labels) n *= static_cast<unsigned long>(p);
        // the congruence argument, re-checked from scratch
        if (n % Lv != 1 % Lv)
            throw std::logic_error("product not 1 mod L after search");
        if (n % k != 1 % k)
            throw std::logic_error("product not 1 mod k despite even size");
        if (n % kL != 1 % kL)
            throw std::logic_error("product not 1 mod kL");
        for (std::uint64_t p : w.labels) {
            if ((n - 1) % (p + 1) != 0)
                throw std::logic_error("p + 1 does not divide n - 1");
        }
        auto verdict = criterion::check(n, criterion::KorseltParams{-1, 1});
        if (!verdict.accepted)
            throw std::logic_error("constructed n failed the (-1,1) criterion: " +
                                   verdict.reason_text());
        result.found.push_back(
            ConstructedNumber{n, std::move(*verdict.witness), std::move(w)});
    }
    std::sort(result.found.begin(), result.found.end(),
              [](const ConstructedNumber& x, const ConstructedNumber& y) {
                  return x.n < y.n;
              });
    return result;
}

ConstructionReport run_pipeline(const ConstructionConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    ConstructionReport rep;
    rep.config = config;

    if (!config.q_primes.empty()) {
        if (config.y || config.theta)
            throw std::invalid_argument("config: give q_primes or (y, theta), not both");
        rep.q_primes = config.q_primes;
        std::sort(rep.q_primes.begin(), rep.q_primes.end());
    } else {
        if (!config.y || !config.theta)
            throw std::invalid_argument("config: need q_primes or both y and theta");
        rep.window = sieve_stats::select_smooth_window(*config.y, *config.theta);
        rep.q_primes = rep.window->primes;
    }

    rep.L = build_modulus(rep.q_primes);
    rep.lambda_L = arith::carmichael_lambda(rep.L);
    rep.q_count = rep.q_primes.size();
    rep.log_L = [&] {
        signed long e2;
        const double d = mpz_get_d_2exp(&e2, rep.L.value.get_mpz_t());
        return std::log(d) + static_cast<double>(e2) * std::log(2.0);
    }();

    const auto spec = groups::GroupSpec::units_mod(rep.L, true);
    rep.group_order = spec.order();
    rep.max_order = spec.max_order();
    rep.identity_free_bound = groups::identity_free_length_bound(spec);

    auto mult = find_multiplier(rep.L, config.x_cap, config.a, config.k_max);
    rep.k = mult.k;
    rep.hit_count = mult.hit_count;
    rep.hits = std::move(mult.hits);

    rep.P = harvest_primes(rep.L, rep.k, config.x_cap, config.a);
    rep.P_prime = remove_seed_primes(rep.P, rep.q_primes);

    if (config.a == -1) {
        auto search = search_identity_products(rep.P_prime, rep.L, rep.k,
                                               config.t_cap, config.budget,
                                               config.max_results);
        rep.found = std::move(search.found);
        rep.search_status = search.status;
        rep.products_computed = search.products_computed;
        rep.dropped_nonunits = std::move(search.dropped_nonunits);
    }
    // for a != -1 the harvest is still meaningful but the product search has
    // no (-1,1) reading, so the pipeline stops after P'

    // asymptotic context only; never constrains the search
    rep.implied_B = 1.0 - std::log(static_cast<double>(config.k_max)) /
                              std::log(static_cast<double>(config.x_cap));
    if (rep.window) {
        const double theta = rep.window->theta.value();
        const double E = 1.0 - 1.0 / theta;
        rep.implied_E = E;
        const double B = rep.implied_B;
        if (B > 0 && E > 0) {
            const double eps = E * B / 2.0;
            const double delta = eps * theta / (4.0 * B);
            const double y = static_cast<double>(*config.y);
            rep.log_x_theory = std::pow(y, 1.0 + delta);
            rep.log_t_theory = std::pow(y, 1.0 + delta / 2.0);
        }
    }

    rep.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return rep;
}

ConstructionConfig demo_config() {
    ConstructionConfig c;
    c.q_primes = {3, 5, 7, 11, 13};
    c.x_cap = 1'000'000;
    c.a = -1;
    c.k_max = 1'000;
    c.t_cap = 16;
    c.budget = 50'000'000;
    c.max_results = 64;
    return c;
}

}  // namespace korselt::construct
