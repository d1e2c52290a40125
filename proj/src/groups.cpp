#include "korselt/groups.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace korselt::groups {

namespace {

double ln_mpz(const mpz_class& v) {
    signed long exp2;
    const double d = mpz_get_d_2exp(&exp2, v.get_mpz_t());
    return std::log(d) + static_cast<double>(exp2) * std::log(2.0);
}

struct MpzHash {
    std::size_t operator()(const mpz_class& v) const {
        std::size_t h = 1469598103934665603ull;
        const std::size_t n = mpz_size(v.get_mpz_t());
        for (std::size_t i = 0; i < n; ++i) {
            h ^= mpz_getlimbn(v.get_mpz_t(), i);
            h *= 1099511628211ull;
        }
        return h;
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// CyclicProduct
// ---------------------------------------------------------------------------

std::uint64_t CyclicProduct::order() const {
    std::uint64_t o = 1;
    for (std::uint32_t m : moduli) {
        if (m == 0) throw std::invalid_argument("CyclicProduct: zero modulus");
        if (o > (std::uint64_t{1} << 62) / m)
            throw std::overflow_error("CyclicProduct: order overflow");
        o *= m;
    }
    return o;
}

std::uint64_t CyclicProduct::max_element_order() const {
    std::uint64_t m = 1;
    for (std::uint32_t mod : moduli) m = std::lcm<std::uint64_t>(m, mod);
    return m;
}

double identity_free_length_bound(double order, double max_order) {
    return max_order * (1.0 + std::log(order / max_order));
}

double identity_free_length_bound(const CyclicProduct& g) {
    return identity_free_length_bound(static_cast<double>(g.order()),
                                      static_cast<double>(g.max_element_order()));
}

namespace {

struct FreeLengthSearch {
    std::uint32_t order;
    std::vector<std::uint8_t> add;  // order x order Cayley table
    std::unordered_map<std::uint64_t, int> memo;

    int dfs(std::uint64_t sums, std::uint32_t min_idx) {
        const std::uint64_t key = (sums << 6) | min_idx;
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        int best = 0;
        for (std::uint32_t e = std::max<std::uint32_t>(min_idx, 1); e < order; ++e) {
            std::uint64_t next = sums | (std::uint64_t{1} << e);
            for (std::uint64_t rest = sums; rest != 0; rest &= rest - 1) {
                const unsigned i = std::countr_zero(rest);
                next |= std::uint64_t{1} << add[i * order + e];
            }
            if (next & 1) continue;  // identity became reachable
            best = std::max(best, 1 + dfs(next, e));
        }
        memo.emplace(key, best);
        return best;
    }
};

}  // namespace

int identity_free_max_length(const CyclicProduct& g, std::uint64_t order_cap) {
    const std::uint64_t order = g.order();
    if (order_cap > 32) throw std::invalid_argument("order_cap above 32 unsupported");
    if (order > order_cap)
        throw std::invalid_argument("identity_free_max_length: |G| = " +
                                    std::to_string(order) + " exceeds cap " +
                                    std::to_string(order_cap));
    if (order == 1) return 0;

    const std::size_t rank = g.moduli.size();
    const auto n = static_cast<std::uint32_t>(order);
    FreeLengthSearch search;
    search.order = n;
    search.add.assign(static_cast<std::size_t>(n) * n, 0);

    // mixed-radix decode of an element index
    std::vector<std::uint32_t> ta(rank), tb(rank);
    auto decode = [&](std::uint32_t idx, std::vector<std::uint32_t>& out) {
        for (std::size_t j = 0; j < rank; ++j) {
            out[j] = idx % g.moduli[j];
            idx /= g.moduli[j];
        }
    };
    for (std::uint32_t i = 0; i < n; ++i) {
        decode(i, ta);
        for (std::uint32_t j = 0; j < n; ++j) {
            decode(j, tb);
            std::uint32_t enc = 0;
            for (std::size_t kk = rank; kk-- > 0;)
                enc = enc * g.moduli[kk] + (ta[kk] + tb[kk]) % g.moduli[kk];
            search.add[i * n + j] = static_cast<std::uint8_t>(enc);
        }
    }
    return search.dfs(0, 1);
}

// ---------------------------------------------------------------------------
// GroupSpec
// ---------------------------------------------------------------------------

GroupSpec GroupSpec::units_mod(arith::FactoredInteger modulus, bool with_parity) {
    if (!modulus.is_squarefree())
        throw std::invalid_argument("GroupSpec: modulus must be squarefree");
    return GroupSpec{std::move(modulus), with_parity};
}

GroupSpec GroupSpec::units_mod(const mpz_class& modulus, bool with_parity) {
    return units_mod(arith::factorize(modulus), with_parity);
}

mpz_class GroupSpec::order() const {
    mpz_class o = arith::euler_phi(L);
    if (with_parity) o *= 2;
    return o;
}

mpz_class GroupSpec::max_order() const {
    mpz_class m = arith::carmichael_lambda(L);
    if (with_parity) mpz_lcm_ui(m.get_mpz_t(), m.get_mpz_t(), 2);
    return m;
}

std::vector<std::uint32_t> GroupSpec::cyclic_factors() const {
    std::vector<std::uint32_t> out;
    for (const auto& [q, e] : L.factors) {
        mpz_class qm1 = q - 1;
        if (!qm1.fits_uint_p())
            throw std::invalid_argument("cyclic_factors: factor order too large");
        if (qm1 > 1) out.push_back(static_cast<std::uint32_t>(qm1.get_ui()));
    }
    if (with_parity) out.push_back(2);
    return out;
}

double identity_free_length_bound(const GroupSpec& g) {
    const mpz_class ord = g.order();
    const mpz_class m = g.max_order();
    return m.get_d() * (1.0 + ln_mpz(ord) - ln_mpz(m));
}

int identity_free_max_length(const GroupSpec& g, std::uint64_t order_cap) {
    return identity_free_max_length(CyclicProduct{g.cyclic_factors()}, order_cap);
}

mpz_class element_order(const LabeledElement& g, const GroupSpec& spec) {
    const mpz_class& L = spec.L.value;
    mpz_class res = g.residue % L;
    if (res < 0) res += L;
    mpz_class gcd;
    mpz_gcd(gcd.get_mpz_t(), res.get_mpz_t(), L.get_mpz_t());
    if (L > 1 && gcd != 1)
        throw std::invalid_argument("element_order: residue is not a unit");

    mpz_class ord = 1;
    if (L > 1) {
        ord = arith::carmichael_lambda(spec.L);
        for (const auto& [p, e] : arith::factorize(ord).factors) {
            for (unsigned i = 0; i < e; ++i) {
                mpz_class cand = ord / p;
                mpz_class pw;
                mpz_powm(pw.get_mpz_t(), res.get_mpz_t(), cand.get_mpz_t(),
                         L.get_mpz_t());
                if (pw != 1) break;
                ord = cand;
            }
        }
    }
    if (spec.with_parity && g.parity == 1)
        mpz_lcm_ui(ord.get_mpz_t(), ord.get_mpz_t(), 2);
    return ord;
}

// ---------------------------------------------------------------------------
// Identity-product subsequence search
// ---------------------------------------------------------------------------

namespace {

struct WitnessSet {
    std::set<std::vector<std::uint64_t>> label_sets;
    std::size_t cap;
    bool cap_hit = false;

    bool add(std::vector<std::uint64_t> labels) {
        if (label_sets.size() >= cap) {
            cap_hit = true;
            return false;
        }
        label_sets.insert(std::move(labels));
        return true;
    }
};

// Meet-in-the-middle over the elements picked out by idx. Returns false when
// the budget ran out mid-enumeration.
bool mitm_over(const std::vector<LabeledElement>& seq,
               const std::vector<std::size_t>& idx, const mpz_class& L,
               const SearchOptions& opts, std::uint64_t& products_left,
               std::uint64_t& products_done, WitnessSet& out) {
    const std::size_t n = idx.size();
    const std::size_t half = n / 2;
    const std::size_t nb = n - half;
    const mpz_class unit = L == 1 ? mpz_class(0) : mpz_class(1);

    auto residue_of = [&](std::size_t i) {
        mpz_class r = seq[idx[i]].residue % L;
        if (r < 0) r += L;
        return r;
    };

    // left half: residue -> masks
    std::vector<mpz_class> lprod(std::size_t{1} << half);
    lprod[0] = unit;
    std::uint32_t lpar = 0, rpar = 0;
    for (std::size_t i = 0; i < half; ++i)
        if (seq[idx[i]].parity) lpar |= std::uint32_t{1} << i;
    for (std::size_t i = 0; i < nb; ++i)
        if (seq[idx[half + i]].parity) rpar |= std::uint32_t{1} << i;

    std::unordered_map<mpz_class, std::vector<std::uint32_t>, MpzHash> left;
    left[unit].push_back(0);
    for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << half); ++mask) {
        if (products_left == 0) return false;
        --products_left;
        ++products_done;
        const unsigned low = std::countr_zero(mask);
        lprod[mask] = lprod[mask & (mask - 1)] * residue_of(low) % L;
        left[lprod[mask]].push_back(mask);
    }

    mpz_class rp = unit, need, inv;
    std::vector<mpz_class> rprod(std::size_t{1} << nb);
    rprod[0] = unit;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << nb); ++mask) {
        if (mask != 0) {
            if (products_left == 0) return false;
            --products_left;
            ++products_done;
            const unsigned low = std::countr_zero(mask);
            rprod[mask] = rprod[mask & (mask - 1)] * residue_of(half + low) % L;
        }
        // need * rprod == 1 (mod L)
        if (L == 1) {
            need = 0;
        } else {
            if (mpz_invert(need.get_mpz_t(), rprod[mask].get_mpz_t(),
                           L.get_mpz_t()) == 0)
                throw std::logic_error("mitm: non-invertible product of units");
        }
        auto it = left.find(need);
        if (it == left.end()) continue;
        const int szb = std::popcount(mask);
        const int parb = std::popcount(mask & rpar) & 1;
        for (std::uint32_t lmask : it->second) {
            const std::size_t len = std::popcount(lmask) + szb;
            if (len < opts.len_min || len > opts.len_max || len == 0) continue;
            if (((std::popcount(lmask & lpar) + parb) & 1) != 0) continue;
            std::vector<std::uint64_t> labels;
            labels.reserve(len);
            for (std::uint32_t m = lmask; m != 0; m &= m - 1)
                labels.push_back(seq[idx[std::countr_zero(m)]].label);
            for (std::uint32_t m = mask; m != 0; m &= m - 1)
                labels.push_back(seq[idx[half + std::countr_zero(m)]].label);
            std::sort(labels.begin(), labels.end());
            if (!out.add(std::move(labels))) return true;  // cap hit, stop clean
        }
        if (out.cap_hit) return true;
    }
    return true;
}

}  // namespace

SearchResult find_identity_subsequences(const std::vector<LabeledElement>& seq,
                                        const GroupSpec& spec,
                                        const SearchOptions& opts) {
    if (opts.len_min < 1)
        throw std::invalid_argument("find_identity_subsequences: len_min >= 1");
    const mpz_class& L = spec.L.value;
    {
        std::set<std::uint64_t> labels;
        mpz_class g;
        for (const auto& e : seq) {
            if (e.parity != 0 && e.parity != 1)
                throw std::invalid_argument("element parity must be 0 or 1");
            mpz_class r = e.residue % L;
            if (r < 0) r += L;
            mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), L.get_mpz_t());
            if (L > 1 && g != 1)
                throw std::invalid_argument("element residue is not a unit mod L");
            if (!labels.insert(e.label).second)
                throw std::invalid_argument("duplicate label " +
                                            std::to_string(e.label));
        }
    }

    SearchResult result;
    WitnessSet collected;
    collected.cap = opts.max_results;
    std::uint64_t budget = opts.budget;

    const std::size_t n = seq.size();
    if (n <= opts.exhaustive_threshold) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        const bool finished = mitm_over(seq, idx, L, opts, budget,
                                        result.products_computed, collected);
        if (!finished)
            result.status = SearchStatus::budget_exhausted;
        else if (collected.cap_hit)
            result.status = SearchStatus::result_cap_reached;
        else
            result.status = SearchStatus::exhausted;
    } else {
        std::mt19937_64 rng(opts.seed);
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        result.status = SearchStatus::budget_exhausted;  // can never be complete
        while (budget > 0 && !collected.cap_hit) {
            // sample a sub-sequence of exhaustive size
            std::vector<std::size_t> pick = all;
            for (std::size_t i = 0; i < opts.exhaustive_threshold; ++i) {
                const std::size_t j =
                    i + static_cast<std::size_t>(rng() % (pick.size() - i));
                std::swap(pick[i], pick[j]);
            }
            pick.resize(opts.exhaustive_threshold);
            std::sort(pick.begin(), pick.end());
            if (!mitm_over(seq, pick, L, opts, budget, result.products_computed,
                           collected))
                break;
        }
        if (collected.cap_hit) result.status = SearchStatus::result_cap_reached;
    }

    const bool all_flagged =
        spec.with_parity && !seq.empty() &&
        std::all_of(seq.begin(), seq.end(),
                    [](const LabeledElement& e) { return e.parity == 1; });
    const mpz_class unit = L == 1 ? mpz_class(0) : mpz_class(1);
    for (const auto& labels : collected.label_sets) {
        if (all_flagged && labels.size() % 2 != 0)
            throw std::logic_error("identity witness with odd length under "
                                   "all-flagged parity");
        result.witnesses.push_back(SubsequenceWitness{labels, unit, 0});
    }
    return result;
}

mpq_class identity_count_lower_bound(std::uint64_t r, std::uint64_t t,
                                     std::uint64_t n) {
    if (!(r > t && t > n))
        throw std::invalid_argument("identity_count_lower_bound: need r > t > n");
    mpz_class num, den;
    mpz_bin_uiui(num.get_mpz_t(), static_cast<unsigned long>(r),
                 static_cast<unsigned long>(t));
    mpz_bin_uiui(den.get_mpz_t(), static_cast<unsigned long>(r),
                 static_cast<unsigned long>(n));
    mpq_class q(num, den);
    q.canonicalize();
    return q;
}

CountBoundReport verify_count_bound(const CyclicProduct& g,
                                    const std::vector<std::vector<std::uint32_t>>& seq,
                                    std::uint64_t t) {
    const std::uint64_t r = seq.size();
    if (r > 24) throw std::invalid_argument("verify_count_bound: r too large");
    const int n = identity_free_max_length(g);
    if (!(r > t && t > static_cast<std::uint64_t>(n)))
        throw std::invalid_argument("verify_count_bound: need r > t > n(G)");

    const std::size_t rank = g.moduli.size();
    for (const auto& e : seq) {
        if (e.size() != rank)
            throw std::invalid_argument("verify_count_bound: tuple rank mismatch");
        for (std::size_t j = 0; j < rank; ++j)
            if (e[j] >= g.moduli[j])
                throw std::invalid_argument("verify_count_bound: tuple out of range");
    }

    const std::uint64_t lo = t - static_cast<std::uint64_t>(n);
    std::uint64_t found = 0;
    std::vector<std::uint32_t> acc(rank, 0);

    // depth-first over subsets, accumulating the tuple sum
    auto rec = [&](auto&& self, std::size_t i, std::uint64_t len) -> void {
        if (i == r) {
            if (len >= lo && len <= t && len >= 1 &&
                std::all_of(acc.begin(), acc.end(),
                            [](std::uint32_t v) { return v == 0; }))
                ++found;
            return;
        }
        self(self, i + 1, len);
        for (std::size_t j = 0; j < rank; ++j)
            acc[j] = (acc[j] + seq[i][j]) % g.moduli[j];
        self(self, i + 1, len + 1);
        for (std::size_t j = 0; j < rank; ++j)
            acc[j] = (acc[j] + g.moduli[j] - seq[i][j]) % g.moduli[j];
    };
    rec(rec, 0, 0);

    CountBoundReport rep;
    rep.r = r;
    rep.t = t;
    rep.n = static_cast<std::uint64_t>(n);
    rep.found = static_cast<unsigned long>(found);
    rep.bound = identity_count_lower_bound(r, t, rep.n);
    rep.satisfied = mpq_class(rep.found) >= rep.bound;
    return rep;
}

CountBoundReport verify_count_bound(const GroupSpec& g,
                                    const std::vector<LabeledElement>& seq,
                                    std::uint64_t t) {
    const std::uint64_t r = seq.size();
    if (r > 24) throw std::invalid_argument("verify_count_bound: r too large");
    const int n = identity_free_max_length(g);
    if (!(r > t && t > static_cast<std::uint64_t>(n)))
        throw std::invalid_argument("verify_count_bound: need r > t > n(G)");

    const mpz_class& L = g.L.value;
    const mpz_class unit = L == 1 ? mpz_class(0) : mpz_class(1);
    const std::uint64_t lo = t - static_cast<std::uint64_t>(n);
    std::uint64_t found = 0;

    std::vector<mpz_class> res(static_cast<std::size_t>(r));
    for (std::size_t i = 0; i < r; ++i) {
        res[i] = seq[i].residue % L;
        if (res[i] < 0) res[i] += L;
    }

    auto rec = [&](auto&& self, std::size_t i, std::uint64_t len,
                   const mpz_class& prod, int parity) -> void {
        if (i == r) {
            if (len >= std::max<std::uint64_t>(lo, 1) && len <= t &&
                prod == unit && (!g.with_parity || parity == 0))
                ++found;
            return;
        }
        self(self, i + 1, len, prod, parity);
        mpz_class np = prod * res[i] % L;
        self(self, i + 1, len + 1, np, (parity + seq[i].parity) & 1);
    };
    rec(rec, 0, 0, unit, 0);

    CountBoundReport rep;
    rep.r = r;
    rep.t = t;
    rep.n = static_cast<std::uint64_t>(n);
    rep.found = static_cast<unsigned long>(found);
    rep.bound = identity_count_lower_bound(r, t, rep.n);
    rep.satisfied = mpq_class(rep.found) >= rep.bound;
    return rep;
}

}  // namespace korselt::groups
