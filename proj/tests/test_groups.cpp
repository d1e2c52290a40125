#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "korselt/groups.hpp"

using namespace korselt;
using groups::CyclicProduct;
using groups::GroupSpec;
using groups::LabeledElement;

namespace {

// recompute a witness product from the original sequence
void check_identity_witness(const groups::SubsequenceWitness& w,
                            const std::vector<LabeledElement>& seq,
                            const mpz_class& L) {
    mpz_class prod = 1;
    int parity = 0;
    for (std::uint64_t label : w.labels) {
        auto it = std::find_if(seq.begin(), seq.end(), [&](const LabeledElement& e) {
            return e.label == label;
        });
        REQUIRE(it != seq.end());
        prod = prod * it->residue % L;
        parity ^= it->parity;
    }
    CHECK(prod == 1 % L);
    CHECK(parity == 0);
    CHECK(std::is_sorted(w.labels.begin(), w.labels.end()));
}

}  // namespace

TEST_CASE("cyclic product order and max order") {
    CHECK(CyclicProduct{{}}.order() == 1);
    CHECK(CyclicProduct{{2, 3}}.order() == 6);
    CHECK(CyclicProduct{{2, 3}}.max_element_order() == 6);
    CHECK(CyclicProduct{{2, 4}}.max_element_order() == 4);
    CHECK(CyclicProduct{{2, 2}}.max_element_order() == 2);
}

TEST_CASE("identity-free length bound: pinned values") {
    // cyclic of order 5: the log term vanishes
    CHECK(groups::identity_free_length_bound(5.0, 5.0) == doctest::Approx(5.0));
    // C2 x C2 (the unit group mod 8 has this shape): m = 2, |G| = 4
    CHECK(groups::identity_free_length_bound(CyclicProduct{{2, 2}}) ==
          doctest::Approx(2.0 * (1.0 + std::log(2.0))));
    // (Z/15Z)* x Z/2: |G| = 16, m = 4
    const auto spec = GroupSpec::units_mod(mpz_class(15), true);
    CHECK(spec.order() == 16);
    CHECK(spec.max_order() == 4);
    CHECK(groups::identity_free_length_bound(spec) ==
          doctest::Approx(4.0 * (1.0 + std::log(4.0))));
}

TEST_CASE("exact n(G) by exhaustive multiset search") {
    CHECK(groups::identity_free_max_length(CyclicProduct{{}}) == 0);
    CHECK(groups::identity_free_max_length(CyclicProduct{{1, 1}}) == 0);
    CHECK(groups::identity_free_max_length(CyclicProduct{{2}}) == 1);
    CHECK(groups::identity_free_max_length(CyclicProduct{{2, 2}}) == 2);

    // frozen from an independent exhaustive-search oracle
    struct Pinned { std::vector<std::uint32_t> moduli; int n; };
    const std::vector<Pinned> pinned = {
        {{2, 2, 2}, 3},    {{2, 2, 2, 2}, 4}, {{2, 2, 3}, 6}, {{2, 2, 4}, 5},
        {{2, 3}, 5},       {{2, 4}, 4},       {{2, 5}, 9},    {{2, 7}, 13},
        {{2, 8}, 8},       {{3, 3}, 4},       {{3, 4}, 11},   {{3, 5}, 14},
        {{4, 4}, 6},       {{16}, 15},
    };
    for (const auto& c : pinned)
        CHECK(groups::identity_free_max_length(CyclicProduct{c.moduli}) == c.n);

    // cyclic groups: n(C_m) = m - 1
    for (std::uint32_t m = 2; m <= 16; ++m)
        CHECK(groups::identity_free_max_length(CyclicProduct{{m}}) ==
              static_cast<int>(m) - 1);

    CHECK_THROWS_AS(groups::identity_free_max_length(CyclicProduct{{17}}),
                    std::invalid_argument);
    CHECK_NOTHROW(groups::identity_free_max_length(CyclicProduct{{17}}, 17));
}

TEST_CASE("strict Baker-Schmidt inequality over all small groups") {
    // every multiset of cyclic orders with product <= 16
    std::vector<std::vector<std::uint32_t>> all;
    std::vector<std::uint32_t> cur;
    auto rec = [&](auto&& self, std::uint32_t minm, std::uint32_t rem) -> void {
        all.push_back(cur);
        for (std::uint32_t m = minm; m <= rem; ++m) {
            cur.push_back(m);
            self(self, m, rem / m);
            cur.pop_back();
        }
    };
    rec(rec, 2, 16);
    CHECK(all.size() == 31);
    for (const auto& moduli : all) {
        const CyclicProduct g{moduli};
        CHECK(groups::identity_free_max_length(g) <
              groups::identity_free_length_bound(g));
    }
}

TEST_CASE("GroupSpec structure") {
    CHECK_THROWS_AS(GroupSpec::units_mod(mpz_class(8), true), std::invalid_argument);
    const auto g15 = GroupSpec::units_mod(mpz_class(15), true);
    CHECK(g15.cyclic_factors() == std::vector<std::uint32_t>{2, 4, 2});
    CHECK(groups::identity_free_max_length(g15) ==
          groups::identity_free_max_length(CyclicProduct{{2, 4, 2}}));
    const auto g1 = GroupSpec::units_mod(mpz_class(1), false);
    CHECK(g1.order() == 1);
    CHECK(g1.max_order() == 1);
}

TEST_CASE("element order") {
    const auto g5 = GroupSpec::units_mod(mpz_class(5), true);
    CHECK(groups::element_order({0, mpz_class(1), 0}, g5) == 1);
    CHECK(groups::element_order({0, mpz_class(4), 0}, g5) == 2);  // 4^2 = 16
    CHECK(groups::element_order({0, mpz_class(1), 1}, g5) == 2);  // parity flip
    CHECK(groups::element_order({0, mpz_class(2), 0}, g5) == 4);
    CHECK(groups::element_order({0, mpz_class(2), 1}, g5) == 4);
    CHECK_THROWS_AS(groups::element_order({0, mpz_class(5), 0}, g5),
                    std::invalid_argument);

    // orders divide lambda and match naive stepping mod 21
    const auto g21 = GroupSpec::units_mod(mpz_class(21), false);
    for (std::uint64_t x = 1; x < 21; ++x) {
        if (std::gcd<std::uint64_t>(x, 21) != 1) continue;
        const mpz_class xz(static_cast<unsigned long>(x));
        const mpz_class ord = groups::element_order({0, xz, 0}, g21);
        mpz_class acc = xz % 21;
        std::uint64_t steps = 1;
        while (acc != 1) { acc = acc * xz % 21; ++steps; }
        CHECK(ord == static_cast<unsigned long>(steps));
    }
}

TEST_CASE("find_identity_subsequences: labeled pairs mod 5") {
    const auto g5 = GroupSpec::units_mod(mpz_class(5), true);
    const std::vector<LabeledElement> seq = {
        {19, mpz_class(4), 1}, {29, mpz_class(4), 1}, {59, mpz_class(4), 1}};
    groups::SearchOptions opts;
    opts.len_min = 2;
    opts.len_max = 2;
    const auto res = groups::find_identity_subsequences(seq, g5, opts);
    REQUIRE(res.complete());
    REQUIRE(res.witnesses.size() == 3);
    CHECK(res.witnesses[0].labels == std::vector<std::uint64_t>{19, 29});
    CHECK(res.witnesses[1].labels == std::vector<std::uint64_t>{19, 59});
    CHECK(res.witnesses[2].labels == std::vector<std::uint64_t>{29, 59});
    for (const auto& w : res.witnesses) check_identity_witness(w, seq, mpz_class(5));
}

TEST_CASE("find_identity_subsequences: power example and edge cases") {
    const auto g5 = GroupSpec::units_mod(mpz_class(5), false);
    std::vector<LabeledElement> seq;
    for (std::uint64_t i = 0; i < 4; ++i) seq.push_back({i, mpz_class(2), 0});
    groups::SearchOptions opts;
    opts.len_min = 1;
    opts.len_max = 4;
    const auto res = groups::find_identity_subsequences(seq, g5, opts);
    REQUIRE(res.complete());
    REQUIRE(res.witnesses.size() == 1);  // 2^4 = 16 = 1 (mod 5), nothing shorter
    CHECK(res.witnesses[0].labels == std::vector<std::uint64_t>{0, 1, 2, 3});

    CHECK(groups::find_identity_subsequences({}, g5, opts).witnesses.empty());
    CHECK(groups::find_identity_subsequences({}, g5, opts).complete());

    std::vector<LabeledElement> dup = {{7, mpz_class(2), 0}, {7, mpz_class(3), 0}};
    CHECK_THROWS_AS(groups::find_identity_subsequences(dup, g5, opts),
                    std::invalid_argument);
    std::vector<LabeledElement> nonunit = {{1, mpz_class(10), 0}};
    CHECK_THROWS_AS(groups::find_identity_subsequences(nonunit, g5, opts),
                    std::invalid_argument);
}

TEST_CASE("find_identity_subsequences: budget and result caps") {
    const auto g7 = GroupSpec::units_mod(mpz_class(7), true);
    std::vector<LabeledElement> seq;
    for (std::uint64_t i = 0; i < 12; ++i) seq.push_back({i, mpz_class(6), 1});
    groups::SearchOptions opts;
    opts.len_min = 2;
    opts.len_max = 12;

    auto full = groups::find_identity_subsequences(seq, g7, opts);
    REQUIRE(full.complete());
    // 6 has order 2 and parity 1: witnesses are exactly the even-size subsets
    std::uint64_t expect = 0;
    for (int k = 2; k <= 12; k += 2) {
        std::uint64_t c = 1;
        for (int i = 0; i < k; ++i) c = c * (12 - i) / (i + 1);
        expect += c;
    }
    CHECK(full.witnesses.size() == expect);  // 2^11 - 1 - 12 + ... = 2047
    for (const auto& w : full.witnesses) CHECK(w.labels.size() % 2 == 0);

    groups::SearchOptions tiny = opts;
    tiny.budget = 10;
    const auto starved = groups::find_identity_subsequences(seq, g7, tiny);
    CHECK(starved.status == groups::SearchStatus::budget_exhausted);
    CHECK_FALSE(starved.complete());

    groups::SearchOptions capped = opts;
    capped.max_results = 5;
    const auto cut = groups::find_identity_subsequences(seq, g7, capped);
    CHECK(cut.status == groups::SearchStatus::result_cap_reached);
    CHECK(cut.witnesses.size() == 5);
}

TEST_CASE("find_identity_subsequences: randomized path beyond the threshold") {
    const auto g5 = GroupSpec::units_mod(mpz_class(5), true);
    std::vector<LabeledElement> seq;
    for (std::uint64_t i = 0; i < 35; ++i) seq.push_back({i, mpz_class(4), 1});
    groups::SearchOptions opts;
    opts.len_min = 2;
    opts.len_max = 6;
    opts.max_results = 50;
    const auto res = groups::find_identity_subsequences(seq, g5, opts);
    CHECK_FALSE(res.complete());
    CHECK(res.status == groups::SearchStatus::result_cap_reached);
    CHECK(res.witnesses.size() == 50);
    for (const auto& w : res.witnesses) {
        CHECK(w.labels.size() % 2 == 0);
        check_identity_witness(w, seq, mpz_class(5));
    }
    // deterministic for a fixed seed
    const auto res2 = groups::find_identity_subsequences(seq, g5, opts);
    REQUIRE(res2.witnesses.size() == res.witnesses.size());
    for (std::size_t i = 0; i < res.witnesses.size(); ++i)
        CHECK(res.witnesses[i].labels == res2.witnesses[i].labels);
}

TEST_CASE("binomial lower bound") {
    CHECK(groups::identity_count_lower_bound(5, 3, 1) == mpq_class(2));
    CHECK(groups::identity_count_lower_bound(6, 5, 4) == mpq_class(2, 5));
    CHECK(groups::identity_count_lower_bound(10, 4, 2) == mpq_class(14, 3));
    CHECK_THROWS_AS(groups::identity_count_lower_bound(5, 5, 1),
                    std::invalid_argument);
    CHECK_THROWS_AS(groups::identity_count_lower_bound(5, 2, 2),
                    std::invalid_argument);
}

TEST_CASE("verify_count_bound: pinned C2 cases") {
    const CyclicProduct c2{{2}};
    // five copies of the non-identity element, t = 3: window [2, 3]
    std::vector<std::vector<std::uint32_t>> ones(5, {1});
    const auto rep = groups::verify_count_bound(c2, ones, 3);
    CHECK(rep.n == 1);
    CHECK(rep.found == 10);  // all pairs; triples sum to 1
    CHECK(rep.bound == mpq_class(2));
    CHECK(rep.satisfied);

    // five copies of the identity: every subsequence in the window counts
    std::vector<std::vector<std::uint32_t>> zeros(5, {0});
    const auto rep0 = groups::verify_count_bound(c2, zeros, 3);
    CHECK(rep0.found == 20);  // C(5,2) + C(5,3)
    CHECK(rep0.satisfied);
}

TEST_CASE("verify_count_bound: randomized instances never violate") {
    std::mt19937_64 rng(987654321);
    for (int trial = 0; trial < 100; ++trial) {
        const std::uint32_t order = 2 + static_cast<std::uint32_t>(rng() % 4);
        const CyclicProduct g{{order}};
        const auto n = static_cast<std::uint64_t>(groups::identity_free_max_length(g));
        const std::uint64_t t = n + 1 + rng() % (9 - n);
        const std::uint64_t r = t + 1 + rng() % (10 - t);
        std::vector<std::vector<std::uint32_t>> seq(r);
        for (auto& e : seq) e = {static_cast<std::uint32_t>(rng() % order)};
        const auto rep = groups::verify_count_bound(g, seq, t);
        CHECK(rep.satisfied);
    }
    // the C3 example shape: r = 9, t = 4
    const CyclicProduct c3{{3}};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<std::uint32_t>> seq(9);
        for (auto& e : seq) e = {static_cast<std::uint32_t>(rng() % 3)};
        CHECK(groups::verify_count_bound(c3, seq, 4).satisfied);
    }
}

TEST_CASE("verify_count_bound over a unit group") {
    const auto g5 = GroupSpec::units_mod(mpz_class(5), true);
    // n(G) for C4 x C2 is 4
    CHECK(groups::identity_free_max_length(g5) == 4);
    std::vector<LabeledElement> seq;
    for (std::uint64_t i = 0; i < 8; ++i)
        seq.push_back({i, mpz_class(static_cast<unsigned long>(1 + (i % 4))), 1});
    const auto rep = groups::verify_count_bound(g5, seq, 6);
    CHECK(rep.r == 8);
    CHECK(rep.n == 4);
    CHECK(rep.satisfied);
    CHECK_THROWS_AS(groups::verify_count_bound(g5, seq, 8), std::invalid_argument);
}
