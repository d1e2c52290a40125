#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "korselt/arith.hpp"

namespace korselt::groups {

// ---------------------------------------------------------------------------
// Generic products of cyclic groups (used by the exhaustive oracles)
// ---------------------------------------------------------------------------

/// Z/m1 x ... x Z/mk, written additively. Elements are tuples.
struct CyclicProduct {
    std::vector<std::uint32_t> moduli;

    std::uint64_t order() const;
    std::uint64_t max_element_order() const;  // lcm of the moduli
};

/// m (1 + log(|G| / m)) where m is the maximal element order: every longer
/// sequence contains a non-empty subsequence whose product is the identity.
double identity_free_length_bound(double order, double max_order);
double identity_free_length_bound(const CyclicProduct& g);

/// Exact length of the longest sequence with no non-empty identity-product
/// subsequence (Davenport constant minus one), by exhaustive search over
/// multisets. Rejects |G| above order_cap.
int identity_free_max_length(const CyclicProduct& g, std::uint64_t order_cap = 16);

// ---------------------------------------------------------------------------
// The unit group (Z/LZ)* with an optional parity component
// ---------------------------------------------------------------------------

/// G = (Z/LZ)* x Z/2 (or just the unit group when with_parity is false),
/// for squarefree L.
struct GroupSpec {
    arith::FactoredInteger L;
    bool with_parity = true;

    static GroupSpec units_mod(const mpz_class& modulus, bool with_parity);
    static GroupSpec units_mod(arith::FactoredInteger modulus, bool with_parity);

    mpz_class order() const;      // phi(L) * (2 if parity else 1)
    mpz_class max_order() const;  // lcm(lambda(L), 2 if parity)

    /// One cyclic factor per prime q | L (order q - 1), plus Z/2 if present.
    /// A valid presentation because L is squarefree.
    std::vector<std::uint32_t> cyclic_factors() const;
};

double identity_free_length_bound(const GroupSpec& g);
int identity_free_max_length(const GroupSpec& g, std::uint64_t order_cap = 16);

/// An element of G carrying a caller-chosen label (typically the source
/// prime). Elements with equal residue and parity but different labels are
/// distinct members of a sequence.
struct LabeledElement {
    std::uint64_t label = 0;
    mpz_class residue = 1;  // unit mod L
    int parity = 0;         // 0 or 1
};

mpz_class element_order(const LabeledElement& g, const GroupSpec& spec);

/// A subsequence identified by its label set.
struct SubsequenceWitness {
    std::vector<std::uint64_t> labels;  // sorted ascending
    mpz_class product_residue;
    int total_parity = 0;
    std::size_t length() const { return labels.size(); }
};

enum class SearchStatus {
    exhausted,          // the whole search space was enumerated
    budget_exhausted,   // ran out of budget before finishing; inconclusive
    result_cap_reached  // stopped early because max_results was hit
};

struct SearchOptions {
    std::size_t len_min = 1;
    std::size_t len_max = std::numeric_limits<std::size_t>::max();
    std::size_t max_results = 4096;
    std::uint64_t budget = 50'000'000;  // subset products evaluated
    std::uint64_t seed = 0x6b6f7273656c74ULL;
    std::size_t exhaustive_threshold = 30;  // meet-in-the-middle cap
};

struct SearchResult {
    std::vector<SubsequenceWitness> witnesses;  // lexicographic by label set
    SearchStatus status = SearchStatus::exhausted;
    std::uint64_t products_computed = 0;
    bool complete() const { return status == SearchStatus::exhausted; }
};

/// All label-distinct subsequences of seq with identity product and length in
/// [len_min, len_max]. Exhaustive (meet-in-the-middle) when |seq| is at most
/// the threshold; randomized restarts over sampled sub-sequences beyond it.
SearchResult find_identity_subsequences(const std::vector<LabeledElement>& seq,
                                        const GroupSpec& spec,
                                        const SearchOptions& opts);

/// binomial(r, t) / binomial(r, n): a lower bound on the number of distinct
/// identity-product subsequences of length in [t - n, t] in any sequence of
/// r elements, valid whenever r > t > n = n(G).
mpq_class identity_count_lower_bound(std::uint64_t r, std::uint64_t t,
                                     std::uint64_t n);

struct CountBoundReport {
    std::uint64_t r = 0, t = 0, n = 0;
    mpz_class found = 0;
    mpq_class bound = 0;
    bool satisfied = false;
};

/// Exhaustively count identity subsequences of tuple elements with length in
/// [t - n, t] and compare against the binomial lower bound. Requires
/// |seq| = r > t > n(G) and r small enough to enumerate 2^r subsequences.
CountBoundReport verify_count_bound(const CyclicProduct& g,
                                    const std::vector<std::vector<std::uint32_t>>& seq,
                                    std::uint64_t t);

CountBoundReport verify_count_bound(const GroupSpec& g,
                                    const std::vector<LabeledElement>& seq,
                                    std::uint64_t t);

}  // namespace korselt::groups
