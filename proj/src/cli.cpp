#include "korselt/cli.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "korselt/construct.hpp"
#include "korselt/criterion.hpp"
#include "korselt/groups.hpp"
#include "korselt/io.hpp"
#include "korselt/sieve_stats.hpp"

namespace korselt::cli {

namespace {

constexpr int kOk = 0;
constexpr int kRejected = 1;
constexpr int kUsage = 2;
constexpr int kInternal = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::uint32_t> parse_moduli(const std::string& csv) {
    std::vector<std::uint32_t> out;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ','))
        out.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
    if (out.empty()) throw std::invalid_argument("empty moduli list");
    return out;
}

void print_bound_report(const sieve_stats::BoundReport& r, bool as_json) {
    if (as_json) {
        std::printf("%s\n", io::to_json(r).dump().c_str());
        return;
    }
    std::string inputs;
    for (const auto& [k, v] : r.inputs) inputs += " " + k + "=" + v;
    std::printf("%s:%s\n", r.kind.c_str(), inputs.c_str());
    std::printf("lhs=%" PRIu64 " rhs=%.6f (%s) ratio=%.6f\n", r.lhs, r.rhs,
                r.rhs_formula.c_str(), r.ratio);
}

int cmd_verify(const std::string& n_str, std::int64_t a, std::int64_t b,
               bool as_json) {
    const mpz_class n(n_str);
    const auto res = criterion::check(n, criterion::KorseltParams{a, b});
    if (as_json) {
        if (res.accepted) {
            std::printf("%s\n", io::to_json(*res.witness).dump().c_str());
        } else {
            nlohmann::json j{{"kind", "report"},
                             {"report", "verify"},
                             {"n", n.get_str()},
                             {"a", a},
                             {"b", b},
                             {"accepted", false},
                             {"reason", res.reason_text()}};
            std::printf("%s\n", j.dump().c_str());
        }
    } else if (res.accepted) {
        std::printf("accepted: n=%s a=%" PRId64 " b=%" PRId64 "\n",
                    n.get_str().c_str(), a, b);
        for (const auto& e : res.witness->entries)
            std::printf("  p=%s divisor=%s quotient=%s\n", e.p.get_str().c_str(),
                        e.divisor.get_str().c_str(), e.quotient.get_str().c_str());
    } else {
        std::printf("rejected: n=%s a=%" PRId64 " b=%" PRId64 " (%s)\n",
                    n.get_str().c_str(), a, b, res.reason_text().c_str());
    }
    return res.accepted ? kOk : kRejected;
}

int cmd_enumerate(std::uint64_t limit, std::int64_t a, std::int64_t b,
                  const std::string& format) {
    const criterion::KorseltParams params{a, b};
    if (format == "csv") std::printf("n\n");
    criterion::enumerate(limit, params, [&](const criterion::CarmichaelWitness& w) {
        if (format == "json") {
            std::printf("%s\n", io::to_json(w).dump().c_str());
        } else {
            std::printf("%s\n", w.n.value.get_str().c_str());
        }
        return true;
    });
    return kOk;
}

int cmd_construct(const construct::ConstructionConfig& cfg, bool as_json) {
    const auto rep = construct::run_pipeline(cfg);
    if (as_json) {
        std::printf("%s\n", io::to_json(rep).dump().c_str());
    } else {
        std::string qs;
        for (std::uint64_t q : rep.q_primes)
            qs += (qs.empty() ? "" : ",") + std::to_string(q);
        std::printf("Q = {%s}  (|Q| = %zu)\n", qs.c_str(), rep.q_count);
        std::printf("L = %s  (log L = %.4f)\n", rep.L.value.get_str().c_str(),
                    rep.log_L);
        std::printf("lambda(L) = %s  |G| = %s  identity-free bound = %.4f\n",
                    rep.lambda_L.get_str().c_str(), rep.group_order.get_str().c_str(),
                    rep.identity_free_bound);
        std::printf("k = %" PRIu64 "  divisor-prime hits = %" PRIu64 "\n", rep.k,
                    rep.hit_count);
        std::printf("|P| = %zu  |P'| = %zu\n", rep.P.size(), rep.P_prime.size());
        const char* status = rep.search_status == groups::SearchStatus::exhausted
                                 ? "exhaustive"
                                 : rep.search_status ==
                                           groups::SearchStatus::budget_exhausted
                                       ? "budget exhausted (inconclusive)"
                                       : "stopped at max_results";
        std::printf("search: %s, %" PRIu64 " products, found %zu\n", status,
                    rep.products_computed, rep.found.size());
        for (const auto& f : rep.found) {
            std::string ps;
            for (std::uint64_t p : f.product_witness.labels)
                ps += (ps.empty() ? "" : " * ") + std::to_string(p);
            std::printf("  n = %s = %s\n", f.n.get_str().c_str(), ps.c_str());
        }
    }
    if (rep.search_status == groups::SearchStatus::budget_exhausted &&
        rep.found.empty())
        return kInternal;
    return kOk;
}

std::uint64_t pi_with_cache(std::uint64_t x, const std::string& cache_dir) {
    constexpr std::uint64_t kCacheCap = std::uint64_t{1} << 24;
    if (cache_dir.empty() || x > kCacheCap) return sieve_stats::pi(x);
    io::SieveCache cache{cache_dir};
    auto table = cache.load(0, x);
    if (!table) {
        table = arith::SieveTable(0, x);
        cache.store(*table);
    }
    std::uint64_t c = 0;
    for (std::uint64_t n = 2; n <= x; ++n)
        if (table->is_prime(n)) ++c;
    return c;
}

std::uint64_t piprog_with_cache(std::uint64_t x, std::uint64_t d, std::int64_t a,
                                const std::string& cache_dir) {
    constexpr std::uint64_t kCacheCap = std::uint64_t{1} << 24;
    if (cache_dir.empty() || x > kCacheCap)
        return sieve_stats::pi_progression(x, d, a);
    io::SieveCache cache{cache_dir};
    auto table = cache.load(0, x);
    if (!table) {
        table = arith::SieveTable(0, x);
        cache.store(*table);
    }
    const std::uint64_t target = static_cast<std::uint64_t>(
        ((a % static_cast<std::int64_t>(d)) + static_cast<std::int64_t>(d)) %
        static_cast<std::int64_t>(d));
    std::uint64_t c = 0;
    for (std::uint64_t n = 2; n <= x; ++n)
        if (table->is_prime(n) && n % d == target) ++c;
    return c;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"(-1,1)-Carmichael numbers: verify, enumerate, construct"};
    app.require_subcommand(1);

    // --- enumerate ---------------------------------------------------------
    auto* enm = app.add_subcommand("enumerate", "list accepted n <= limit");
    std::int64_t e_a = -1, e_b = 1;
    std::uint64_t e_limit = 0;
    std::string e_format = "plain";
    enm->add_option("--a", e_a, "shift a")->required();
    enm->add_option("--b", e_b, "shift b")->required();
    enm->add_option("--limit", e_limit, "upper bound")->required();
    enm->add_option("--format", e_format, "plain|json|csv")
        ->check(CLI::IsMember({"plain", "json", "csv"}));

    // --- verify ------------------------------------------------------------
    auto* ver = app.add_subcommand("verify", "check one candidate");
    std::string v_n;
    std::int64_t v_a = -1, v_b = 1;
    std::string v_format = "plain";
    ver->add_option("n", v_n, "candidate (decimal)")->required();
    ver->add_option("--a", v_a, "shift a")->required();
    ver->add_option("--b", v_b, "shift b")->required();
    ver->add_option("--format", v_format, "plain|json")
        ->check(CLI::IsMember({"plain", "json"}));

    // --- count -------------------------------------------------------------
    auto* cnt = app.add_subcommand("count", "count accepted n <= x");
    std::int64_t c_a = -1, c_b = 1;
    std::uint64_t c_x = 0;
    cnt->add_option("--a", c_a, "shift a")->required();
    cnt->add_option("--b", c_b, "shift b")->required();
    cnt->add_option("--x", c_x, "upper bound")->required();

    // --- sieve -------------------------------------------------------------
    auto* sieve = app.add_subcommand("sieve", "exact sieve statistics");
    sieve->require_subcommand(1);
    std::string s_cache_dir;
    sieve->add_option("--cache-dir", s_cache_dir,
                      "persist sieve tables under this directory");

    auto* spi = sieve->add_subcommand("pi", "primes <= x");
    std::uint64_t spi_x = 0;
    spi->add_option("--x", spi_x)->required();

    auto* ssm = sieve->add_subcommand("pismooth",
                                      "primes a < p <= x with p-a y-smooth");
    std::uint64_t ssm_x = 0, ssm_y = 0;
    std::int64_t ssm_a = 1;
    ssm->add_option("--x", ssm_x)->required();
    ssm->add_option("--y", ssm_y)->required();
    ssm->add_option("--a", ssm_a)->required();

    auto* spr = sieve->add_subcommand("piprog", "primes p <= x, p = a (mod d)");
    std::uint64_t spr_x = 0, spr_d = 0;
    std::int64_t spr_a = 0;
    spr->add_option("--x", spr_x)->required();
    spr->add_option("--d", spr_d)->required();
    spr->add_option("--a", spr_a)->required();

    auto* sq = sieve->add_subcommand(
        "window", "primes q in (y^theta/log y, y^theta] with q-1 y-smooth");
    std::uint64_t sq_y = 0;
    std::string sq_theta;
    sq->add_option("--y", sq_y)->required();
    sq->add_option("--theta", sq_theta)->required();

    // --- bounds ------------------------------------------------------------
    auto* bounds = app.add_subcommand("bounds", "exact counts vs analytic bounds");
    bounds->require_subcommand(1);
    std::string b_format = "plain";

    auto* b1 = bounds->add_subcommand("eq1", "smooth shifted primes vs gamma*x/log x");
    std::uint64_t b1_x = 0;
    std::string b1_E, b1_gamma;
    std::int64_t b1_a = 1;
    b1->add_option("--x", b1_x)->required();
    b1->add_option("--E", b1_E, "rational in (0, 1 - 1/(2 sqrt(e)))")->required();
    b1->add_option("--a", b1_a)->required();
    b1->add_option("--gamma", b1_gamma, "positive rational")->required();
    b1->add_option("--format", b_format, "plain|json")
        ->check(CLI::IsMember({"plain", "json"}));

    auto* b2 = bounds->add_subcommand("eq2", "progression count vs pi(y)/(2 phi(d))");
    std::uint64_t b2_y = 0, b2_d = 0;
    std::int64_t b2_a = 0;
    b2->add_option("--y", b2_y)->required();
    b2->add_option("--d", b2_d)->required();
    b2->add_option("--a", b2_a)->required();
    b2->add_option("--format", b_format, "plain|json")
        ->check(CLI::IsMember({"plain", "json"}));

    // --- group -------------------------------------------------------------
    auto* grp = app.add_subcommand("group", "zero-product-free sequence bounds");
    grp->require_subcommand(1);

    auto* gnb = grp->add_subcommand("nbound", "m(1 + log(|G|/m)) for G");
    std::string gnb_moduli;
    std::uint64_t gnb_L = 0;
    bool gnb_no_parity = false;
    gnb->add_option("--moduli", gnb_moduli, "cyclic factors, e.g. 2,4");
    gnb->add_option("--L", gnb_L, "squarefree modulus for (Z/LZ)* x Z/2");
    gnb->add_flag("--no-parity", gnb_no_parity, "drop the Z/2 factor");

    auto* gbf = grp->add_subcommand("bruteforce", "exact n(G) by exhaustive search");
    std::string gbf_moduli;
    std::uint64_t gbf_L = 0;
    bool gbf_no_parity = false;
    gbf->add_option("--moduli", gbf_moduli, "cyclic factors, e.g. 2,2");
    gbf->add_option("--L", gbf_L, "squarefree modulus for (Z/LZ)* x Z/2");
    gbf->add_flag("--no-parity", gbf_no_parity, "drop the Z/2 factor");

    auto* gt = grp->add_subcommand(
        "thm22", "randomized check of the identity-subsequence count bound");
    std::string gt_moduli;
    std::uint64_t gt_r = 0, gt_t = 0, gt_trials = 1, gt_seed = 12345;
    gt->add_option("--moduli", gt_moduli)->required();
    gt->add_option("--r", gt_r, "sequence length")->required();
    gt->add_option("--t", gt_t, "window top")->required();
    gt->add_option("--trials", gt_trials);
    gt->add_option("--seed", gt_seed);

    // --- construct ---------------------------------------------------------
    auto* con = app.add_subcommand("construct", "run the construction pipeline");
    std::string con_config;
    bool con_demo = false;
    std::string con_format = "plain";
    con->add_option("--config", con_config, "key=value config file");
    con->add_flag("--demo", con_demo, "use the shipped demo configuration");
    con->add_option("--format", con_format, "plain|json")
        ->check(CLI::IsMember({"plain", "json"}));

    // --- oeis-check --------------------------------------------------------
    auto* oeis = app.add_subcommand("oeis-check", "compare a b-file to enumeration");
    std::string o_bfile;
    std::int64_t o_a = -1, o_b = 1;
    std::uint64_t o_limit = 0;
    oeis->add_option("--bfile", o_bfile)->required();
    oeis->add_option("--a", o_a)->required();
    oeis->add_option("--b", o_b)->required();
    oeis->add_option("--limit", o_limit)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*enm) return cmd_enumerate(e_limit, e_a, e_b, e_format);
        if (*ver) return cmd_verify(v_n, v_a, v_b, v_format == "json");
        if (*cnt) {
            std::printf("%" PRIu64 "\n",
                        criterion::count(c_x, criterion::KorseltParams{c_a, c_b}));
            return kOk;
        }
        if (*spi) {
            std::printf("%" PRIu64 "\n", pi_with_cache(spi_x, s_cache_dir));
            return kOk;
        }
        if (*ssm) {
            std::printf("%" PRIu64 "\n",
                        sieve_stats::pi_shifted_smooth(ssm_x, ssm_y, ssm_a));
            return kOk;
        }
        if (*spr) {
            std::printf("%" PRIu64 "\n",
                        piprog_with_cache(spr_x, spr_d, spr_a, s_cache_dir));
            return kOk;
        }
        if (*sq) {
            const auto win =
                sieve_stats::select_smooth_window(sq_y, parse_rational(sq_theta));
            std::printf("interval (%.6f, %.6f]\n", win.lower_bound,
                        win.upper_bound);
            for (std::uint64_t q : win.primes) std::printf("%" PRIu64 "\n", q);
            return kOk;
        }
        if (*b1) {
            print_bound_report(
                sieve_stats::shifted_smooth_report(
                    b1_x, parse_rational(b1_E), b1_a, parse_rational(b1_gamma)),
                b_format == "json");
            return kOk;
        }
        if (*b2) {
            print_bound_report(sieve_stats::progression_report(b2_y, b2_d, b2_a),
                               b_format == "json");
            return kOk;
        }
        if (*gnb) {
            double bound = 0;
            if (!gnb_moduli.empty()) {
                bound = groups::identity_free_length_bound(
                    groups::CyclicProduct{parse_moduli(gnb_moduli)});
            } else if (gnb_L >= 1) {
                bound = groups::identity_free_length_bound(groups::GroupSpec::units_mod(
                    mpz_class(static_cast<unsigned long>(gnb_L)), !gnb_no_parity));
            } else {
                throw std::invalid_argument("give --moduli or --L");
            }
            std::printf("%.6f\n", bound);
            return kOk;
        }
        if (*gbf) {
            int n = 0;
            if (!gbf_moduli.empty()) {
                n = groups::identity_free_max_length(
                    groups::CyclicProduct{parse_moduli(gbf_moduli)});
            } else if (gbf_L >= 1) {
                n = groups::identity_free_max_length(groups::GroupSpec::units_mod(
                    mpz_class(static_cast<unsigned long>(gbf_L)), !gbf_no_parity));
            } else {
                throw std::invalid_argument("give --moduli or --L");
            }
            std::printf("%d\n", n);
            return kOk;
        }
        if (*gt) {
            const groups::CyclicProduct g{parse_moduli(gt_moduli)};
            const std::uint64_t order = g.order();
            std::mt19937_64 rng(gt_seed);
            std::uint64_t violations = 0;
            for (std::uint64_t trial = 0; trial < gt_trials; ++trial) {
                std::vector<std::vector<std::uint32_t>> seq(gt_r);
                for (auto& e : seq) {
                    std::uint64_t idx = rng() % order;
                    e.resize(g.moduli.size());
                    for (std::size_t j = 0; j < g.moduli.size(); ++j) {
                        e[j] = static_cast<std::uint32_t>(idx % g.moduli[j]);
                        idx /= g.moduli[j];
                    }
                }
                const auto rep = groups::verify_count_bound(g, seq, gt_t);
                if (!rep.satisfied) ++violations;
            }
            std::printf("trials=%" PRIu64 " violations=%" PRIu64 "\n", gt_trials,
                        violations);
            return violations == 0 ? kOk : kRejected;
        }
        if (*con) {
            construct::ConstructionConfig cfg;
            if (con_demo) {
                cfg = construct::demo_config();
            } else if (!con_config.empty()) {
                cfg = io::parse_config(read_file(con_config));
            } else {
                throw std::invalid_argument("give --config FILE or --demo");
            }
            return cmd_construct(cfg, con_format == "json");
        }
        if (*oeis) {
            const auto entries = io::parse_bfile(read_file(o_bfile));
            const auto rep = io::oeis_check(
                entries, criterion::KorseltParams{o_a, o_b}, o_limit);
            std::printf("matched=%" PRIu64 " mismatches=%zu\n", rep.matched,
                        rep.mismatches.size());
            for (const auto& m : rep.mismatches)
                std::printf("  position %zu: bfile=%s enumerated=%s\n", m.position,
                            m.expected.c_str(), m.actual.c_str());
            return rep.mismatches.empty() ? kOk : kRejected;
        }
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const io::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kInternal;
    }
    return kUsage;
}

}  // namespace korselt::cli
