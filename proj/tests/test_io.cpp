#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "korselt/io.hpp"

using namespace korselt;
using nlohmann::json;

namespace {

std::string data_path(const std::string& name) {
    return std::string(KORSELT_TEST_DATA_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct CliResult {
    int exit_code;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(KORSELT_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf;
    while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe))
        out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

}  // namespace

TEST_CASE("parse_bfile basics") {
    auto one = io::parse_bfile("1 385\n");
    REQUIRE(one.size() == 1);
    CHECK(one[0].index == 1);
    CHECK(one[0].value == 385);

    CHECK(io::parse_bfile("# comment\n\n").empty());
    CHECK(io::parse_bfile("").empty());
    CHECK(io::parse_bfile("  # indented comment\r\n\t\n").empty());

    auto tabs = io::parse_bfile("1\t385\n2  2737\n");
    REQUIRE(tabs.size() == 2);
    CHECK(tabs[1].value == 2737);
}

TEST_CASE("parse_bfile errors carry line numbers") {
    try {
        io::parse_bfile("1 385\n2 abc\n");
        FAIL("expected ParseError");
    } catch (const io::ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(io::parse_bfile("1 385\n1 390\n"), io::ParseError);  // not ascending
    CHECK_THROWS_AS(io::parse_bfile("5\n"), io::ParseError);
    CHECK_THROWS_AS(io::parse_bfile("1 385 9\n"), io::ParseError);
    CHECK_THROWS_AS(io::parse_bfile("x 385\n"), io::ParseError);
    CHECK_THROWS_AS(io::parse_bfile("1 0\n"), io::ParseError);
}

TEST_CASE("bfile round trip") {
    std::vector<io::BFileEntry> entries;
    std::uint64_t i = 1;
    for (std::uint64_t n : criterion::enumerate_values(100000, {-1, 1}))
        entries.push_back({i++, mpz_class(static_cast<unsigned long>(n))});
    entries.push_back({i, mpz_class("11143683029073947063019388081")});
    CHECK(io::parse_bfile(io::serialize_bfile(entries)) == entries);
}

TEST_CASE("oeis_check against the shipped fixture") {
    const auto entries = io::parse_bfile(slurp(data_path("b225711.txt")));
    REQUIRE(entries.size() == 105);

    auto rep = io::oeis_check(entries, {-1, 1}, 400);
    CHECK(rep.matched == 1);
    CHECK(rep.mismatches.empty());

    auto rep5 = io::oeis_check(entries, {-1, 1}, 100000);
    CHECK(rep5.matched == 13);
    CHECK(rep5.mismatches.empty());

    CHECK(io::oeis_check({}, {-1, 1}, 100).matched == 0);

    const auto corrupt = io::parse_bfile(slurp(data_path("b225711_corrupt.txt")));
    auto bad = io::oeis_check(corrupt, {-1, 1}, 100000);
    REQUIRE(bad.mismatches.size() == 1);
    CHECK(bad.mismatches[0].position == 0);
    CHECK(bad.mismatches[0].expected == "386");
    CHECK(bad.mismatches[0].actual == "385");
}

TEST_CASE("carmichael record round trip") {
    const auto res = criterion::check(mpz_class(385), {-1, 1});
    REQUIRE(res.accepted);
    const json j = io::to_json(*res.witness);
    CHECK(j.at("kind") == "carmichael");
    CHECK(j.at("n") == "385");
    CHECK(j.at("a") == -1);
    CHECK(j.at("b") == 1);
    CHECK(j.at("factors") == json::array({"5", "7", "11"}));
    REQUIRE(j.at("witnesses").size() == 3);
    CHECK(j.at("witnesses")[0] ==
          json{{"p", "5"}, {"divisor", "6"}, {"quotient", "64"}});

    const auto back = io::carmichael_from_json(json::parse(j.dump()));
    CHECK(back.n.value == res.witness->n.value);
    CHECK(back.params == res.witness->params);
    REQUIRE(back.entries.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.entries[i].p == res.witness->entries[i].p);
        CHECK(back.entries[i].divisor == res.witness->entries[i].divisor);
        CHECK(back.entries[i].quotient == res.witness->entries[i].quotient);
    }
    // a second serialization is byte-identical
    CHECK(io::to_json(back).dump() == j.dump());
}

TEST_CASE("witness and report records") {
    groups::SubsequenceWitness w{{19, 29}, mpz_class(1), 0};
    const json j = io::to_json(w);
    CHECK(j.at("kind") == "witness");
    CHECK(j.at("length") == 2);
    const auto back = io::witness_from_json(json::parse(j.dump()));
    CHECK(back.labels == w.labels);
    CHECK(back.product_residue == w.product_residue);

    const auto br = sieve_stats::progression_report(100, 1, 0);
    const json jb = io::to_json(br);
    CHECK(jb.at("kind") == "report");
    CHECK(jb.at("report") == "eq2");
    CHECK(jb.at("lhs") == 25);
    CHECK(json::parse(jb.dump()).dump() == jb.dump());

    const auto rep = construct::run_pipeline(construct::demo_config());
    const json jc = io::to_json(rep);
    CHECK(jc.at("report") == "construction");
    CHECK(jc.at("L") == "15015");
    CHECK(jc.at("found").size() == 7);
    CHECK(json::parse(jc.dump()).dump() == jc.dump());
}

TEST_CASE("config parsing") {
    const auto cfg = io::parse_config(
        "# demo\nq_primes = 3, 5, 7\nx_cap=500\na = -1\nk_max = 50\n"
        "t_cap = 8\nbudget = 1000\nmax_results = 4\n");
    CHECK(cfg.q_primes == std::vector<std::uint64_t>{3, 5, 7});
    CHECK(cfg.x_cap == 500);
    CHECK(cfg.a == -1);
    CHECK(cfg.k_max == 50);
    CHECK(cfg.t_cap == 8);
    CHECK(cfg.budget == 1000);
    CHECK(cfg.max_results == 4);

    const auto win = io::parse_config("y = 10\ntheta = 1.2\n");
    CHECK(win.y == 10);
    CHECK(win.theta == Rational(6, 5));

    CHECK_THROWS_AS(io::parse_config("bogus = 3\n"), io::ParseError);
    CHECK_THROWS_AS(io::parse_config("x_cap\n"), io::ParseError);
    CHECK_THROWS_AS(io::parse_config("x_cap = frog\n"), io::ParseError);
}

TEST_CASE("sieve cache: store, load, corrupt fallback") {
    const std::string dir = "cache_test_tmp";
    std::filesystem::remove_all(dir);
    io::SieveCache cache{dir};

    CHECK_FALSE(cache.load(0, 5000).has_value());

    const arith::SieveTable table(0, 5000);
    cache.store(table);
    const auto loaded = cache.load(0, 5000);
    REQUIRE(loaded.has_value());
    CHECK(loaded->raw() == table.raw());
    for (std::uint64_t n : {2ull, 97ull, 4999ull})
        CHECK(loaded->is_prime(n) == table.is_prime(n));

    // wrong key
    CHECK_FALSE(cache.load(0, 5001).has_value());

    // flip one byte in the middle: checksum must reject silently
    const auto path = cache.entry_path(0, 5000);
    {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(1000);
        char c;
        f.seekg(1000);
        f.get(c);
        f.seekp(1000);
        f.put(static_cast<char>(c ^ 0x5a));
    }
    CHECK_FALSE(cache.load(0, 5000).has_value());

    // truncated file
    cache.store(table);
    std::filesystem::resize_file(path, 64);
    CHECK_FALSE(cache.load(0, 5000).has_value());

    std::filesystem::remove_all(dir);
}

// ---------------------------------------------------------------------------
// CLI end-to-end
// ---------------------------------------------------------------------------

TEST_CASE("cli: verify") {
    auto ok = run_cli("verify 385 --a -1 --b 1");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("p=5 divisor=6 quotient=64") != std::string::npos);

    auto bad = run_cli("verify 386 --a -1 --b 1");
    CHECK(bad.exit_code == 1);

    auto j = run_cli("verify 561 --a 1 --b 1 --format json");
    CHECK(j.exit_code == 0);
    const auto rec = json::parse(j.out);
    CHECK(rec.at("kind") == "carmichael");
    CHECK(rec.at("n") == "561");
}

TEST_CASE("cli: enumerate formats agree") {
    auto plain = run_cli("enumerate --a -1 --b 1 --limit 400");
    CHECK(plain.exit_code == 0);
    CHECK(plain.out == "385\n");

    auto jout = run_cli("enumerate --a -1 --b 1 --limit 100000 --format json");
    CHECK(jout.exit_code == 0);
    std::vector<std::string> json_ns;
    std::istringstream jl(jout.out);
    std::string line;
    while (std::getline(jl, line)) {
        const auto rec = json::parse(line);
        CHECK(rec.at("kind") == "carmichael");
        json_ns.push_back(rec.at("n").get<std::string>());
        const auto w = io::carmichael_from_json(rec);
        CHECK(criterion::check(w.n.value, w.params).accepted);
    }

    auto cout_ = run_cli("enumerate --a -1 --b 1 --limit 100000 --format csv");
    std::vector<std::string> csv_ns;
    std::istringstream cl(cout_.out);
    std::getline(cl, line);
    CHECK(line == "n");
    while (std::getline(cl, line)) csv_ns.push_back(line);

    CHECK(json_ns == csv_ns);
    CHECK(json_ns.size() == 13);
}

TEST_CASE("cli: count and sieve") {
    CHECK(run_cli("count --a -1 --b 1 --x 385").out == "1\n");
    CHECK(run_cli("sieve pi --x 100").out == "25\n");
    CHECK(run_cli("sieve pismooth --x 50 --y 5 --a 1").out == "11\n");
    CHECK(run_cli("sieve piprog --x 20 --d 4 --a 1").out == "3\n");
    auto win = run_cli("sieve window --y 10 --theta 1.2");
    CHECK(win.out.find("7\n11\n13\n") != std::string::npos);
}

TEST_CASE("cli: sieve cache round trip") {
    std::filesystem::remove_all("cli_cache_tmp");
    auto first = run_cli("sieve --cache-dir cli_cache_tmp pi --x 10000");
    CHECK(first.out == "1229\n");
    CHECK(std::filesystem::exists("cli_cache_tmp/spf_0_10000.bin"));
    auto second = run_cli("sieve --cache-dir cli_cache_tmp pi --x 10000");
    CHECK(second.out == "1229\n");
    auto prog = run_cli("sieve --cache-dir cli_cache_tmp piprog --x 10000 --d 4 --a 1");
    const auto direct = run_cli("sieve piprog --x 10000 --d 4 --a 1");
    CHECK(prog.out == direct.out);
    std::filesystem::remove_all("cli_cache_tmp");
}

TEST_CASE("cli: bounds and group") {
    auto eq2 = run_cli("bounds eq2 --y 100 --d 1 --a 0 --format json");
    const auto rec = json::parse(eq2.out);
    CHECK(rec.at("lhs") == 25);
    CHECK(rec.at("rhs") == doctest::Approx(12.5));

    CHECK(run_cli("group bruteforce --moduli 2,2").out == "2\n");
    CHECK(run_cli("group bruteforce --L 15").out == "5\n");  // C2 x C4 x C2
    auto nb = run_cli("group nbound --L 15");
    CHECK(std::stod(nb.out) == doctest::Approx(9.545177).epsilon(1e-5));
    auto t22 = run_cli("group thm22 --moduli 3 --r 9 --t 4 --trials 100 --seed 7");
    CHECK(t22.exit_code == 0);
    CHECK(t22.out == "trials=100 violations=0\n");
}

TEST_CASE("cli: construct demo") {
    auto demo = run_cli("construct --demo --format json");
    CHECK(demo.exit_code == 0);
    const auto rec = json::parse(demo.out);
    CHECK(rec.at("k") == 8);
    CHECK(rec.at("found").size() == 7);
    CHECK(rec.at("found")[0].at("n") == "30811161981601");

    auto conf = run_cli("construct --config " + std::string(KORSELT_CONFIG_DIR) +
                        "/demo.conf --format json");
    CHECK(json::parse(conf.out).at("found").size() == 7);

    auto plain = run_cli("construct --demo");
    CHECK(plain.exit_code == 0);
    CHECK(plain.out.find("k = 8") != std::string::npos);
    CHECK(plain.out.find("n = 30811161981601 = 103 * 311 * 24023 * 40039") !=
          std::string::npos);
}

TEST_CASE("cli: construct exit 3 when the budget starves an empty search") {
    {
        std::ofstream f("starved.conf");
        f << "q_primes = 3,5,7,11,13\nx_cap = 1000000\nk_max = 1000\n"
             "t_cap = 16\nbudget = 4\n";
    }
    auto res = run_cli("construct --config starved.conf --format json");
    CHECK(res.exit_code == 3);
    const auto rec = json::parse(res.out);
    CHECK(rec.at("found").empty());
    CHECK(rec.at("diagnostics").at("search_status") == "budget_exhausted");
    std::filesystem::remove("starved.conf");
}

TEST_CASE("cli: oeis-check") {
    auto ok = run_cli("oeis-check --bfile " + data_path("b225711.txt") +
                      " --a -1 --b 1 --limit 100000");
    CHECK(ok.exit_code == 0);
    CHECK(ok.out.find("matched=13 mismatches=0") != std::string::npos);

    auto bad = run_cli("oeis-check --bfile " + data_path("b225711_corrupt.txt") +
                       " --a -1 --b 1 --limit 100000");
    CHECK(bad.exit_code == 1);
    CHECK(bad.out.find("mismatches=1") != std::string::npos);
}

TEST_CASE("cli: usage errors exit 2") {
    CHECK(run_cli("enumerate --a -1 --b 1").exit_code == 2);       // missing limit
    CHECK(run_cli("bogus-subcommand").exit_code == 2);
    CHECK(run_cli("enumerate --a -1 --b 1 --limit 10 --format yaml").exit_code == 2);
    CHECK(run_cli("verify 10 --a -1 --b 1 --unknown-flag").exit_code == 2);
    CHECK(run_cli("construct").exit_code == 2);  // neither --config nor --demo
    CHECK(run_cli("bounds eq2 --y 100 --d 4 --a 2").exit_code == 2);  // gcd != 1
    CHECK(run_cli("oeis-check --bfile /nonexistent --a -1 --b 1 --limit 10")
              .exit_code == 2);
}
