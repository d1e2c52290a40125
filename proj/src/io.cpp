#include "korselt/io.hpp"

#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>

namespace korselt::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// b-files
// ---------------------------------------------------------------------------

namespace {

bool all_digits(const std::string& s, bool allow_sign) {
    if (s.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && (s[0] == '-' || s[0] == '+')) i = 1;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

}  // namespace

std::vector<BFileEntry> parse_bfile(const std::string& text) {
    std::vector<BFileEntry> entries;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;  // blank
        if (line[first] == '#') continue;          // comment
        std::istringstream fields(line);
        std::string idx_s, val_s, extra;
        if (!(fields >> idx_s >> val_s))
            throw ParseError(lineno, "expected \"<index> <value>\"");
        if (fields >> extra)
            throw ParseError(lineno, "trailing token '" + extra + "'");
        if (!all_digits(idx_s, false))
            throw ParseError(lineno, "bad index '" + idx_s + "'");
        if (!all_digits(val_s, false))
            throw ParseError(lineno, "bad value '" + val_s + "'");
        BFileEntry e;
        e.index = std::stoull(idx_s);
        e.value = mpz_class(val_s);
        if (e.value < 1) throw ParseError(lineno, "value must be positive");
        if (!entries.empty() && entries.back().index >= e.index)
            throw ParseError(lineno, "index " + idx_s + " not ascending");
        entries.push_back(std::move(e));
    }
    return entries;
}

std::string serialize_bfile(const std::vector<BFileEntry>& entries) {
    std::string out;
    for (const auto& e : entries) {
        out += std::to_string(e.index);
        out += ' ';
        out += e.value.get_str();
        out += '\n';
    }
    return out;
}

OeisReport oeis_check(const std::vector<BFileEntry>& entries,
                      const criterion::KorseltParams& params, std::uint64_t limit) {
    std::vector<mpz_class> theirs;
    for (const auto& e : entries)
        if (e.value <= limit) theirs.push_back(e.value);

    const auto ours = criterion::enumerate_values(limit, params);

    OeisReport rep;
    for (std::size_t i = 0; i < std::max(theirs.size(), ours.size()); ++i) {
        const bool have_theirs = i < theirs.size();
        const bool have_ours = i < ours.size();
        if (have_theirs && have_ours && theirs[i] == ours[i]) {
            ++rep.matched;
            continue;
        }
        OeisMismatch m;
        m.position = i;
        m.expected = have_theirs ? theirs[i].get_str() : "(missing)";
        m.actual = have_ours ? std::to_string(ours[i]) : "(missing)";
        rep.mismatches.push_back(std::move(m));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// JSON records
// ---------------------------------------------------------------------------

json to_json(const criterion::CarmichaelWitness& w) {
    json factors = json::array();
    for (const auto& [p, e] : w.n.factors) {
        // squarefree in practice; exponents kept implicit at 1
        for (unsigned i = 0; i < e; ++i) factors.push_back(p.get_str());
    }
    json witnesses = json::array();
    for (const auto& e : w.entries) {
        witnesses.push_back({{"p", e.p.get_str()},
                             {"divisor", e.divisor.get_str()},
                             {"quotient", e.quotient.get_str()}});
    }
    return json{{"kind", "carmichael"},
                {"n", w.n.value.get_str()},
                {"a", w.params.a},
                {"b", w.params.b},
                {"factors", factors},
                {"witnesses", witnesses}};
}

criterion::CarmichaelWitness carmichael_from_json(const json& j) {
    if (j.at("kind") != "carmichael")
        throw std::invalid_argument("record kind is not carmichael");
    criterion::CarmichaelWitness w;
    w.n.value = mpz_class(j.at("n").get<std::string>());
    w.params.a = j.at("a").get<std::int64_t>();
    w.params.b = j.at("b").get<std::int64_t>();
    for (const auto& f : j.at("factors"))
        w.n.factors.emplace_back(mpz_class(f.get<std::string>()), 1);
    for (const auto& e : j.at("witnesses")) {
        criterion::WitnessEntry we;
        we.p = mpz_class(e.at("p").get<std::string>());
        we.divisor = mpz_class(e.at("divisor").get<std::string>());
        we.quotient = mpz_class(e.at("quotient").get<std::string>());
        w.entries.push_back(std::move(we));
    }
    return w;
}

json to_json(const groups::SubsequenceWitness& w) {
    json labels = json::array();
    for (std::uint64_t l : w.labels) labels.push_back(l);
    return json{{"kind", "witness"},
                {"labels", labels},
                {"product_residue", w.product_residue.get_str()},
                {"total_parity", w.total_parity},
                {"length", w.labels.size()}};
}

groups::SubsequenceWitness witness_from_json(const json& j) {
    if (j.at("kind") != "witness")
        throw std::invalid_argument("record kind is not witness");
    groups::SubsequenceWitness w;
    for (const auto& l : j.at("labels")) w.labels.push_back(l.get<std::uint64_t>());
    w.product_residue = mpz_class(j.at("product_residue").get<std::string>());
    w.total_parity = j.at("total_parity").get<int>();
    return w;
}

json to_json(const sieve_stats::BoundReport& r) {
    json inputs = json::object();
    for (const auto& [k, v] : r.inputs) inputs[k] = v;
    return json{{"kind", "report"},     {"report", r.kind},
                {"inputs", inputs},     {"lhs", r.lhs},
                {"rhs", r.rhs},         {"rhs_formula", r.rhs_formula},
                {"ratio", r.ratio}};
}

json to_json(const groups::CountBoundReport& r) {
    return json{{"kind", "report"},
                {"report", "subsequence_count_bound"},
                {"r", r.r},
                {"t", r.t},
                {"n", r.n},
                {"found", r.found.get_str()},
                {"bound", r.bound.get_str()},
                {"bound_value", r.bound.get_d()},
                {"satisfied", r.satisfied}};
}

namespace {

const char* status_name(groups::SearchStatus s) {
    switch (s) {
        case groups::SearchStatus::exhausted: return "exhausted";
        case groups::SearchStatus::budget_exhausted: return "budget_exhausted";
        case groups::SearchStatus::result_cap_reached: return "result_cap_reached";
    }
    return "?";
}

}  // namespace

json to_json(const construct::ConstructionReport& r) {
    json found = json::array();
    for (const auto& f : r.found) {
        found.push_back({{"n", f.n.get_str()},
                         {"korselt", to_json(f.korselt_witness)},
                         {"subsequence", to_json(f.product_witness)}});
    }
    json hits = json::array();
    for (const auto& [d, p] : r.hits) hits.push_back({{"d", d}, {"p", p}});
    json diag{{"log_L", r.log_L},
              {"q_count", r.q_count},
              {"elapsed_ms", r.elapsed_ms},
              {"implied_B", r.implied_B},
              {"search_status", status_name(r.search_status)},
              {"products_computed", r.products_computed}};
    if (r.implied_E) diag["implied_E"] = *r.implied_E;
    if (r.log_x_theory) diag["log_x_theory"] = *r.log_x_theory;
    if (r.log_t_theory) diag["log_t_theory"] = *r.log_t_theory;
    json j{{"kind", "report"},
           {"report", "construction"},
           {"q_primes", r.q_primes},
           {"L", r.L.value.get_str()},
           {"lambda_L", r.lambda_L.get_str()},
           {"group_order", r.group_order.get_str()},
           {"max_order", r.max_order.get_str()},
           {"identity_free_bound", r.identity_free_bound},
           {"k", r.k},
           {"hit_count", r.hit_count},
           {"hits", hits},
           {"P", r.P},
           {"P_prime", r.P_prime},
           {"found", found},
           {"diagnostics", diag}};
    if (!r.dropped_nonunits.empty()) j["dropped_nonunits"] = r.dropped_nonunits;
    if (r.window) {
        j["window"] = {{"y", r.window->y},
                       {"theta", r.window->theta.str()},
                       {"lower_bound", r.window->lower_bound},
                       {"upper_bound", r.window->upper_bound}};
    }
    return j;
}

// ---------------------------------------------------------------------------
// Config files
// ---------------------------------------------------------------------------

construct::ConstructionConfig parse_config(const std::string& text) {
    construct::ConstructionConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t");
        if (a == std::string::npos) return std::string{};
        const auto b = s.find_last_not_of(" \t");
        return s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ParseError(lineno, "expected key=value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        try {
            if (key == "q_primes") {
                std::istringstream vs(val);
                std::string tok;
                while (std::getline(vs, tok, ','))
                    cfg.q_primes.push_back(std::stoull(trim(tok)));
            } else if (key == "y") {
                cfg.y = std::stoull(val);
            } else if (key == "theta") {
                cfg.theta = parse_rational(val);
            } else if (key == "x_cap") {
                cfg.x_cap = std::stoull(val);
            } else if (key == "a") {
                cfg.a = std::stoll(val);
            } else if (key == "k_max") {
                cfg.k_max = std::stoull(val);
            } else if (key == "t_cap") {
                cfg.t_cap = std::stoull(val);
            } else if (key == "budget") {
                cfg.budget = std::stoull(val);
            } else if (key == "max_results") {
                cfg.max_results = std::stoull(val);
            } else {
                throw ParseError(lineno, "unknown key '" + key + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(lineno, "bad value for '" + key + "': " + e.what());
        }
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Sieve cache
// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kCacheMagic = 0x4b535631;  // "KSV1"

std::uint64_t fnv1a(const unsigned char* data, std::size_t len) {
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= data[i];
        h *= 1099511628211ull;
    }
    return h;
}

template <typename T>
void put(std::string& out, T v) {
    out.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool get(const std::string& in, std::size_t& pos, T& v) {
    if (pos + sizeof(T) > in.size()) return false;
    std::memcpy(&v, in.data() + pos, sizeof(T));
    pos += sizeof(T);
    return true;
}

}  // namespace

SieveCache::SieveCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::filesystem::path SieveCache::entry_path(std::uint64_t lo,
                                             std::uint64_t hi) const {
    return dir_ / ("spf_" + std::to_string(lo) + "_" + std::to_string(hi) + ".bin");
}

void SieveCache::store(const arith::SieveTable& table) const {
    std::string payload;
    put(payload, kCacheMagic);
    put(payload, table.lo());
    put(payload, table.hi());
    put(payload, static_cast<std::uint64_t>(table.raw().size()));
    const auto& raw = table.raw();
    payload.append(reinterpret_cast<const char*>(raw.data()),
                   raw.size() * sizeof(std::uint32_t));
    const std::uint64_t sum =
        fnv1a(reinterpret_cast<const unsigned char*>(payload.data()), payload.size());
    put(payload, sum);

    const auto path = entry_path(table.lo(), table.hi());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
}

std::optional<arith::SieveTable> SieveCache::load(std::uint64_t lo,
                                                  std::uint64_t hi) const {
    std::ifstream in(entry_path(lo, hi), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string payload = buf.str();
    if (payload.size() < sizeof(std::uint64_t)) return std::nullopt;

    const std::size_t body_len = payload.size() - sizeof(std::uint64_t);
    std::uint64_t want_sum = 0;
    std::memcpy(&want_sum, payload.data() + body_len, sizeof(want_sum));
    if (fnv1a(reinterpret_cast<const unsigned char*>(payload.data()), body_len) !=
        want_sum)
        return std::nullopt;

    std::size_t pos = 0;
    std::uint32_t magic = 0;
    std::uint64_t flo = 0, fhi = 0, count = 0;
    if (!get(payload, pos, magic) || magic != kCacheMagic) return std::nullopt;
    if (!get(payload, pos, flo) || !get(payload, pos, fhi) ||
        !get(payload, pos, count))
        return std::nullopt;
    if (flo != lo || fhi != hi || count != hi - lo + 1) return std::nullopt;
    if (pos + count * sizeof(std::uint32_t) != body_len) return std::nullopt;

    std::vector<std::uint32_t> entries(static_cast<std::size_t>(count));
    std::memcpy(entries.data(), payload.data() + pos,
                static_cast<std::size_t>(count) * sizeof(std::uint32_t));
    try {
        return arith::SieveTable::from_raw(lo, hi, std::move(entries));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace korselt::io
