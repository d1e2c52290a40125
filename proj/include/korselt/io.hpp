#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "korselt/construct.hpp"
#include "korselt/criterion.hpp"
#include "korselt/groups.hpp"
#include "korselt/sieve_stats.hpp"

namespace korselt::io {

// ---------------------------------------------------------------------------
// OEIS b-files: "<index> <value>" records, '#' comments, blank lines allowed
// ---------------------------------------------------------------------------

struct BFileEntry {
    std::uint64_t index = 0;
    mpz_class value;
    friend bool operator==(const BFileEntry& x, const BFileEntry& y) {
        return x.index == y.index && x.value == y.value;
    }
};

class ParseError : public std::runtime_error {
  public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what),
          line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

std::vector<BFileEntry> parse_bfile(const std::string& text);
std::string serialize_bfile(const std::vector<BFileEntry>& entries);

struct OeisMismatch {
    std::size_t position = 0;      // 0-based index into the compared prefix
    std::string expected;          // b-file value ("(missing)" when absent)
    std::string actual;            // enumerated value ("(missing)" when absent)
};

struct OeisReport {
    std::uint64_t matched = 0;
    std::vector<OeisMismatch> mismatches;
};

/// Compare the b-file values <= limit against the enumeration of the same
/// parameters; exact positional match required.
OeisReport oeis_check(const std::vector<BFileEntry>& entries,
                      const criterion::KorseltParams& params, std::uint64_t limit);

// ---------------------------------------------------------------------------
// JSON-lines records (kind: carmichael | witness | report)
// ---------------------------------------------------------------------------

nlohmann::json to_json(const criterion::CarmichaelWitness& w);
criterion::CarmichaelWitness carmichael_from_json(const nlohmann::json& j);

nlohmann::json to_json(const groups::SubsequenceWitness& w);
groups::SubsequenceWitness witness_from_json(const nlohmann::json& j);

nlohmann::json to_json(const sieve_stats::BoundReport& r);
nlohmann::json to_json(const groups::CountBoundReport& r);
nlohmann::json to_json(const construct::ConstructionReport& r);

// ---------------------------------------------------------------------------
// Construction config files: key=value lines, '#' comments
// ---------------------------------------------------------------------------

construct::ConstructionConfig parse_config(const std::string& text);

// ---------------------------------------------------------------------------
// On-disk cache of SieveTable payloads keyed by (lo, hi)
// ---------------------------------------------------------------------------

class SieveCache {
  public:
    explicit SieveCache(std::filesystem::path dir);

    /// nullopt on miss or on any corruption (bad header, size, checksum);
    /// corrupt entries are treated as absent.
    std::optional<arith::SieveTable> load(std::uint64_t lo, std::uint64_t hi) const;
    void store(const arith::SieveTable& table) const;

    std::filesystem::path entry_path(std::uint64_t lo, std::uint64_t hi) const;

  private:
    std::filesystem::path dir_;
};

}  // namespace korselt::io
