#pragma once
// Report plumbing: TSV bodies with '#'-prefixed header lines, pass/fail
// bookkeeping, and the exit-status contract.

#include <string>
#include <utility>
#include <vector>

namespace bfv {

inline constexpr const char* kToolVersion = "bfv 1.0";

// Exit-code contract.
inline constexpr int kExitPass = 0;      // all checks passed
inline constexpr int kExitLemmaFail = 1; // a lemma check failed (bug class)
inline constexpr int kExitInput = 2;     // input / certificate error
inline constexpr int kExitCap = 3;       // resource-cap abort

struct Report {
    std::vector<std::pair<std::string, std::string>> header;  // key, value
    std::vector<std::string> records;                         // TSV lines
    int pass = 0;
    int fail = 0;

    void add_header(const std::string& key, const std::string& value) {
        header.emplace_back(key, value);
    }
    void add_record(const std::string& line, bool ok) {
        records.push_back(line);
        ok ? ++pass : ++fail;
    }
    void merge(const Report& o);

    int exit_status() const { return fail == 0 ? kExitPass : kExitLemmaFail; }
    bool all_pass() const { return fail == 0; }

    /// Full body: "# key\tvalue" header lines (tool/lemma/seed/config echo),
    /// records, then a "# summary" line.  Deterministic for fixed config.
    std::string str() const;
    void write_file(const std::string& path) const;
};

/// Joins fields with tabs.
std::string tsv(const std::vector<std::string>& fields);

}  // namespace bfv
