#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "logr/feature.hpp"
#include "logr/log.hpp"

namespace logr {

// Extracts the feature set of one SELECT statement:
//   - one Select feature per projected column ("*" stays a single feature)
//   - one From feature per source; subqueries collapse to one fingerprint
//   - one Where feature per top-level conjunct, constants replaced by `?`
// Identifiers are lowercased; aliases are stripped. Throws UnsupportedQuery
// for non-SELECT statements, explicit JOINs, and top-level OR; throws
// ParseError on malformed input.
std::vector<Feature> parse_query(const std::string& sql);

struct ParseStats {
    std::uint64_t queries = 0;          // queries accepted into the log
    std::uint64_t dropped_clauses = 0;  // GROUP BY/ORDER BY/... removed
};

struct LogBuildResult {
    Log log;
    Vocabulary vocab;
    ParseStats stats;
};

// One query per line, either `SQL` or `COUNT<TAB>SQL` (count >= 1). Blank
// lines are ignored. Malformed or unsupported lines abort the build with the
// 1-based line number in the error message. Throws EmptyLog if no query
// remains.
LogBuildResult build_log(std::istream& in);
LogBuildResult build_log_from_string(const std::string& text);
LogBuildResult build_log_from_file(const std::string& path);

// Encodes an already-featurized workload: each entry is (features, count).
LogBuildResult build_log_from_features(
    const std::vector<std::pair<std::vector<Feature>, std::uint64_t>>& rows);

}  // namespace logr
