#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "irisoc/pid.hpp"

namespace irisoc {

struct PartialDate {
    int year = 0;
    std::optional<int> month;
    std::optional<int> day;

    auto operator<=>(const PartialDate&) const = default;
};

// Accepts YYYY, YYYY-MM, YYYY-MM-DD with in-range components; anything
// else is treated as absent.
std::optional<PartialDate> parse_partial_date(std::string_view text);

struct MetaMatch {
    std::string item_id;
    std::string omid;  // "omid:br/..." form
    Pid matched_pid;
    std::string pub_date;  // validated partial-date text, may be empty
    std::string meta_type;

    auto operator<=>(const MetaMatch&) const = default;
};

struct MetaIdCell {
    std::string omid;
    std::set<Pid> external_ids;
};

// Splits the identifier cell on spaces; the first "omid:" token is the
// entity id, doi:/pmid:/isbn: tokens run through the normalizers, other
// schemes are ignored. Returns nullopt when no omid token is present.
std::optional<MetaIdCell> parse_meta_id_cell(std::string_view cell);

struct MetaColumnConfig {
    std::string id = "id";
    std::string pub_date = "pub_date";
    std::string type = "type";
    std::string title = "title";
};

struct MetaScanStats {
    std::size_t rows_scanned = 0;
    std::size_t rows_without_omid = 0;
    std::size_t malformed_rows = 0;
    std::size_t unreadable_files = 0;
    std::size_t files_scanned = 0;
    std::size_t invalid_dates = 0;
};

struct MetaScanResult {
    std::vector<MetaMatch> matches;  // canonically sorted, deduplicated
    MetaScanStats stats;
};

// Streams every file of the dump (a directory of .csv/.csv.gz files, or
// a single file) once against the read-only index. Memory use is bounded
// by the index plus the match list. Aborts with a diagnostic when the
// first file's header lacks the configured columns.
MetaScanResult scan_meta_dump(const std::filesystem::path& dump,
                              const PidIndex& index,
                              const MetaColumnConfig& columns = {},
                              unsigned shard_count = 1);

// Dump files in deterministic order; .csv and .csv.gz, recursive.
std::vector<std::filesystem::path> list_dump_files(
    const std::filesystem::path& dump);

}  // namespace irisoc
