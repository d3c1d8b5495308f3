#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "irisoc/iris_ingest.hpp"

namespace irisoc {

enum class PidScheme { doi, pmid, isbn };

std::string_view pid_scheme_name(PidScheme scheme);
std::optional<PidScheme> parse_pid_scheme(std::string_view name);

struct Pid {
    PidScheme scheme;
    std::string value;  // canonical form

    auto operator<=>(const Pid&) const = default;
    std::string to_string() const;  // "doi:10.1/x" style
};

enum class PidReject {
    empty,
    no_doi_pattern,
    non_numeric,
    out_of_range,
    bad_length,
    bad_checksum,
};

std::string_view pid_reject_name(PidReject reason);

template <typename T>
struct PidResult {
    std::optional<T> pid;
    PidReject reason = PidReject::empty;

    bool ok() const { return pid.has_value(); }
};

PidResult<Pid> normalize_doi(std::string_view raw);
PidResult<Pid> normalize_pmid(std::string_view raw);
PidResult<Pid> normalize_isbn(std::string_view raw);

// Converts a canonical 10-character ISBN to its 13-character form
// (978 prefix, recomputed check digit).
std::string isbn10_to_isbn13(std::string_view isbn10);

struct RejectionCounts {
    std::map<PidReject, std::size_t> by_reason;

    void add(PidReject reason) { ++by_reason[reason]; }
    void merge(const RejectionCounts& other);
    std::size_t total() const;
};

// Per-record extraction + filter outcome feeding index construction.
struct RecordPids {
    std::string item_id;
    MiurType miur_type = MiurType::other;
    std::size_t raw_doi = 0;
    std::size_t raw_pmid = 0;
    std::size_t raw_isbn = 0;
    std::set<Pid> valid;     // within-record unique, pre type filter
    std::set<Pid> retained;  // post ISBN type filter
    std::size_t misassigned_isbns = 0;
    RejectionCounts rejections;
};

// Normalizes every raw identifier field of the record (IDE_DOI -> doi,
// IDE_PMID -> pmid, IDE_ISBN/IDE_ISBN_1..3/IDE_EISBN -> isbn) and
// deduplicates by (scheme, value) within the record.
RecordPids extract_record_pids(const IrisRecord& record);

struct IsbnFilterResult {
    std::set<Pid> retained;
    std::size_t misassigned_isbns = 0;
};

// ISBNs survive only on the book-like MIUR types; doi/pmid always pass.
IsbnFilterResult apply_isbn_type_filter(const std::set<Pid>& pids,
                                        MiurType miur_type);

// Runs extract + filter for one record.
RecordPids process_record_pids(const IrisRecord& record);

class PidIndex {
public:
    // `alias` entries resolve lookups but are excluded from the summary
    // arithmetic (used for the ISBN-13 form of a retained ISBN-10).
    void add(const Pid& pid, const std::string& item_id, bool alias = false);

    const std::set<std::string>* lookup(const Pid& pid) const;
    const std::set<Pid>* pids_of(const std::string& item_id) const;

    std::size_t association_count() const { return association_count_; }
    std::size_t distinct_pid_count() const { return forward_.size(); }
    const std::map<Pid, std::set<std::string>>& forward() const {
        return forward_;
    }

private:
    std::map<Pid, std::set<std::string>> forward_;
    std::map<std::string, std::set<Pid>> reverse_;
    std::size_t association_count_ = 0;  // non-alias (pid, item) pairs
};

struct PidExtractionSummary {
    std::size_t total_records = 0;
    std::size_t records_with_pids = 0;
    std::size_t total_pids_extracted = 0;
    std::size_t raw_doi = 0;
    std::size_t raw_pmid = 0;
    std::size_t raw_isbn = 0;
    std::size_t valid_doi = 0;
    std::size_t valid_pmid = 0;
    std::size_t valid_isbn = 0;
    std::size_t misassigned_isbns = 0;
    std::size_t final_pid_list_size = 0;
    RejectionCounts rejections;
};

struct PidIndexResult {
    PidIndex index;
    PidExtractionSummary summary;
};

PidIndexResult build_pid_index(const std::vector<RecordPids>& records);

}  // namespace irisoc
