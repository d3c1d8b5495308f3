#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "irisoc/index_matcher.hpp"
#include "irisoc/pid.hpp"

namespace irisoc {

struct OutputUnwritable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class RecordStatus { matched, has_pids_unmatched, no_pids };

std::string_view record_status_name(RecordStatus status);

struct TypeStatusCounts {
    std::size_t matched = 0;
    std::size_t has_pids_unmatched = 0;
    std::size_t no_pids = 0;

    std::size_t total() const {
        return matched + has_pids_unmatched + no_pids;
    }
};

struct CoverageReport {
    PidExtractionSummary pid_summary;
    std::size_t eligible_records = 0;  // year <= cutoff or year absent
    std::size_t matched_count = 0;
    std::optional<double> matched_pct;
    CitationStats citation_stats;
    std::map<int, std::size_t> per_year;  // eligible records by year
    std::size_t unknown_year = 0;
    std::map<MiurType, TypeStatusCounts> per_type;
    std::map<std::string, std::string> run_metadata;
};

struct RecordOutcome {
    const IrisRecord* record = nullptr;
    RecordStatus status = RecordStatus::no_pids;
    bool in_index = false;  // matched and participating in >= 1 citation
};

// Classifies every eligible record against the pipeline outputs.
std::vector<RecordOutcome> classify_records(
    const std::vector<IrisRecord>& eligible,
    const std::vector<RecordPids>& pids,
    const std::vector<CanonicalMatch>& matches,
    const std::map<std::string, RecordCitationCounts>& citations);

CoverageReport compute_coverage_tables(
    const std::vector<IrisRecord>& eligible,
    const std::vector<RecordOutcome>& outcomes,
    const CitationStats& citation_stats,
    const PidExtractionSummary& summary);

// Writes subsets/{found_in_meta,not_found_in_meta,found_in_index,no_pids}.csv.
// found_in_meta + not_found_in_meta + no_pids partition the eligible
// records; found_in_index is the cited-or-citing subset of found_in_meta.
void emit_subsets(const std::vector<RecordOutcome>& outcomes,
                  const std::filesystem::path& out_dir);

// Top-n types by count with an aggregated "Other" display bucket. The
// MIUR residual category keeps its own "Other (MIUR)" label.
std::vector<std::pair<std::string, std::size_t>> distribution_top_types(
    const std::map<MiurType, std::size_t>& counts, std::size_t n = 5);

// Self-contained HTML (inline styles and SVG charts, no network assets).
void render_html_report(const CoverageReport& report,
                        const std::filesystem::path& out);

// 1,234,567-style rendering used across CSV/HTML outputs.
std::string format_thousands(std::size_t value);
std::string format_percent(double value);  // one decimal place

}  // namespace irisoc
