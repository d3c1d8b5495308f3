#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "irisoc/entity_dedup.hpp"
#include "irisoc/index_matcher.hpp"
#include "irisoc/iris_ingest.hpp"
#include "irisoc/meta_matcher.hpp"
#include "irisoc/pid.hpp"
#include "irisoc/reporting.hpp"

namespace irisoc {

struct ConfigInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A stage was run before the stage producing its inputs.
struct StageInputMissing : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::filesystem::path iris_dir;
    std::filesystem::path mapping_file;
    std::filesystem::path meta_dump;
    std::filesystem::path index_dump;
    std::filesystem::path out_dir;
    int cutoff_year = 2024;
    unsigned shard_count = 1;
    TableFileConfig iris_files;
    MetaColumnConfig meta_columns;
    IndexColumnConfig index_columns;
    bool emit_citation_detail = false;
    bool force = false;
    // Pinned run timestamp; when unset the wall clock is used.
    std::optional<std::string> timestamp;
};

// Applies `key=value` lines from a config file. Unknown keys are an error.
void apply_config_file(RunConfig& config, const std::filesystem::path& file);

// Applies IRISOC_* environment variables (IRISOC_IRIS_DIR, IRISOC_MAPPING,
// IRISOC_META_DUMP, IRISOC_INDEX_DUMP, IRISOC_OUT, IRISOC_YEAR_CUTOFF,
// IRISOC_SHARDS, IRISOC_EMIT_CITATION_DETAIL, IRISOC_FORCE,
// IRISOC_TIMESTAMP).
void apply_environment(RunConfig& config);

void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value);

void validate_common(const RunConfig& config);

// Stage entry points. Each writes its outputs plus a manifest under
// <out>/manifests/ recording input and output digests; a stage refuses
// to consume intermediates whose digests do not match what the producing
// stage recorded, unless config.force is set.
void run_convert(const RunConfig& config);
void run_analyze(const RunConfig& config);
void run_map_meta(const RunConfig& config);
void run_map_index(const RunConfig& config);
void run_report(const RunConfig& config);
void run_all(const RunConfig& config);

// Intermediate readers shared by stages and tests.
std::vector<IrisRecord> read_records_csv(const std::filesystem::path& file);
std::vector<RecordPids> read_pids_csv(const std::filesystem::path& file);
std::vector<MetaMatch> read_meta_matches_csv(
    const std::filesystem::path& file);
std::vector<CanonicalMatch> read_canonical_matches_csv(
    const std::filesystem::path& meta_matches_file,
    const std::filesystem::path& canonical_file);
PidExtractionSummary read_pid_summary_csv(const std::filesystem::path& file);

void write_records_csv(const std::vector<IrisRecord>& records,
                       const std::filesystem::path& file);
void write_pid_summary_csv(const PidExtractionSummary& summary,
                           const std::filesystem::path& file);

}  // namespace irisoc
