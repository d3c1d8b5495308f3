#include "irisoc/pipeline.hpp"

#include <json.hpp>
#include <zlib.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include "irisoc/csv.hpp"

namespace irisoc {

namespace {

using nlohmann::json;

constexpr const char* kRecordsFile = "records.csv";
constexpr const char* kPidsFile = "pids.csv";
constexpr const char* kPidSummaryFile = "pid_summary.csv";
constexpr const char* kMetaMatchesFile = "meta_matches.csv";
constexpr const char* kCanonicalFile = "canonical_matches.csv";
constexpr const char* kCitationStatsFile = "citation_stats.csv";
constexpr const char* kRecordCitationsFile = "record_citations.csv";
constexpr const char* kCitationDetailFile = "citations_detail.csv.gz";

const std::vector<std::string> kIdFields = {
    "IDE_DOI", "IDE_PMID",   "IDE_ISBN", "IDE_ISBN_1",
    "IDE_ISBN_2", "IDE_ISBN_3", "IDE_EISBN",
};

std::string now_or_pinned(const RunConfig& config) {
    if (config.timestamp) {
        return *config.timestamp;
    }
    auto now = std::chrono::system_clock::now();
    auto t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

std::filesystem::path manifest_path(const RunConfig& config,
                                    const std::string& stage) {
    return config.out_dir / "manifests" / (stage + ".json");
}

void write_manifest(const RunConfig& config, const std::string& stage,
                    const std::map<std::string, std::string>& inputs,
                    const std::vector<std::string>& outputs,
                    const std::map<std::string, std::size_t>& counts) {
    json manifest;
    manifest["stage"] = stage;
    manifest["timestamp"] = now_or_pinned(config);
    manifest["inputs"] = inputs;
    json out_digests = json::object();
    for (const auto& name : outputs) {
        out_digests[name] = csv::file_digest(config.out_dir / name);
    }
    manifest["outputs"] = out_digests;
    manifest["counts"] = counts;

    std::filesystem::create_directories(config.out_dir / "manifests");
    std::ofstream file(manifest_path(config, stage));
    if (!file) {
        throw OutputUnwritable("cannot write manifest for stage " + stage);
    }
    file << manifest.dump(2) << '\n';
}

json load_manifest(const RunConfig& config, const std::string& stage) {
    auto path = manifest_path(config, stage);
    std::ifstream file(path);
    if (!file) {
        throw StageInputMissing("stage '" + stage +
                                "' has not been run (missing " +
                                path.string() + ")");
    }
    json manifest;
    file >> manifest;
    return manifest;
}

// The consumed intermediates must still match what the producing stage
// recorded; --force overrides after deliberate manual edits.
void verify_inputs(const RunConfig& config, const std::string& producer,
                   const std::vector<std::string>& files) {
    json manifest = load_manifest(config, producer);
    if (config.force) {
        return;
    }
    const auto& outputs = manifest["outputs"];
    for (const auto& name : files) {
        auto path = config.out_dir / name;
        if (!std::filesystem::exists(path)) {
            throw StageInputMissing("missing intermediate " + path.string() +
                                    "; re-run stage '" + producer + "'");
        }
        if (!outputs.contains(name) ||
            outputs[name].get<std::string>() != csv::file_digest(path)) {
            throw StageInputMissing(
                "intermediate " + path.string() +
                " does not match the manifest of stage '" + producer +
                "'; re-run it or pass --force");
        }
    }
}

std::string join_values(const std::vector<std::string>& values) {
    std::string out;
    for (const auto& value : values) {
        if (!out.empty()) {
            out.push_back('|');
        }
        out += value;
    }
    return out;
}

std::vector<std::string> split_values(const std::string& joined) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= joined.size()) {
        std::size_t bar = joined.find('|', pos);
        std::string piece = joined.substr(
            pos, bar == std::string::npos ? std::string::npos : bar - pos);
        if (!piece.empty()) {
            out.push_back(piece);
        }
        if (bar == std::string::npos) {
            break;
        }
        pos = bar + 1;
    }
    return out;
}

std::optional<int> to_int(const std::string& text) {
    if (text.empty()) {
        return std::nullopt;
    }
    int value = 0;
    auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    return value;
}

std::size_t to_count(const std::string& text) {
    auto value = to_int(text);
    return value && *value >= 0 ? static_cast<std::size_t>(*value) : 0;
}

void progress(const std::string& message) {
    std::cerr << "[irisoc] " << message << '\n';
}

struct EligibleSplit {
    std::vector<IrisRecord> eligible;
    std::size_t excluded = 0;
    std::size_t unknown_year = 0;
};

EligibleSplit split_eligible(std::vector<IrisRecord> records,
                             int cutoff_year) {
    auto filtered = filter_by_year(std::move(records), cutoff_year);
    return {std::move(filtered.kept), filtered.excluded.size(),
            filtered.unknown_year};
}

PidIndex rebuild_index(const std::vector<RecordPids>& records) {
    PidIndex index;
    for (const auto& record : records) {
        for (const auto& pid : record.retained) {
            index.add(pid, record.item_id);
            if (pid.scheme == PidScheme::isbn && pid.value.size() == 10) {
                index.add(Pid{PidScheme::isbn, isbn10_to_isbn13(pid.value)},
                          record.item_id, /*alias=*/true);
            }
        }
    }
    return index;
}

void write_citation_stats_csv(const CitationStats& stats,
                              const std::filesystem::path& file) {
    csv::CsvWriter writer(file);
    writer.write_row({"metric", "total", "average"});
    writer.write_row({"IRIS records as citing entity",
                      std::to_string(stats.outgoing_total),
                      stats.outgoing_avg ? format_average(*stats.outgoing_avg)
                                         : ""});
    writer.write_row({"IRIS records as cited entity",
                      std::to_string(stats.incoming_total),
                      stats.incoming_avg ? format_average(*stats.incoming_avg)
                                         : ""});
    writer.write_row({"Citations between IRIS records",
                      std::to_string(stats.internal_total), ""});
}

CitationStats read_citation_stats_csv(const std::filesystem::path& file) {
    CitationStats stats;
    csv::CsvReader reader(file);
    std::vector<std::string> row;
    reader.next(row);  // header
    while (reader.next(row)) {
        if (row.size() < 3) {
            continue;
        }
        if (row[0] == "IRIS records as citing entity") {
            stats.outgoing_total = to_count(row[1]);
            if (!row[2].empty()) {
                stats.outgoing_avg = std::strtod(row[2].c_str(), nullptr);
            }
        } else if (row[0] == "IRIS records as cited entity") {
            stats.incoming_total = to_count(row[1]);
            if (!row[2].empty()) {
                stats.incoming_avg = std::strtod(row[2].c_str(), nullptr);
            }
        } else if (row[0] == "Citations between IRIS records") {
            stats.internal_total = to_count(row[1]);
        }
    }
    return stats;
}

}  // namespace

void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value) {
    if (key == "iris_dir") {
        config.iris_dir = value;
    } else if (key == "mapping") {
        config.mapping_file = value;
    } else if (key == "meta_dump") {
        config.meta_dump = value;
    } else if (key == "index_dump") {
        config.index_dump = value;
    } else if (key == "out") {
        config.out_dir = value;
    } else if (key == "year_cutoff") {
        auto year = to_int(value);
        if (!year || *year < 1000 || *year > 2100) {
            throw ConfigInvalid("year_cutoff must be in [1000, 2100], got '" +
                                value + "'");
        }
        config.cutoff_year = *year;
    } else if (key == "shards") {
        auto shards = to_int(value);
        if (!shards || *shards < 1) {
            throw ConfigInvalid("shards must be >= 1, got '" + value + "'");
        }
        config.shard_count = static_cast<unsigned>(*shards);
    } else if (key == "emit_citation_detail") {
        config.emit_citation_detail = (value == "1" || value == "true");
    } else if (key == "force") {
        config.force = (value == "1" || value == "true");
    } else if (key == "timestamp") {
        config.timestamp = value;
    } else if (key.starts_with("iris.file.")) {
        config.iris_files[key.substr(10)] = value;
    } else if (key == "meta.column.id") {
        config.meta_columns.id = value;
    } else if (key == "meta.column.pub_date") {
        config.meta_columns.pub_date = value;
    } else if (key == "meta.column.type") {
        config.meta_columns.type = value;
    } else if (key == "meta.column.title") {
        config.meta_columns.title = value;
    } else if (key == "index.column.oci") {
        config.index_columns.oci = value;
    } else if (key == "index.column.citing") {
        config.index_columns.citing = value;
    } else if (key == "index.column.cited") {
        config.index_columns.cited = value;
    } else {
        throw ConfigInvalid("unknown configuration key '" + key + "'");
    }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw ConfigInvalid("cannot read config file " + file.string());
    }
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string text = csv::trim(line);
        if (text.empty() || text[0] == '#') {
            continue;
        }
        std::size_t eq = text.find('=');
        if (eq == std::string::npos) {
            throw ConfigInvalid("config line " + std::to_string(line_no) +
                                " is not key=value: " + text);
        }
        apply_config_entry(config, csv::trim(text.substr(0, eq)),
                           csv::trim(text.substr(eq + 1)));
    }
}

void apply_environment(RunConfig& config) {
    static const std::vector<std::pair<const char*, const char*>> kVars = {
        {"IRISOC_IRIS_DIR", "iris_dir"},
        {"IRISOC_MAPPING", "mapping"},
        {"IRISOC_META_DUMP", "meta_dump"},
        {"IRISOC_INDEX_DUMP", "index_dump"},
        {"IRISOC_OUT", "out"},
        {"IRISOC_YEAR_CUTOFF", "year_cutoff"},
        {"IRISOC_SHARDS", "shards"},
        {"IRISOC_EMIT_CITATION_DETAIL", "emit_citation_detail"},
        {"IRISOC_FORCE", "force"},
        {"IRISOC_TIMESTAMP", "timestamp"},
    };
    for (const auto& [env, key] : kVars) {
        const char* value = std::getenv(env);
        if (value != nullptr && *value != '\0') {
            apply_config_entry(config, key, value);
        }
    }
}

void validate_common(const RunConfig& config) {
    if (config.out_dir.empty()) {
        throw ConfigInvalid("output directory is required (--out)");
    }
    if (config.cutoff_year < 1000 || config.cutoff_year > 2100) {
        throw ConfigInvalid("year cutoff must be in [1000, 2100]");
    }
    if (config.shard_count < 1) {
        throw ConfigInvalid("shard count must be >= 1");
    }
}

void write_records_csv(const std::vector<IrisRecord>& records,
                       const std::filesystem::path& file) {
    csv::CsvWriter writer(file);
    std::vector<std::string> header = {"item_id", "year",     "title",
                                       "raw_collection", "miur_type",
                                       "language", "author_count"};
    header.insert(header.end(), kIdFields.begin(), kIdFields.end());
    writer.write_row(header);
    for (const auto& record : records) {
        std::vector<std::string> row = {
            record.item_id,
            record.year ? std::to_string(*record.year) : "",
            record.title,
            record.raw_collection,
            std::string(miur_type_name(record.miur_type)),
            record.language.value_or(""),
            record.author_count ? std::to_string(*record.author_count) : "",
        };
        for (const auto& field : kIdFields) {
            auto it = record.raw_ids.find(field);
            row.push_back(it == record.raw_ids.end() ? ""
                                                     : join_values(it->second));
        }
        writer.write_row(row);
    }
}

std::vector<IrisRecord> read_records_csv(const std::filesystem::path& file) {
    std::vector<IrisRecord> records;
    csv::CsvReader reader(file);
    std::vector<std::string> header;
    if (!reader.next(header)) {
        throw StageInputMissing("records file is empty: " + file.string());
    }
    std::vector<std::string> row;
    while (reader.next(row)) {
        if (row.size() < 7 + kIdFields.size()) {
            continue;
        }
        IrisRecord record;
        record.item_id = row[0];
        record.year = to_int(row[1]);
        record.title = row[2];
        record.raw_collection = row[3];
        record.miur_type = parse_miur_type(row[4]).value_or(MiurType::other);
        if (!row[5].empty()) {
            record.language = row[5];
        }
        record.author_count = to_int(row[6]);
        for (std::size_t i = 0; i < kIdFields.size(); ++i) {
            auto values = split_values(row[7 + i]);
            if (!values.empty()) {
                record.raw_ids[kIdFields[i]] = std::move(values);
            }
        }
        records.push_back(std::move(record));
    }
    return records;
}

void write_pid_summary_csv(const PidExtractionSummary& summary,
                           const std::filesystem::path& file) {
    csv::CsvWriter writer(file);
    writer.write_row({"metric", "value"});
    auto row = [&](const char* label, std::size_t value) {
        writer.write_row({label, std::to_string(value)});
    };
    row("Total records", summary.total_records);
    row("Records with PIDs", summary.records_with_pids);
    row("Total PIDs extracted", summary.total_pids_extracted);
    row("DOIs extracted", summary.raw_doi);
    row("PMIDs extracted", summary.raw_pmid);
    row("ISBNs extracted", summary.raw_isbn);
    row("Valid DOIs", summary.valid_doi);
    row("Valid PMIDs", summary.valid_pmid);
    row("Valid ISBNs", summary.valid_isbn);
    row("Misassigned ISBNs", summary.misassigned_isbns);
    row("Final PID list size", summary.final_pid_list_size);
    for (const auto& [reason, count] : summary.rejections.by_reason) {
        writer.write_row(
            {"Rejected (" + std::string(pid_reject_name(reason)) + ")",
             std::to_string(count)});
    }
}

PidExtractionSummary read_pid_summary_csv(const std::filesystem::path& file) {
    PidExtractionSummary summary;
    csv::CsvReader reader(file);
    std::vector<std::string> row;
    reader.next(row);  // header
    while (reader.next(row)) {
        if (row.size() < 2) {
            continue;
        }
        const std::string& label = row[0];
        std::size_t value = to_count(row[1]);
        if (label == "Total records") summary.total_records = value;
        else if (label == "Records with PIDs") summary.records_with_pids = value;
        else if (label == "Total PIDs extracted") summary.total_pids_extracted = value;
        else if (label == "DOIs extracted") summary.raw_doi = value;
        else if (label == "PMIDs extracted") summary.raw_pmid = value;
        else if (label == "ISBNs extracted") summary.raw_isbn = value;
        else if (label == "Valid DOIs") summary.valid_doi = value;
        else if (label == "Valid PMIDs") summary.valid_pmid = value;
        else if (label == "Valid ISBNs") summary.valid_isbn = value;
        else if (label == "Misassigned ISBNs") summary.misassigned_isbns = value;
        else if (label == "Final PID list size") summary.final_pid_list_size = value;
        else if (label.starts_with("Rejected (") && label.ends_with(")")) {
            std::string reason = label.substr(10, label.size() - 11);
            for (auto r : {PidReject::empty, PidReject::no_doi_pattern,
                           PidReject::non_numeric, PidReject::out_of_range,
                           PidReject::bad_length, PidReject::bad_checksum}) {
                if (pid_reject_name(r) == reason) {
                    summary.rejections.by_reason[r] = value;
                }
            }
        }
    }
    return summary;
}

std::vector<RecordPids> read_pids_csv(const std::filesystem::path& file) {
    std::map<std::string, RecordPids> by_id;
    csv::CsvReader reader(file);
    std::vector<std::string> row;
    reader.next(row);  // header
    while (reader.next(row)) {
        if (row.size() < 3) {
            continue;
        }
        auto scheme = parse_pid_scheme(row[1]);
        if (!scheme) {
            continue;
        }
        auto& record = by_id[row[0]];
        record.item_id = row[0];
        record.retained.insert(Pid{*scheme, row[2]});
    }
    std::vector<RecordPids> out;
    out.reserve(by_id.size());
    for (auto& [item_id, record] : by_id) {
        out.push_back(std::move(record));
    }
    return out;
}

std::vector<MetaMatch> read_meta_matches_csv(
    const std::filesystem::path& file) {
    std::vector<MetaMatch> matches;
    csv::CsvReader reader(file);
    std::vector<std::string> row;
    reader.next(row);  // header
    while (reader.next(row)) {
        if (row.size() < 6) {
            continue;
        }
        auto scheme = parse_pid_scheme(row[2]);
        if (!scheme) {
            continue;
        }
        matches.push_back(
            MetaMatch{row[0], row[1], Pid{*scheme, row[3]}, row[4], row[5]});
    }
    return matches;
}

std::vector<CanonicalMatch> read_canonical_matches_csv(
    const std::filesystem::path& meta_matches_file,
    const std::filesystem::path& canonical_file) {
    auto matches = read_meta_matches_csv(meta_matches_file);
    std::map<std::string, std::set<std::string>> omids_by_item;
    for (const auto& match : matches) {
        omids_by_item[match.item_id].insert(match.omid);
    }

    std::vector<CanonicalMatch> out;
    csv::CsvReader reader(canonical_file);
    std::vector<std::string> row;
    reader.next(row);  // header
    while (reader.next(row)) {
        if (row.size() < 4) {
            continue;
        }
        CanonicalMatch match;
        match.item_id = row[0];
        match.canonical_omid = row[1];
        match.pub_date = row[3];
        match.all_omids = omids_by_item[match.item_id];
        out.push_back(std::move(match));
    }
    return out;
}

void run_convert(const RunConfig& config) {
    validate_common(config);
    if (config.iris_dir.empty() || config.mapping_file.empty()) {
        throw ConfigInvalid("convert requires --iris-dir and --mapping");
    }
    if (!std::filesystem::exists(config.mapping_file)) {
        throw ConfigInvalid("mapping file not found: " +
                            config.mapping_file.string());
    }
    std::filesystem::create_directories(config.out_dir);

    IngestLog log;
    auto tables = load_iris_tables(config.iris_dir, config.iris_files, &log);
    for (const auto& warning : log.warnings) {
        progress("warning: " + warning);
    }
    auto mapping = TypeMapping::load(config.mapping_file);
    auto records = join_records(tables, mapping, &log);
    progress("convert: " + std::to_string(records.size()) + " records joined");

    write_records_csv(records, config.out_dir / kRecordsFile);

    std::map<std::string, std::string> inputs;
    inputs[config.mapping_file.string()] = csv::file_digest(config.mapping_file);
    for (const auto& entry :
         std::filesystem::directory_iterator(config.iris_dir)) {
        if (entry.is_regular_file()) {
            inputs[entry.path().string()] = csv::file_digest(entry.path());
        }
    }
    write_manifest(config, "convert", inputs, {kRecordsFile},
                   {{"records", records.size()},
                    {"scalar_collisions", log.scalar_collisions}});
}

void run_analyze(const RunConfig& config) {
    validate_common(config);
    verify_inputs(config, "convert", {kRecordsFile});
    auto records = read_records_csv(config.out_dir / kRecordsFile);

    std::vector<RecordPids> pids;
    pids.reserve(records.size());
    for (const auto& record : records) {
        pids.push_back(process_record_pids(record));
    }
    auto result = build_pid_index(pids);

    {
        csv::CsvWriter writer(config.out_dir / kPidsFile);
        writer.write_row({"item_id", "scheme", "value"});
        for (const auto& record : pids) {
            for (const auto& pid : record.retained) {
                writer.write_row({record.item_id,
                                  std::string(pid_scheme_name(pid.scheme)),
                                  pid.value});
            }
        }
    }
    write_pid_summary_csv(result.summary, config.out_dir / kPidSummaryFile);
    progress("analyze: " +
             std::to_string(result.summary.final_pid_list_size) +
             " identifiers retained from " +
             std::to_string(result.summary.total_records) + " records");

    write_manifest(config, "analyze",
                   {{(config.out_dir / kRecordsFile).string(),
                     csv::file_digest(config.out_dir / kRecordsFile)}},
                   {kPidsFile, kPidSummaryFile},
                   {{"final_pid_list_size", result.summary.final_pid_list_size},
                    {"records_with_pids", result.summary.records_with_pids}});
}

void run_map_meta(const RunConfig& config) {
    validate_common(config);
    if (config.meta_dump.empty()) {
        throw ConfigInvalid("map-meta requires --meta-dump");
    }
    verify_inputs(config, "analyze", {kPidsFile});
    auto pids = read_pids_csv(config.out_dir / kPidsFile);
    auto index = rebuild_index(pids);
    progress("map-meta: scanning with " +
             std::to_string(index.distinct_pid_count()) + " indexed PIDs");

    auto result = scan_meta_dump(config.meta_dump, index, config.meta_columns,
                                 config.shard_count);
    progress("map-meta: " + std::to_string(result.stats.rows_scanned) +
             " rows scanned, " + std::to_string(result.matches.size()) +
             " matches");

    {
        csv::CsvWriter writer(config.out_dir / kMetaMatchesFile);
        writer.write_row(
            {"item_id", "omid", "scheme", "pid_value", "pub_date",
             "meta_type"});
        for (const auto& match : result.matches) {
            writer.write_row({match.item_id, match.omid,
                              std::string(pid_scheme_name(
                                  match.matched_pid.scheme)),
                              match.matched_pid.value, match.pub_date,
                              match.meta_type});
        }
    }
    auto canonical = dedup_entities(result.matches);
    {
        csv::CsvWriter writer(config.out_dir / kCanonicalFile);
        writer.write_row({"item_id", "canonical_omid", "omid_count",
                          "pub_date"});
        for (const auto& match : canonical) {
            writer.write_row({match.item_id, match.canonical_omid,
                              std::to_string(match.all_omids.size()),
                              match.pub_date});
        }
    }

    write_manifest(config, "map-meta",
                   {{(config.out_dir / kPidsFile).string(),
                     csv::file_digest(config.out_dir / kPidsFile)}},
                   {kMetaMatchesFile, kCanonicalFile},
                   {{"rows_scanned", result.stats.rows_scanned},
                    {"rows_without_omid", result.stats.rows_without_omid},
                    {"malformed_rows", result.stats.malformed_rows},
                    {"unreadable_files", result.stats.unreadable_files},
                    {"invalid_dates", result.stats.invalid_dates},
                    {"files_scanned", result.stats.files_scanned},
                    {"matches", result.matches.size()},
                    {"matched_records", canonical.size()}});
}

void run_map_index(const RunConfig& config) {
    validate_common(config);
    if (config.index_dump.empty()) {
        throw ConfigInvalid("map-index requires --index-dump");
    }
    verify_inputs(config, "map-meta", {kMetaMatchesFile, kCanonicalFile});
    auto canonical =
        read_canonical_matches_csv(config.out_dir / kMetaMatchesFile,
                                   config.out_dir / kCanonicalFile);
    auto resolver = build_omid_resolver(canonical);
    progress("map-index: scanning with " + std::to_string(resolver.size()) +
             " OMIDs");

    auto scan = scan_index_dump(config.index_dump, resolver,
                                config.index_columns, config.shard_count);
    auto dedup = dedup_citations(scan.links, resolver);
    progress("map-index: " + std::to_string(scan.stats.rows_scanned) +
             " rows scanned, " + std::to_string(dedup.deduped_links.size()) +
             " distinct citations");

    // Averages use the matched-record count under the year cutoff.
    auto records = read_records_csv(config.out_dir / kRecordsFile);
    std::unordered_map<std::string, std::optional<int>> year_of;
    for (const auto& record : records) {
        year_of[record.item_id] = record.year;
    }
    std::size_t matched_eligible = 0;
    for (const auto& match : canonical) {
        auto it = year_of.find(match.item_id);
        std::optional<int> year =
            it == year_of.end() ? std::nullopt : it->second;
        if (!year || *year <= config.cutoff_year) {
            ++matched_eligible;
        }
    }
    auto stats = compute_citation_averages(dedup.stats, matched_eligible);

    write_citation_stats_csv(stats, config.out_dir / kCitationStatsFile);
    {
        csv::CsvWriter writer(config.out_dir / kRecordCitationsFile);
        writer.write_row({"item_id", "outgoing", "incoming"});
        for (const auto& [item_id, counts] : dedup.per_record) {
            writer.write_row({item_id, std::to_string(counts.outgoing),
                              std::to_string(counts.incoming)});
        }
    }

    std::vector<std::string> outputs = {kCitationStatsFile,
                                        kRecordCitationsFile};
    if (config.emit_citation_detail) {
        auto path = config.out_dir / kCitationDetailFile;
        gzFile gz = gzopen(path.string().c_str(), "wb");
        if (gz == nullptr) {
            throw OutputUnwritable("cannot write " + path.string());
        }
        auto put = [&](const std::string& line) {
            gzwrite(gz, line.data(), static_cast<unsigned>(line.size()));
        };
        put("oci,citing,cited,direction\n");
        for (const auto& link : dedup.deduped_links) {
            put(csv::quote_field(link.oci) + "," +
                csv::quote_field(link.citing_omid) + "," +
                csv::quote_field(link.cited_omid) + "," +
                std::string(citation_direction_name(link.direction)) + "\n");
        }
        gzclose(gz);
        outputs.push_back(kCitationDetailFile);
    }

    write_manifest(
        config, "map-index",
        {{(config.out_dir / kMetaMatchesFile).string(),
          csv::file_digest(config.out_dir / kMetaMatchesFile)},
         {(config.out_dir / kCanonicalFile).string(),
          csv::file_digest(config.out_dir / kCanonicalFile)}},
        outputs,
        {{"rows_scanned", scan.stats.rows_scanned},
         {"malformed_rows", scan.stats.malformed_rows},
         {"unreadable_files", scan.stats.unreadable_files},
         {"files_scanned", scan.stats.files_scanned},
         {"outgoing_total", stats.outgoing_total},
         {"incoming_total", stats.incoming_total},
         {"internal_total", stats.internal_total}});
}

void run_report(const RunConfig& config) {
    validate_common(config);
    verify_inputs(config, "convert", {kRecordsFile});
    verify_inputs(config, "analyze", {kPidsFile, kPidSummaryFile});
    verify_inputs(config, "map-meta", {kMetaMatchesFile, kCanonicalFile});
    verify_inputs(config, "map-index",
                  {kCitationStatsFile, kRecordCitationsFile});

    auto records = read_records_csv(config.out_dir / kRecordsFile);
    auto pids = read_pids_csv(config.out_dir / kPidsFile);
    auto summary = read_pid_summary_csv(config.out_dir / kPidSummaryFile);
    auto canonical =
        read_canonical_matches_csv(config.out_dir / kMetaMatchesFile,
                                   config.out_dir / kCanonicalFile);
    auto stats = read_citation_stats_csv(config.out_dir / kCitationStatsFile);

    std::map<std::string, RecordCitationCounts> citations;
    {
        csv::CsvReader reader(config.out_dir / kRecordCitationsFile);
        std::vector<std::string> row;
        reader.next(row);  // header
        while (reader.next(row)) {
            if (row.size() < 3) {
                continue;
            }
            citations[row[0]] = {to_count(row[1]), to_count(row[2])};
        }
    }

    auto split = split_eligible(std::move(records), config.cutoff_year);
    auto outcomes =
        classify_records(split.eligible, pids, canonical, citations);
    auto report =
        compute_coverage_tables(split.eligible, outcomes, stats, summary);
    report.unknown_year = split.unknown_year;

    report.run_metadata["timestamp"] = now_or_pinned(config);
    report.run_metadata["year cutoff"] = std::to_string(config.cutoff_year);
    report.run_metadata["records excluded by cutoff"] =
        std::to_string(split.excluded);
    report.run_metadata["records with unknown year"] =
        std::to_string(split.unknown_year);
    if (!config.meta_dump.empty()) {
        report.run_metadata["metadata dump"] = config.meta_dump.string();
    }
    if (!config.index_dump.empty()) {
        report.run_metadata["citation dump"] = config.index_dump.string();
    }
    // Skipped-row counters from the scan manifests.
    for (const char* stage : {"map-meta", "map-index"}) {
        json manifest = load_manifest(config, stage);
        for (const char* counter :
             {"malformed_rows", "unreadable_files", "rows_without_omid"}) {
            if (manifest["counts"].contains(counter)) {
                report.run_metadata[std::string(stage) + " " + counter] =
                    std::to_string(
                        manifest["counts"][counter].get<std::size_t>());
            }
        }
    }

    {
        csv::CsvWriter writer(config.out_dir / "coverage.csv");
        writer.write_row({"metric", "value"});
        writer.write_row(
            {"Eligible records", std::to_string(report.eligible_records)});
        writer.write_row(
            {"Matched records", std::to_string(report.matched_count)});
        writer.write_row({"Coverage (%)",
                          report.matched_pct
                              ? format_percent(*report.matched_pct)
                              : ""});
    }
    {
        csv::CsvWriter writer(config.out_dir / "per_year.csv");
        writer.write_row({"year", "records"});
        for (const auto& [year, count] : report.per_year) {
            writer.write_row({std::to_string(year), std::to_string(count)});
        }
        if (report.unknown_year > 0) {
            writer.write_row({"unknown", std::to_string(report.unknown_year)});
        }
    }
    {
        csv::CsvWriter writer(config.out_dir / "per_type_status.csv");
        writer.write_row({"miur_type", "matched", "has_pids_unmatched",
                          "no_pids", "total"});
        for (const auto& [type, counts] : report.per_type) {
            writer.write_row({std::string(miur_type_name(type)),
                              std::to_string(counts.matched),
                              std::to_string(counts.has_pids_unmatched),
                              std::to_string(counts.no_pids),
                              std::to_string(counts.total())});
        }
    }
    emit_subsets(outcomes, config.out_dir);
    render_html_report(report, config.out_dir / "report.html");

    {
        std::ofstream log(config.out_dir / "run_log.txt");
        if (!log) {
            throw OutputUnwritable("cannot write run_log.txt");
        }
        log << "timestamp=" << now_or_pinned(config) << '\n'
            << "year_cutoff=" << config.cutoff_year << '\n'
            << "total_records="
            << (split.eligible.size() + split.excluded) << '\n'
            << "eligible_records=" << report.eligible_records << '\n'
            << "excluded_records=" << split.excluded << '\n'
            << "unknown_year_records=" << split.unknown_year << '\n'
            << "matched_records=" << report.matched_count << '\n'
            << "final_pid_list_size=" << summary.final_pid_list_size << '\n'
            << "outgoing_total=" << stats.outgoing_total << '\n'
            << "incoming_total=" << stats.incoming_total << '\n'
            << "internal_total=" << stats.internal_total << '\n';
    }
    progress("report: " + std::to_string(report.matched_count) + " of " +
             std::to_string(report.eligible_records) + " eligible records "
             "matched");

    write_manifest(config, "report", {},
                   {"coverage.csv", "per_year.csv", "per_type_status.csv",
                    "report.html", "run_log.txt"},
                   {{"eligible_records", report.eligible_records},
                    {"matched_records", report.matched_count}});
}

void run_all(const RunConfig& config) {
    run_convert(config);
    run_analyze(config);
    run_map_meta(config);
    run_map_index(config);
    run_report(config);
}

}  // namespace irisoc
