#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

#include "irisoc/pipeline.hpp"

namespace {

// Exit codes: 0 success, 1 config error, 2 missing stage input, 3 data error.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitStageInput = 2;
constexpr int kExitData = 3;

struct CliOptions {
    std::string iris_dir;
    std::string mapping;
    std::string meta_dump;
    std::string index_dump;
    std::string out;
    std::string config_file;
    int year_cutoff = -1;
    int shards = -1;
    bool emit_citation_detail = false;
    bool force = false;
};

void add_common_options(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--iris-dir", opts.iris_dir,
                    "Directory with the seven IRIS export CSV files");
    cmd->add_option("--mapping", opts.mapping,
                    "Two-column raw_type,miur_type mapping file");
    cmd->add_option("--meta-dump", opts.meta_dump,
                    "OpenCitations Meta dump directory or file");
    cmd->add_option("--index-dump", opts.index_dump,
                    "OpenCitations Index dump directory or file");
    cmd->add_option("--out", opts.out, "Output directory");
    cmd->add_option("--year-cutoff", opts.year_cutoff,
                    "Keep records published up to this year (default 2024)");
    cmd->add_option("--shards", opts.shards,
                    "Parallel workers for dump scanning (default 1)");
    cmd->add_option("--config", opts.config_file,
                    "key=value configuration file");
    cmd->add_flag("--emit-citation-detail", opts.emit_citation_detail,
                  "Also write citations_detail.csv.gz");
    cmd->add_flag("--force", opts.force,
                  "Skip manifest digest verification of intermediates");
}

irisoc::RunConfig build_config(const CliOptions& opts) {
    irisoc::RunConfig config;
    if (!opts.config_file.empty()) {
        irisoc::apply_config_file(config, opts.config_file);
    }
    irisoc::apply_environment(config);
    // Command-line flags win over file and environment.
    if (!opts.iris_dir.empty()) config.iris_dir = opts.iris_dir;
    if (!opts.mapping.empty()) config.mapping_file = opts.mapping;
    if (!opts.meta_dump.empty()) config.meta_dump = opts.meta_dump;
    if (!opts.index_dump.empty()) config.index_dump = opts.index_dump;
    if (!opts.out.empty()) config.out_dir = opts.out;
    if (opts.year_cutoff >= 0) {
        irisoc::apply_config_entry(config, "year_cutoff",
                                   std::to_string(opts.year_cutoff));
    }
    if (opts.shards >= 0) {
        irisoc::apply_config_entry(config, "shards",
                                   std::to_string(opts.shards));
    }
    if (opts.emit_citation_detail) config.emit_citation_detail = true;
    if (opts.force) config.force = true;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Measures the coverage of an institutional IRIS export in the "
        "OpenCitations Meta and Index dumps"};
    app.require_subcommand(1);

    CliOptions opts;
    auto* convert = app.add_subcommand(
        "convert", "Parse and join the IRIS tables into records.csv");
    auto* analyze = app.add_subcommand(
        "analyze", "Extract, validate and summarise persistent identifiers");
    auto* map_meta = app.add_subcommand(
        "map-meta", "Match identifiers against the Meta dump");
    auto* map_index = app.add_subcommand(
        "map-index", "Collect citations involving the matched entities");
    auto* report = app.add_subcommand(
        "report", "Aggregate results, write subsets and the HTML report");
    auto* all = app.add_subcommand("run-all", "Run every stage in order");
    for (auto* cmd : {convert, analyze, map_meta, map_index, report, all}) {
        add_common_options(cmd, opts);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        irisoc::RunConfig config = build_config(opts);
        if (convert->parsed()) irisoc::run_convert(config);
        else if (analyze->parsed()) irisoc::run_analyze(config);
        else if (map_meta->parsed()) irisoc::run_map_meta(config);
        else if (map_index->parsed()) irisoc::run_map_index(config);
        else if (report->parsed()) irisoc::run_report(config);
        else irisoc::run_all(config);
        return kExitOk;
    } catch (const irisoc::ConfigInvalid& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const irisoc::StageInputMissing& e) {
        std::cerr << "stage input error: " << e.what() << '\n';
        return kExitStageInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}
