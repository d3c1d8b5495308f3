#include "irisoc/meta_matcher.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "irisoc/csv.hpp"

namespace irisoc {

namespace {

std::optional<int> parse_component(std::string_view text, int lo, int hi) {
    if (text.empty() || text.size() > 4 ||
        !std::all_of(text.begin(), text.end(), [](unsigned char c) {
            return std::isdigit(c) != 0;
        })) {
        return std::nullopt;
    }
    int value = 0;
    std::from_chars(text.data(), text.data() + text.size(), value);
    if (value < lo || value > hi) {
        return std::nullopt;
    }
    return value;
}

struct ResolvedColumns {
    std::size_t id;
    std::size_t pub_date;
    std::size_t type;
};

ResolvedColumns resolve_columns(const std::vector<std::string>& header,
                                const MetaColumnConfig& config,
                                const std::filesystem::path& file) {
    auto id = csv::column_index(header, config.id);
    auto pub_date = csv::column_index(header, config.pub_date);
    auto type = csv::column_index(header, config.type);
    if (!id || !pub_date || !type) {
        throw std::runtime_error(
            "metadata dump header mismatch in " + file.string() +
            ": expected columns '" + config.id + "', '" + config.pub_date +
            "', '" + config.type +
            "' (the dump layout may have drifted; override the column names "
            "in the configuration)");
    }
    return {*id, *pub_date, *type};
}

void scan_file(const std::filesystem::path& file,
               const MetaColumnConfig& columns, const PidIndex& index,
               std::vector<MetaMatch>& matches, MetaScanStats& stats,
               bool preflight) {
    std::vector<std::string> header;
    csv::CsvReader reader(file);
    if (!reader.next(header)) {
        if (preflight) {
            throw std::runtime_error("metadata dump file has no header: " +
                                     file.string());
        }
        ++stats.malformed_rows;
        return;
    }
    ResolvedColumns cols{0, 0, 0};
    if (preflight) {
        cols = resolve_columns(header, columns, file);
    } else {
        auto id = csv::column_index(header, columns.id);
        auto pub_date = csv::column_index(header, columns.pub_date);
        auto type = csv::column_index(header, columns.type);
        if (!id || !pub_date || !type) {
            ++stats.unreadable_files;
            return;
        }
        cols = {*id, *pub_date, *type};
    }

    std::size_t needed = std::max({cols.id, cols.pub_date, cols.type});
    std::vector<std::string> row;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) {
            continue;
        }
        ++stats.rows_scanned;
        if (row.size() <= needed) {
            ++stats.malformed_rows;
            continue;
        }
        auto cell = parse_meta_id_cell(row[cols.id]);
        if (!cell) {
            ++stats.rows_without_omid;
            continue;
        }
        if (cell->external_ids.empty()) {
            continue;
        }
        std::string pub_date;
        if (!row[cols.pub_date].empty()) {
            if (parse_partial_date(row[cols.pub_date])) {
                pub_date = csv::trim(row[cols.pub_date]);
            } else {
                ++stats.invalid_dates;
            }
        }
        for (const auto& pid : cell->external_ids) {
            const auto* items = index.lookup(pid);
            if (items == nullptr) {
                continue;
            }
            for (const auto& item_id : *items) {
                matches.push_back(MetaMatch{item_id, cell->omid, pid,
                                            pub_date, row[cols.type]});
            }
        }
    }
}

}  // namespace

std::optional<PartialDate> parse_partial_date(std::string_view text) {
    std::string trimmed = csv::trim(text);
    std::string_view s = trimmed;
    if (s.empty()) {
        return std::nullopt;
    }
    PartialDate date;
    std::size_t dash1 = s.find('-');
    auto year = parse_component(s.substr(0, dash1), 1000, 2100);
    if (!year || (dash1 != std::string_view::npos && dash1 != 4)) {
        return std::nullopt;
    }
    date.year = *year;
    if (dash1 == std::string_view::npos) {
        return date;
    }
    std::string_view rest = s.substr(dash1 + 1);
    std::size_t dash2 = rest.find('-');
    std::string_view month_text =
        dash2 == std::string_view::npos ? rest : rest.substr(0, dash2);
    if (month_text.size() != 2) {
        return std::nullopt;
    }
    auto month = parse_component(month_text, 1, 12);
    if (!month) {
        return std::nullopt;
    }
    date.month = *month;
    if (dash2 == std::string_view::npos) {
        return date;
    }
    std::string_view day_text = rest.substr(dash2 + 1);
    if (day_text.size() != 2) {
        return std::nullopt;
    }
    auto day = parse_component(day_text, 1, 31);
    if (!day) {
        return std::nullopt;
    }
    date.day = *day;
    return date;
}

std::optional<MetaIdCell> parse_meta_id_cell(std::string_view cell) {
    MetaIdCell out;
    std::size_t pos = 0;
    while (pos <= cell.size()) {
        std::size_t space = cell.find(' ', pos);
        std::string_view token = cell.substr(
            pos, space == std::string_view::npos ? cell.size() - pos
                                                 : space - pos);
        if (!token.empty()) {
            if (token.starts_with("omid:")) {
                if (out.omid.empty()) {
                    out.omid = std::string(token);
                }
            } else if (token.starts_with("doi:")) {
                if (auto r = normalize_doi(token.substr(4)); r.ok()) {
                    out.external_ids.insert(*r.pid);
                }
            } else if (token.starts_with("pmid:")) {
                if (auto r = normalize_pmid(token.substr(5)); r.ok()) {
                    out.external_ids.insert(*r.pid);
                }
            } else if (token.starts_with("isbn:")) {
                if (auto r = normalize_isbn(token.substr(5)); r.ok()) {
                    out.external_ids.insert(*r.pid);
                }
            }
            // Other schemes (issn:, ...) are not matched.
        }
        if (space == std::string_view::npos) {
            break;
        }
        pos = space + 1;
    }
    if (out.omid.empty()) {
        return std::nullopt;
    }
    return out;
}

std::vector<std::filesystem::path> list_dump_files(
    const std::filesystem::path& dump) {
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_regular_file(dump)) {
        files.push_back(dump);
        return files;
    }
    if (!std::filesystem::is_directory(dump)) {
        throw std::runtime_error("dump path does not exist: " + dump.string());
    }
    for (const auto& entry :
         std::filesystem::recursive_directory_iterator(dump)) {
        if (!entry.is_regular_file()) {
            continue;
        }
        const auto& path = entry.path();
        std::string name = path.filename().string();
        if (name.ends_with(".csv") || name.ends_with(".csv.gz")) {
            files.push_back(path);
        }
    }
    std::sort(files.begin(), files.end());
    return files;
}

MetaScanResult scan_meta_dump(const std::filesystem::path& dump,
                              const PidIndex& index,
                              const MetaColumnConfig& columns,
                              unsigned shard_count) {
    MetaScanResult result;
    auto files = list_dump_files(dump);
    if (files.empty()) {
        return result;
    }

    // Preflight: the first file's header must expose the configured
    // columns, otherwise the whole run would silently match nothing.
    scan_file(files.front(), columns, index, result.matches, result.stats,
              /*preflight=*/true);
    ++result.stats.files_scanned;

    std::vector<std::filesystem::path> rest(files.begin() + 1, files.end());
    if (!rest.empty()) {
        unsigned workers = std::max(1u, shard_count);
        std::vector<std::vector<MetaMatch>> shard_matches(workers);
        std::vector<MetaScanStats> shard_stats(workers);
        std::atomic<std::size_t> next{0};
        auto worker = [&](unsigned shard) {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= rest.size()) {
                    break;
                }
                try {
                    scan_file(rest[i], columns, index, shard_matches[shard],
                              shard_stats[shard], /*preflight=*/false);
                } catch (const std::exception&) {
                    ++shard_stats[shard].unreadable_files;
                }
                ++shard_stats[shard].files_scanned;
            }
        };
        if (workers == 1) {
            worker(0);
        } else {
            std::vector<std::thread> threads;
            threads.reserve(workers);
            for (unsigned w = 0; w < workers; ++w) {
                threads.emplace_back(worker, w);
            }
            for (auto& t : threads) {
                t.join();
            }
        }
        for (unsigned w = 0; w < workers; ++w) {
            auto& stats = result.stats;
            const auto& s = shard_stats[w];
            stats.rows_scanned += s.rows_scanned;
            stats.rows_without_omid += s.rows_without_omid;
            stats.malformed_rows += s.malformed_rows;
            stats.unreadable_files += s.unreadable_files;
            stats.files_scanned += s.files_scanned;
            stats.invalid_dates += s.invalid_dates;
            result.matches.insert(result.matches.end(),
                                  shard_matches[w].begin(),
                                  shard_matches[w].end());
        }
    }

    std::sort(result.matches.begin(), result.matches.end());
    result.matches.erase(
        std::unique(result.matches.begin(), result.matches.end()),
        result.matches.end());
    return result;
}

}  // namespace irisoc
