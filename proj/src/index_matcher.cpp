#include "irisoc/index_matcher.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <stdexcept>
#include <thread>

#include "irisoc/csv.hpp"

namespace irisoc {

namespace {

std::string normalize_omid(std::string_view cell) {
    std::string text = csv::trim(cell);
    if (text.empty()) {
        return text;
    }
    if (text.starts_with("omid:")) {
        return text;
    }
    return "omid:" + text;
}

struct ResolvedColumns {
    std::size_t oci;
    std::size_t citing;
    std::size_t cited;
};

void scan_file(const std::filesystem::path& file,
               const IndexColumnConfig& columns, const OmidResolver& resolver,
               std::vector<CitationLink>& links, IndexScanStats& stats,
               bool preflight) {
    std::vector<std::string> header;
    csv::CsvReader reader(file);
    if (!reader.next(header)) {
        if (preflight) {
            throw std::runtime_error("citation dump file has no header: " +
                                     file.string());
        }
        ++stats.malformed_rows;
        return;
    }
    auto oci = csv::column_index(header, columns.oci);
    auto citing = csv::column_index(header, columns.citing);
    auto cited = csv::column_index(header, columns.cited);
    if (!oci || !citing || !cited) {
        if (preflight) {
            throw std::runtime_error(
                "citation dump header mismatch in " + file.string() +
                ": expected columns '" + columns.oci + "', '" +
                columns.citing + "', '" + columns.cited +
                "' (override the column names in the configuration)");
        }
        ++stats.unreadable_files;
        return;
    }
    ResolvedColumns cols{*oci, *citing, *cited};
    std::size_t needed = std::max({cols.oci, cols.citing, cols.cited});

    std::vector<std::string> row;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) {
            continue;
        }
        ++stats.rows_scanned;
        if (row.size() <= needed || csv::trim(row[cols.oci]).empty()) {
            ++stats.malformed_rows;
            continue;
        }
        std::string citing_omid = normalize_omid(row[cols.citing]);
        std::string cited_omid = normalize_omid(row[cols.cited]);
        if (citing_omid.empty() || cited_omid.empty()) {
            ++stats.malformed_rows;
            continue;
        }
        auto citing_it = resolver.find(citing_omid);
        auto cited_it = resolver.find(cited_omid);
        bool citing_in = citing_it != resolver.end();
        bool cited_in = cited_it != resolver.end();
        if (!citing_in && !cited_in) {
            continue;
        }
        CitationDirection direction;
        if (citing_in && cited_in) {
            // Internal only when the two sides span different records;
            // duplicate OMIDs of a single record are not a self-link.
            const auto& rc = citing_it->second;
            const auto& rd = cited_it->second;
            bool different = rc != rd || rc.size() > 1;
            if (!different) {
                direction = CitationDirection::outgoing;
            } else {
                direction = CitationDirection::internal;
            }
        } else if (citing_in) {
            direction = CitationDirection::outgoing;
        } else {
            direction = CitationDirection::incoming;
        }
        links.push_back(CitationLink{csv::trim(row[cols.oci]),
                                     std::move(citing_omid),
                                     std::move(cited_omid), direction});
    }
}

std::string resolve_key(const std::set<std::string>& records) {
    std::string key;
    for (const auto& item : records) {
        if (!key.empty()) {
            key.push_back('|');
        }
        key += item;
    }
    return key;
}

}  // namespace

std::string_view citation_direction_name(CitationDirection direction) {
    switch (direction) {
        case CitationDirection::outgoing:
            return "outgoing";
        case CitationDirection::incoming:
            return "incoming";
        case CitationDirection::internal:
            return "internal";
    }
    return "outgoing";
}

OmidResolver build_omid_resolver(const std::vector<CanonicalMatch>& matches) {
    OmidResolver resolver;
    for (const auto& match : matches) {
        for (const auto& omid : match.all_omids) {
            resolver[omid].insert(match.item_id);
        }
    }
    return resolver;
}

IndexScanResult scan_index_dump(const std::filesystem::path& dump,
                                const OmidResolver& resolver,
                                const IndexColumnConfig& columns,
                                unsigned shard_count) {
    IndexScanResult result;
    auto files = list_dump_files(dump);
    if (files.empty()) {
        return result;
    }

    scan_file(files.front(), columns, resolver, result.links, result.stats,
              /*preflight=*/true);
    ++result.stats.files_scanned;

    std::vector<std::filesystem::path> rest(files.begin() + 1, files.end());
    if (!rest.empty()) {
        unsigned workers = std::max(1u, shard_count);
        std::vector<std::vector<CitationLink>> shard_links(workers);
        std::vector<IndexScanStats> shard_stats(workers);
        std::atomic<std::size_t> next{0};
        auto worker = [&](unsigned shard) {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= rest.size()) {
                    break;
                }
                try {
                    scan_file(rest[i], columns, resolver, shard_links[shard],
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
            result.stats.rows_scanned += shard_stats[w].rows_scanned;
            result.stats.malformed_rows += shard_stats[w].malformed_rows;
            result.stats.unreadable_files += shard_stats[w].unreadable_files;
            result.stats.files_scanned += shard_stats[w].files_scanned;
            result.links.insert(result.links.end(), shard_links[w].begin(),
                                shard_links[w].end());
        }
    }

    std::sort(result.links.begin(), result.links.end());
    result.links.erase(std::unique(result.links.begin(), result.links.end()),
                       result.links.end());
    return result;
}

CitationDedupResult dedup_citations(const std::vector<CitationLink>& links,
                                    const OmidResolver& resolver) {
    CitationDedupResult result;

    std::vector<CitationLink> sorted(links);
    std::sort(sorted.begin(), sorted.end());

    static const std::set<std::string> kEmpty;
    auto resolve = [&](const std::string& omid) -> const std::set<std::string>& {
        auto it = resolver.find(omid);
        return it == resolver.end() ? kEmpty : it->second;
    };

    // Per-record logical-citation keys: OMID duplicates of the same
    // counterpart publication collapse to one key.
    std::map<std::string, std::set<std::string>> outgoing_keys;
    std::map<std::string, std::set<std::string>> incoming_keys;

    std::string last_oci;
    for (const auto& link : sorted) {
        if (link.oci == last_oci) {
            continue;  // duplicate rows for one OCI count once
        }
        last_oci = link.oci;

        const auto& citing_records = resolve(link.citing_omid);
        const auto& cited_records = resolve(link.cited_omid);
        bool citing_in = !citing_records.empty();
        bool cited_in = !cited_records.empty();

        if (citing_in) {
            ++result.stats.outgoing_total;
        }
        if (cited_in) {
            ++result.stats.incoming_total;
        }
        bool internal = false;
        if (citing_in && cited_in) {
            // At least one pair of different records across the link.
            internal =
                citing_records != cited_records || citing_records.size() > 1;
        }
        if (internal) {
            ++result.stats.internal_total;
        }

        CitationDirection direction =
            internal ? CitationDirection::internal
                     : (citing_in ? CitationDirection::outgoing
                                  : CitationDirection::incoming);
        result.deduped_links.push_back(CitationLink{
            link.oci, link.citing_omid, link.cited_omid, direction});

        for (const auto& record : citing_records) {
            if (cited_in) {
                if (cited_records.size() == 1 &&
                    *cited_records.begin() == record) {
                    continue;  // self-citation via duplicate OMIDs
                }
                outgoing_keys[record].insert("r:" + resolve_key(cited_records));
            } else {
                outgoing_keys[record].insert("o:" + link.cited_omid);
            }
        }
        for (const auto& record : cited_records) {
            if (citing_in) {
                if (citing_records.size() == 1 &&
                    *citing_records.begin() == record) {
                    continue;
                }
                incoming_keys[record].insert("r:" + resolve_key(citing_records));
            } else {
                incoming_keys[record].insert("o:" + link.citing_omid);
            }
        }
    }

    for (const auto& [record, keys] : outgoing_keys) {
        result.per_record[record].outgoing = keys.size();
    }
    for (const auto& [record, keys] : incoming_keys) {
        result.per_record[record].incoming = keys.size();
    }
    return result;
}

CitationStats compute_citation_averages(CitationStats stats,
                                        std::size_t matched_record_count) {
    if (matched_record_count == 0) {
        stats.outgoing_avg.reset();
        stats.incoming_avg.reset();
        return stats;
    }
    stats.outgoing_avg = static_cast<double>(stats.outgoing_total) /
                         static_cast<double>(matched_record_count);
    stats.incoming_avg = static_cast<double>(stats.incoming_total) /
                         static_cast<double>(matched_record_count);
    return stats;
}

std::string format_average(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

}  // namespace irisoc
