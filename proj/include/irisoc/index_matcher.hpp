#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "irisoc/entity_dedup.hpp"

namespace irisoc {

enum class CitationDirection { outgoing, incoming, internal };

std::string_view citation_direction_name(CitationDirection direction);

struct CitationLink {
    std::string oci;
    std::string citing_omid;  // "omid:br/..." form
    std::string cited_omid;
    CitationDirection direction = CitationDirection::outgoing;

    auto operator<=>(const CitationLink&) const = default;
};

struct IndexColumnConfig {
    std::string oci = "oci";
    std::string citing = "citing";
    std::string cited = "cited";
};

struct IndexScanStats {
    std::size_t rows_scanned = 0;
    std::size_t malformed_rows = 0;
    std::size_t unreadable_files = 0;
    std::size_t files_scanned = 0;
};

struct IndexScanResult {
    std::vector<CitationLink> links;  // canonically sorted
    IndexScanStats stats;
};

// OMID -> item_ids of the institution records it was matched to. Built
// from the pre-dedup all_omids of every canonical match; one OMID can
// resolve to several records through a shared identifier.
using OmidResolver = std::unordered_map<std::string, std::set<std::string>>;

OmidResolver build_omid_resolver(const std::vector<CanonicalMatch>& matches);

// One pass over the citation dump; rows whose citing or cited OMID is in
// the resolver yield a link. Direction is internal only when the two
// sides resolve to at least two different records.
IndexScanResult scan_index_dump(const std::filesystem::path& dump,
                                const OmidResolver& resolver,
                                const IndexColumnConfig& columns = {},
                                unsigned shard_count = 1);

struct CitationStats {
    std::size_t outgoing_total = 0;  // distinct OCIs, internal included
    std::size_t incoming_total = 0;
    std::size_t internal_total = 0;
    std::optional<double> outgoing_avg;
    std::optional<double> incoming_avg;
};

struct RecordCitationCounts {
    std::size_t outgoing = 0;  // logical citations, OMID duplicates collapsed
    std::size_t incoming = 0;
};

struct CitationDedupResult {
    CitationStats stats;
    std::map<std::string, RecordCitationCounts> per_record;
    // One row per distinct OCI with its direction classification.
    std::vector<CitationLink> deduped_links;
};

CitationDedupResult dedup_citations(const std::vector<CitationLink>& links,
                                    const OmidResolver& resolver);

// Averages over the matched-record count; absent when the count is zero.
CitationStats compute_citation_averages(CitationStats stats,
                                        std::size_t matched_record_count);

// Fixed-point rendering used everywhere averages are reported.
std::string format_average(double value);

}  // namespace irisoc
