#pragma once

#include <set>
#include <string>
#include <vector>

#include "irisoc/meta_matcher.hpp"

namespace irisoc {

struct CanonicalMatch {
    std::string item_id;
    std::string canonical_omid;
    std::set<std::string> all_omids;  // pre-dedup OMID set for this record
    std::string pub_date;             // the canonical entity's date text

    auto operator<=>(const CanonicalMatch&) const = default;
};

// absent -> 0, year -> 1, year-month -> 2, year-month-day -> 3.
int date_granularity_rank(const std::optional<PartialDate>& date);
int date_granularity_rank(std::string_view date_text);

// Duplicate-entity resolution: keep the candidates with the most complete
// publication date, then take the first OMID in descending order.
// Lexicographic descending comparison of the full OMID text.
CanonicalMatch select_canonical_match(const std::vector<MetaMatch>& matches);

// Groups matches by item_id (deduplicating by (item_id, omid) first, the
// best-dated entry winning) and selects one canonical entity per record.
// Output sorted ascending by item_id.
std::vector<CanonicalMatch> dedup_entities(
    const std::vector<MetaMatch>& matches);

}  // namespace irisoc
