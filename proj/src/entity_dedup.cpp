#include "irisoc/entity_dedup.hpp"

#include <algorithm>
#include <cassert>
#include <map>

namespace irisoc {

int date_granularity_rank(const std::optional<PartialDate>& date) {
    if (!date) {
        return 0;
    }
    if (date->day) {
        return 3;
    }
    if (date->month) {
        return 2;
    }
    return 1;
}

int date_granularity_rank(std::string_view date_text) {
    return date_granularity_rank(parse_partial_date(date_text));
}

namespace {

// Best entry per (item_id, omid): higher granularity wins, ties broken
// by date text so the result is input-order independent.
std::map<std::pair<std::string, std::string>, MetaMatch> best_per_omid(
    const std::vector<MetaMatch>& matches) {
    std::map<std::pair<std::string, std::string>, MetaMatch> best;
    for (const auto& match : matches) {
        auto key = std::make_pair(match.item_id, match.omid);
        auto it = best.find(key);
        if (it == best.end()) {
            best.emplace(key, match);
            continue;
        }
        int have = date_granularity_rank(it->second.pub_date);
        int got = date_granularity_rank(match.pub_date);
        if (got > have ||
            (got == have && match.pub_date > it->second.pub_date)) {
            it->second = match;
        }
    }
    return best;
}

CanonicalMatch select_from_deduped(const std::vector<MetaMatch>& candidates) {
    assert(!candidates.empty());
    CanonicalMatch out;
    out.item_id = candidates.front().item_id;

    int best_rank = 0;
    for (const auto& match : candidates) {
        out.all_omids.insert(match.omid);
        best_rank = std::max(best_rank, date_granularity_rank(match.pub_date));
    }
    const MetaMatch* winner = nullptr;
    for (const auto& match : candidates) {
        if (date_granularity_rank(match.pub_date) != best_rank) {
            continue;
        }
        if (winner == nullptr || match.omid > winner->omid) {
            winner = &match;
        }
    }
    out.canonical_omid = winner->omid;
    out.pub_date = winner->pub_date;
    return out;
}

}  // namespace

CanonicalMatch select_canonical_match(const std::vector<MetaMatch>& matches) {
    assert(!matches.empty());
    auto best = best_per_omid(matches);
    std::vector<MetaMatch> candidates;
    candidates.reserve(best.size());
    for (auto& [key, match] : best) {
        candidates.push_back(std::move(match));
    }
    return select_from_deduped(candidates);
}

std::vector<CanonicalMatch> dedup_entities(
    const std::vector<MetaMatch>& matches) {
    auto best = best_per_omid(matches);

    std::vector<CanonicalMatch> out;
    std::vector<MetaMatch> group;
    auto flush = [&] {
        if (!group.empty()) {
            out.push_back(select_from_deduped(group));
            group.clear();
        }
    };
    for (auto& [key, match] : best) {
        if (!group.empty() && group.front().item_id != match.item_id) {
            flush();
        }
        group.push_back(std::move(match));
    }
    flush();
    return out;
}

}  // namespace irisoc
