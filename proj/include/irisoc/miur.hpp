#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irisoc {

// Closed nationwide publication-type taxonomy used to align categories
// across institutions. `other` is the residual bucket for local types
// with no counterpart (theses and similar).
enum class MiurType {
    journal_article,
    journal_contribution,
    review_essay,
    abstract_in_journal,
    book_chapter,
    entry,
    preface_postface,
    book_review,
    proceedings_paper,
    proceedings_abstract,
    poster,
    monograph_or_scientific_treatise,
    concordance,
    critical_edition,
    publication_of_unpublished_sources,
    scientific_commentary,
    book_translation,
    editorship,
    database,
    software,
    patent,
    cartography,
    artwork,
    composition,
    design,
    exhibition,
    performance,
    other,
};

std::string_view miur_type_name(MiurType type);

// Case-folded, trimmed lookup against the closed list.
std::optional<MiurType> parse_miur_type(std::string_view name);

const std::vector<MiurType>& all_miur_types();

// The book-like categories compatible with ISBN assignment.
bool isbn_compatible(MiurType type);

}  // namespace irisoc
