#include "irisoc/miur.hpp"

#include <array>
#include <utility>

#include "irisoc/csv.hpp"

namespace irisoc {

namespace {

constexpr std::array<std::pair<MiurType, std::string_view>, 28> kNames{{
    {MiurType::journal_article, "journal article"},
    {MiurType::journal_contribution, "journal contribution"},
    {MiurType::review_essay, "review essay"},
    {MiurType::abstract_in_journal, "abstract in journal"},
    {MiurType::book_chapter, "book chapter"},
    {MiurType::entry, "entry"},
    {MiurType::preface_postface, "preface/postface"},
    {MiurType::book_review, "book review"},
    {MiurType::proceedings_paper, "proceedings paper"},
    {MiurType::proceedings_abstract, "proceedings abstract"},
    {MiurType::poster, "poster"},
    {MiurType::monograph_or_scientific_treatise,
     "monograph or scientific treatise"},
    {MiurType::concordance, "concordance"},
    {MiurType::critical_edition, "critical edition"},
    {MiurType::publication_of_unpublished_sources,
     "publication of unpublished sources"},
    {MiurType::scientific_commentary, "scientific commentary"},
    {MiurType::book_translation, "book translation"},
    {MiurType::editorship, "editorship"},
    {MiurType::database, "database"},
    {MiurType::software, "software"},
    {MiurType::patent, "patent"},
    {MiurType::cartography, "cartography"},
    {MiurType::artwork, "artwork"},
    {MiurType::composition, "composition"},
    {MiurType::design, "design"},
    {MiurType::exhibition, "exhibition"},
    {MiurType::performance, "performance"},
    {MiurType::other, "other"},
}};

}  // namespace

std::string_view miur_type_name(MiurType type) {
    for (const auto& [value, name] : kNames) {
        if (value == type) {
            return name;
        }
    }
    return "other";
}

std::optional<MiurType> parse_miur_type(std::string_view name) {
    std::string folded = csv::to_lower(csv::trim(name));
    for (const auto& [value, canonical] : kNames) {
        if (folded == canonical) {
            return value;
        }
    }
    return std::nullopt;
}

const std::vector<MiurType>& all_miur_types() {
    static const std::vector<MiurType> types = [] {
        std::vector<MiurType> out;
        out.reserve(kNames.size());
        for (const auto& [value, name] : kNames) {
            out.push_back(value);
        }
        return out;
    }();
    return types;
}

bool isbn_compatible(MiurType type) {
    switch (type) {
        case MiurType::monograph_or_scientific_treatise:
        case MiurType::concordance:
        case MiurType::critical_edition:
        case MiurType::publication_of_unpublished_sources:
        case MiurType::scientific_commentary:
        case MiurType::book_translation:
        case MiurType::editorship:
            return true;
        default:
            return false;
    }
}

}  // namespace irisoc
