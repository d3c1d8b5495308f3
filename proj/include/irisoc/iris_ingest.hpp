#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "irisoc/miur.hpp"

namespace irisoc {

// The master or identifiers table is missing from the export directory.
struct MissingSpineTable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A present table lacks one of its required columns.
struct MalformedHeader : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IrisTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    bool empty() const { return rows.empty(); }
    std::optional<std::size_t> column(std::string_view name) const;
};

// The seven export tables. Master is the spine; the identifiers table is
// also mandatory. The rest default to empty when the file is absent.
struct IrisRawTables {
    IrisTable actors;
    IrisTable author_lists;
    IrisTable identifiers;
    IrisTable language;
    IrisTable master;
    IrisTable publisher;
    IrisTable relation;
};

struct IrisRecord {
    std::string item_id;
    std::string title;
    std::optional<int> year;
    std::string raw_collection;
    MiurType miur_type = MiurType::other;
    // Identifier-field name -> raw values, unioned across duplicate rows.
    std::map<std::string, std::vector<std::string>> raw_ids;
    std::optional<std::string> language;
    std::optional<int> author_count;
};

class TypeMapping {
public:
    // Raw types are stored case-folded and trimmed. Throws on duplicate
    // keys or on a miur_type outside the closed enumeration.
    static TypeMapping load(const std::filesystem::path& file);

    void add(std::string_view raw_type, MiurType miur_type);
    std::optional<MiurType> lookup(std::string_view raw_type) const;
    std::size_t size() const { return entries_.size(); }

private:
    std::map<std::string, MiurType> entries_;
};

// Table-name -> file-name overrides; defaults are <table>.csv.
using TableFileConfig = std::map<std::string, std::string>;

struct IngestLog {
    std::vector<std::string> warnings;
    std::size_t skipped_side_rows = 0;
    std::size_t scalar_collisions = 0;
};

IrisRawTables load_iris_tables(const std::filesystem::path& directory,
                               const TableFileConfig& format_config = {},
                               IngestLog* log = nullptr);

// One record per distinct master ITEM_ID, sorted ascending by item_id.
// Identifier fields union across duplicate side rows; scalar fields take
// the first row in file order.
std::vector<IrisRecord> join_records(const IrisRawTables& tables,
                                     const TypeMapping& mapping,
                                     IngestLog* log = nullptr);

// Total: unknown raw types fall into MiurType::other.
MiurType map_publication_type(std::string_view raw_collection,
                              const TypeMapping& mapping);

struct YearFilterResult {
    std::vector<IrisRecord> kept;
    std::vector<IrisRecord> excluded;
    std::size_t unknown_year = 0;  // kept records with no usable year
};

// Keeps records with absent year or year <= cutoff.
YearFilterResult filter_by_year(std::vector<IrisRecord> records,
                                int cutoff_year);

}  // namespace irisoc
