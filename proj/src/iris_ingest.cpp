#include "irisoc/iris_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "irisoc/csv.hpp"

namespace irisoc {

namespace {

const std::vector<std::string> kIdentifierFields = {
    "IDE_DOI", "IDE_PMID",   "IDE_ISBN", "IDE_ISBN_1",
    "IDE_ISBN_2", "IDE_ISBN_3", "IDE_EISBN",
};

struct TableSpec {
    std::string name;
    std::vector<std::string> required_columns;
    bool mandatory;
};

const std::vector<TableSpec>& table_specs() {
    static const std::vector<TableSpec> specs = {
        {"actors", {"ITEM_ID"}, false},
        {"author_lists", {"ITEM_ID"}, false},
        {"identifiers",
         {"ITEM_ID", "IDE_DOI", "IDE_EISBN", "IDE_ISBN", "IDE_ISBN_1",
          "IDE_ISBN_2", "IDE_ISBN_3", "IDE_PMID"},
         true},
        {"language", {"ITEM_ID"}, false},
        {"master",
         {"ITEM_ID", "DATE_ISSUED_YEAR", "TITLE", "OWNING_COLLECTION",
          "OWNING_COLLECTION_DES"},
         true},
        {"publisher", {"ITEM_ID"}, false},
        {"relation", {"ITEM_ID"}, false},
    };
    return specs;
}

IrisTable load_table(const std::filesystem::path& path,
                     const TableSpec& spec) {
    IrisTable table;
    csv::CsvReader reader(path);
    if (!reader.next(table.header)) {
        throw MalformedHeader("table '" + spec.name + "' has no header row: " +
                              path.string());
    }
    for (const auto& col : spec.required_columns) {
        if (!csv::column_index(table.header, col)) {
            throw MalformedHeader("table '" + spec.name +
                                  "' is missing column " + col + ": " +
                                  path.string());
        }
    }
    auto item_col = *csv::column_index(table.header, "ITEM_ID");
    std::vector<std::string> row;
    while (reader.next(row)) {
        if (row.size() == 1 && row[0].empty()) {
            continue;  // blank line
        }
        row.resize(table.header.size());
        if (csv::trim(row[item_col]).empty()) {
            continue;  // rows without a key cannot be joined
        }
        table.rows.push_back(row);
    }
    return table;
}

std::optional<int> parse_year(std::string_view raw) {
    std::string text = csv::trim(raw);
    if (text.size() != 4) {
        return std::nullopt;
    }
    int value = 0;
    auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        return std::nullopt;
    }
    if (value < 1000 || value > 2100) {
        return std::nullopt;
    }
    return value;
}

std::optional<int> parse_int(std::string_view raw) {
    std::string text = csv::trim(raw);
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

// First-occurrence index of each key, preserving file order within a key.
std::unordered_map<std::string, std::vector<std::size_t>> index_by_item(
    const IrisTable& table) {
    std::unordered_map<std::string, std::vector<std::size_t>> out;
    if (table.rows.empty()) {
        return out;
    }
    auto col = table.column("ITEM_ID");
    if (!col) {
        return out;
    }
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        out[csv::trim(table.rows[i][*col])].push_back(i);
    }
    return out;
}

}  // namespace

std::optional<std::size_t> IrisTable::column(std::string_view name) const {
    return csv::column_index(header, name);
}

TypeMapping TypeMapping::load(const std::filesystem::path& file) {
    TypeMapping mapping;
    csv::CsvReader reader(file);
    std::vector<std::string> header;
    if (!reader.next(header)) {
        throw MalformedHeader("type mapping file has no header: " +
                              file.string());
    }
    auto raw_col = csv::column_index(header, "raw_type");
    auto miur_col = csv::column_index(header, "miur_type");
    if (!raw_col || !miur_col) {
        throw MalformedHeader(
            "type mapping file must have raw_type,miur_type columns: " +
            file.string());
    }
    std::vector<std::string> row;
    while (reader.next(row)) {
        if (row.size() <= std::max(*raw_col, *miur_col)) {
            continue;
        }
        std::string raw = csv::trim(row[*raw_col]);
        if (raw.empty()) {
            continue;
        }
        auto type = parse_miur_type(row[*miur_col]);
        if (!type) {
            throw std::runtime_error("unknown MIUR type '" + row[*miur_col] +
                                     "' in mapping file " + file.string());
        }
        mapping.add(raw, *type);
    }
    return mapping;
}

void TypeMapping::add(std::string_view raw_type, MiurType miur_type) {
    std::string key = csv::to_lower(csv::trim(raw_type));
    auto [it, inserted] = entries_.emplace(key, miur_type);
    if (!inserted) {
        throw std::runtime_error("duplicate raw type in mapping: " + key);
    }
}

std::optional<MiurType> TypeMapping::lookup(std::string_view raw_type) const {
    auto it = entries_.find(csv::to_lower(csv::trim(raw_type)));
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second;
}

IrisRawTables load_iris_tables(const std::filesystem::path& directory,
                               const TableFileConfig& format_config,
                               IngestLog* log) {
    if (!std::filesystem::is_directory(directory)) {
        throw MissingSpineTable("IRIS directory does not exist: " +
                                directory.string());
    }
    IrisRawTables tables;
    for (const auto& spec : table_specs()) {
        std::string file_name = spec.name + ".csv";
        if (auto it = format_config.find(spec.name);
            it != format_config.end()) {
            file_name = it->second;
        }
        std::filesystem::path path = directory / file_name;
        IrisTable* target = nullptr;
        if (spec.name == "actors") target = &tables.actors;
        else if (spec.name == "author_lists") target = &tables.author_lists;
        else if (spec.name == "identifiers") target = &tables.identifiers;
        else if (spec.name == "language") target = &tables.language;
        else if (spec.name == "master") target = &tables.master;
        else if (spec.name == "publisher") target = &tables.publisher;
        else target = &tables.relation;

        if (!std::filesystem::exists(path)) {
            if (spec.mandatory) {
                throw MissingSpineTable("required table '" + spec.name +
                                        "' not found at " + path.string());
            }
            if (log != nullptr) {
                log->warnings.push_back("optional table '" + spec.name +
                                        "' not found, treating as empty");
            }
            continue;
        }
        *target = load_table(path, spec);
    }
    return tables;
}

MiurType map_publication_type(std::string_view raw_collection,
                              const TypeMapping& mapping) {
    if (auto type = mapping.lookup(raw_collection)) {
        return *type;
    }
    return MiurType::other;
}

std::vector<IrisRecord> join_records(const IrisRawTables& tables,
                                     const TypeMapping& mapping,
                                     IngestLog* log) {
    auto ids_index = index_by_item(tables.identifiers);
    auto lang_index = index_by_item(tables.language);
    auto authors_index = index_by_item(tables.author_lists);

    auto master_item = tables.master.column("ITEM_ID");
    auto master_year = tables.master.column("DATE_ISSUED_YEAR");
    auto master_title = tables.master.column("TITLE");
    auto master_coll = tables.master.column("OWNING_COLLECTION_DES");

    std::map<std::string, IrisRecord> by_id;
    for (const auto& row : tables.master.rows) {
        std::string item_id = csv::trim(row[*master_item]);
        if (by_id.contains(item_id)) {
            if (log != nullptr) {
                ++log->scalar_collisions;
            }
            continue;  // first master row wins
        }
        IrisRecord record;
        record.item_id = item_id;
        record.title = master_title ? row[*master_title] : "";
        record.year = master_year ? parse_year(row[*master_year]) : std::nullopt;
        record.raw_collection = master_coll ? csv::trim(row[*master_coll]) : "";
        record.miur_type = map_publication_type(record.raw_collection, mapping);
        by_id.emplace(item_id, std::move(record));
    }

    // Identifier fields union across duplicate rows per key.
    for (auto& [item_id, record] : by_id) {
        auto it = ids_index.find(item_id);
        if (it == ids_index.end()) {
            continue;
        }
        for (std::size_t row_idx : it->second) {
            const auto& row = tables.identifiers.rows[row_idx];
            for (const auto& field : kIdentifierFields) {
                auto col = tables.identifiers.column(field);
                if (!col || *col >= row.size()) {
                    continue;
                }
                std::string value = csv::trim(row[*col]);
                if (value.empty()) {
                    continue;
                }
                auto& values = record.raw_ids[field];
                if (std::find(values.begin(), values.end(), value) ==
                    values.end()) {
                    values.push_back(value);
                }
            }
        }
        // Canonical order so the union is invariant under input row order.
        for (auto& [field, values] : record.raw_ids) {
            std::sort(values.begin(), values.end());
        }
        if (it->second.size() > 1 && log != nullptr) {
            ++log->scalar_collisions;
        }
    }

    if (!tables.language.rows.empty()) {
        auto lang_col = tables.language.column("LANGUAGE");
        if (!lang_col) {
            // Query 4 is a select *; take the first non-key column.
            for (std::size_t i = 0; i < tables.language.header.size(); ++i) {
                if (tables.language.header[i] != "ITEM_ID") {
                    lang_col = i;
                    break;
                }
            }
        }
        if (lang_col) {
            for (auto& [item_id, record] : by_id) {
                auto it = lang_index.find(item_id);
                if (it == lang_index.end()) {
                    continue;
                }
                const auto& row = tables.language.rows[it->second.front()];
                if (*lang_col < row.size() && !csv::trim(row[*lang_col]).empty()) {
                    record.language = csv::trim(row[*lang_col]);
                }
            }
        }
    }

    if (!tables.author_lists.rows.empty()) {
        auto count_col =
            tables.author_lists.column("DES_NUMBEROFAUTHORS_INT");
        if (!count_col) {
            count_col = tables.author_lists.column("DES_NUMBEROFAUTHORS");
        }
        if (count_col) {
            for (auto& [item_id, record] : by_id) {
                auto it = authors_index.find(item_id);
                if (it == authors_index.end()) {
                    continue;
                }
                const auto& row = tables.author_lists.rows[it->second.front()];
                if (*count_col < row.size()) {
                    record.author_count = parse_int(row[*count_col]);
                }
            }
        }
    }

    std::vector<IrisRecord> records;
    records.reserve(by_id.size());
    for (auto& [item_id, record] : by_id) {
        records.push_back(std::move(record));
    }
    return records;
}

YearFilterResult filter_by_year(std::vector<IrisRecord> records,
                                int cutoff_year) {
    YearFilterResult result;
    for (auto& record : records) {
        if (record.year && *record.year > cutoff_year) {
            result.excluded.push_back(std::move(record));
        } else {
            if (!record.year) {
                ++result.unknown_year;
            }
            result.kept.push_back(std::move(record));
        }
    }
    return result;
}

}  // namespace irisoc
