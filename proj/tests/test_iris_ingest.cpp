#include <doctest.h>

#include "irisoc/iris_ingest.hpp"
#include "support/testutil.hpp"

using namespace irisoc;

namespace {

TypeMapping make_mapping() {
    TypeMapping mapping;
    mapping.add("Articolo in rivista", MiurType::journal_article);
    mapping.add("Monografia", MiurType::monograph_or_scientific_treatise);
    mapping.add("Contributo in atti di convegno",
                MiurType::proceedings_paper);
    return mapping;
}

}  // namespace

TEST_CASE("loading a full directory yields seven tables") {
    test::TempDir dir("ingest");
    test::write_minimal_iris_dir(
        dir.path(),
        {{"A", "2020", "Title A", "coll", "Articolo in rivista"}},
        {{"A", "10.1/x", "", "", "", "", "", ""}});
    IngestLog log;
    auto tables = load_iris_tables(dir.path(), {}, &log);
    CHECK(tables.master.rows.size() == 1);
    CHECK(tables.identifiers.rows.size() == 1);
    CHECK(log.warnings.empty());
}

TEST_CASE("missing optional table becomes empty with a warning") {
    test::TempDir dir("ingest");
    test::write_minimal_iris_dir(
        dir.path(), {{"A", "2020", "T", "c", "x"}}, {});
    std::filesystem::remove(dir / "language.csv");
    IngestLog log;
    auto tables = load_iris_tables(dir.path(), {}, &log);
    CHECK(tables.language.rows.empty());
    REQUIRE(log.warnings.size() == 1);
    CHECK(log.warnings[0].find("language") != std::string::npos);
}

TEST_CASE("missing master table is fatal") {
    test::TempDir dir("ingest");
    test::write_minimal_iris_dir(dir.path(), {}, {});
    std::filesystem::remove(dir / "master.csv");
    CHECK_THROWS_AS(load_iris_tables(dir.path()), MissingSpineTable);
}

TEST_CASE("missing identifiers table is fatal") {
    test::TempDir dir("ingest");
    test::write_minimal_iris_dir(dir.path(), {}, {});
    std::filesystem::remove(dir / "identifiers.csv");
    CHECK_THROWS_AS(load_iris_tables(dir.path()), MissingSpineTable);
}

TEST_CASE("present table with missing column is a malformed header") {
    test::TempDir dir("ingest");
    test::write_minimal_iris_dir(dir.path(), {}, {});
    test::write_csv(dir / "identifiers.csv", {{"ITEM_ID", "IDE_DOI"}});
    CHECK_THROWS_AS(load_iris_tables(dir.path()), MalformedHeader);
}

TEST_CASE("file name overrides are honoured") {
    test::TempDir dir("ingest");
    test::write_minimal_iris_dir(dir.path(), {{"A", "", "", "", ""}}, {});
    std::filesystem::rename(dir / "master.csv", dir / "query5.csv");
    auto tables =
        load_iris_tables(dir.path(), {{"master", "query5.csv"}});
    CHECK(tables.master.rows.size() == 1);
}

TEST_CASE("join keeps master as spine with outer-join semantics") {
    test::TempDir dir("ingest");
    test::write_minimal_iris_dir(
        dir.path(),
        {{"A", "2019", "Title A", "c", "Articolo in rivista"},
         {"B", "2021", "Title B", "c", "Monografia"}},
        {{"A", "10.1/x", "", "", "", "", "", ""},
         {"C", "10.9/ghost", "", "", "", "", "", ""}});
    auto records = join_records(load_iris_tables(dir.path()), make_mapping());
    REQUIRE(records.size() == 2);
    CHECK(records[0].item_id == "A");
    CHECK(records[0].raw_ids.at("IDE_DOI") ==
          std::vector<std::string>{"10.1/x"});
    CHECK(records[1].item_id == "B");
    CHECK(records[1].raw_ids.empty());
}

TEST_CASE("duplicate identifier rows union their values") {
    test::TempDir dir("ingest");
    test::write_minimal_iris_dir(
        dir.path(), {{"A", "2019", "T", "c", "x"}},
        {{"A", "10.1/x", "", "", "", "", "", ""},
         {"A", "10.2/y", "", "", "", "", "", "123"},
         {"A", "10.1/x", "", "", "", "", "", ""}});
    auto records = join_records(load_iris_tables(dir.path()), make_mapping());
    REQUIRE(records.size() == 1);
    CHECK(records[0].raw_ids.at("IDE_DOI") ==
          std::vector<std::string>{"10.1/x", "10.2/y"});
    CHECK(records[0].raw_ids.at("IDE_PMID") ==
          std::vector<std::string>{"123"});
}

TEST_CASE("record count equals distinct master ITEM_IDs") {
    test::TempDir dir("ingest");
    std::vector<std::vector<std::string>> master_rows;
    for (int i = 0; i < 50; ++i) {
        master_rows.push_back({"R" + std::to_string(i % 40), "2000", "t", "c",
                               "Articolo in rivista"});
    }
    test::write_minimal_iris_dir(dir.path(), master_rows, {});
    auto records = join_records(load_iris_tables(dir.path()), make_mapping());
    CHECK(records.size() == 40);
}

TEST_CASE("publication type mapping") {
    auto mapping = make_mapping();
    CHECK(map_publication_type("Articolo in rivista", mapping) ==
          MiurType::journal_article);
    // Case folding and trimming.
    CHECK(map_publication_type("  ARTICOLO IN RIVISTA ", mapping) ==
          MiurType::journal_article);
    CHECK(map_publication_type("PhD thesis", mapping) == MiurType::other);
    CHECK(map_publication_type("", mapping) == MiurType::other);
}

TEST_CASE("mapping file rejects unknown MIUR categories and duplicates") {
    test::TempDir dir("ingest");
    test::write_csv(dir / "bad.csv", {{"raw_type", "miur_type"},
                                      {"Tesi", "doctoral thesis"}});
    CHECK_THROWS(TypeMapping::load(dir / "bad.csv"));
    test::write_csv(dir / "dup.csv",
                    {{"raw_type", "miur_type"},
                     {"Articolo in rivista", "journal article"},
                     {"ARTICOLO IN RIVISTA ", "journal article"}});
    CHECK_THROWS(TypeMapping::load(dir / "dup.csv"));
    test::write_csv(dir / "ok.csv", {{"raw_type", "miur_type"},
                                     {"Monografia", "Monograph or "
                                                    "Scientific Treatise"}});
    auto mapping = TypeMapping::load(dir / "ok.csv");
    CHECK(mapping.lookup("monografia") ==
          MiurType::monograph_or_scientific_treatise);
}

TEST_CASE("year filter keeps absent years and splits exactly") {
    std::vector<IrisRecord> records(5);
    records[0].item_id = "A";
    records[0].year = 2024;
    records[1].item_id = "B";
    records[1].year = 2025;
    records[2].item_id = "C";  // absent year
    records[3].item_id = "D";
    records[3].year = 1999;
    records[4].item_id = "E";
    records[4].year = 2026;

    auto result = filter_by_year(records, 2024);
    CHECK(result.kept.size() == 3);
    CHECK(result.excluded.size() == 2);
    CHECK(result.unknown_year == 1);
    CHECK(result.kept.size() + result.excluded.size() == records.size());
}

TEST_CASE("malformed years parse as absent") {
    test::TempDir dir("ingest");
    test::write_minimal_iris_dir(dir.path(),
                                 {{"A", "20xx", "T", "c", "x"},
                                  {"B", "999", "T", "c", "x"},
                                  {"C", "2101", "T", "c", "x"}},
                                 {});
    auto records = join_records(load_iris_tables(dir.path()), make_mapping());
    for (const auto& record : records) {
        CHECK_FALSE(record.year.has_value());
    }
}

TEST_CASE("load+join is deterministic across runs") {
    test::TempDir dir("ingest");
    test::write_minimal_iris_dir(
        dir.path(),
        {{"B", "2020", "T2", "c", "Monografia"},
         {"A", "2019", "T1", "c", "Articolo in rivista"}},
        {{"B", "10.2/y", "", "", "", "", "", ""},
         {"A", "10.1/x", "", "", "", "", "", ""}});
    auto first = join_records(load_iris_tables(dir.path()), make_mapping());
    auto second = join_records(load_iris_tables(dir.path()), make_mapping());
    REQUIRE(first.size() == second.size());
    CHECK(first[0].item_id == "A");  // canonical ascending order
    for (std::size_t i = 0; i < first.size(); ++i) {
        CHECK(first[i].item_id == second[i].item_id);
        CHECK(first[i].raw_ids == second[i].raw_ids);
    }
}
