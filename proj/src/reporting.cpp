#include "irisoc/reporting.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "irisoc/csv.hpp"

namespace irisoc {

namespace {

std::string html_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

// Simple horizontal bar chart as inline SVG.
std::string svg_bar_chart(
    const std::vector<std::pair<std::string, std::size_t>>& bars) {
    if (bars.empty()) {
        return "<p class=\"nodata\">no data</p>";
    }
    std::size_t max_value = 0;
    for (const auto& [label, value] : bars) {
        max_value = std::max(max_value, value);
    }
    if (max_value == 0) {
        max_value = 1;
    }
    const int row_h = 22;
    const int label_w = 230;
    const int chart_w = 420;
    int height = static_cast<int>(bars.size()) * row_h + 8;
    std::ostringstream svg;
    svg << "<svg width=\"" << (label_w + chart_w + 90) << "\" height=\""
        << height << "\" role=\"img\">";
    int y = 4;
    for (const auto& [label, value] : bars) {
        int w = static_cast<int>(static_cast<double>(value) /
                                 static_cast<double>(max_value) * chart_w);
        svg << "<text x=\"" << (label_w - 6) << "\" y=\"" << (y + 14)
            << "\" text-anchor=\"end\" font-size=\"12\">"
            << html_escape(label) << "</text>";
        svg << "<rect x=\"" << label_w << "\" y=\"" << y << "\" width=\""
            << std::max(w, 1) << "\" height=\"" << (row_h - 6)
            << "\" fill=\"#4878a8\"/>";
        svg << "<text x=\"" << (label_w + std::max(w, 1) + 6) << "\" y=\""
            << (y + 14) << "\" font-size=\"12\">" << format_thousands(value)
            << "</text>";
        y += row_h;
    }
    svg << "</svg>";
    return svg.str();
}

std::vector<std::string> record_row(const IrisRecord& record) {
    return {record.item_id,
            record.year ? std::to_string(*record.year) : "",
            std::string(miur_type_name(record.miur_type)), record.title};
}

}  // namespace

std::string_view record_status_name(RecordStatus status) {
    switch (status) {
        case RecordStatus::matched:
            return "matched";
        case RecordStatus::has_pids_unmatched:
            return "has-pids-unmatched";
        case RecordStatus::no_pids:
            return "no-pids";
    }
    return "no-pids";
}

std::vector<RecordOutcome> classify_records(
    const std::vector<IrisRecord>& eligible,
    const std::vector<RecordPids>& pids,
    const std::vector<CanonicalMatch>& matches,
    const std::map<std::string, RecordCitationCounts>& citations) {
    std::unordered_set<std::string> with_retained;
    for (const auto& record : pids) {
        if (!record.retained.empty()) {
            with_retained.insert(record.item_id);
        }
    }
    std::unordered_set<std::string> matched;
    for (const auto& match : matches) {
        matched.insert(match.item_id);
    }

    std::vector<RecordOutcome> outcomes;
    outcomes.reserve(eligible.size());
    for (const auto& record : eligible) {
        RecordOutcome outcome;
        outcome.record = &record;
        if (matched.contains(record.item_id)) {
            outcome.status = RecordStatus::matched;
            auto it = citations.find(record.item_id);
            outcome.in_index = it != citations.end() &&
                               (it->second.outgoing + it->second.incoming) > 0;
        } else if (with_retained.contains(record.item_id)) {
            outcome.status = RecordStatus::has_pids_unmatched;
        } else {
            outcome.status = RecordStatus::no_pids;
        }
        outcomes.push_back(outcome);
    }
    return outcomes;
}

CoverageReport compute_coverage_tables(
    const std::vector<IrisRecord>& eligible,
    const std::vector<RecordOutcome>& outcomes,
    const CitationStats& citation_stats,
    const PidExtractionSummary& summary) {
    CoverageReport report;
    report.pid_summary = summary;
    report.citation_stats = citation_stats;
    report.eligible_records = eligible.size();

    for (const auto& record : eligible) {
        if (record.year) {
            ++report.per_year[*record.year];
        } else {
            ++report.unknown_year;
        }
    }
    for (const auto& outcome : outcomes) {
        auto& counts = report.per_type[outcome.record->miur_type];
        switch (outcome.status) {
            case RecordStatus::matched:
                ++counts.matched;
                ++report.matched_count;
                break;
            case RecordStatus::has_pids_unmatched:
                ++counts.has_pids_unmatched;
                break;
            case RecordStatus::no_pids:
                ++counts.no_pids;
                break;
        }
    }
    if (report.eligible_records > 0) {
        report.matched_pct = 100.0 * static_cast<double>(report.matched_count) /
                             static_cast<double>(report.eligible_records);
    }
    return report;
}

void emit_subsets(const std::vector<RecordOutcome>& outcomes,
                  const std::filesystem::path& out_dir) {
    std::filesystem::path subsets = out_dir / "subsets";
    std::error_code ec;
    std::filesystem::create_directories(subsets, ec);
    if (ec) {
        throw OutputUnwritable("cannot create " + subsets.string());
    }

    const std::vector<std::string> header = {"item_id", "year", "miur_type",
                                             "title"};
    auto open = [&](const char* name) {
        auto writer = std::make_unique<csv::CsvWriter>(
            subsets / (std::string(name) + ".csv"));
        writer->write_row(header);
        return writer;
    };
    auto found = open("found_in_meta");
    auto not_found = open("not_found_in_meta");
    auto in_index = open("found_in_index");
    auto no_pids = open("no_pids");

    for (const auto& outcome : outcomes) {
        auto row = record_row(*outcome.record);
        switch (outcome.status) {
            case RecordStatus::matched:
                found->write_row(row);
                if (outcome.in_index) {
                    in_index->write_row(row);
                }
                break;
            case RecordStatus::has_pids_unmatched:
                not_found->write_row(row);
                break;
            case RecordStatus::no_pids:
                no_pids->write_row(row);
                break;
        }
    }
}

std::vector<std::pair<std::string, std::size_t>> distribution_top_types(
    const std::map<MiurType, std::size_t>& counts, std::size_t n) {
    auto label_of = [](MiurType type) -> std::string {
        if (type == MiurType::other) {
            return "Other (MIUR)";
        }
        return std::string(miur_type_name(type));
    };

    std::vector<std::pair<std::string, std::size_t>> ranked;
    for (const auto& [type, count] : counts) {
        ranked.emplace_back(label_of(type), count);
    }
    // Top-n by count, ties broken alphabetically.
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) {
            return a.second > b.second;
        }
        return a.first < b.first;
    });

    std::vector<std::pair<std::string, std::size_t>> out;
    std::size_t residual = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (i < n) {
            out.push_back(ranked[i]);
        } else {
            residual += ranked[i].second;
        }
    }
    out.emplace_back("Other", residual);
    return out;
}

std::string format_thousands(std::size_t value) {
    std::string digits = std::to_string(value);
    std::string out;
    out.reserve(digits.size() + digits.size() / 3);
    std::size_t lead = digits.size() % 3;
    for (std::size_t i = 0; i < digits.size(); ++i) {
        if (i != 0 && (i - lead) % 3 == 0) {
            out.push_back(',');
        }
        out.push_back(digits[i]);
    }
    return out;
}

std::string format_percent(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", value);
    return buf;
}

void render_html_report(const CoverageReport& report,
                        const std::filesystem::path& out) {
    std::ostringstream html;
    const auto& s = report.pid_summary;

    html << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n"
         << "<meta charset=\"utf-8\">\n"
         << "<title>Coverage report</title>\n"
         << "<style>\n"
         << "body{font-family:sans-serif;margin:2em;max-width:62em}\n"
         << "h2{border-bottom:1px solid #ccc;padding-bottom:.2em}\n"
         << "table{border-collapse:collapse;margin:1em 0}\n"
         << "td,th{border:1px solid #bbb;padding:.3em .7em;text-align:left}\n"
         << "th{background:#eef2f6}\n"
         << "td.num{text-align:right}\n"
         << ".nodata{color:#888;font-style:italic}\n"
         << "</style>\n</head>\n<body>\n"
         << "<h1>OpenCitations coverage report</h1>\n";

    // Section 1: run metadata.
    html << "<section id=\"run-metadata\">\n<h2>Run metadata</h2>\n";
    if (report.run_metadata.empty()) {
        html << "<p class=\"nodata\">no data</p>\n";
    } else {
        html << "<table>\n";
        for (const auto& [key, value] : report.run_metadata) {
            html << "<tr><th>" << html_escape(key) << "</th><td>"
                 << html_escape(value) << "</td></tr>\n";
        }
        html << "</table>\n";
    }
    html << "</section>\n";

    // Section 2: PID extraction summary.
    html << "<section id=\"pid-summary\">\n<h2>PID extraction and "
            "validation</h2>\n<table>\n";
    auto summary_row = [&](const char* label, std::size_t value) {
        html << "<tr><th>" << label << "</th><td class=\"num\">"
             << format_thousands(value) << "</td></tr>\n";
    };
    summary_row("Total records", s.total_records);
    summary_row("Records with PIDs", s.records_with_pids);
    summary_row("Total PIDs extracted", s.total_pids_extracted);
    html << "<tr><th>PID by type (DOI / PMID / ISBN)</th><td class=\"num\">"
         << format_thousands(s.raw_doi) << " / " << format_thousands(s.raw_pmid)
         << " / " << format_thousands(s.raw_isbn) << "</td></tr>\n";
    html << "<tr><th>Valid PIDs (DOI / PMID / ISBN)</th><td class=\"num\">"
         << format_thousands(s.valid_doi) << " / "
         << format_thousands(s.valid_pmid) << " / "
         << format_thousands(s.valid_isbn) << "</td></tr>\n";
    summary_row("Misassigned ISBNs", s.misassigned_isbns);
    summary_row("Final PID list size", s.final_pid_list_size);
    html << "</table>\n";
    if (!s.rejections.by_reason.empty()) {
        html << "<h3>Rejected identifiers by reason</h3>\n<table>\n";
        for (const auto& [reason, count] : s.rejections.by_reason) {
            html << "<tr><th>" << pid_reject_name(reason)
                 << "</th><td class=\"num\">" << format_thousands(count)
                 << "</td></tr>\n";
        }
        html << "</table>\n";
    }
    html << "</section>\n";

    // Section 3: coverage.
    html << "<section id=\"coverage\">\n<h2>Coverage in OpenCitations "
            "Meta</h2>\n";
    html << "<table>\n";
    summary_row("Eligible records", report.eligible_records);
    summary_row("Matched records", report.matched_count);
    html << "<tr><th>Coverage</th><td class=\"num\">"
         << (report.matched_pct ? format_percent(*report.matched_pct) + "%"
                                : std::string("n/a"))
         << "</td></tr>\n</table>\n</section>\n";

    // Section 4: citations.
    html << "<section id=\"citations\">\n<h2>Citations in OpenCitations "
            "Index</h2>\n<table>\n";
    const auto& c = report.citation_stats;
    html << "<tr><th>Records as citing entity</th><td class=\"num\">"
         << format_thousands(c.outgoing_total)
         << (c.outgoing_avg
                 ? " (" + format_average(*c.outgoing_avg) + ")"
                 : "")
         << "</td></tr>\n";
    html << "<tr><th>Records as cited entity</th><td class=\"num\">"
         << format_thousands(c.incoming_total)
         << (c.incoming_avg
                 ? " (" + format_average(*c.incoming_avg) + ")"
                 : "")
         << "</td></tr>\n";
    html << "<tr><th>Citations between records</th><td class=\"num\">"
         << format_thousands(c.internal_total) << "</td></tr>\n";
    html << "</table>\n</section>\n";

    // Section 5: per-year distribution.
    html << "<section id=\"per-year\">\n<h2>Publications per year</h2>\n";
    {
        std::vector<std::pair<std::string, std::size_t>> bars;
        for (const auto& [year, count] : report.per_year) {
            bars.emplace_back(std::to_string(year), count);
        }
        if (report.unknown_year > 0) {
            bars.emplace_back("unknown", report.unknown_year);
        }
        html << svg_bar_chart(bars) << "\n";
    }
    html << "</section>\n";

    // Section 6: uncovered records per type.
    html << "<section id=\"per-type\">\n"
         << "<h2>Uncovered records by publication type</h2>\n";
    {
        std::map<MiurType, std::size_t> unmatched_with_pids;
        std::map<MiurType, std::size_t> without_pids;
        for (const auto& [type, counts] : report.per_type) {
            if (counts.has_pids_unmatched > 0) {
                unmatched_with_pids[type] = counts.has_pids_unmatched;
            }
            if (counts.no_pids > 0) {
                without_pids[type] = counts.no_pids;
            }
        }
        html << "<h3>With PIDs, not found in OpenCitations Meta</h3>\n"
             << svg_bar_chart(distribution_top_types(unmatched_with_pids))
             << "\n<h3>Without persistent identifiers</h3>\n"
             << svg_bar_chart(distribution_top_types(without_pids)) << "\n";
    }
    html << "</section>\n</body>\n</html>\n";

    std::ofstream file(out, std::ios::binary);
    if (!file) {
        throw OutputUnwritable("cannot write " + out.string());
    }
    file << html.str();
}

}  // namespace irisoc
