#include "irisoc/pid.hpp"

#include <algorithm>
#include <cctype>

#include "irisoc/csv.hpp"

namespace irisoc {

namespace {

bool starts_with_ci(std::string_view text, std::string_view prefix) {
    if (text.size() < prefix.size()) {
        return false;
    }
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(text[i])) !=
            std::tolower(static_cast<unsigned char>(prefix[i]))) {
            return false;
        }
    }
    return true;
}

std::string_view strip_prefix_ci(std::string_view text,
                                 std::string_view prefix) {
    if (starts_with_ci(text, prefix)) {
        return text.substr(prefix.size());
    }
    return text;
}

bool all_digits(std::string_view text) {
    return !text.empty() &&
           std::all_of(text.begin(), text.end(), [](unsigned char c) {
               return std::isdigit(c) != 0;
           });
}

int isbn13_check_digit(std::string_view first12) {
    int sum = 0;
    for (std::size_t i = 0; i < 12; ++i) {
        int digit = first12[i] - '0';
        sum += (i % 2 == 0) ? digit : 3 * digit;
    }
    return (10 - sum % 10) % 10;
}

bool isbn10_checksum_ok(std::string_view isbn) {
    int sum = 0;
    for (std::size_t i = 0; i < 10; ++i) {
        char c = isbn[i];
        int digit;
        if (c == 'X' && i == 9) {
            digit = 10;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digit = c - '0';
        } else {
            return false;
        }
        sum += static_cast<int>(10 - i) * digit;
    }
    return sum % 11 == 0;
}

}  // namespace

std::string_view pid_scheme_name(PidScheme scheme) {
    switch (scheme) {
        case PidScheme::doi:
            return "doi";
        case PidScheme::pmid:
            return "pmid";
        case PidScheme::isbn:
            return "isbn";
    }
    return "doi";
}

std::optional<PidScheme> parse_pid_scheme(std::string_view name) {
    if (name == "doi") return PidScheme::doi;
    if (name == "pmid") return PidScheme::pmid;
    if (name == "isbn") return PidScheme::isbn;
    return std::nullopt;
}

std::string Pid::to_string() const {
    std::string out(pid_scheme_name(scheme));
    out.push_back(':');
    out += value;
    return out;
}

std::string_view pid_reject_name(PidReject reason) {
    switch (reason) {
        case PidReject::empty:
            return "empty";
        case PidReject::no_doi_pattern:
            return "no-doi-pattern";
        case PidReject::non_numeric:
            return "non-numeric";
        case PidReject::out_of_range:
            return "out-of-range";
        case PidReject::bad_length:
            return "bad-length";
        case PidReject::bad_checksum:
            return "bad-checksum";
    }
    return "empty";
}

PidResult<Pid> normalize_doi(std::string_view raw) {
    std::string text = csv::trim(raw);
    if (text.empty()) {
        return {std::nullopt, PidReject::empty};
    }
    std::string_view rest = text;
    for (std::string_view prefix :
         {"https://doi.org/", "http://doi.org/", "https://dx.doi.org/",
          "http://dx.doi.org/", "doi.org/", "doi:"}) {
        std::string_view stripped = strip_prefix_ci(rest, prefix);
        if (stripped.size() != rest.size()) {
            rest = stripped;
            break;
        }
    }
    std::string value = csv::to_lower(csv::trim(rest));
    if (value.empty()) {
        return {std::nullopt, PidReject::empty};
    }
    // 10.<registrant>/<suffix>; registrant is digits and dots.
    if (!value.starts_with("10.")) {
        return {std::nullopt, PidReject::no_doi_pattern};
    }
    std::size_t slash = value.find('/');
    if (slash == std::string::npos || slash + 1 >= value.size()) {
        return {std::nullopt, PidReject::no_doi_pattern};
    }
    std::string_view registrant =
        std::string_view(value).substr(3, slash - 3);
    if (registrant.empty() ||
        !std::all_of(registrant.begin(), registrant.end(),
                     [](unsigned char c) {
                         return std::isdigit(c) != 0 || c == '.';
                     })) {
        return {std::nullopt, PidReject::no_doi_pattern};
    }
    return {Pid{PidScheme::doi, std::move(value)}, PidReject::empty};
}

PidResult<Pid> normalize_pmid(std::string_view raw) {
    std::string text = csv::trim(raw);
    if (text.empty()) {
        return {std::nullopt, PidReject::empty};
    }
    std::string value = csv::trim(strip_prefix_ci(text, "pmid:"));
    if (value.empty()) {
        return {std::nullopt, PidReject::empty};
    }
    std::size_t first_nonzero = value.find_first_not_of('0');
    if (first_nonzero == std::string::npos) {
        // All zeros: numeric but below 1.
        return {std::nullopt, PidReject::out_of_range};
    }
    value = value.substr(first_nonzero);
    if (!all_digits(value)) {
        return {std::nullopt, PidReject::non_numeric};
    }
    if (value.size() > 8) {
        return {std::nullopt, PidReject::out_of_range};
    }
    return {Pid{PidScheme::pmid, std::move(value)}, PidReject::empty};
}

PidResult<Pid> normalize_isbn(std::string_view raw) {
    std::string text = csv::trim(raw);
    if (text.empty()) {
        return {std::nullopt, PidReject::empty};
    }
    std::string value;
    value.reserve(text.size());
    for (char c : text) {
        if (c == '-' || c == ' ') {
            continue;
        }
        value.push_back(c);
    }
    if (!value.empty() && (value.back() == 'x' || value.back() == 'X')) {
        value.back() = 'X';
    }
    if (value.size() == 10) {
        if (!isbn10_checksum_ok(value)) {
            return {std::nullopt, PidReject::bad_checksum};
        }
        return {Pid{PidScheme::isbn, std::move(value)}, PidReject::empty};
    }
    if (value.size() == 13) {
        if (!all_digits(value) ||
            (!value.starts_with("978") && !value.starts_with("979"))) {
            return {std::nullopt, PidReject::bad_checksum};
        }
        if (isbn13_check_digit(std::string_view(value).substr(0, 12)) !=
            value[12] - '0') {
            return {std::nullopt, PidReject::bad_checksum};
        }
        return {Pid{PidScheme::isbn, std::move(value)}, PidReject::empty};
    }
    return {std::nullopt, PidReject::bad_length};
}

std::string isbn10_to_isbn13(std::string_view isbn10) {
    std::string out = "978";
    out += isbn10.substr(0, 9);
    out.push_back(static_cast<char>('0' + isbn13_check_digit(out)));
    return out;
}

void RejectionCounts::merge(const RejectionCounts& other) {
    for (const auto& [reason, count] : other.by_reason) {
        by_reason[reason] += count;
    }
}

std::size_t RejectionCounts::total() const {
    std::size_t sum = 0;
    for (const auto& [reason, count] : by_reason) {
        sum += count;
    }
    return sum;
}

RecordPids extract_record_pids(const IrisRecord& record) {
    RecordPids out;
    out.item_id = record.item_id;
    out.miur_type = record.miur_type;

    auto handle = [&](const std::string& field, PidScheme scheme) {
        auto it = record.raw_ids.find(field);
        if (it == record.raw_ids.end()) {
            return;
        }
        for (const auto& raw : it->second) {
            PidResult<Pid> result;
            switch (scheme) {
                case PidScheme::doi:
                    ++out.raw_doi;
                    result = normalize_doi(raw);
                    break;
                case PidScheme::pmid:
                    ++out.raw_pmid;
                    result = normalize_pmid(raw);
                    break;
                case PidScheme::isbn:
                    ++out.raw_isbn;
                    result = normalize_isbn(raw);
                    break;
            }
            if (result.ok()) {
                out.valid.insert(*result.pid);
            } else {
                out.rejections.add(result.reason);
            }
        }
    };

    handle("IDE_DOI", PidScheme::doi);
    handle("IDE_PMID", PidScheme::pmid);
    handle("IDE_ISBN", PidScheme::isbn);
    handle("IDE_ISBN_1", PidScheme::isbn);
    handle("IDE_ISBN_2", PidScheme::isbn);
    handle("IDE_ISBN_3", PidScheme::isbn);
    handle("IDE_EISBN", PidScheme::isbn);
    return out;
}

IsbnFilterResult apply_isbn_type_filter(const std::set<Pid>& pids,
                                        MiurType miur_type) {
    IsbnFilterResult result;
    bool keep_isbns = isbn_compatible(miur_type);
    for (const auto& pid : pids) {
        if (pid.scheme == PidScheme::isbn && !keep_isbns) {
            ++result.misassigned_isbns;
        } else {
            result.retained.insert(pid);
        }
    }
    return result;
}

RecordPids process_record_pids(const IrisRecord& record) {
    RecordPids out = extract_record_pids(record);
    auto filtered = apply_isbn_type_filter(out.valid, out.miur_type);
    out.retained = std::move(filtered.retained);
    out.misassigned_isbns = filtered.misassigned_isbns;
    return out;
}

void PidIndex::add(const Pid& pid, const std::string& item_id, bool alias) {
    bool inserted = forward_[pid].insert(item_id).second;
    reverse_[item_id].insert(pid);
    if (inserted && !alias) {
        ++association_count_;
    }
}

const std::set<std::string>* PidIndex::lookup(const Pid& pid) const {
    auto it = forward_.find(pid);
    return it == forward_.end() ? nullptr : &it->second;
}

const std::set<Pid>* PidIndex::pids_of(const std::string& item_id) const {
    auto it = reverse_.find(item_id);
    return it == reverse_.end() ? nullptr : &it->second;
}

PidIndexResult build_pid_index(const std::vector<RecordPids>& records) {
    PidIndexResult result;
    auto& summary = result.summary;
    for (const auto& record : records) {
        ++summary.total_records;
        std::size_t raw_total =
            record.raw_doi + record.raw_pmid + record.raw_isbn;
        if (raw_total > 0) {
            ++summary.records_with_pids;
        }
        summary.total_pids_extracted += raw_total;
        summary.raw_doi += record.raw_doi;
        summary.raw_pmid += record.raw_pmid;
        summary.raw_isbn += record.raw_isbn;
        summary.misassigned_isbns += record.misassigned_isbns;
        summary.rejections.merge(record.rejections);
        for (const auto& pid : record.valid) {
            switch (pid.scheme) {
                case PidScheme::doi:
                    ++summary.valid_doi;
                    break;
                case PidScheme::pmid:
                    ++summary.valid_pmid;
                    break;
                case PidScheme::isbn:
                    ++summary.valid_isbn;
                    break;
            }
        }
        for (const auto& pid : record.retained) {
            result.index.add(pid, record.item_id);
            if (pid.scheme == PidScheme::isbn && pid.value.size() == 10) {
                result.index.add(
                    Pid{PidScheme::isbn, isbn10_to_isbn13(pid.value)},
                    record.item_id, /*alias=*/true);
            }
        }
    }
    summary.final_pid_list_size = summary.valid_doi + summary.valid_pmid +
                                  summary.valid_isbn -
                                  summary.misassigned_isbns;
    return result;
}

}  // namespace irisoc
