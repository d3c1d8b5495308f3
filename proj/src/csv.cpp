#include "irisoc/csv.hpp"

#include <zlib.h>

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace irisoc::csv {

namespace {

class FileSource final : public ByteSource {
public:
    explicit FileSource(const std::filesystem::path& path)
        : in_(path, std::ios::binary) {
        if (!in_) {
            throw std::runtime_error("cannot open file: " + path.string());
        }
    }

    std::size_t read(char* buf, std::size_t n) override {
        in_.read(buf, static_cast<std::streamsize>(n));
        return static_cast<std::size_t>(in_.gcount());
    }

private:
    std::ifstream in_;
};

class GzipSource final : public ByteSource {
public:
    explicit GzipSource(const std::filesystem::path& path)
        : file_(gzopen(path.string().c_str(), "rb")) {
        if (file_ == nullptr) {
            throw std::runtime_error("cannot open gzip file: " + path.string());
        }
        gzbuffer(file_, 256 * 1024);
    }

    ~GzipSource() override {
        if (file_ != nullptr) {
            gzclose(file_);
        }
    }

    std::size_t read(char* buf, std::size_t n) override {
        int got = gzread(file_, buf, static_cast<unsigned>(n));
        if (got < 0) {
            throw std::runtime_error("gzip read error");
        }
        return static_cast<std::size_t>(got);
    }

private:
    gzFile file_;
};

}  // namespace

std::unique_ptr<ByteSource> open_file_source(const std::filesystem::path& path) {
    return std::make_unique<FileSource>(path);
}

std::unique_ptr<ByteSource> open_gzip_source(const std::filesystem::path& path) {
    return std::make_unique<GzipSource>(path);
}

std::unique_ptr<ByteSource> open_source(const std::filesystem::path& path) {
    if (path.extension() == ".gz") {
        return open_gzip_source(path);
    }
    return open_file_source(path);
}

CsvReader::CsvReader(std::unique_ptr<ByteSource> source)
    : source_(std::move(source)), buf_(64 * 1024) {}

CsvReader::CsvReader(const std::filesystem::path& path)
    : CsvReader(open_source(path)) {}

int CsvReader::get() {
    if (pos_ >= len_) {
        len_ = source_->read(buf_.data(), buf_.size());
        pos_ = 0;
        if (len_ == 0) {
            return -1;
        }
    }
    return static_cast<unsigned char>(buf_[pos_++]);
}

int CsvReader::peek() {
    if (pos_ >= len_) {
        len_ = source_->read(buf_.data(), buf_.size());
        pos_ = 0;
        if (len_ == 0) {
            return -1;
        }
    }
    return static_cast<unsigned char>(buf_[pos_]);
}

bool CsvReader::next(std::vector<std::string>& row) {
    if (at_start_) {
        at_start_ = false;
        // Strip a UTF-8 BOM.
        if (peek() == 0xEF) {
            std::size_t save_pos = pos_;
            get();
            if (peek() == 0xBB) {
                get();
                if (peek() == 0xBF) {
                    get();
                } else {
                    pos_ = save_pos;
                }
            } else {
                pos_ = save_pos;
            }
        }
    }

    row.clear();
    int c = get();
    if (c < 0) {
        return false;
    }

    std::string field;
    bool in_quotes = false;
    while (true) {
        if (in_quotes) {
            if (c < 0) {
                // Unterminated quote; emit what we have.
                break;
            }
            if (c == '"') {
                if (peek() == '"') {
                    get();
                    field.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(static_cast<char>(c));
            }
        } else {
            if (c < 0 || c == '\n') {
                break;
            }
            if (c == '\r' && peek() == '\n') {
                get();
                break;
            }
            if (c == ',') {
                row.push_back(std::move(field));
                field.clear();
            } else if (c == '"' && field.empty()) {
                in_quotes = true;
            } else {
                field.push_back(static_cast<char>(c));
            }
        }
        c = get();
    }
    row.push_back(std::move(field));
    return true;
}

CsvWriter::CsvWriter(const std::filesystem::path& path)
    : file_(path, std::ios::binary), out_(&file_) {
    if (!file_) {
        throw std::runtime_error("cannot write file: " + path.string());
    }
}

CsvWriter::CsvWriter(std::ostream& out) : out_(&out) {}

std::string quote_field(std::string_view field) {
    bool needs_quotes =
        field.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!needs_quotes) {
        return std::string(field);
    }
    std::string out;
    out.reserve(field.size() + 2);
    out.push_back('"');
    for (char ch : field) {
        if (ch == '"') {
            out.push_back('"');
        }
        out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

void CsvWriter::write_row(const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i != 0) {
            *out_ << ',';
        }
        *out_ << quote_field(row[i]);
    }
    *out_ << '\n';
}

std::optional<std::size_t> column_index(const std::vector<std::string>& header,
                                        std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::string file_digest(const std::filesystem::path& path) {
    auto source = open_file_source(path);
    std::uint64_t hash = 1469598103934665603ull;
    std::vector<char> buf(64 * 1024);
    while (true) {
        std::size_t got = source->read(buf.data(), buf.size());
        if (got == 0) {
            break;
        }
        for (std::size_t i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ull;
        }
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx",
                  static_cast<unsigned long long>(hash));
    return out;
}

std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && is_space(static_cast<unsigned char>(s[begin]))) {
        ++begin;
    }
    while (end > begin && is_space(static_cast<unsigned char>(s[end - 1]))) {
        --end;
    }
    return std::string(s.substr(begin, end - begin));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

}  // namespace irisoc::csv
