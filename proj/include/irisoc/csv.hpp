#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace irisoc::csv {

// Streaming byte source so gzip and plain files share one reader.
class ByteSource {
public:
    virtual ~ByteSource() = default;
    // Returns bytes read; 0 means end of stream.
    virtual std::size_t read(char* buf, std::size_t n) = 0;
};

std::unique_ptr<ByteSource> open_file_source(const std::filesystem::path& path);
std::unique_ptr<ByteSource> open_gzip_source(const std::filesystem::path& path);

// Picks gzip or plain based on the ".gz" suffix.
std::unique_ptr<ByteSource> open_source(const std::filesystem::path& path);

// RFC 4180 style reader: quoted fields may contain commas, quotes ("")
// and newlines. A UTF-8 BOM at the start of the stream is stripped.
// Accepts both \n and \r\n row terminators.
class CsvReader {
public:
    explicit CsvReader(std::unique_ptr<ByteSource> source);
    explicit CsvReader(const std::filesystem::path& path);

    // Reads the next row into `row`. Returns false at end of input.
    bool next(std::vector<std::string>& row);

private:
    int get();
    int peek();

    std::unique_ptr<ByteSource> source_;
    std::vector<char> buf_;
    std::size_t pos_ = 0;
    std::size_t len_ = 0;
    bool at_start_ = true;
};

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);
    explicit CsvWriter(std::ostream& out);

    void write_row(const std::vector<std::string>& row);

private:
    std::ofstream file_;
    std::ostream* out_;
};

std::string quote_field(std::string_view field);

// Header helpers.
std::optional<std::size_t> column_index(const std::vector<std::string>& header,
                                        std::string_view name);

// FNV-1a 64 over the file's bytes, hex-encoded. Used for stage manifests.
std::string file_digest(const std::filesystem::path& path);

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

}  // namespace irisoc::csv
