#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace prosumage::csv {

// Minimal reader for the numeric tables this project exchanges: comma
// separated, header row, no embedded commas or newlines inside fields.
struct Table {
    std::filesystem::path source;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line_numbers;  // 1-based file line of each row

    std::optional<std::size_t> find_column(std::string_view name) const;
    std::size_t column(std::string_view name) const;  // throws ParseError if absent
};

Table read(const std::filesystem::path& path);
Table parse(std::string_view text, const std::filesystem::path& source = "<memory>");

double parse_double(std::string_view field, const std::filesystem::path& source, std::size_t line);
long long parse_integer(std::string_view field, const std::filesystem::path& source, std::size_t line);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double value);

/// Buffers a CSV document and writes it with a rename so readers never see a partial file.
class Writer {
public:
    explicit Writer(std::vector<std::string> header);

    void add_row(std::span<const std::string> fields);
    void add_row(std::initializer_list<std::string> fields);
    const std::string& text() const { return text_; }
    void commit(const std::filesystem::path& path) const;

private:
    std::size_t columns_;
    std::string text_;
};

void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace prosumage::csv
