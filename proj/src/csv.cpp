#include "prosumage/csv.hpp"

#include "prosumage/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace prosumage {

ParseError::ParseError(const std::string& file, std::size_t line, const std::string& what)
    : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}

}  // namespace prosumage

namespace prosumage::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
        s.remove_prefix(1);
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.emplace_back(trim(line.substr(start)));
            break;
        }
        fields.emplace_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

}  // namespace

std::optional<std::size_t> Table::find_column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    return std::nullopt;
}

std::size_t Table::column(std::string_view name) const {
    if (auto idx = find_column(name)) return *idx;
    throw ParseError(source.string(), 1, "missing column '" + std::string(name) + "'");
}

Table parse(std::string_view text, const std::filesystem::path& source) {
    Table table;
    table.source = source;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;  // UTF-8 BOM
    while (pos < text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw ParseError(source.string(), line_no,
                             "expected " + std::to_string(table.header.size()) + " fields, found " +
                                 std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
        table.line_numbers.push_back(line_no);
    }
    if (!have_header) throw ParseError(source.string(), 1, "empty file");
    return table;
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path);
}

double parse_double(std::string_view field, const std::filesystem::path& source, std::size_t line) {
    field = trim(field);
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    const auto* first = field.data();
    const auto* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc{} || ptr != last) {
        throw ParseError(source.string(), line, "not a number: '" + std::string(field) + "'");
    }
    return value;
}

long long parse_integer(std::string_view field, const std::filesystem::path& source, std::size_t line) {
    field = trim(field);
    long long value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size()) {
        throw ParseError(source.string(), line, "not an integer: '" + std::string(field) + "'");
    }
    return value;
}

std::string format_double(double value) {
    if (value == 0.0) return "0";  // folds -0
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

Writer::Writer(std::vector<std::string> header) : columns_(header.size()) {
    add_row(std::span<const std::string>(header));
}

void Writer::add_row(std::span<const std::string> fields) {
    if (fields.size() != columns_) {
        throw ContractViolation("csv row has " + std::to_string(fields.size()) + " fields, header has " +
                                std::to_string(columns_));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) text_.push_back(',');
        text_.append(fields[i]);
    }
    text_.push_back('\n');
}

void Writer::add_row(std::initializer_list<std::string> fields) {
    add_row(std::span<const std::string>(fields.begin(), fields.size()));
}

void Writer::commit(const std::filesystem::path& path) const { write_file_atomic(path, text_); }

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace prosumage::csv
