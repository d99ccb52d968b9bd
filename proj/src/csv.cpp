#include "lowdim/csv.hpp"

#include "lowdim/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace lowdim::csv {

namespace {

bool needs_quotes(std::string_view field) {
    return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

void append_field(std::string& out, std::string_view field) {
    if (!needs_quotes(field)) {
        out.append(field);
        return;
    }
    out.push_back('"');
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

} // namespace

Table parse(std::string_view text, std::string_view source) {
    // Strip a UTF-8 byte order mark.
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        bool blank = record.size() == 1 && record.front().empty();
        if (!blank) records.push_back(std::move(record));
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (field_started && !trim(field).empty()) {
                throw Error(std::string(source) + ":" + std::to_string(line) +
                            ": stray quote inside unquoted field");
            }
            field.clear();
            in_quotes = true;
            field_started = true;
            break;
        case ',':
            end_field();
            break;
        case '\r':
            break;
        case '\n':
            end_record();
            ++line;
            break;
        default:
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw Error(std::string(source) + ": unterminated quoted field");
    if (field_started || !record.empty()) end_record();

    if (records.empty()) throw Error(std::string(source) + ": file is empty (no header)");

    Table table;
    table.header = std::move(records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header.size()) {
            throw Error(std::string(source) + ": data row " + std::to_string(r) + " has " +
                        std::to_string(records[r].size()) + " fields, header has " +
                        std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(records[r]));
    }
    return table;
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path.string());
}

std::string render(const Table& table) {
    std::string out;
    auto emit = [&out](const std::vector<std::string>& rec) {
        for (std::size_t i = 0; i < rec.size(); ++i) {
            if (i) out.push_back(',');
            append_field(out, rec[i]);
        }
        out.push_back('\n');
    };
    emit(table.header);
    for (const auto& row : table.rows) emit(row);
    return out;
}

void write(const std::filesystem::path& path, const Table& table) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << render(table);
    if (!out) throw Error("failed while writing '" + path.string() + "'");
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw Error("cannot format number");
    return std::string(buf, ptr);
}

std::optional<double> parse_double(std::string_view field) {
    field = trim(field);
    if (field.empty()) return std::nullopt;
    if (field.front() == '+') field.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

} // namespace lowdim::csv
