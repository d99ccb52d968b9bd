#ifndef LOWDIM_CSV_HPP
#define LOWDIM_CSV_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lowdim::csv {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Reads a comma-separated file whose first record is a header. Quoted
/// fields ("a,b", doubled "" escapes) and CRLF line endings are accepted;
/// blank lines are skipped. Every record must have as many fields as the
/// header.
Table read(const std::filesystem::path& path);
Table parse(std::string_view text, std::string_view source = "<memory>");

/// Writes header + rows, quoting fields that need it.
void write(const std::filesystem::path& path, const Table& table);
std::string render(const Table& table);

/// Shortest decimal string that parses back to exactly `value`.
std::string format_double(double value);

/// Strict full-field parse; nullopt on junk, partial parses, or non-finite results.
std::optional<double> parse_double(std::string_view field);

} // namespace lowdim::csv

#endif
