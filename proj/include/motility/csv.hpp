#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace motility {

// Shortest decimal form of `v` that parses back to the identical double
// (std::to_chars round-trip guarantee).  Infinities and NaNs come out as
// "inf"/"-inf"/"nan", which the reader side accepts again.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    // Index of a named column; throws std::invalid_argument when missing.
    std::size_t column(const std::string& name) const;
    std::vector<double> column_values(const std::string& name) const;
};

// Write a numeric table with a header row.  Every row must match the header
// width.  Values are written with format_double so files are byte-stable and
// lossless.
void write_csv(const std::filesystem::path& path, std::span<const std::string> header,
               const std::vector<std::vector<double>>& rows);

// Read a table written by write_csv (or any comma-separated numeric file with
// one header line).  Throws std::invalid_argument on malformed content.
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace motility
