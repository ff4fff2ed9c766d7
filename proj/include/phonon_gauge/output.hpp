#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace phonon_gauge {

/// Shortest form with 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double value);

/// Column-oriented CSV with '.' decimals and '\n' line endings.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(const std::vector<double>& values);
    std::size_t rows() const noexcept { return rows_; }
    std::string str() const { return body_; }
    void write(const std::filesystem::path& path) const;

private:
    std::size_t columns_;
    std::size_t rows_ = 0;
    std::string body_;
};

/// Writes bytes verbatim, creating parent directories.
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace phonon_gauge
