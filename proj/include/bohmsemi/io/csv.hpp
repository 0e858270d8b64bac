#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace bohmsemi::io {

/// 17 significant digits, the shortest form that round-trips every double.
std::string format_double(double x);

/// Comma-separated output with a header row and LF line endings.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);

    /// Cells are written as given; numbers should go through format_double.
    void row(const std::vector<std::string>& cells);
    void row(const std::vector<double>& values);
    void close();

private:
    std::ofstream out_;
    std::string path_;
    std::size_t width_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column; throws MissingData.
    std::size_t column(const std::string& name) const;
    std::vector<double> numbers(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace bohmsemi::io
