#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "magvir/grid.hpp"

namespace magvir {

// Checkpoint layout (little endian): int64 n, int64 N, double L, double offset,
// then size() pairs (re, im) in row-major node order.
void write_field_binary(const std::string& path, const Field& f);
Field read_field_binary(const std::string& path);

// Comma separated table with a fixed column list; numbers printed with 17 significant digits.
class CsvWriter {
public:
    CsvWriter(const std::string& path, std::vector<std::string> columns);
    void row(const std::vector<double>& values);
    void close();

private:
    std::ofstream os_;
    std::string path_;
    std::size_t ncol_;
};

std::string format_double(double v);

}  // namespace magvir
