#include "magvir/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>

#include "magvir/errors.hpp"

namespace magvir {

void write_field_binary(const std::string& path, const Field& f) {
    f.grid.validate();
    if (f.values.size() != f.grid.size()) throw ArgumentError("write_field_binary: value count does not match grid");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write " + path);
    const std::int64_t n = f.grid.n, N = f.grid.N;
    os.write(reinterpret_cast<const char*>(&n), sizeof n);
    os.write(reinterpret_cast<const char*>(&N), sizeof N);
    os.write(reinterpret_cast<const char*>(&f.grid.L), sizeof(double));
    os.write(reinterpret_cast<const char*>(&f.grid.offset), sizeof(double));
    os.write(reinterpret_cast<const char*>(f.values.data()), sizeof(cplx) * f.values.size());
    if (!os) throw ConfigError("short write to " + path);
}

Field read_field_binary(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read " + path);
    std::int64_t n = 0, N = 0;
    Field f;
    is.read(reinterpret_cast<char*>(&n), sizeof n);
    is.read(reinterpret_cast<char*>(&N), sizeof N);
    is.read(reinterpret_cast<char*>(&f.grid.L), sizeof(double));
    is.read(reinterpret_cast<char*>(&f.grid.offset), sizeof(double));
    if (!is || n < 1 || n > 6 || N < 2 || N > (1 << 16)) throw ConfigError(path + ": bad checkpoint header");
    f.grid.n = static_cast<int>(n);
    f.grid.N = static_cast<int>(N);
    f.grid.validate();
    f.values.resize(f.grid.size());
    is.read(reinterpret_cast<char*>(f.values.data()), sizeof(cplx) * f.values.size());
    if (!is) throw ConfigError(path + ": truncated checkpoint");
    return f;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, std::vector<std::string> columns)
    : os_(path), path_(path), ncol_(columns.size()) {
    if (!os_) throw ConfigError("cannot write " + path);
    for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
    os_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != ncol_) throw ArgumentError(path_ + ": row has wrong column count");
    for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_double(values[i]);
    os_ << '\n';
}

void CsvWriter::close() { os_.close(); }

}  // namespace magvir
