#include "duet/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <ostream>

namespace duet::io {

std::string sig9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return buf;
}

double round9(double v) {
    return std::strtod(sig9(v).c_str(), nullptr);
}

CsvWriter::CsvWriter(std::ostream& os) : os_(os) {}

void CsvWriter::header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i)
        os_ << (i ? "," : "") << names[i];
    os_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
        os_ << (i ? "," : "") << sig9(values[i]);
    os_ << '\n';
}

} // namespace duet::io
