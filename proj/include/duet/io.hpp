#pragma once

#include <nlohmann/json_fwd.hpp>

#include <iosfwd>
#include <string>
#include <vector>

// Deterministic text output: 9 significant digits, scientific notation,
// '.' decimal separator regardless of locale, '\n' line endings.
namespace duet::io {

std::string sig9(double v);

/// JSON number carrying at most 9 significant digits (round-trips through
/// the same formatting as the CSV writers).
double round9(double v);

struct CsvWriter {
    explicit CsvWriter(std::ostream& os);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);
    std::ostream& stream() { return os_; }

private:
    std::ostream& os_;
};

} // namespace duet::io
