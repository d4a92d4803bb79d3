#pragma once

// CSV output helpers. Values print with 17 significant digits so files are
// deterministic and round-trip to the exact double.

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace sinkdiff {

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) os_ << ',';
            os_ << header[i];
        }
        os_ << '\n';
    }

    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) os_ << ',';
            os_ << format_g17(values[i]);
        }
        os_ << '\n';
    }

    /// Row with preformatted cells (used when a column is not numeric).
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) os_ << ',';
            os_ << cells[i];
        }
        os_ << '\n';
    }

private:
    std::ostream& os_;
};

}  // namespace sinkdiff
