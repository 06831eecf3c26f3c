#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace relaynet {

// Minimal CSV writer: header row, then rows of cells; numbers are formatted
// with six significant digits so outputs are stable across platforms.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
    }

    void header(const std::vector<std::string>& cols) { row_text(cols); }

    void row_text(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }

    void row(const std::vector<double>& cells, const std::string& label = {}) {
        bool first = true;
        if (!label.empty()) {
            out_ << label;
            first = false;
        }
        for (double v : cells) {
            if (!first) out_ << ',';
            out_ << format(v);
            first = false;
        }
        out_ << '\n';
    }

    static std::string format(double v) {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.6g", v);
        return buf;
    }

  private:
    std::ofstream out_;
};

}  // namespace relaynet
