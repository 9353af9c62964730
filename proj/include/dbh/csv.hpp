#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dbh {

// Minimal CSV writer with reproducible floating-point formatting.
class CsvWriter {
public:
    explicit CsvWriter(std::string path, const std::vector<std::string>& columns, const std::string& schema = "")
        : path_(std::move(path)) {
        out_.open(path_);
        if (!out_) throw std::runtime_error("cannot open for writing: " + path_);
        if (!schema.empty()) out_ << "# schema=" << schema << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    }

    static std::string num(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
    }

    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream out_;
};

} // namespace dbh
