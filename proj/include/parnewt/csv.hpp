#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace parnewt {

/// Formats a double with 17 significant digits (round-trip exact, deterministic).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Deterministic CSV emitter: one-line header, then rows; no quoting, no
/// locale dependence. Cells are strings, integers or 17-digit doubles.
class CsvWriter {
public:
    using Cell = std::variant<std::string, double, long>;

    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    }

    void header(const std::vector<std::string>& cols) { write_row_(cols); }

    void row(const std::vector<Cell>& cells) {
        std::vector<std::string> s;
        s.reserve(cells.size());
        for (const auto& c : cells)
            s.push_back(std::holds_alternative<std::string>(c) ? std::get<std::string>(c)
                        : std::holds_alternative<double>(c)    ? format_double(std::get<double>(c))
                                                               : std::to_string(std::get<long>(c)));
        write_row_(s);
    }

private:
    void write_row_(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
    }
    std::ofstream out_;
};

}  // namespace parnewt
