#pragma once

/// Ordered λ-grid tables and their CSV / JSON encodings.
///
/// CSV layout: one header row, comma separated, "." decimal separator,
/// numbers with 17 significant digits (so reading a file back reproduces
/// the doubles exactly), "n/a" for not-applicable cells.

#include <charconv>
#include <cmath>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "collusion/errors.hpp"

namespace collusion {

using Cell = std::optional<double>;

inline constexpr std::string_view kNotApplicable = "n/a";

struct CurveTable {
    std::vector<std::string> column_names;  ///< first column is λ
    std::vector<std::vector<Cell>> rows;

    /// Throws ParameterError unless: ≥ 2 columns and rows, every row as wide
    /// as the header, λ present and strictly increasing, all values finite.
    void validate() const {
        if (column_names.size() < 2) throw ParameterError("curve table needs at least two columns");
        if (rows.size() < 2) throw ParameterError("curve table needs at least two rows");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const auto& row = rows[i];
            if (row.size() != column_names.size()) {
                throw ParameterError("curve table row " + std::to_string(i) + " has " +
                                     std::to_string(row.size()) + " cells, expected " +
                                     std::to_string(column_names.size()));
            }
            if (!row[0]) throw ParameterError("curve table row " + std::to_string(i) + " has no lambda");
            for (const auto& c : row) {
                if (c && !std::isfinite(*c)) {
                    throw ParameterError("curve table row " + std::to_string(i) +
                                         " holds a non-finite value");
                }
            }
            if (i > 0 && !(*row[0] > *rows[i - 1][0])) {
                throw ParameterError("curve table lambda column is not strictly increasing at row " +
                                     std::to_string(i));
            }
        }
    }

    [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t k = 0; k < column_names.size(); ++k) {
            if (column_names[k] == name) return k;
        }
        return std::nullopt;
    }
};

/// 17 significant digits, printf "%.17g" style.
inline std::string format_number(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream& os, const CurveTable& t) {
    t.validate();
    for (std::size_t k = 0; k < t.column_names.size(); ++k) {
        if (k) os << ',';
        os << t.column_names[k];
    }
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            if (k) os << ',';
            if (row[k]) {
                os << format_number(*row[k]);
            } else {
                os << kNotApplicable;
            }
        }
        os << '\n';
    }
}

inline std::string to_csv(const CurveTable& t) {
    std::ostringstream os;
    write_csv(os, t);
    return os.str();
}

/// Malformed CSV input; carries the 1-based line number.
class CsvError : public ParameterError {
public:
    CsvError(std::size_t line, const std::string& what)
        : ParameterError("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                       : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace detail

/// Parses and validates a CurveTable; any defect throws CsvError.
inline CurveTable read_csv(std::istream& is) {
    CurveTable t;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(is, line)) throw CsvError(1, "empty input, expected a header row");
    ++line_no;
    for (auto name : detail::split_commas(line)) {
        name = detail::trim(name);
        if (name.empty()) throw CsvError(line_no, "empty column name");
        t.column_names.emplace_back(name);
    }
    if (t.column_names.size() < 2) throw CsvError(line_no, "need at least two columns");

    while (std::getline(is, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto fields = detail::split_commas(line);
        if (fields.size() != t.column_names.size()) {
            throw CsvError(line_no, "expected " + std::to_string(t.column_names.size()) +
                                        " fields, found " + std::to_string(fields.size()));
        }
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (std::size_t k = 0; k < fields.size(); ++k) {
            const auto text = detail::trim(fields[k]);
            if (text == kNotApplicable) {
                if (k == 0) throw CsvError(line_no, "lambda column cannot be n/a");
                row.emplace_back(std::nullopt);
                continue;
            }
            double v = 0.0;
            const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
            if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
                throw CsvError(line_no, "cannot parse number '" + std::string(text) + "' in column " +
                                            t.column_names[k]);
            }
            row.emplace_back(v);
        }
        if (!t.rows.empty() && !(*row[0] > *t.rows.back()[0])) {
            throw CsvError(line_no, "lambda column must be strictly increasing");
        }
        t.rows.push_back(std::move(row));
    }
    if (t.rows.size() < 2) throw CsvError(line_no, "need at least two data rows");
    return t;
}

inline CurveTable read_csv(const std::string& text) {
    std::istringstream is(text);
    return read_csv(is);
}

/// {"columns": [...], "rows": [[...], ...]} with null for n/a cells.
inline nlohmann::ordered_json to_json(const CurveTable& t) {
    t.validate();
    nlohmann::ordered_json j;
    j["columns"] = t.column_names;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        auto r = nlohmann::ordered_json::array();
        for (const auto& c : row) r.push_back(c ? nlohmann::ordered_json(*c) : nlohmann::ordered_json(nullptr));
        j["rows"].push_back(std::move(r));
    }
    return j;
}

}  // namespace collusion
