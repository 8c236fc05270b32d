#pragma once

// Tabular output in CSV, JSON or aligned text.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace cavex::cli {

enum class Format { csv, json, table };

inline Format parse_format(const std::string& s) {
    if (s == "csv") return Format::csv;
    if (s == "json") return Format::json;
    if (s == "table") return Format::table;
    throw std::invalid_argument("unknown format '" + s + "'");
}

struct Cell {
    std::string text;
    bool numeric = true; ///< written unquoted in JSON
};

inline Cell num(std::string s) { return {std::move(s), true}; }
inline Cell txt(std::string s) { return {std::move(s), false}; }

/// 17 significant digits, enough to round-trip a double.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Table {
public:
    explicit Table(std::vector<std::string> columns) : cols_(std::move(columns)) {}

    void add(std::vector<Cell> row) {
        if (row.size() != cols_.size()) throw std::logic_error("row width does not match header");
        rows_.push_back(std::move(row));
    }

    bool empty() const { return rows_.empty(); }

    void write_csv(std::ostream& os) const {
        for (std::size_t i = 0; i < cols_.size(); ++i) os << (i ? "," : "") << cols_[i];
        os << '\n';
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_escape(r[i].text);
            os << '\n';
        }
    }

    /// Array of objects; numeric cells keep their exact decimal text.
    void write_json(std::ostream& os, int indent = 0) const {
        const std::string pad(indent, ' ');
        os << "[";
        for (std::size_t j = 0; j < rows_.size(); ++j) {
            os << (j ? "," : "") << "\n" << pad << "  {";
            for (std::size_t i = 0; i < cols_.size(); ++i) {
                os << (i ? ", " : "") << nlohmann::json(cols_[i]).dump() << ": " << value(rows_[j][i]);
            }
            os << "}";
        }
        os << (rows_.empty() ? "" : "\n" + pad) << "]";
    }

    void write_table(std::ostream& os) const {
        std::vector<std::size_t> w(cols_.size());
        for (std::size_t i = 0; i < cols_.size(); ++i) w[i] = cols_[i].size();
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::max(w[i], r[i].text.size());
        }
        auto line = [&](auto get) {
            for (std::size_t i = 0; i < cols_.size(); ++i) {
                const std::string s = get(i);
                os << (i ? "  " : "") << std::string(w[i] - s.size(), ' ') << s;
            }
            os << '\n';
        };
        line([&](std::size_t i) { return cols_[i]; });
        for (const auto& r : rows_) line([&](std::size_t i) { return r[i].text; });
    }

    void write(std::ostream& os, Format f) const {
        switch (f) {
        case Format::csv: write_csv(os); break;
        case Format::json: write_json(os); os << '\n'; break;
        case Format::table: write_table(os); break;
        }
    }

    static std::string value(const Cell& c) { return c.numeric ? c.text : nlohmann::json(c.text).dump(); }

private:
    static std::string csv_escape(const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string out = "\"";
        for (char ch : s) {
            if (ch == '"') out += '"';
            out += ch;
        }
        return out + "\"";
    }

    std::vector<std::string> cols_;
    std::vector<std::vector<Cell>> rows_;
};

/// Ordered key/value summary written after a trace.
class Summary {
public:
    void add(std::string key, Cell v) { items_.emplace_back(std::move(key), std::move(v)); }

    void write(std::ostream& os, Format f) const {
        switch (f) {
        case Format::csv: {
            Table t({"quantity", "value"});
            for (const auto& [k, v] : items_) t.add({txt(k), v});
            t.write_csv(os);
            break;
        }
        case Format::table:
            for (const auto& [k, v] : items_) os << k << ": " << v.text << '\n';
            break;
        case Format::json: write_json_object(os); break;
        }
    }

    void write_json_object(std::ostream& os) const {
        os << "{";
        for (std::size_t i = 0; i < items_.size(); ++i) {
            os << (i ? ", " : "") << nlohmann::json(items_[i].first).dump() << ": " << Table::value(items_[i].second);
        }
        os << "}";
    }

private:
    std::vector<std::pair<std::string, Cell>> items_;
};

} // namespace cavex::cli
