#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kcurves/errors.hpp"
#include "kcurves/learning_curve.hpp"

namespace kcurves::cli {

/// %.17g: round-trips every double.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Rows `n,value_mean,value_sem,replicas,extra...` with LF line endings.
struct CsvTable {
    std::vector<std::string> extra_columns;
    struct Row {
        CurvePoint point;
        std::vector<double> extra;
    };
    std::vector<Row> rows;

    void add(const CurvePoint& p, std::vector<double> extra = {}) {
        if (extra.size() != extra_columns.size()) throw SizeError("csv: wrong number of extra values");
        rows.push_back({p, std::move(extra)});
    }

    [[nodiscard]] std::string str() const {
        std::string out = "n,value_mean,value_sem,replicas";
        for (const auto& c : extra_columns) out += "," + c;
        out += "\n";
        for (const auto& r : rows) {
            out += format_double(r.point.n) + "," + format_double(r.point.mean) + "," + format_double(r.point.sem) + "," +
                   std::to_string(r.point.replicas);
            for (double e : r.extra) out += "," + format_double(e);
            out += "\n";
        }
        return out;
    }
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string(), 0);
    out << text;
    if (!out) throw ConfigError("write failed on " + path.string(), 0);
}

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string(), 0);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty csv", 1);
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 4 || header[0] != "n" || header[1] != "value_mean" || header[2] != "value_sem" ||
        header[3] != "replicas")
        throw ConfigError(path.string() + ": header must start with n,value_mean,value_sem,replicas", 1);
    CsvTable t;
    t.extra_columns.assign(header.begin() + 4, header.end());
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> v;
        std::stringstream ss(line);
        std::string cell;
        try {
            while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ConfigError(path.string() + ": malformed number", lineno);
        }
        if (v.size() != header.size()) throw ConfigError(path.string() + ": wrong number of columns", lineno);
        t.add({v[0], v[1], v[2], static_cast<std::size_t>(v[3])}, std::vector<double>(v.begin() + 4, v.end()));
    }
    return t;
}

}  // namespace kcurves::cli
