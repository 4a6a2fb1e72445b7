#pragma once

// Self-describing tabular output. Every file carries its parameters as
// ordered key=value metadata; CSV numbers use 17 significant digits and JSON
// numbers the shortest round-trip representation.

#include "json.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "spherecs/nonclassicality.hpp"

namespace spherecs::io {

using Meta = std::vector<std::pair<std::string, std::string>>;

struct Table {
    Meta meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    void add_row(std::vector<double> row) {
        if (row.size() != columns.size()) throw std::invalid_argument("Table: row width does not match columns");
        rows.push_back(std::move(row));
    }

    const std::string* find_meta(const std::string& key) const {
        for (const auto& [k, v] : meta)
            if (k == key) return &v;
        return nullptr;
    }

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw std::out_of_range("Table: no column '" + name + "'");
    }

    std::vector<double> column_values(const std::string& name) const {
        const std::size_t c = column(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[c]);
        return out;
    }

    bool operator==(const Table&) const = default;
};

/// %.17g, which reads back to the identical double.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_number(const std::string& s) {
    if (s.empty() || std::isspace(static_cast<unsigned char>(s.front()))) {
        throw std::runtime_error("not a number: '" + s + "'");
    }
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw std::runtime_error("not a number: '" + s + "'");
    if (end != s.c_str() + s.size()) throw std::runtime_error("trailing characters in number: '" + s + "'");
    return v;
}

inline void write_csv(std::ostream& os, const Table& t) {
    for (const auto& [k, v] : t.meta) os << "# " << k << '=' << v << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_number(row[i]);
        os << '\n';
    }
}

inline std::string to_csv(const Table& t) {
    std::ostringstream os;
    write_csv(os, t);
    return os.str();
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

inline Table read_csv(std::istream& is) {
    Table t;
    std::string line;
    bool header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header && line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw std::runtime_error("malformed metadata line: " + line);
            t.meta.emplace_back(line.substr(2, eq - 2), line.substr(eq + 1));
            continue;
        }
        if (!header) {
            t.columns = split(line, ',');
            header = true;
            continue;
        }
        std::vector<double> row;
        for (const auto& cell : split(line, ',')) row.push_back(parse_number(cell));
        t.add_row(std::move(row));
    }
    if (!header) throw std::runtime_error("CSV has no header line");
    return t;
}

inline Table csv_from_string(const std::string& s) {
    std::istringstream is(s);
    return read_csv(is);
}

inline nlohmann::ordered_json meta_json(const Meta& meta) {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta) m[k] = v;
    return m;
}

inline Meta meta_from_json(const nlohmann::ordered_json& j) {
    Meta meta;
    for (const auto& [k, v] : j.items()) meta.emplace_back(k, v.get<std::string>());
    return meta;
}

// JSON has no NaN; non-finite numbers travel as null and come back as NaN.
inline nlohmann::ordered_json json_number(double v) {
    return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

inline double number_from_json(const nlohmann::ordered_json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline std::string to_json(const Table& t) {
    nlohmann::ordered_json j;
    j["meta"] = meta_json(t.meta);
    j["columns"] = t.columns;
    auto data = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        auto r = nlohmann::ordered_json::array();
        for (double v : row) r.push_back(json_number(v));
        data.push_back(std::move(r));
    }
    j["data"] = std::move(data);
    return j.dump(1) + "\n";
}

inline Table table_from_json(const std::string& text) {
    const auto j = nlohmann::ordered_json::parse(text);
    Table t;
    t.meta = meta_from_json(j.at("meta"));
    t.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& r : j.at("data")) {
        std::vector<double> row;
        for (const auto& v : r) row.push_back(number_from_json(v));
        t.add_row(std::move(row));
    }
    return t;
}

// ---------------------------------------------------------------------------
// Wigner grids

inline Meta grid_meta(const WignerGrid& w) {
    const GridSpec& g = w.grid;
    return {{"x_min", format_number(g.x_min)}, {"x_max", format_number(g.x_max)},
            {"p_min", format_number(g.p_min)}, {"p_max", format_number(g.p_max)},
            {"nx", std::to_string(g.nx)},      {"np", std::to_string(g.np)},
            {"convention", w.convention}};
}

/// Long-format table: one (x, p, w) row per grid point, x varying fastest.
inline Table wigner_table(const WignerGrid& w, Meta meta = {}) {
    Table t;
    t.meta = std::move(meta);
    for (auto& kv : grid_meta(w)) t.meta.push_back(std::move(kv));
    t.columns = {"x", "p", "w"};
    t.rows.reserve(static_cast<std::size_t>(w.values.size()));
    for (int k = 0; k < w.grid.np; ++k)
        for (int i = 0; i < w.grid.nx; ++i) t.rows.push_back({w.grid.x(i), w.grid.p(k), w.values(i, k)});
    return t;
}

inline WignerGrid wigner_from_table(const Table& t) {
    auto need = [&](const char* key) {
        const std::string* v = t.find_meta(key);
        if (!v) throw std::runtime_error(std::string("Wigner table lacks metadata '") + key + "'");
        return *v;
    };
    GridSpec g{parse_number(need("x_min")), parse_number(need("x_max")), parse_number(need("p_min")),
               parse_number(need("p_max")), std::stoi(need("nx")), std::stoi(need("np"))};
    g.validate();
    if (t.rows.size() != static_cast<std::size_t>(g.nx) * g.np) {
        throw std::runtime_error("Wigner table row count does not match nx*np");
    }
    const std::size_t wc = t.column("w");
    WignerGrid w{g, Eigen::MatrixXd(g.nx, g.np), need("convention")};
    std::size_t r = 0;
    for (int k = 0; k < g.np; ++k)
        for (int i = 0; i < g.nx; ++i) w.values(i, k) = t.rows[r++][wc];
    return w;
}

/// Compact JSON: grid metadata plus the values as a flat array, x fastest.
inline std::string wigner_to_json(const WignerGrid& w, const Meta& meta = {}) {
    nlohmann::ordered_json j;
    j["meta"] = meta_json(meta);
    const GridSpec& g = w.grid;
    j["grid"] = {{"x_min", g.x_min}, {"x_max", g.x_max}, {"p_min", g.p_min},
                 {"p_max", g.p_max}, {"nx", g.nx},       {"np", g.np}};
    j["convention"] = w.convention;
    auto vals = nlohmann::ordered_json::array();
    for (int k = 0; k < g.np; ++k)
        for (int i = 0; i < g.nx; ++i) vals.push_back(w.values(i, k));
    j["values"] = std::move(vals);
    return j.dump() + "\n";
}

inline WignerGrid wigner_from_json(const std::string& text, Meta* meta = nullptr) {
    const auto j = nlohmann::ordered_json::parse(text);
    const auto& jg = j.at("grid");
    GridSpec g{jg.at("x_min").get<double>(), jg.at("x_max").get<double>(), jg.at("p_min").get<double>(),
               jg.at("p_max").get<double>(), jg.at("nx").get<int>(),       jg.at("np").get<int>()};
    g.validate();
    const auto& vals = j.at("values");
    if (vals.size() != static_cast<std::size_t>(g.nx) * g.np) {
        throw std::runtime_error("Wigner JSON value count does not match nx*np");
    }
    WignerGrid w{g, Eigen::MatrixXd(g.nx, g.np), j.at("convention").get<std::string>()};
    std::size_t r = 0;
    for (int k = 0; k < g.np; ++k)
        for (int i = 0; i < g.nx; ++i) w.values(i, k) = vals[r++].get<double>();
    if (meta) *meta = meta_from_json(j.at("meta"));
    return w;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace spherecs::io
