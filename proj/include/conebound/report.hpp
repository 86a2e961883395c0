#pragma once

#include "conebound/bounds.hpp"
#include "conebound/cone.hpp"
#include "conebound/models.hpp"
#include "conebound/types.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

namespace conebound {

// ---------------------------------------------------------------------------
// Minimal deterministic JSON emitter. Field order is insertion order and
// floating-point numbers carry 17 significant digits, so identical inputs
// produce byte-identical documents.
// ---------------------------------------------------------------------------

class JsonWriter {
public:
    std::string str() const { return out_; }

    JsonWriter& begin_object() { return open('{'); }
    JsonWriter& end_object() { return close('}'); }
    JsonWriter& begin_array() { return open('['); }
    JsonWriter& end_array() { return close(']'); }

    JsonWriter& key(const std::string& name) {
        separate();
        write_string(name);
        out_ += ':';
        pending_value_ = true;
        return *this;
    }

    JsonWriter& value(double v) {
        separate();
        char buf[40];
        if (std::isfinite(v))
            std::snprintf(buf, sizeof buf, "%.17g", v);
        else
            std::snprintf(buf, sizeof buf, "null");
        out_ += buf;
        return *this;
    }

    JsonWriter& value(long long v) {
        separate();
        out_ += std::to_string(v);
        return *this;
    }

    JsonWriter& value(Index v) { return value(static_cast<long long>(v)); }

    JsonWriter& value(bool v) {
        separate();
        out_ += v ? "true" : "false";
        return *this;
    }

    JsonWriter& value(const std::string& v) {
        separate();
        write_string(v);
        return *this;
    }

    JsonWriter& value(const char* v) { return value(std::string(v)); }

    template <typename Derived>
    JsonWriter& value(const Eigen::MatrixBase<Derived>& v) {
        begin_array();
        for (Index i = 0; i < v.size(); ++i) value(static_cast<double>(v(i)));
        return end_array();
    }

private:
    JsonWriter& open(char c) {
        separate();
        out_ += c;
        first_.push_back(true);
        return *this;
    }

    JsonWriter& close(char c) {
        out_ += c;
        first_.pop_back();
        return *this;
    }

    void separate() {
        if (pending_value_) {
            pending_value_ = false;
            return;
        }
        if (!first_.empty()) {
            if (!first_.back()) out_ += ',';
            first_.back() = false;
        }
    }

    void write_string(const std::string& s) {
        out_ += '"';
        for (char c : s) {
            switch (c) {
                case '"': out_ += "\\\""; break;
                case '\\': out_ += "\\\\"; break;
                case '\n': out_ += "\\n"; break;
                case '\t': out_ += "\\t"; break;
                case '\r': out_ += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(c) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", c);
                        out_ += buf;
                    } else {
                        out_ += c;
                    }
            }
        }
        out_ += '"';
    }

    std::string out_;
    std::vector<bool> first_;
    bool pending_value_ = false;
};

using ConfigEmitter = std::function<void(JsonWriter&)>;

inline void write_cone_fields(JsonWriter& w, const Cone<double>& cone) {
    w.begin_object();
    w.key("vertex").value(cone.vertex);
    w.key("axis").value(cone.axis);
    w.key("width").value(cone.width);
    w.end_object();
}

inline std::string verification_report_json(const VerificationReport<double>& report,
                                            const ConfigEmitter& config = {}) {
    JsonWriter w;
    w.begin_object();
    w.key("family").value(report.family);
    w.key("parameters").begin_object();
    for (const auto& [name, value] : report.parameters) w.key(name).value(value);
    w.end_object();
    w.key("sample_count").value(report.sample_count);
    w.key("sup_ratio").value(report.sup_ratio);
    w.key("d").value(report.d);
    w.key("cone");
    if (report.cone)
        write_cone_fields(w, *report.cone);
    else
        w.begin_object().end_object();
    w.key("A_used").begin_object();
    w.key("eta").value(report.a_eta);
    w.key("value").value(report.a_value);
    w.end_object();
    w.key("rhs_bound").value(report.rhs_bound);
    w.key("rhs_raw").value(report.rhs_raw);
    w.key("lhs").value(report.lhs);
    w.key("satisfied").value(report.satisfied);
    w.key("margin").value(report.margin);
    w.key("unconstrained").value(report.unconstrained);
    w.key("failures").begin_array();
    for (const auto& f : report.failures) w.value(f);
    w.end_array();
    if (config) {
        w.key("config").begin_object();
        config(w);
        w.end_object();
    }
    w.end_object();
    return w.str();
}

// ---------------------------------------------------------------------------
// Point-cloud CSV: one point per row, a fixed number of numeric columns,
// '#'-prefixed rows are comments. Column count is inferred from the first
// data row.
// ---------------------------------------------------------------------------

inline MatrixX<double> read_point_cloud(std::istream& in, const std::string& origin = "<input>") {
    std::vector<std::vector<double>> rows;
    std::string line;
    long line_number = 0;
    Index arity = -1;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos) continue;
        if (line[begin] == '#') continue;

        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const std::size_t a = cell.find_first_not_of(" \t");
            if (a == std::string::npos)
                throw ParseError(origin + ":" + std::to_string(line_number) + ": empty cell");
            const std::size_t b = cell.find_last_not_of(" \t");
            const std::string trimmed = cell.substr(a, b - a + 1);
            char* end = nullptr;
            const double v = std::strtod(trimmed.c_str(), &end);
            if (end != trimmed.c_str() + trimmed.size() || !std::isfinite(v))
                throw ParseError(origin + ":" + std::to_string(line_number) +
                                 ": malformed number '" + trimmed + "'");
            row.push_back(v);
        }
        if (row.empty())
            throw ParseError(origin + ":" + std::to_string(line_number) + ": empty row");
        if (arity < 0) arity = static_cast<Index>(row.size());
        if (static_cast<Index>(row.size()) != arity)
            throw ParseError(origin + ":" + std::to_string(line_number) + ": expected " +
                             std::to_string(arity) + " columns, found " +
                             std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(origin + ": no data rows");

    MatrixX<double> points(arity, static_cast<Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (Index i = 0; i < arity; ++i) points(i, static_cast<Index>(k)) = rows[k][static_cast<std::size_t>(i)];
    return points;
}

inline MatrixX<double> read_point_cloud_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open point cloud file: " + path);
    return read_point_cloud(in, path);
}

// Two-column plot series with a header comment naming the series.
inline std::string series_csv(const std::string& name, const std::string& x_label,
                              const std::string& y_label, const std::vector<double>& xs,
                              const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw InvalidParams("series columns differ in length");
    std::string out = "# series: " + name + " (" + x_label + ", " + y_label + ")\n";
    char buf[96];
    for (std::size_t k = 0; k < xs.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", xs[k], ys[k]);
        out += buf;
    }
    return out;
}

}  // namespace conebound
