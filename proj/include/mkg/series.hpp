#pragma once

#include <cstdio>
#include <fstream>

#include "mkg/diagnostics.hpp"

namespace mkg {

// 17 significant digits: round-trip exact, byte-identical given identical
// doubles
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline const std::vector<std::string>& diagnostic_columns() {
    static const std::vector<std::string> cols = {
        "gauge_residual_L2", "charge", "maxwell_residual_L2", "faraday_gap_L2",
        "phi_Hs", "DA_Hr_minus_1", "m_gap_L2"};
    return cols;
}

inline void write_series_csv(const std::string& path, const std::vector<DiagnosticRecord>& series) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << "time";
    for (const auto& c : diagnostic_columns()) os << "," << c;
    os << "\n";
    for (const auto& rec : series) {
        os << format_double(rec.t);
        for (const auto& c : diagnostic_columns()) {
            auto it = rec.values.find(c);
            os << "," << (it == rec.values.end() ? (rec.blowup ? "blowup" : "0") : format_double(it->second));
        }
        os << "\n";
    }
}

inline std::string series_json(const std::vector<DiagnosticRecord>& series) {
    std::string out = "[";
    bool first = true;
    for (const auto& rec : series) {
        if (!first) out += ",";
        first = false;
        out += "{\"time\":" + format_double(rec.t);
        if (rec.blowup) out += ",\"blowup\":true";
        for (const auto& [k, v] : rec.values) out += ",\"" + k + "\":" + format_double(v);
        out += "}";
    }
    out += "]";
    return out;
}

}  // namespace mkg
