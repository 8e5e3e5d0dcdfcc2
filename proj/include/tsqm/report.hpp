#pragma once

// ScenarioReport: computed-vs-expected entries with per-entry tolerances.
// Serializes to JSON and to a fixed-width text table; numeric output uses 17
// significant digits so repeated runs are byte-identical.

#include <cstdio>
#include <string>
#include <vector>

#include "tsqm/qcore.hpp"

namespace tsqm {

// How the expected value of an entry was obtained: an exact identity, a
// value derived by an independent computation, or a reference value from the
// literature the scenario reproduces.
enum class ValueSource { exact, derived, reference };

inline const char* to_string(ValueSource s) {
    switch (s) {
        case ValueSource::exact: return "exact";
        case ValueSource::derived: return "derived";
        default: return "reference";
    }
}

struct ReportEntry {
    std::string label;
    Amplitude computed;
    Amplitude expected;
    ValueSource source;
    double tolerance;
    bool pass;
};

struct ScenarioReport {
    std::string name;
    std::vector<ReportEntry> entries;

    void add(std::string label, Amplitude computed, Amplitude expected, ValueSource source,
             double tolerance) {
        const bool ok = std::abs(computed - expected) <= tolerance;
        entries.push_back({std::move(label), computed, expected, source, tolerance, ok});
    }

    bool all_pass() const {
        for (const ReportEntry& e : entries)
            if (!e.pass) return false;
        return true;
    }
};

namespace detail {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline std::string fmt_complex_short(const Amplitude& z) {
    if (z.imag() == 0.0) return fmt_short(z.real());
    std::string s = fmt_short(z.real());
    s += (z.imag() < 0.0 ? "-" : "+");
    s += fmt_short(std::abs(z.imag()));
    s += "i";
    return s;
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

}  // namespace detail

inline std::string to_json(const ScenarioReport& r) {
    std::string out = "{\"name\":\"" + detail::json_escape(r.name) + "\",\"entries\":[";
    bool first = true;
    for (const ReportEntry& e : r.entries) {
        if (!first) out += ",";
        first = false;
        out += "{\"label\":\"" + detail::json_escape(e.label) + "\"";
        out += ",\"computed\":{\"re\":" + detail::fmt_double(e.computed.real()) +
               ",\"im\":" + detail::fmt_double(e.computed.imag()) + "}";
        out += ",\"expected\":{\"re\":" + detail::fmt_double(e.expected.real()) +
               ",\"im\":" + detail::fmt_double(e.expected.imag()) + "}";
        out += ",\"source\":\"" + std::string(to_string(e.source)) + "\"";
        out += ",\"tolerance\":" + detail::fmt_double(e.tolerance);
        out += std::string(",\"pass\":") + (e.pass ? "true" : "false") + "}";
    }
    out += "],\"all_pass\":";
    out += r.all_pass() ? "true" : "false";
    out += "}";
    return out;
}

inline std::string to_table(const ScenarioReport& r) {
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.resize(w, ' ');
        return s;
    };
    std::string out = "scenario: " + r.name + "\n";
    out += pad("label", 44) + pad("computed", 26) + pad("expected", 26) + pad("tol", 10) +
           pad("source", 11) + "status\n";
    out += std::string(123, '-') + "\n";
    for (const ReportEntry& e : r.entries) {
        out += pad(e.label, 44);
        out += pad(detail::fmt_complex_short(e.computed), 26);
        out += pad(detail::fmt_complex_short(e.expected), 26);
        out += pad(detail::fmt_short(e.tolerance), 10);
        out += pad(to_string(e.source), 11);
        out += e.pass ? "pass" : "FAIL";
        out += "\n";
    }
    return out;
}

}  // namespace tsqm
