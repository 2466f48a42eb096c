#pragma once

// JSON/CSV serialization. Complex numbers are [re, im] pairs; CSV numbers use
// 17 significant digits with '.' as decimal separator regardless of locale.

#include <array>
#include <charconv>
#include <chrono>
#include <ctime>
#include <map>
#include <string>

#include <json.hpp>

#include "tasep/bethe.hpp"
#include "tasep/montecarlo.hpp"
#include "tasep/oracle.hpp"

namespace tasep::io {

using nlohmann::json;

inline constexpr const char *tool_version = "1.0.0";

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json &j) {
    if (!j.is_array() || j.size() != 2) {
        throw DomainError("expected a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

/// Shortest-roundtrip is not wanted here: fixed 17 significant digits.
inline std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
    return {buf.data(), res.ptr};
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

struct RunManifest {
    std::string command;
    RingShape shape;
    std::map<std::string, json> parameters;
    std::string tool_version = io::tool_version;
    std::string timestamp = utc_timestamp();
};

inline json to_json(const RunManifest &m) {
    json params = json::object();
    for (const auto &[k, v] : m.parameters) {
        params[k] = v;
    }
    return {{"command", m.command},
            {"M", m.shape.M},
            {"N", m.shape.N},
            {"parameters", params},
            {"tool_version", m.tool_version},
            {"timestamp", m.timestamp}};
}

inline json to_json(const BetheSolution &s) {
    json w = json::array();
    for (const cplx x : s.w) {
        w.push_back(to_json(x));
    }
    return {{"w", w},
            {"B", to_json(s.B)},
            {"E", to_json(s.energy)},
            {"U2", to_json(s.U2)},
            {"theta1", to_json(s.theta1)},
            {"residual", s.residual},
            {"subset", s.subset}};
}

inline json to_json(const SolutionCatalog &c) {
    json sols = json::array();
    for (const auto &s : c.solutions) {
        sols.push_back(to_json(s));
    }
    const auto &d = c.diagnostics;
    return {{"M", c.shape.M},
            {"N", c.shape.N},
            {"includes_stationary", c.includes_stationary},
            {"solutions", sols},
            {"diagnostics",
             {{"subsets", d.subsets},
              {"stationary_subsets", d.stationary_subsets},
              {"retried_subsets", d.retried_subsets},
              {"failed_subsets", d.failed_subsets},
              {"label_collisions", d.label_collisions},
              {"duplicates_merged", d.duplicates_merged},
              {"messages", d.messages}}}};
}

/// Reads the catalog schema written by to_json; derived fields are recomputed.
inline SolutionCatalog catalog_from_json(const json &j) {
    SolutionCatalog c;
    c.shape = {j.at("M").get<int>(), j.at("N").get<int>()};
    c.shape.validate();
    for (const auto &s : j.at("solutions")) {
        std::vector<cplx> w;
        for (const auto &x : s.at("w")) {
            w.push_back(complex_from_json(x));
        }
        BetheSolution sol = make_solution(std::move(w), c.shape);
        if (s.contains("subset")) {
            sol.subset = s.at("subset").get<std::vector<int>>();
        }
        c.solutions.push_back(std::move(sol));
    }
    return c;
}

inline json to_json(const SpectrumReport &r) {
    json ev = json::array();
    for (const cplx x : r.eigenvalues) {
        ev.push_back(to_json(x));
    }
    return {{"eigenvalues", ev}, {"zero_index", r.zero_index}, {"gap", r.gap}};
}

inline json to_json(const McEstimate &e) {
    return {{"mean", e.mean}, {"std_error", e.std_error}, {"samples", e.samples}};
}

} // namespace tasep::io
