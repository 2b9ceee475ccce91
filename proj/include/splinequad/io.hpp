#pragma once

#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splinequad/continuation.hpp"
#include "splinequad/knots.hpp"
#include "splinequad/system.hpp"

namespace splinequad {

using json = nlohmann::json;

inline std::string format_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json knots_to_json(const FlatKnots& flat) {
    const KnotVector kv = group_multiplicities(flat, flat.eps());
    json list = json::array();
    for (const Knot& k : kv.knots) list.push_back({{"x", k.x}, {"mult", k.mult}});
    return {{"a", kv.a}, {"b", kv.b}, {"degree", kv.degree}, {"knots", list}};
}

/// Accepts {"a","b","degree","knots":[{"x","mult"}]} (boundary entries optional) or {"flat":[...]}.
inline FlatKnots knots_from_json(const json& j) {
    try {
        const int degree = j.value("degree", 3);
        if (j.contains("flat")) return FlatKnots(j.at("flat").get<std::vector<double>>(), degree);
        KnotVector kv;
        kv.degree = degree;
        kv.a = j.at("a").get<double>();
        kv.b = j.at("b").get<double>();
        for (const auto& k : j.at("knots")) kv.knots.push_back({k.at("x").get<double>(), k.at("mult").get<int>()});
        if (kv.knots.empty() || kv.knots.front().x != kv.a) kv.knots.insert(kv.knots.begin(), {kv.a, degree + 1});
        if (kv.knots.back().x != kv.b) kv.knots.push_back({kv.b, degree + 1});
        return kv.flatten();
    } catch (const json::exception& e) {
        throw error(errc::parse_error, std::string("malformed knot JSON: ") + e.what());
    }
}

/// One "x mult" pair per line, boundary knots included; '#' starts a comment.
inline FlatKnots knots_from_text(const std::string& text, int degree = 3) {
    std::istringstream in(text);
    std::string line;
    KnotVector kv;
    kv.degree = degree;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double x;
        int mult;
        if (!(ls >> x)) {
            std::string rest;
            if (std::istringstream(line) >> rest)
                throw error(errc::parse_error, "line " + std::to_string(lineno) + ": expected \"x mult\"");
            continue;
        }
        if (!(ls >> mult)) throw error(errc::parse_error, "line " + std::to_string(lineno) + ": missing multiplicity");
        kv.knots.push_back({x, mult});
    }
    if (kv.knots.size() < 2) throw error(errc::parse_error, "knot file needs at least the two boundary knots");
    kv.a = kv.knots.front().x;
    kv.b = kv.knots.back().x;
    return kv.flatten();
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error(errc::parse_error, "cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Knot file by content: JSON if it starts with '{', text otherwise.
inline FlatKnots load_knots(const std::string& path) {
    const std::string text = read_file(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            return knots_from_json(json::parse(text));
        } catch (const json::exception& e) {
            throw error(errc::parse_error, std::string("malformed knot JSON: ") + e.what());
        }
    }
    return knots_from_text(text);
}

struct RuleDocument {
    QuadratureRule rule;
    std::optional<FlatKnots> knots;
    double residual = 0.0;
    std::vector<int> pattern;
    int steps_taken = 0;
    int pattern_switches = 0;
};

inline json rule_to_json(const RuleDocument& doc) {
    json j;
    j["interval"] = {doc.rule.a, doc.rule.b};
    j["degree"] = doc.knots ? doc.knots->degree() : 3;
    if (doc.knots) j["knots"] = knots_to_json(*doc.knots);
    j["nodes"] = doc.rule.nodes;
    j["weights"] = doc.rule.weights;
    j["residual"] = doc.residual;
    j["pattern"] = doc.pattern;
    j["steps_taken"] = doc.steps_taken;
    j["pattern_switches"] = doc.pattern_switches;
    return j;
}

inline RuleDocument rule_from_json(const json& j) {
    try {
        RuleDocument doc;
        const auto iv = j.at("interval").get<std::vector<double>>();
        if (iv.size() != 2) throw error(errc::parse_error, "interval must have two entries");
        doc.rule.a = iv[0];
        doc.rule.b = iv[1];
        doc.rule.nodes = j.at("nodes").get<std::vector<double>>();
        doc.rule.weights = j.at("weights").get<std::vector<double>>();
        if (doc.rule.nodes.size() != doc.rule.weights.size())
            throw error(errc::dimension_mismatch, "nodes and weights differ in length");
        if (j.contains("knots")) doc.knots = knots_from_json(j.at("knots"));
        doc.residual = j.value("residual", 0.0);
        if (j.contains("pattern")) doc.pattern = j.at("pattern").get<std::vector<int>>();
        doc.steps_taken = j.value("steps_taken", 0);
        doc.pattern_switches = j.value("pattern_switches", 0);
        return doc;
    } catch (const json::exception& e) {
        throw error(errc::parse_error, std::string("malformed rule JSON: ") + e.what());
    }
}

inline void write_trace_header(std::ostream& out, std::size_t knot_count, std::size_t nodes) {
    out << "t";
    for (std::size_t i = 0; i < knot_count; ++i) out << ",knot_" << i;
    for (std::size_t j = 1; j <= nodes; ++j) out << ",tau_" << j;
    for (std::size_t j = 1; j <= nodes; ++j) out << ",w_" << j;
    out << ",residual,event\n";
}

inline void write_trace_row(std::ostream& out, const TraceRecord& r) {
    out << format_g17(r.t);
    for (double k : r.knots.values()) out << ',' << format_g17(k);
    for (double v : r.rule.nodes) out << ',' << format_g17(v);
    for (double v : r.rule.weights) out << ',' << format_g17(v);
    out << ',' << format_g17(r.residual) << ',' << to_string(r.event) << '\n';
}

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& records) {
    if (records.empty()) return;
    write_trace_header(out, records.front().knots.size(), records.front().rule.size());
    for (const auto& r : records) write_trace_row(out, r);
}

} // namespace splinequad
