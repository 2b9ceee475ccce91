#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "splinequad/splinequad.hpp"

namespace splinequad::cli {

enum exit_code : int {
    exit_ok = 0,
    exit_usage = 2,
    exit_unsupported = 3,
    exit_stalled = 4,
    exit_verify_failed = 5,
};

inline int exit_code_for(errc code) {
    switch (code) {
    case errc::unsupported_target: return exit_unsupported;
    case errc::continuation_stalled:
    case errc::invalid_source: return exit_stalled;
    case errc::dimension_mismatch:
    case errc::oracle_inconsistency: return exit_verify_failed;
    default: return exit_usage;
    }
}

/// Default tolerance, overridable through SPLINEQUAD_TOL.
inline double env_tolerance() {
    if (const char* s = std::getenv("SPLINEQUAD_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(s, &end);
        if (end != s && v > 0.0) return v;
    }
    return default_tolerance;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

inline double parse_double(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw error(errc::invalid_argument, "cannot parse " + what + ": '" + s + "'");
    }
}

inline int parse_int(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw error(errc::invalid_argument, "cannot parse " + what + ": '" + s + "'");
    }
}

/// Target selection shared by `generate` and `verify`.
struct TargetArgs {
    int uniform = 0;
    std::string knots_file;
    std::string graded;
    std::string interval = "0,1";

    void add_to(CLI::App& app) {
        auto* u = app.add_option("--uniform", uniform, "uniform C2 cubic target with N (odd) elements");
        auto* k = app.add_option("--knots", knots_file, "knot file (JSON or 'x mult' lines)");
        auto* g = app.add_option("--graded", graded, "graded target N,q,mult");
        u->excludes(k)->excludes(g);
        k->excludes(g);
        app.add_option("--interval", interval, "interval a,b for --uniform/--graded");
    }

    bool given() const { return uniform != 0 || !knots_file.empty() || !graded.empty(); }

    FlatKnots build() const {
        const auto iv = split(interval, ',');
        if (iv.size() != 2) throw error(errc::invalid_argument, "--interval expects a,b");
        const double a = parse_double(iv[0], "interval"), b = parse_double(iv[1], "interval");
        if (uniform != 0) {
            if (uniform > 0 && uniform % 2 == 0)
                throw error(errc::unsupported_target, "dimension odd: no optimal rule of this form");
            return make_uniform_open(uniform, a, b);
        }
        if (!knots_file.empty()) return load_knots(knots_file);
        if (!graded.empty()) {
            const auto parts = split(graded, ',');
            if (parts.size() != 3) throw error(errc::invalid_argument, "--graded expects N,q,mult");
            return make_graded(parse_int(parts[0], "N"), parse_double(parts[1], "q"), a, b,
                               parse_int(parts[2], "mult"));
        }
        throw error(errc::invalid_argument, "one of --uniform, --knots, --graded is required");
    }
};

/// Zero-based interior order from "4,1,3,2" (one-based) or "random:SEED".
inline std::vector<std::size_t> parse_order(const std::string& spec, std::size_t moving) {
    std::vector<std::size_t> order(moving);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (spec.empty()) return order;
    if (spec.rfind("random:", 0) == 0) {
        const auto seed = static_cast<std::uint64_t>(std::stoull(spec.substr(7)));
        std::mt19937_64 rng(seed);
        std::shuffle(order.begin(), order.end(), rng);
        return order;
    }
    order.clear();
    for (const auto& item : split(spec, ',')) {
        const int k = parse_int(item, "permutation entry");
        if (k < 1) throw error(errc::invalid_argument, "permutation entries are one-based");
        order.push_back(static_cast<std::size_t>(k - 1));
    }
    return order;
}

inline RuleDocument make_document(const FlatKnots& target, const TraceResult& tr) {
    const SplineSpace space(target);
    RuleDocument doc;
    doc.rule = tr.rule;
    doc.knots = target;
    doc.residual = residual_norm(space, tr.rule, tr.pattern);
    doc.pattern = tr.pattern.counts(space);
    doc.steps_taken = tr.steps_taken;
    doc.pattern_switches = tr.pattern_switches;
    return doc;
}

struct GenerateArgs {
    TargetArgs target;
    std::string path = "geodesic";
    std::string perm;
    std::size_t steps = 0;
    double tol = 0.0;
    std::string trace_file;
    std::string out_file;
};

inline int cmd_generate(const GenerateArgs& args, std::ostream& out, std::ostream& err) {
    const FlatKnots target = args.target.build();
    GenerateOptions opts;
    if (args.path == "edges") {
        opts.kind = PathKind::edges;
        opts.order = parse_order(args.perm, target.interior_count());
    } else if (args.path != "geodesic") {
        throw error(errc::invalid_argument, "--path must be geodesic or edges");
    } else if (!args.perm.empty()) {
        throw error(errc::invalid_argument, "--perm requires --path edges");
    }
    if (args.steps > 0) opts.steps = args.steps;
    opts.trace.newton.tol = args.tol > 0.0 ? args.tol : env_tolerance();

    std::ofstream trace_out;
    if (!args.trace_file.empty()) {
        trace_out.open(args.trace_file);
        if (!trace_out) throw error(errc::invalid_argument, "cannot write " + args.trace_file);
        bool header = false;
        opts.trace.on_record = [&](const TraceRecord& r) {
            if (!header) write_trace_header(trace_out, r.knots.size(), r.rule.size());
            header = true;
            write_trace_row(trace_out, r);
        };
    }
    opts.trace.keep_records = false;

    const GenerateResult res = generate_rule(target, opts);
    if (res.trace.weight_warnings > 0)
        err << "warning: weights left [0, b-a] at " << res.trace.weight_warnings << " accepted steps\n";
    const std::string text = rule_to_json(make_document(target, res.trace)).dump(2) + "\n";
    if (args.out_file.empty()) {
        out << text;
    } else {
        std::ofstream f(args.out_file);
        if (!f) throw error(errc::invalid_argument, "cannot write " + args.out_file);
        f << text;
    }
    return exit_ok;
}

struct VerifyArgs {
    std::string rule_file;
    TargetArgs target;
    double tol = 0.0;
    int trials = 100;
    std::uint64_t seed = 1;
};

inline int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream&) {
    RuleDocument doc = rule_from_json(json::parse(read_file(args.rule_file), nullptr, true));
    const FlatKnots knots = args.target.given() ? args.target.build()
                            : doc.knots        ? *doc.knots
                                               : throw error(errc::invalid_argument,
                                                             "rule file has no knots; pass a target");
    const SplineSpace space(knots);
    const double tol = args.tol > 0.0 ? args.tol : env_tolerance();
    if (2 * doc.rule.size() != static_cast<std::size_t>(space.dim()))
        throw error(errc::dimension_mismatch, "dimension mismatch: rule has " + std::to_string(doc.rule.size()) +
                                                  " nodes, space of dimension " + std::to_string(space.dim()));
    double residual = 0.0;
    double defect = 0.0;
    try {
        residual = residual_norm(space, doc.rule);
        defect = check_exactness(doc.rule, space, args.trials, args.seed);
    } catch (const error& e) {
        if (e.code() != errc::out_of_range) throw;
        out << "FAIL: " << e.what() << "\n";
        return exit_verify_failed;
    }
    const bool pass = residual <= tol;
    out << "residual: " << format_g17(residual) << "\n";
    out << "exactness defect: " << format_g17(defect) << " (" << args.trials << " random splines)\n";
    out << (pass ? "PASS" : "FAIL") << "\n";
    return pass ? exit_ok : exit_verify_failed;
}

struct TableArgs {
    std::string n_list;
    double tol = 0.0;
};

inline int cmd_table(const TableArgs& args, std::ostream& out, std::ostream&) {
    std::vector<int> ns;
    for (const auto& item : split(args.n_list, ','))
        if (item.find_first_not_of(" \t") != std::string::npos) ns.push_back(parse_int(item, "N"));
    if (ns.empty()) throw error(errc::invalid_argument, "--N-list is empty");
    for (int n : ns)
        if (n < 1) throw error(errc::invalid_argument, "N must be positive");
    GenerateOptions opts;
    opts.trace.newton.tol = args.tol > 0.0 ? args.tol : env_tolerance();
    opts.trace.keep_records = false;
    std::vector<std::future<GenerateResult>> jobs;
    for (int n : ns) {
        if (n % 2 == 0) throw error(errc::unsupported_target, "dimension odd: no optimal rule of this form");
        const FlatKnots target = make_uniform_open(n, 0.0, 1.0);
        jobs.push_back(std::async(std::launch::async, [target, opts] { return generate_rule(target, opts); }));
    }
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        const int n = ns[k];
        const GenerateResult r = jobs[k].get();
        const SplineSpace space(make_uniform_open(n, 0.0, 1.0));
        const double res = residual_norm(space, r.trace.rule, r.trace.pattern);
        const std::size_t rows = static_cast<std::size_t>((n + 1) / 4 + 1);
        char line[160];
        std::snprintf(line, sizeof line, "N = %d\n%3s  %-18s  %-18s  %s\n", n, "i", "tau_i", "w_i", "||r||");
        out << line;
        for (std::size_t i = 0; i < rows; ++i) {
            std::snprintf(line, sizeof line, "%3zu  %.16f  %.16f", i + 1, r.trace.rule.nodes[i], r.trace.rule.weights[i]);
            out << line;
            if (i == 0) out << "  " << format_g17(res);
            out << "\n";
        }
        out << "\n";
    }
    return exit_ok;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gaussian quadrature rules for cubic spline spaces by knot-vector continuation", "splinequad"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "trace the optimal rule for a target knot vector");
    gen.target.add_to(*g);
    g->add_option("--path", gen.path, "geodesic | edges");
    g->add_option("--perm", gen.perm, "edge order: one-based list like 4,1,3,2 or random:SEED");
    g->add_option("--steps", gen.steps, "number of schedule steps");
    g->add_option("--tol", gen.tol, "residual tolerance");
    g->add_option("--trace", gen.trace_file, "write the accepted steps as CSV");
    g->add_option("--out", gen.out_file, "write the rule JSON here instead of stdout");

    VerifyArgs ver;
    auto* v = app.add_subcommand("verify", "check a rule file against its spline space");
    v->add_option("rule", ver.rule_file, "rule JSON file")->required();
    ver.target.add_to(*v);
    v->add_option("--tol", ver.tol, "residual tolerance");
    v->add_option("--trials", ver.trials, "random splines for the exactness check");
    v->add_option("--seed", ver.seed, "seed of the random splines");

    TableArgs tab;
    auto* t = app.add_subcommand("table", "print the symmetric half of uniform C2 rules");
    t->add_option("--N-list", tab.n_list, "comma-separated odd N")->required();
    t->add_option("--tol", tab.tol, "residual tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }

    try {
        if (g->parsed()) return cmd_generate(gen, out, err);
        if (v->parsed()) return cmd_verify(ver, out, err);
        if (t->parsed()) return cmd_table(tab, out, err);
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    }
    return exit_usage;
}

} // namespace splinequad::cli
