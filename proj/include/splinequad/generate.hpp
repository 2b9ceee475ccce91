#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "splinequad/continuation.hpp"
#include "splinequad/knots.hpp"
#include "splinequad/sources.hpp"

namespace splinequad {

struct GenerateOptions {
    PathKind kind = PathKind::geodesic;
    std::optional<std::size_t> steps;
    /// Zero-based interior coordinate order for edge paths; empty = identity.
    std::vector<std::size_t> order;
    TraceOptions trace;
};

struct GenerateResult {
    SourceBundle source;
    TraceResult trace;
};

/// Traces a known source rule to `target`.
inline GenerateResult generate_from(const SourceBundle& source, const FlatKnots& target,
                                    const GenerateOptions& opts = {}) {
    const HomotopyPath path = build_schedule(source.knots, target, opts.kind, opts.steps, opts.order);
    TraceResult tr = trace(path, source.rule, source.pattern, opts.trace);
    return {source, std::move(tr)};
}

/// Optimal rule for a cubic target, starting from the composite analytic source.
inline GenerateResult generate_rule(const FlatKnots& target, const GenerateOptions& opts = {}) {
    SplineSpace space(target);
    node_count(space);
    return generate_from(source_for_target(target), target, opts);
}

/**
 * Rule for uniform C^1 cubic splines (n elements, double interior knots),
 * obtained by tracing from the composite source. Usable as an alternative
 * source for targets with 2(n-1) interior knots.
 */
inline SourceBundle bootstrap_uniform_c1_source(int n_elements, double a, double b,
                                                const TraceOptions& opts = {}) {
    const FlatKnots c1 = make_uniform_multiple(n_elements, 2, a, b);
    GenerateOptions g;
    g.trace = opts;
    g.trace.keep_records = false;
    GenerateResult r = generate_rule(c1, g);
    return {c1, std::move(r.trace.rule), std::move(r.trace.pattern)};
}

} // namespace splinequad
