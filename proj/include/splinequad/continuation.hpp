#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "splinequad/knots.hpp"
#include "splinequad/solver.hpp"
#include "splinequad/system.hpp"

namespace splinequad {

enum class TraceEvent { none, pattern_switch, bisection };

inline const char* to_string(TraceEvent e) {
    switch (e) {
    case TraceEvent::none: return "none";
    case TraceEvent::pattern_switch: return "pattern-switch";
    case TraceEvent::bisection: return "bisection";
    }
    return "none";
}

/// One accepted point of the traced rule.
struct TraceRecord {
    double t;
    FlatKnots knots;
    QuadratureRule rule;
    double residual;
    NodalPattern pattern;
    TraceEvent event;
};

struct TraceOptions {
    NewtonOptions newton;
    int max_bisection_depth = 40;
    /// Pattern switches allowed within one step before the step is bisected; 0 = 4 * span count.
    int max_switches_per_step = 0;
    /// Crossings reported by iterates with a larger residual are not trusted; the step is bisected.
    double max_switch_residual = 1e-6;
    bool keep_records = true;
    std::function<void(const TraceRecord&)> on_record;
};

struct TraceResult {
    QuadratureRule rule;
    NodalPattern pattern;
    std::vector<TraceRecord> records;
    int steps_taken = 0;
    int pattern_switches = 0;
    int bisections = 0;
    int weight_warnings = 0;
};

/**
 * Moves every crossing node into the neighbouring nondegenerate span on the
 * other side of the crossed knot.
 */
inline NodalPattern switch_pattern(const SplineSpace& space, const NodalPattern& pattern,
                                   std::span<const Crossing> crossings) {
    NodalPattern out = pattern;
    for (const Crossing& c : crossings) {
        if (c.node >= out.spans.size()) throw error(errc::out_of_range, "crossing names an unknown node");
        std::size_t s = out.spans[c.node];
        if (c.direction > 0) {
            do {
                if (s >= space.last_span())
                    throw error(errc::out_of_range, "node " + std::to_string(c.node + 1) + " pushed beyond b");
                ++s;
            } while (space.is_degenerate(s));
        } else {
            do {
                if (s <= space.first_span())
                    throw error(errc::out_of_range, "node " + std::to_string(c.node + 1) + " pushed below a");
                --s;
            } while (space.is_degenerate(s));
        }
        out.spans[c.node] = s;
    }
    return out;
}

/**
 * Remaining time points of a trace. Bisection inserts the midpoint between the
 * last accepted time and the pending one.
 */
class TimeSchedule {
public:
    TimeSchedule(std::span<const double> grid, int max_depth = 40) : max_depth_(max_depth) {
        // stored in reverse so the next time is at the back
        for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
            if (*it > 0.0) pending_.push_back({*it, 0});
        }
    }

    bool done() const noexcept { return pending_.empty(); }
    double next() const { return pending_.back().t; }
    int next_depth() const { return pending_.back().depth; }
    std::size_t remaining() const noexcept { return pending_.size(); }
    void accept() { pending_.pop_back(); }

    /// Returns the inserted time; throws continuation-stalled once the depth limit is exceeded.
    double bisect(double last_accepted) {
        const int depth = pending_.back().depth + 1;
        if (depth > max_depth_)
            throw error(errc::continuation_stalled,
                        "continuation stalled: bisection depth exceeded after t = " + std::to_string(last_accepted));
        const double mid = 0.5 * (last_accepted + pending_.back().t);
        pending_.push_back({mid, depth});
        return mid;
    }

private:
    struct Pending {
        double t;
        int depth;
    };
    std::vector<Pending> pending_;
    int max_depth_;
};

namespace detail {

/// Reassigns nodes whose span collapsed to the span now containing them.
inline NodalPattern carry_pattern(const SplineSpace& space, const NodalPattern& pattern,
                                  const QuadratureRule& rule) {
    NodalPattern out = pattern;
    for (std::size_t j = 0; j < out.spans.size(); ++j) {
        if (space.is_degenerate(out.spans[j])) out.spans[j] = span_for_node(space, rule.nodes[j]);
    }
    return out;
}

inline bool weights_in_bounds(const QuadratureRule& r) {
    for (double w : r.weights)
        if (w < 0.0 || w > r.b - r.a) return false;
    return true;
}

} // namespace detail

/**
 * Traces the quadrature rule from the source end of `path` to its target.
 *
 * Each step warm-starts Newton from the previous accepted rule. A node leaving
 * its span switches the pattern and restarts Newton from the exited iterate;
 * any other failure bisects the step.
 */
inline TraceResult trace(const HomotopyPath& path, const QuadratureRule& source_rule,
                         const NodalPattern& source_pattern, const TraceOptions& opts = {}) {
    const SplineSpace source_space(path.source());
    const std::size_t m = node_count(source_space);
    if (source_rule.size() != m || source_rule.weights.size() != m)
        throw error(errc::dimension_mismatch, "source rule does not have dim/2 nodes");
    check_pattern(source_space, source_pattern);
    const double r0 = residual_norm(source_space, source_rule, source_pattern);
    if (!(r0 <= opts.newton.tol))
        throw error(errc::invalid_source, "source rule residual " + std::to_string(r0) + " exceeds tolerance");

    TraceResult out;
    out.rule = source_rule;
    out.pattern = source_pattern;
    auto emit = [&](TraceRecord rec) {
        if (!detail::weights_in_bounds(rec.rule)) ++out.weight_warnings;
        if (opts.on_record) opts.on_record(rec);
        if (opts.keep_records) out.records.push_back(std::move(rec));
    };
    emit({0.0, path.source(), source_rule, r0, source_pattern, TraceEvent::none});

    const int switch_limit =
        opts.max_switches_per_step > 0 ? opts.max_switches_per_step : 4 * static_cast<int>(source_space.span_count());

    TimeSchedule schedule(path.times(), opts.max_bisection_depth);
    double accepted_t = 0.0;
    while (!schedule.done()) {
        const double t = schedule.next();
        const SplineSpace space(path.at_time(t));
        bool ok = false;
        int switches = 0;
        NewtonResult res;
        NodalPattern pattern;
        try {
            pattern = detail::carry_pattern(space, out.pattern, out.rule);
            QuadratureRule guess = out.rule;
            while (true) {
                res = newton_solve(space, pattern, guess, opts.newton);
                if (res.status == NewtonStatus::converged) {
                    ok = true;
                    break;
                }
                if (res.status == NewtonStatus::diverged || switches >= switch_limit ||
                    res.residual > opts.max_switch_residual)
                    break;
                pattern = switch_pattern(space, pattern, res.crossings);
                guess = res.rule;
                ++switches;
            }
        } catch (const error& e) {
            if (e.code() != errc::invalid_pattern && e.code() != errc::out_of_range) throw;
            ok = false;
        }

        if (!ok) {
            schedule.bisect(accepted_t);
            ++out.bisections;
            continue;
        }

        const TraceEvent ev = switches > 0             ? TraceEvent::pattern_switch
                              : schedule.next_depth() > 0 ? TraceEvent::bisection
                                                          : TraceEvent::none;
        out.pattern_switches += switches;
        out.rule = res.rule;
        out.pattern = pattern;
        ++out.steps_taken;
        accepted_t = t;
        schedule.accept();
        emit({t, space.knots(), res.rule, residual_norm(space, res.rule, pattern), pattern, ev});
    }
    return out;
}

} // namespace splinequad
