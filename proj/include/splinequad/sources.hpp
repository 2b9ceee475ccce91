#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "splinequad/bspline.hpp"
#include "splinequad/knots.hpp"
#include "splinequad/system.hpp"

namespace splinequad {

/// A space together with a known optimal rule and its nodal pattern.
struct SourceBundle {
    FlatKnots knots;
    QuadratureRule rule;
    NodalPattern pattern;
};

/// Classical two-point Gauss rule on [a,b]; exact on cubics.
inline QuadratureRule gauss_legendre_2pt(double a, double b) {
    if (!(a < b)) throw error(errc::invalid_argument, "interval must satisfy a < b");
    const double c = 0.5 * (a + b);
    const double d = (b - a) / (2.0 * std::sqrt(3.0));
    return {a, b, {c - d, c + d}, {0.5 * (b - a), 0.5 * (b - a)}};
}

/**
 * Optimal rule for two cubic elements [c, c+h], [c+h, c+2h] joined C^1 at c+h.
 * The space has dimension 6; symmetry reduces the moment conditions to
 * 1, u^2 and |u|^3 about the joint.
 */
inline QuadratureRule c1_pair_rule(double c, double h) {
    if (!(h > 0.0)) throw error(errc::invalid_argument, "element length must be positive");
    const double mid = c + h;
    return {c, c + 2.0 * h, {mid - 0.75 * h, mid, mid + 0.75 * h}, {16.0 / 27.0 * h, 22.0 / 27.0 * h, 16.0 / 27.0 * h}};
}

inline FlatKnots c1_pair_knots(double c, double h) {
    const double a = c, mid = c + h, b = c + 2.0 * h;
    return FlatKnots({a, a, a, a, mid, mid, b, b, b, b}, 3);
}

inline FlatKnots bernstein_knots(double a, double b) {
    return FlatKnots({a, a, a, a, b, b, b, b}, 3);
}

struct SourceBlockInput {
    FlatKnots knots;
    QuadratureRule rule;
};

/**
 * Glues abutting cubic blocks with multiplicity-4 junctions. A node sitting on
 * a knot is assigned to the span left of it.
 */
inline SourceBundle compose_source(const std::vector<SourceBlockInput>& blocks) {
    if (blocks.empty()) throw error(errc::invalid_argument, "no source blocks");
    std::vector<double> flat;
    QuadratureRule rule{blocks.front().knots.a(), blocks.back().knots.b(), {}, {}};
    for (std::size_t k = 0; k < blocks.size(); ++k) {
        const FlatKnots& kn = blocks[k].knots;
        if (kn.degree() != 3) throw error(errc::invalid_argument, "source blocks must be cubic");
        if (k > 0) {
            const double prev = blocks[k - 1].knots.b();
            if (std::abs(kn.a() - prev) > knot_tolerance_factor * (rule.b - rule.a))
                throw error(errc::invalid_argument, "source blocks do not abut");
        }
        const auto v = kn.values();
        if (k == 0) {
            flat.insert(flat.end(), v.begin(), v.end() - 4);
        } else {
            flat.insert(flat.end(), v.begin() + 4, v.end() - 4);
        }
        // junction (or b) with multiplicity p+1
        flat.insert(flat.end(), 4, kn.b());
        rule.nodes.insert(rule.nodes.end(), blocks[k].rule.nodes.begin(), blocks[k].rule.nodes.end());
        rule.weights.insert(rule.weights.end(), blocks[k].rule.weights.begin(), blocks[k].rule.weights.end());
    }
    FlatKnots knots(std::move(flat), 3);
    const SplineSpace space(knots);
    NodalPattern pattern = pattern_from_rule(space, rule, true);
    return {std::move(knots), std::move(rule), std::move(pattern)};
}

/**
 * Source space for a cubic target with the same total interior multiplicity i:
 * i/4 + 1 single elements when i = 0 mod 4, otherwise one leftmost C^1 pair
 * followed by single elements. Blocks have equal width.
 */
inline SourceBundle source_for_target(const FlatKnots& target) {
    if (target.degree() != 3) throw error(errc::invalid_argument, "sources are defined for cubic targets only");
    const std::size_t i = target.interior_count();
    if (i % 2 != 0) throw error(errc::unsupported_target, "dimension odd: no optimal rule of this form");
    const bool with_pair = i % 4 == 2;
    const std::size_t blocks = with_pair ? (i - 2) / 4 + 1 : i / 4 + 1;
    const double a = target.a(), b = target.b();
    const double width = (b - a) / static_cast<double>(blocks);

    std::vector<SourceBlockInput> in;
    for (std::size_t k = 0; k < blocks; ++k) {
        const double lo = k == 0 ? a : a + width * static_cast<double>(k);
        const double hi = k + 1 == blocks ? b : a + width * static_cast<double>(k + 1);
        if (k == 0 && with_pair) {
            const double h = 0.5 * (hi - lo);
            FlatKnots kn({lo, lo, lo, lo, lo + h, lo + h, hi, hi, hi, hi}, 3);
            QuadratureRule r = c1_pair_rule(lo, h);
            r.b = hi;
            in.push_back({std::move(kn), std::move(r)});
        } else {
            in.push_back({bernstein_knots(lo, hi), gauss_legendre_2pt(lo, hi)});
        }
    }
    return compose_source(in);
}

} // namespace splinequad
