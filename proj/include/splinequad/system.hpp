#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "splinequad/bspline.hpp"
#include "splinequad/error.hpp"

namespace splinequad {

/// m nodes and m weights on [a,b]; the unknown vector is (nodes..., weights...).
struct QuadratureRule {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }

    double apply(const auto& f) const {
        double s = 0.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) s += weights[j] * f(nodes[j]);
        return s;
    }
};

/**
 * Assignment of every node to a nondegenerate span (left flat-knot index).
 * The exactness system is built on these spans: node j uses the polynomial
 * piece of its span, even when an iterate wanders outside it.
 */
struct NodalPattern {
    std::vector<std::size_t> spans;

    /// Node counts over all spans inside [a,b], degenerate ones included.
    std::vector<int> counts(const SplineSpace& space) const {
        std::vector<int> c(space.span_count(), 0);
        for (std::size_t s : spans) {
            if (s >= space.first_span() && s <= space.last_span()) ++c[s - space.first_span()];
        }
        return c;
    }

    friend bool operator==(const NodalPattern&, const NodalPattern&) = default;
};

struct NodeBox {
    double lo;
    double hi;
};

struct NodeDomain {
    std::vector<NodeBox> nodes;
    double weight_lo = 0.0;
    double weight_hi = 0.0;
};

/// Rows of the exactness system: the normalized basis, or the divided-difference
/// scaling B_i / (support length).
enum class RowScaling { normalized, divided_difference };

/// Optimal node count from d + i + 1 = 2m.
inline std::size_t node_count(const SplineSpace& space) {
    if (space.dim() % 2 != 0)
        throw error(errc::unsupported_target, "dimension odd: no optimal rule of this form");
    return static_cast<std::size_t>(space.dim() / 2);
}

namespace detail {

inline void check_rule_size(const SplineSpace& space, const QuadratureRule& rule) {
    if (rule.weights.size() != rule.nodes.size() || 2 * rule.nodes.size() != static_cast<std::size_t>(space.dim()))
        throw error(errc::dimension_mismatch, "rule has " + std::to_string(rule.nodes.size()) +
                                                  " nodes but the space has dimension " +
                                                  std::to_string(space.dim()));
}

inline double row_scale(const SplineSpace& space, std::size_t i, RowScaling scaling) {
    if (scaling == RowScaling::normalized) return 1.0;
    const auto& u = space.knots();
    return 1.0 / (u[i + space.degree() + 1] - u[i]);
}

} // namespace detail

/// Span containing t; on a knot, `prefer_left` picks the span ending there.
inline std::size_t span_for_node(const SplineSpace& space, double t, bool prefer_left = false) {
    const double x = std::min(std::max(t, space.a()), space.b());
    std::size_t s = find_span(space, x);
    if (prefer_left && x > space.a() && space.knots()[s] == x) {
        while (s > space.first_span() && space.is_degenerate(s - 1)) --s;
        if (s > space.first_span()) --s;
    }
    return s;
}

inline NodalPattern pattern_from_rule(const SplineSpace& space, const QuadratureRule& rule,
                                      bool prefer_left = false) {
    NodalPattern p;
    for (double t : rule.nodes) p.spans.push_back(span_for_node(space, t, prefer_left));
    return p;
}

/// Checks spans are nondegenerate, in range and nondecreasing over nodes.
inline void check_pattern(const SplineSpace& space, const NodalPattern& pattern) {
    if (2 * pattern.spans.size() != static_cast<std::size_t>(space.dim()))
        throw error(errc::dimension_mismatch, "pattern size does not match dim/2");
    for (std::size_t j = 0; j < pattern.spans.size(); ++j) {
        const std::size_t s = pattern.spans[j];
        if (s < space.first_span() || s > space.last_span() || space.is_degenerate(s))
            throw error(errc::invalid_pattern, "node " + std::to_string(j + 1) + " assigned to an invalid span");
        if (j > 0 && s < pattern.spans[j - 1])
            throw error(errc::invalid_pattern, "pattern assignments must be nondecreasing");
    }
}

/// Every basis row must be touched by some node; otherwise the Jacobian is structurally singular.
inline void check_structure(const SplineSpace& space, const NodalPattern& pattern) {
    const auto p = static_cast<std::size_t>(space.degree());
    for (std::size_t i = 0; i < static_cast<std::size_t>(space.dim()); ++i) {
        bool touched = false;
        for (std::size_t s : pattern.spans) touched = touched || (s >= i && s <= i + p);
        if (!touched)
            throw error(errc::invalid_pattern,
                        "basis function " + std::to_string(i) + " has no node on its support");
    }
}

inline NodeDomain node_domain(const SplineSpace& space, const NodalPattern& pattern) {
    check_pattern(space, pattern);
    NodeDomain d;
    d.weight_lo = 0.0;
    d.weight_hi = space.b() - space.a();
    for (std::size_t s : pattern.spans) d.nodes.push_back({space.knots()[s], space.knots()[s + 1]});
    return d;
}

/// F_i = sum_j w_j B_i(tau_j) - I[B_i], with node j evaluated on its pattern span.
inline std::vector<double> assemble_residual(const SplineSpace& space, const QuadratureRule& rule,
                                             const NodalPattern& pattern,
                                             RowScaling scaling = RowScaling::normalized) {
    detail::check_rule_size(space, rule);
    if (pattern.spans.size() != rule.size()) throw error(errc::dimension_mismatch, "pattern/rule size mismatch");
    const auto dim = static_cast<std::size_t>(space.dim());
    std::vector<double> f(dim, 0.0);
    for (std::size_t j = 0; j < rule.size(); ++j) {
        const auto bv = eval_basis_in_span(space, pattern.spans[j], rule.nodes[j]);
        const std::size_t first = bv.first_index(space.degree());
        for (std::size_t r = 0; r < bv.values.size(); ++r) f[first + r] += rule.weights[j] * bv.values[r];
    }
    for (std::size_t i = 0; i < dim; ++i)
        f[i] = (f[i] - basis_integral(space, static_cast<int>(i))) * detail::row_scale(space, i, scaling);
    return f;
}

/// Residual with each node evaluated on the span that contains it (right-continuous).
inline std::vector<double> assemble_residual(const SplineSpace& space, const QuadratureRule& rule) {
    detail::check_rule_size(space, rule);
    for (double t : rule.nodes) {
        if (!(t >= space.a() && t <= space.b()))
            throw error(errc::out_of_range, "node outside [a,b]");
    }
    return assemble_residual(space, rule, pattern_from_rule(space, rule));
}

/// Dense Jacobian in unknown order (tau_1..tau_m, w_1..w_m).
inline Eigen::MatrixXd assemble_jacobian(const SplineSpace& space, const QuadratureRule& rule,
                                         const NodalPattern& pattern,
                                         RowScaling scaling = RowScaling::normalized) {
    detail::check_rule_size(space, rule);
    const std::size_t m = rule.size();
    const auto dim = static_cast<Eigen::Index>(space.dim());
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim, dim);
    for (std::size_t j = 0; j < m; ++j) {
        const auto bv = eval_basis_in_span(space, pattern.spans[j], rule.nodes[j], true);
        const std::size_t first = bv.first_index(space.degree());
        for (std::size_t r = 0; r < bv.values.size(); ++r) {
            const std::size_t i = first + r;
            const double scale = detail::row_scale(space, i, scaling);
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                scale * rule.weights[j] * bv.derivatives[r];
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m + j)) = scale * bv.values[r];
        }
    }
    return jac;
}

inline Eigen::MatrixXd assemble_jacobian(const SplineSpace& space, const QuadratureRule& rule) {
    return assemble_jacobian(space, rule, pattern_from_rule(space, rule));
}

/// (1/dim) * ||F||_2
inline double residual_norm(const std::vector<double>& f) {
    double s = 0.0;
    for (double v : f) s += v * v;
    return f.empty() ? 0.0 : std::sqrt(s) / static_cast<double>(f.size());
}

inline double residual_norm(const SplineSpace& space, const QuadratureRule& rule) {
    return residual_norm(assemble_residual(space, rule));
}

inline double residual_norm(const SplineSpace& space, const QuadratureRule& rule, const NodalPattern& pattern) {
    return residual_norm(assemble_residual(space, rule, pattern));
}

} // namespace splinequad
