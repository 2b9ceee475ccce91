#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "splinequad/error.hpp"
#include "splinequad/knots.hpp"

namespace splinequad {

/// Spline space of a given degree over an open knot vector (normalized B-spline basis).
class SplineSpace {
public:
    explicit SplineSpace(FlatKnots knots) : knots_(std::move(knots)) {}

    const FlatKnots& knots() const noexcept { return knots_; }
    int degree() const noexcept { return knots_.degree(); }
    int dim() const noexcept { return knots_.dim(); }
    double a() const noexcept { return knots_.a(); }
    double b() const noexcept { return knots_.b(); }
    double eps() const noexcept { return knots_.eps(); }

    /// Span s covers [knots[s], knots[s+1]]; spans inside [a,b] are first_span()..last_span().
    std::size_t first_span() const noexcept { return static_cast<std::size_t>(degree()); }
    std::size_t last_span() const noexcept { return knots_.size() - static_cast<std::size_t>(degree()) - 2; }
    std::size_t span_count() const noexcept { return last_span() - first_span() + 1; }

    bool is_degenerate(std::size_t span) const { return !(knots_[span] < knots_[span + 1]); }

    std::vector<std::size_t> nondegenerate_spans() const {
        std::vector<std::size_t> out;
        for (std::size_t s = first_span(); s <= last_span(); ++s)
            if (!is_degenerate(s)) out.push_back(s);
        return out;
    }

private:
    FlatKnots knots_;
};

/// Nonzero basis functions on one span: indices span-p .. span.
struct BasisValues {
    std::size_t span = 0;
    std::vector<double> values;
    std::vector<double> derivatives;

    std::size_t first_index(int degree) const { return span - static_cast<std::size_t>(degree); }
};

/// Right-continuous span lookup; t == b maps to the last nondegenerate span.
inline std::size_t find_span(const SplineSpace& space, double t) {
    if (!(t >= space.a() && t <= space.b()))
        throw error(errc::out_of_range, "evaluation point outside [a,b]");
    const auto v = space.knots().values();
    if (t == space.b()) {
        auto it = std::lower_bound(v.begin(), v.end(), space.b());
        return static_cast<std::size_t>(it - v.begin()) - 1;
    }
    auto it = std::upper_bound(v.begin(), v.end(), t);
    return static_cast<std::size_t>(it - v.begin()) - 1;
}

/**
 * Evaluates the polynomial pieces that the basis functions span-p..span take
 * on the given (nondegenerate) span. `t` may lie outside the span; the result
 * is then the polynomial extension of that piece.
 */
inline BasisValues eval_basis_in_span(const SplineSpace& space, std::size_t span, double t,
                                      bool with_derivative = false) {
    if (span < space.first_span() || span > space.last_span() || space.is_degenerate(span))
        throw error(errc::out_of_range, "span index is not a nondegenerate span of the space");
    const int p = space.degree();
    const auto& u = space.knots();
    const std::size_t n = static_cast<std::size_t>(p) + 1;

    std::vector<double> left(n), right(n), values(n, 0.0), lower;
    values[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        if (j == p && with_derivative) lower.assign(values.begin(), values.begin() + p);
        left[j] = t - u[span + 1 - j];
        right[j] = u[span + j] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = values[r] / (right[r + 1] + left[j - r]);
            values[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        values[j] = saved;
    }

    BasisValues out{span, std::move(values), {}};
    if (with_derivative) {
        out.derivatives.assign(n, 0.0);
        // N'_{i,p} = p (N_{i,p-1}/(u_{i+p}-u_i) - N_{i+1,p-1}/(u_{i+p+1}-u_{i+1})), i = span-p+r
        for (int r = 0; r <= p; ++r) {
            const std::size_t i = span - p + r;
            double d = 0.0;
            if (r >= 1) d += lower[r - 1] / (u[i + p] - u[i]);
            if (r <= p - 1) d -= lower[r] / (u[i + p + 1] - u[i + 1]);
            out.derivatives[r] = p * d;
        }
    }
    return out;
}

inline BasisValues eval_basis(const SplineSpace& space, double t, bool with_derivative = false) {
    return eval_basis_in_span(space, find_span(space, t), t, with_derivative);
}

/// Exact integral of basis function i: support length / (p+1).
inline double basis_integral(const SplineSpace& space, int i) {
    if (i < 0 || i >= space.dim()) throw error(errc::out_of_range, "basis index out of range");
    const auto& u = space.knots();
    const std::size_t k = static_cast<std::size_t>(i);
    return (u[k + space.degree() + 1] - u[k]) / (space.degree() + 1);
}

struct BasisPoint {
    double value = 0.0;
    double derivative = 0.0;
};

inline BasisPoint eval_single(const SplineSpace& space, int i, double t, bool with_derivative = false) {
    if (i < 0 || i >= space.dim()) throw error(errc::out_of_range, "basis index out of range");
    const auto bv = eval_basis(space, t, with_derivative);
    const auto first = static_cast<int>(bv.first_index(space.degree()));
    if (i < first || i > first + space.degree()) return {};
    const auto r = static_cast<std::size_t>(i - first);
    return {bv.values[r], with_derivative ? bv.derivatives[r] : 0.0};
}

} // namespace splinequad
