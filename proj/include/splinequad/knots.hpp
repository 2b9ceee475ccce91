#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "splinequad/error.hpp"

namespace splinequad {

/// Relative tolerance used for multiplicity grouping and node-on-knot tests.
inline constexpr double knot_tolerance_factor = 1e-12;

/**
 * Open knot vector in expanded ("flat") form.
 *
 * The first and last degree+1 entries equal the interval endpoints; everything
 * in between is an interior knot. This is the coordinate vector that the
 * continuation moves.
 */
class FlatKnots {
public:
    FlatKnots(std::vector<double> values, int degree = 3)
        : values_(std::move(values)), degree_(degree) {
        validate();
    }

    int degree() const noexcept { return degree_; }
    double a() const noexcept { return values_.front(); }
    double b() const noexcept { return values_.back(); }
    double eps() const noexcept { return knot_tolerance_factor * (b() - a()); }

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

    /// Dimension of the spline space over these knots.
    int dim() const noexcept { return static_cast<int>(values_.size()) - degree_ - 1; }

    /// Total interior multiplicity.
    std::size_t interior_count() const noexcept {
        return values_.size() - 2 * static_cast<std::size_t>(degree_ + 1);
    }

    std::span<const double> interior() const noexcept {
        return std::span<const double>(values_).subspan(degree_ + 1, interior_count());
    }

    /// Same boundary, new interior coordinates (sorted before validation).
    FlatKnots with_interior(std::vector<double> interior) const {
        if (interior.size() != interior_count())
            throw error(errc::dimension_mismatch, "interior coordinate count changed");
        std::sort(interior.begin(), interior.end());
        std::vector<double> v;
        v.reserve(values_.size());
        v.insert(v.end(), degree_ + 1, a());
        v.insert(v.end(), interior.begin(), interior.end());
        v.insert(v.end(), degree_ + 1, b());
        return FlatKnots(std::move(v), degree_);
    }

    bool is_symmetric(double tol) const {
        const double c = a() + b();
        const std::size_t n = values_.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(values_[i] + values_[n - 1 - i] - c) > tol) return false;
        }
        return true;
    }

    friend bool operator==(const FlatKnots& l, const FlatKnots& r) {
        return l.degree_ == r.degree_ && l.values_ == r.values_;
    }

private:
    void validate() const {
        if (degree_ < 1) throw error(errc::invalid_argument, "degree must be at least 1");
        const std::size_t p1 = static_cast<std::size_t>(degree_) + 1;
        if (values_.size() < 2 * p1)
            throw error(errc::invalid_argument, "knot vector too short for its degree");
        for (double v : values_) {
            if (!std::isfinite(v)) throw error(errc::invalid_argument, "non-finite knot");
        }
        if (!(values_.front() < values_.back()))
            throw error(errc::invalid_argument, "knot interval must satisfy a < b");
        for (std::size_t i = 1; i < values_.size(); ++i) {
            if (values_[i] < values_[i - 1])
                throw error(errc::invalid_argument, "knots must be nondecreasing");
        }
        for (std::size_t i = 1; i < p1; ++i) {
            if (values_[i] != values_.front() || values_[values_.size() - 1 - i] != values_.back())
                throw error(errc::invalid_argument, "boundary knots must have multiplicity degree+1");
        }
        std::size_t run = 1;
        for (std::size_t i = 1; i < values_.size(); ++i) {
            run = values_[i] == values_[i - 1] ? run + 1 : 1;
            if (run > p1) throw error(errc::invalid_argument, "knot multiplicity exceeds degree+1");
        }
    }

    std::vector<double> values_;
    int degree_;
};

struct Knot {
    double x;
    int mult;
};

/// Knot locations with multiplicities, boundary entries included.
struct KnotVector {
    double a = 0.0;
    double b = 1.0;
    int degree = 3;
    std::vector<Knot> knots;

    FlatKnots flatten() const {
        std::vector<double> flat;
        for (std::size_t k = 0; k < knots.size(); ++k) {
            if (k > 0 && !(knots[k].x > knots[k - 1].x))
                throw error(errc::invalid_argument, "knot locations must be strictly increasing");
            if (knots[k].mult < 1 || knots[k].mult > degree + 1)
                throw error(errc::invalid_argument, "knot multiplicity outside 1..degree+1");
            flat.insert(flat.end(), static_cast<std::size_t>(knots[k].mult), knots[k].x);
        }
        if (flat.empty() || flat.front() != a || flat.back() != b)
            throw error(errc::invalid_argument, "knot list must start at a and end at b");
        return FlatKnots(std::move(flat), degree);
    }
};

/// Merges runs of values closer than `tol` into one location.
inline KnotVector group_multiplicities(const FlatKnots& flat, double tol) {
    KnotVector kv{flat.a(), flat.b(), flat.degree(), {}};
    const auto v = flat.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!kv.knots.empty() && v[i] - v[i - 1] <= tol) {
            ++kv.knots.back().mult;
        } else {
            kv.knots.push_back({v[i], 1});
        }
    }
    // the last group always represents b exactly
    kv.knots.back().x = flat.b();
    return kv;
}

/// Uniform open cubic knots with N elements and simple interior knots.
inline FlatKnots make_uniform_open(int n_elements, double a, double b) {
    if (n_elements < 3 || n_elements % 2 == 0)
        throw error(errc::invalid_argument,
                    "uniform target needs an odd number of elements N >= 3 (dimension odd: no optimal rule of this form)");
    if (!(a < b)) throw error(errc::invalid_argument, "interval must satisfy a < b");
    std::vector<double> interior;
    for (int k = 1; k < n_elements; ++k)
        interior.push_back(a + (b - a) * static_cast<double>(k) / n_elements);
    std::vector<double> v(4, a);
    v.insert(v.end(), interior.begin(), interior.end());
    v.insert(v.end(), 4, b);
    return FlatKnots(std::move(v), 3);
}

/// Uniform open cubic knots with every interior breakpoint repeated `mult` times.
inline FlatKnots make_uniform_multiple(int n_elements, int mult, double a, double b) {
    if (n_elements < 1) throw error(errc::invalid_argument, "need at least one element");
    if (mult < 1 || mult > 4) throw error(errc::invalid_argument, "multiplicity outside 1..4");
    if (!(a < b)) throw error(errc::invalid_argument, "interval must satisfy a < b");
    std::vector<double> v(4, a);
    for (int k = 1; k < n_elements; ++k)
        v.insert(v.end(), static_cast<std::size_t>(mult), a + (b - a) * static_cast<double>(k) / n_elements);
    v.insert(v.end(), 4, b);
    return FlatKnots(std::move(v), 3);
}

/**
 * Graded cubic knots: element lengths shrink by `q` per element moving toward
 * the center of [a,b] and the layout is mirror-symmetric.
 */
inline FlatKnots make_graded(int n_elements, double q, double a, double b, int mult) {
    if (n_elements < 1) throw error(errc::invalid_argument, "need at least one element");
    if (!(q > 0.0)) throw error(errc::invalid_argument, "shrinking ratio must be positive");
    if (mult < 1 || mult > 4) throw error(errc::invalid_argument, "multiplicity outside 1..4");
    if (!(a < b)) throw error(errc::invalid_argument, "interval must satisfy a < b");

    std::vector<double> lengths(static_cast<std::size_t>(n_elements));
    for (int k = 0; k < n_elements; ++k) {
        const int from_edge = std::min(k, n_elements - 1 - k);
        lengths[static_cast<std::size_t>(k)] = std::pow(q, -from_edge);
    }
    const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);

    // breakpoints are placed from both ends so the result is exactly symmetric
    std::vector<double> breaks(static_cast<std::size_t>(n_elements - 1));
    double left = 0.0;
    for (int k = 0; k < n_elements - 1; ++k) {
        left += lengths[static_cast<std::size_t>(k)];
        breaks[static_cast<std::size_t>(k)] = left;
    }
    const double h = (b - a) / total;
    std::vector<double> v(4, a);
    for (int k = 0; k < n_elements - 1; ++k) {
        const double from_left = breaks[static_cast<std::size_t>(k)];
        const double from_right = total - from_left;
        const double x = from_left <= from_right ? a + h * from_left : b - h * from_right;
        v.insert(v.end(), static_cast<std::size_t>(mult), x);
    }
    v.insert(v.end(), 4, b);
    return FlatKnots(std::move(v), 3);
}

enum class PathKind { geodesic, edges };

inline const char* to_string(PathKind k) { return k == PathKind::geodesic ? "geodesic" : "edges"; }

/**
 * Continuous deformation of the interior knots from a source to a target
 * knot vector, sampled on a time grid 0 = t_0 < ... < t_M = 1.
 *
 * Geodesic paths interpolate every sorted interior coordinate linearly. Edge
 * paths move one coordinate at a time in the order given by `order`
 * (zero-based interior indices); each coordinate owns an equal share of [0,1].
 */
class HomotopyPath {
public:
    HomotopyPath(FlatKnots source, FlatKnots target, PathKind kind,
                 std::vector<std::size_t> order, std::vector<double> times)
        : source_(std::move(source)), target_(std::move(target)), kind_(kind),
          order_(std::move(order)), times_(std::move(times)) {}

    const FlatKnots& source() const noexcept { return source_; }
    const FlatKnots& target() const noexcept { return target_; }
    PathKind kind() const noexcept { return kind_; }
    std::span<const std::size_t> order() const noexcept { return order_; }
    std::span<const double> times() const noexcept { return times_; }
    std::size_t steps() const noexcept { return times_.size() - 1; }

    FlatKnots at_time(double t) const {
        if (!(t >= 0.0 && t <= 1.0)) throw error(errc::out_of_range, "path time outside [0,1]");
        if (t == 0.0) return source_;
        if (t == 1.0) return target_;
        const auto s = source_.interior();
        const auto g = target_.interior();
        std::vector<double> x(s.begin(), s.end());
        if (kind_ == PathKind::geodesic) {
            for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1.0 - t) * s[i] + t * g[i];
        } else if (!order_.empty()) {
            const double scaled = t * static_cast<double>(order_.size());
            const std::size_t active = std::min(static_cast<std::size_t>(scaled), order_.size() - 1);
            const double local = scaled - static_cast<double>(active);
            for (std::size_t k = 0; k < active; ++k) x[order_[k]] = g[order_[k]];
            const std::size_t c = order_[active];
            x[c] = (1.0 - local) * s[c] + local * g[c];
        }
        return source_.with_interior(std::move(x));
    }

    FlatKnots knots_at(std::size_t i) const {
        if (i >= times_.size()) throw error(errc::out_of_range, "step index outside the schedule");
        return at_time(times_[i]);
    }

private:
    FlatKnots source_;
    FlatKnots target_;
    PathKind kind_;
    std::vector<std::size_t> order_;
    std::vector<double> times_;
};

inline std::size_t default_steps(PathKind kind, std::size_t moving) {
    return kind == PathKind::geodesic ? 200 : 20 * std::max<std::size_t>(moving, 1);
}

/// Uniform schedule between compatible knot vectors. Empty `order` means identity order.
inline HomotopyPath build_schedule(const FlatKnots& source, const FlatKnots& target, PathKind kind,
                                   std::optional<std::size_t> steps = std::nullopt,
                                   std::vector<std::size_t> order = {}) {
    if (source.degree() != target.degree() || source.size() != target.size() ||
        source.a() != target.a() || source.b() != target.b())
        throw error(errc::invalid_argument, "source and target knot vectors are incompatible");
    const std::size_t moving = source.interior_count();
    if (kind == PathKind::edges) {
        if (order.empty()) {
            order.resize(moving);
            std::iota(order.begin(), order.end(), std::size_t{0});
        }
        std::vector<std::size_t> sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t k = 0; k < sorted.size(); ++k) {
            if (sorted[k] != k || sorted.size() != moving)
                throw error(errc::invalid_argument, "edge order must be a permutation of the interior knots");
        }
    } else {
        order.clear();
    }
    const std::size_t m = steps.value_or(default_steps(kind, moving));
    if (m < 1) throw error(errc::invalid_argument, "schedule needs at least one step");
    std::vector<double> times(m + 1);
    for (std::size_t i = 0; i <= m; ++i) times[i] = static_cast<double>(i) / static_cast<double>(m);
    times.back() = 1.0;
    return HomotopyPath(source, target, kind, std::move(order), std::move(times));
}

} // namespace splinequad
