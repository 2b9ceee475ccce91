#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "splinequad/system.hpp"

namespace splinequad {

inline constexpr double default_tolerance = 1e-15;

struct NewtonOptions {
    double tol = default_tolerance;
    int max_iter = 50;
    int max_halvings = 20;
    /// Extra Newton steps taken after the tolerance is met (only if at least one step was needed).
    int polish_steps = 2;
    RowScaling scaling = RowScaling::normalized;
};

enum class NewtonStatus { converged, exited_domain, diverged };

/// Node `node` left its span through flat knot `knot_index`; direction +1 = rightwards.
struct Crossing {
    std::size_t node;
    std::size_t knot_index;
    double knot;
    int direction;
};

struct NewtonResult {
    NewtonStatus status = NewtonStatus::diverged;
    QuadratureRule rule;
    std::vector<Crossing> crossings;
    int iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
    std::vector<double> residual_history;
    double rcond = 0.0;
    std::string info;
};

/**
 * Node-domain exit test.
 *
 * A node strictly beyond a span boundary (by more than eps) has crossed it. A
 * node within eps of a boundary counts as crossing only while the iteration is
 * still moving it outward; a converged node sitting on a knot belongs to the
 * closed box and is left alone.
 */
inline std::vector<Crossing> find_crossings(const SplineSpace& space, const NodalPattern& pattern,
                                            const QuadratureRule& rule, const std::vector<double>& displacement,
                                            bool converged) {
    std::vector<Crossing> out;
    const double eps = space.eps();
    const auto& u = space.knots();
    for (std::size_t j = 0; j < rule.size(); ++j) {
        const std::size_t s = pattern.spans[j];
        const double tau = rule.nodes[j];
        const double lo = u[s];
        const double hi = u[s + 1];
        const double d = displacement.empty() ? 0.0 : displacement[j];
        if (tau > hi + eps || (!converged && tau > hi - eps && d > 0.0)) {
            out.push_back({j, s + 1, hi, +1});
        } else if (tau < lo - eps || (!converged && tau < lo + eps && d < 0.0)) {
            out.push_back({j, s, lo, -1});
        }
    }
    return out;
}

namespace detail {

inline bool all_finite(const QuadratureRule& r) {
    for (double v : r.nodes)
        if (!std::isfinite(v)) return false;
    for (double v : r.weights)
        if (!std::isfinite(v)) return false;
    return true;
}

inline QuadratureRule step(const QuadratureRule& x, const Eigen::VectorXd& dx, double lambda) {
    QuadratureRule y = x;
    const std::size_t m = x.size();
    for (std::size_t j = 0; j < m; ++j) {
        y.nodes[j] += lambda * dx(static_cast<Eigen::Index>(j));
        y.weights[j] += lambda * dx(static_cast<Eigen::Index>(m + j));
    }
    return y;
}

} // namespace detail

/// Damped Newton-Raphson on the exactness system of `pattern`, warm-started at `guess`.
inline NewtonResult newton_solve(const SplineSpace& space, const NodalPattern& pattern,
                                 const QuadratureRule& guess, const NewtonOptions& opts = {}) {
    if (!(opts.tol > 0.0)) throw error(errc::invalid_argument, "tolerance must be positive");
    check_pattern(space, pattern);
    check_structure(space, pattern);
    if (guess.size() != pattern.spans.size()) throw error(errc::dimension_mismatch, "guess/pattern size mismatch");

    const std::size_t m = guess.size();
    NewtonResult res;
    res.rule = guess;
    auto f = assemble_residual(space, res.rule, pattern, opts.scaling);
    res.residual = residual_norm(f);
    res.residual_history.push_back(res.residual);

    std::vector<double> displacement(m, 0.0);
    int polished = 0;
    for (int it = 0;; ++it) {
        const bool converged = res.residual <= opts.tol;
        if (converged && (res.iterations == 0 || polished >= opts.polish_steps)) {
            res.status = NewtonStatus::converged;
            return res;
        }
        if (!converged && it >= opts.max_iter) {
            res.status = NewtonStatus::diverged;
            res.info = "no convergence after " + std::to_string(opts.max_iter) + " iterations";
            return res;
        }

        const Eigen::MatrixXd jac = assemble_jacobian(space, res.rule, pattern, opts.scaling);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        res.rcond = lu.rcond();
        if (!(res.rcond > std::numeric_limits<double>::epsilon())) {
            if (converged) {
                res.status = NewtonStatus::converged;
                return res;
            }
            res.status = NewtonStatus::diverged;
            res.info = "singular Jacobian (rcond = " + std::to_string(res.rcond) + ")";
            return res;
        }
        const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
        const Eigen::VectorXd dx = lu.solve(rhs);
        if (!dx.allFinite()) {
            res.status = NewtonStatus::diverged;
            res.info = "non-finite Newton step";
            return res;
        }

        // full step, halved while the residual does not decrease
        double lambda = 1.0;
        QuadratureRule trial;
        std::vector<double> ft;
        double rt = 0.0;
        bool accepted = false;
        for (int h = 0; h <= opts.max_halvings; ++h, lambda *= 0.5) {
            trial = detail::step(res.rule, dx, lambda);
            if (!detail::all_finite(trial)) continue;
            ft = assemble_residual(space, trial, pattern, opts.scaling);
            rt = residual_norm(ft);
            if (rt < res.residual) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (converged) {
                res.status = NewtonStatus::converged;
                return res;
            }
            res.status = NewtonStatus::diverged;
            res.info = "residual stagnated at " + std::to_string(res.residual);
            return res;
        }

        for (std::size_t j = 0; j < m; ++j) displacement[j] = trial.nodes[j] - res.rule.nodes[j];
        res.rule = std::move(trial);
        f = std::move(ft);
        res.residual = rt;
        res.residual_history.push_back(rt);
        if (converged) {
            ++polished;
        } else {
            ++res.iterations;
        }

        const bool now_converged = res.residual <= opts.tol;
        res.crossings = find_crossings(space, pattern, res.rule, displacement, now_converged);
        if (!res.crossings.empty()) {
            res.status = NewtonStatus::exited_domain;
            return res;
        }
    }
}

} // namespace splinequad
