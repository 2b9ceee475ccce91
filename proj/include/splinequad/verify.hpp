#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splinequad/bspline.hpp"
#include "splinequad/error.hpp"
#include "splinequad/system.hpp"

namespace splinequad {

/// n-point Gauss-Legendre rule on [-1,1] (Newton on the Legendre recurrence).
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw error(errc::invalid_argument, "need at least one point");
    QuadratureRule r{-1.0, 1.0, std::vector<double>(static_cast<std::size_t>(n)),
                     std::vector<double>(static_cast<std::size_t>(n))};
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(n - 1 - i);
        r.nodes[lo] = -x;
        r.nodes[hi] = x;
        r.weights[lo] = w;
        r.weights[hi] = w;
    }
    return r;
}

/// f(t) = sum_i c_i B_i(t)
inline double eval_spline(const SplineSpace& space, std::span<const double> coeffs, double t) {
    const auto bv = eval_basis(space, t);
    const std::size_t first = bv.first_index(space.degree());
    double s = 0.0;
    for (std::size_t r = 0; r < bv.values.size(); ++r) s += coeffs[first + r] * bv.values[r];
    return s;
}

/**
 * Integral of sum_i c_i B_i over [a,b], computed by 10-point Gauss-Legendre on
 * every nondegenerate span and cross-checked against sum_i c_i I[B_i].
 */
inline double reference_integral(const SplineSpace& space, std::span<const double> coeffs) {
    if (coeffs.size() != static_cast<std::size_t>(space.dim()))
        throw error(errc::dimension_mismatch, "coefficient count must equal the space dimension");
    static const QuadratureRule gl = gauss_legendre(10);
    const auto& u = space.knots();
    double numeric = 0.0;
    for (std::size_t s : space.nondegenerate_spans()) {
        const double lo = u[s], hi = u[s + 1];
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        double part = 0.0;
        for (std::size_t k = 0; k < gl.size(); ++k) {
            const auto bv = eval_basis_in_span(space, s, mid + half * gl.nodes[k]);
            const std::size_t first = bv.first_index(space.degree());
            double f = 0.0;
            for (std::size_t r = 0; r < bv.values.size(); ++r) f += coeffs[first + r] * bv.values[r];
            part += gl.weights[k] * f;
        }
        numeric += half * part;
    }
    double exact = 0.0;
    for (std::size_t i = 0; i < coeffs.size(); ++i) exact += coeffs[i] * basis_integral(space, static_cast<int>(i));
    if (std::abs(exact - numeric) > 1e-13 * (1.0 + std::abs(exact)))
        throw error(errc::oracle_inconsistency, "exact and numerical spline integrals disagree");
    return numeric;
}

/// Worst |Q[f] - I[f]| / (1 + |I[f]|) over random splines with coefficients in [-1,1].
inline double check_exactness(const QuadratureRule& rule, const SplineSpace& space, int trials,
                              std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> c(static_cast<std::size_t>(space.dim()));
    double worst = 0.0;
    for (int k = 0; k < trials; ++k) {
        for (double& v : c) v = dist(rng);
        const double exact = reference_integral(space, c);
        const double q = rule.apply([&](double t) { return eval_spline(space, c, t); });
        worst = std::max(worst, std::abs(q - exact) / (1.0 + std::abs(exact)));
    }
    return worst;
}

/// Published reference rules on [0,1]; only the symmetric left half is stored.
struct RuleFixture {
    int n_elements;
    std::vector<double> taus;
    std::vector<double> weights;
};

struct PathFixture {
    std::vector<int> perm;
    double tau1, tau2, w1, w2;
};

struct FixtureSet {
    std::vector<RuleFixture> rules;
    std::vector<PathFixture> paths;
};

inline FixtureSet load_fixtures(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw error(errc::parse_error, "cannot open fixture file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw error(errc::parse_error, std::string("malformed fixture file: ") + e.what());
    }
    FixtureSet set;
    for (const auto& r : j.at("rules"))
        set.rules.push_back({r.at("N").get<int>(), r.at("taus").get<std::vector<double>>(),
                             r.at("weights").get<std::vector<double>>()});
    for (const auto& p : j.at("paths"))
        set.paths.push_back({p.at("perm").get<std::vector<int>>(), p.at("tau1").get<double>(),
                             p.at("tau2").get<double>(), p.at("w1").get<double>(), p.at("w2").get<double>()});
    return set;
}

/// Largest deviation from the stored half-table for target N.
inline double compare_fixture(const QuadratureRule& rule, const FixtureSet& set, int n_elements) {
    auto it = std::find_if(set.rules.begin(), set.rules.end(),
                           [&](const RuleFixture& f) { return f.n_elements == n_elements; });
    if (it == set.rules.end()) throw error(errc::invalid_argument, "unknown fixture N=" + std::to_string(n_elements));
    if (rule.size() < it->taus.size()) throw error(errc::dimension_mismatch, "rule shorter than fixture");
    double dev = 0.0;
    for (std::size_t j = 0; j < it->taus.size(); ++j) {
        dev = std::max(dev, std::abs(rule.nodes[j] - it->taus[j]));
        dev = std::max(dev, std::abs(rule.weights[j] - it->weights[j]));
    }
    return dev;
}

/// Largest deviation from a stored edge-path result (tau_1, tau_2, w_1, w_2).
inline double compare_fixture(const QuadratureRule& rule, const FixtureSet& set, const std::vector<int>& perm) {
    auto it = std::find_if(set.paths.begin(), set.paths.end(), [&](const PathFixture& f) { return f.perm == perm; });
    if (it == set.paths.end()) throw error(errc::invalid_argument, "unknown path fixture");
    if (rule.size() < 2) throw error(errc::dimension_mismatch, "rule shorter than fixture");
    return std::max({std::abs(rule.nodes[0] - it->tau1), std::abs(rule.nodes[1] - it->tau2),
                     std::abs(rule.weights[0] - it->w1), std::abs(rule.weights[1] - it->w2)});
}

} // namespace splinequad
