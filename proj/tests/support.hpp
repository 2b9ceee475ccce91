#pragma once

// Reference implementations used only by the tests. They share no code with
// the library: basis functions come from the textbook recursion and integrals
// from Simpson's rule, which is exact on every cubic piece.

#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "splinequad/splinequad.hpp"

#ifndef SPLINEQUAD_FIXTURES
#error "SPLINEQUAD_FIXTURES must point at data/fixtures.json"
#endif

namespace oracle {

/// B_{i,p}(t) by the recursive definition; right-continuous, left limit at the last knot.
inline double basis(const std::vector<double>& u, int i, int p, double t) {
    const auto n = static_cast<int>(u.size());
    if (p == 0) {
        const auto ui = static_cast<std::size_t>(i);
        if (u[ui] <= t && t < u[ui + 1]) return 1.0;
        if (t == u.back() && u[ui] < u[ui + 1] && u[ui + 1] == u.back()) return 1.0;
        return 0.0;
    }
    const auto ui = static_cast<std::size_t>(i);
    const auto up = static_cast<std::size_t>(i + p);
    double v = 0.0;
    if (u[up] > u[ui]) v += (t - u[ui]) / (u[up] - u[ui]) * basis(u, i, p - 1, t);
    if (i + p + 1 < n && u[up + 1] > u[ui + 1])
        v += (u[up + 1] - t) / (u[up + 1] - u[ui + 1]) * basis(u, i + 1, p - 1, t);
    return v;
}

inline std::vector<double> flat(const splinequad::FlatKnots& k) {
    return {k.values().begin(), k.values().end()};
}

/// Integral of B_{i,p} by Simpson's rule on every nonempty knot interval.
inline double integral(const std::vector<double>& u, int i, int p) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < u.size(); ++k) {
        const double lo = u[k], hi = u[k + 1];
        if (!(lo < hi)) continue;
        const double mid = 0.5 * (lo + hi);
        // right end taken one ulp inside, i.e. the limit from the left
        const double fl = basis(u, i, p, lo);
        const double fm = basis(u, i, p, mid);
        const double fh = basis(u, i, p, std::nextafter(hi, lo));
        s += (hi - lo) / 6.0 * (fl + 4.0 * fm + fh);
    }
    return s;
}

/// Residual sum_j w_j B_i(tau_j) - I[B_i] with plain pointwise evaluation.
inline std::vector<double> residual(const splinequad::FlatKnots& k, const splinequad::QuadratureRule& r) {
    const auto u = flat(k);
    const int p = k.degree();
    std::vector<double> f;
    for (int i = 0; i < k.dim(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < r.size(); ++j) s += r.weights[j] * basis(u, i, p, r.nodes[j]);
        f.push_back(s - integral(u, i, p));
    }
    return f;
}

inline double norm(const std::vector<double>& f) {
    double s = 0.0;
    for (double v : f) s += v * v;
    return std::sqrt(s) / static_cast<double>(f.size());
}

} // namespace oracle

namespace testing_support {

inline const splinequad::FixtureSet& fixtures() {
    static const splinequad::FixtureSet set = splinequad::load_fixtures(SPLINEQUAD_FIXTURES);
    return set;
}

/// Full Table rule on [0,1] rebuilt from the stored symmetric half.
inline splinequad::QuadratureRule fixture_rule(int n) {
    for (const auto& f : fixtures().rules) {
        if (f.n_elements != n) continue;
        const std::size_t m = static_cast<std::size_t>(n + 3) / 2;
        splinequad::QuadratureRule r{0.0, 1.0, std::vector<double>(m), std::vector<double>(m)};
        for (std::size_t j = 0; j < m; ++j) {
            const bool stored = j < f.taus.size();
            r.nodes[j] = stored ? f.taus[j] : 1.0 - f.taus[m - 1 - j];
            r.weights[j] = stored ? f.weights[j] : f.weights[m - 1 - j];
        }
        return r;
    }
    throw std::runtime_error("no fixture for N=" + std::to_string(n));
}

/// Generated uniform-target results, computed once per N and shared across tests.
inline const splinequad::GenerateResult& uniform_rule(int n) {
    static std::mutex mu;
    static std::map<int, splinequad::GenerateResult> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, splinequad::generate_rule(splinequad::make_uniform_open(n, 0.0, 1.0))).first;
    return it->second;
}

inline double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
    return x.size() == y.size() ? d : INFINITY;
}

inline double rule_distance(const splinequad::QuadratureRule& a, const splinequad::QuadratureRule& b) {
    return std::max(max_abs_diff(a.nodes, b.nodes), max_abs_diff(a.weights, b.weights));
}

} // namespace testing_support
