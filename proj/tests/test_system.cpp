#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace splinequad;
using testing_support::fixture_rule;

namespace {

errc code_of(auto&& f) {
    try {
        f();
    } catch (const error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return errc::invalid_argument;
}

QuadratureRule random_rule(const SplineSpace& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(s.a(), s.b()), w(0.0, 0.5);
    QuadratureRule r{s.a(), s.b(), {}, {}};
    for (int j = 0; j < s.dim() / 2; ++j) {
        r.nodes.push_back(u(rng));
        r.weights.push_back(w(rng));
    }
    std::sort(r.nodes.begin(), r.nodes.end());
    return r;
}

} // namespace

TEST(NodeCount, HalfTheDimension) {
    EXPECT_EQ(node_count(SplineSpace(make_uniform_open(5, 0.0, 1.0))), 4u);
    EXPECT_EQ(node_count(SplineSpace(make_uniform_multiple(6, 2, 0.0, 1.0))), 7u);
    try {
        node_count(SplineSpace(make_uniform_multiple(4, 1, 0.0, 1.0)));
        FAIL();
    } catch (const error& e) {
        EXPECT_EQ(e.code(), errc::unsupported_target);
        EXPECT_STREQ(e.what(), "dimension odd: no optimal rule of this form");
    }
}

TEST(Residual, ZeroRuleOnThreeElements) {
    const SplineSpace s(make_uniform_open(3, 0.0, 1.0));
    const QuadratureRule zero{0.0, 1.0, {0.2, 0.5, 0.8}, {0.0, 0.0, 0.0}};
    const double expected = oracle::norm(oracle::residual(s.knots(), zero));
    EXPECT_NEAR(residual_norm(s, zero), expected, 1e-16);
    EXPECT_NEAR(residual_norm(s, zero), std::sqrt(7.0) / 36.0, 1e-16);
}

TEST(Residual, PublishedRulesSolveTheirSystems) {
    for (int n : {3, 5, 7, 9, 11, 39}) {
        const SplineSpace s(make_uniform_open(n, 0.0, 1.0));
        const QuadratureRule r = fixture_rule(n);
        EXPECT_LE(residual_norm(s, r), 1e-15) << n;
        EXPECT_LE(residual_norm(s, r, pattern_from_rule(s, r)), 1e-15) << n;
    }
}

TEST(Residual, MatchesOracleOnRandomRules) {
    std::mt19937_64 rng(5);
    for (const FlatKnots& k : {make_uniform_open(7, 0.0, 1.0), make_graded(6, 2.0, -1.0, 1.0, 2),
                               make_uniform_multiple(3, 3, 0.0, 3.0)}) {
        const SplineSpace s(k);
        for (int trial = 0; trial < 20; ++trial) {
            const QuadratureRule r = random_rule(s, rng);
            const auto f = assemble_residual(s, r);
            const auto g = oracle::residual(k, r);
            ASSERT_EQ(f.size(), g.size());
            for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(f[i], g[i], 1e-14);
            // with each node on its own span the piecewise and pointwise systems coincide
            const auto h = assemble_residual(s, r, pattern_from_rule(s, r), RowScaling::normalized);
            for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(f[i], h[i], 1e-15);
        }
    }
}

TEST(Residual, PatternUsesThePolynomialPieceOfItsSpan) {
    const SplineSpace s(make_uniform_open(5, 0.0, 1.0));
    QuadratureRule r = fixture_rule(5);
    NodalPattern p = pattern_from_rule(s, r);
    // move node 2 across 0.4 but keep its old span: the pieces differ there
    r.nodes[1] = 0.45;
    const auto natural = assemble_residual(s, r);
    const auto piecewise = assemble_residual(s, r, p, RowScaling::normalized);
    double diff = 0.0;
    for (std::size_t i = 0; i < natural.size(); ++i) diff = std::max(diff, std::abs(natural[i] - piecewise[i]));
    EXPECT_GT(diff, 1e-8);
    const auto bv = eval_basis_in_span(s, p.spans[1], 0.45);
    double expect_row = -basis_integral(s, 5);
    for (std::size_t j = 0; j < r.size(); ++j) {
        if (j == 1) continue;
        expect_row += r.weights[j] * eval_single(s, 5, r.nodes[j]).value;
    }
    // basis 5 has no piece on span 4, so node 2 contributes nothing to row 5
    EXPECT_EQ(bv.first_index(3), 1u);
    EXPECT_NEAR(piecewise[5], expect_row, 1e-15);
}

TEST(Residual, DivideDifferenceScalingRescalesRows) {
    const SplineSpace s(make_graded(5, 2.0, 0.0, 1.0, 1));
    std::mt19937_64 rng(9);
    const QuadratureRule r = random_rule(s, rng);
    const NodalPattern p = pattern_from_rule(s, r);
    const auto f = assemble_residual(s, r, p, RowScaling::normalized);
    const auto g = assemble_residual(s, r, p, RowScaling::divided_difference);
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double len = s.knots()[i + 4] - s.knots()[i];
        EXPECT_NEAR(g[i] * len, f[i], 1e-15);
    }
}

TEST(Residual, SizeAndDomainErrors) {
    const SplineSpace s(make_uniform_open(5, 0.0, 1.0));
    QuadratureRule r = fixture_rule(5);
    QuadratureRule short_rule = r;
    short_rule.nodes.pop_back();
    short_rule.weights.pop_back();
    EXPECT_EQ(code_of([&] { assemble_residual(s, short_rule); }), errc::dimension_mismatch);
    r.nodes[0] = -0.1;
    EXPECT_EQ(code_of([&] { assemble_residual(s, r); }), errc::out_of_range);
}

TEST(Jacobian, MatchesCentralDifferences) {
    std::mt19937_64 rng(21);
    for (const FlatKnots& k : {make_uniform_open(9, 0.0, 1.0), make_graded(6, 3.0, 0.0, 2.0, 2)}) {
        const SplineSpace s(k);
        for (int trial = 0; trial < 5; ++trial) {
            const QuadratureRule r = random_rule(s, rng);
            const NodalPattern p = pattern_from_rule(s, r);
            for (RowScaling sc : {RowScaling::normalized, RowScaling::divided_difference}) {
                const Eigen::MatrixXd jac = assemble_jacobian(s, r, p, sc);
                const std::size_t m = r.size();
                const double h = 1e-6;
                for (std::size_t c = 0; c < 2 * m; ++c) {
                    QuadratureRule plus = r, minus = r;
                    auto& vp = c < m ? plus.nodes[c] : plus.weights[c - m];
                    auto& vm = c < m ? minus.nodes[c] : minus.weights[c - m];
                    vp += h;
                    vm -= h;
                    const auto fp = assemble_residual(s, plus, p, sc);
                    const auto fm = assemble_residual(s, minus, p, sc);
                    for (std::size_t i = 0; i < 2 * m; ++i) {
                        const double fd = (fp[i] - fm[i]) / (2 * h);
                        const double an = jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
                        EXPECT_LE(std::abs(fd - an), 1e-6 * std::max(1.0, std::abs(an))) << i << "," << c;
                    }
                }
            }
        }
    }
}

TEST(Jacobian, NaturalFormMatchesPatternFormInsideSpans) {
    const SplineSpace s(make_uniform_open(7, 0.0, 1.0));
    const QuadratureRule r = fixture_rule(7);
    const Eigen::MatrixXd a = assemble_jacobian(s, r);
    const Eigen::MatrixXd b = assemble_jacobian(s, r, pattern_from_rule(s, r), RowScaling::normalized);
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Pattern, CountsAndValidation) {
    const SplineSpace s(make_uniform_open(5, 0.0, 1.0));
    const NodalPattern p = pattern_from_rule(s, fixture_rule(5));
    EXPECT_EQ(p.counts(s), (std::vector<int>{1, 1, 0, 1, 1}));
    EXPECT_NO_THROW(check_pattern(s, p));
    EXPECT_NO_THROW(check_structure(s, p));

    EXPECT_EQ(code_of([&] { check_pattern(s, NodalPattern{{3, 4, 6}}); }), errc::dimension_mismatch);
    EXPECT_EQ(code_of([&] { check_pattern(s, NodalPattern{{3, 5, 4, 7}}); }), errc::invalid_pattern);
    EXPECT_EQ(code_of([&] { check_pattern(s, NodalPattern{{2, 4, 6, 7}}); }), errc::invalid_pattern);
    EXPECT_EQ(code_of([&] { check_pattern(s, NodalPattern{{3, 4, 6, 8}}); }), errc::invalid_pattern);
    // no node near the right end: the last basis functions are untouched
    EXPECT_EQ(code_of([&] { check_structure(s, NodalPattern{{3, 3, 3, 4}}); }), errc::invalid_pattern);

    const SplineSpace d(make_uniform_multiple(3, 3, 0.0, 1.0));
    EXPECT_NO_THROW(check_pattern(d, NodalPattern{{3, 3, 6, 9, 9}}));
    EXPECT_EQ(code_of([&] { check_pattern(d, NodalPattern{{3, 4, 6, 6, 9}}); }), errc::invalid_pattern);
}

TEST(Pattern, NodeOnKnotPreferLeft) {
    const SplineSpace s(make_uniform_multiple(2, 2, 0.0, 1.0));
    EXPECT_EQ(span_for_node(s, 0.5), 5u);
    EXPECT_EQ(span_for_node(s, 0.5, true), 3u);
    EXPECT_EQ(span_for_node(s, 0.0, true), 3u);
    EXPECT_EQ(span_for_node(s, 1.0, true), 5u);
}

TEST(Pattern, DomainBoxesAreSpans) {
    const SplineSpace s(make_uniform_open(5, 0.0, 2.0));
    const NodalPattern p{{3, 4, 6, 7}};
    const NodeDomain d = node_domain(s, p);
    ASSERT_EQ(d.nodes.size(), 4u);
    EXPECT_DOUBLE_EQ(d.nodes[1].lo, 0.4);
    EXPECT_DOUBLE_EQ(d.nodes[1].hi, 0.8);
    EXPECT_EQ(d.weight_lo, 0.0);
    EXPECT_EQ(d.weight_hi, 2.0);
}

TEST(QuadratureRuleApply, WeightedSum) {
    const QuadratureRule r{0.0, 1.0, {0.25, 0.75}, {0.5, 0.5}};
    EXPECT_DOUBLE_EQ(r.apply([](double x) { return x * x; }), 0.3125);
}
