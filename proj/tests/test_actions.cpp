#include <gtest/gtest.h>

#include "pseudoglue/actions.hpp"
#include "pseudoglue/exterior.hpp"
#include "pseudoglue/scenario.hpp"
#include "support.hpp"

using namespace pseudoglue;
using testing_support::Rng;

namespace {

Vec vector_table(const Vec& v) {
    Vec out = Vec::Zero(Eigen::Index{1} << v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(Eigen::Index{1} << i) = v(i);
    return out;
}

PseudoMetricForm random_form(Rng& rng, int n, int d) {
    FiberSpace s = rng.space(n, d);
    return validate_pseudometric(s, rng.metric_gram(s));
}

double spectral_norm(const Mat& m) { return m.size() ? Eigen::JacobiSVD<Mat>(m).singularValues()(0) : 0.0; }

}  // namespace

TEST(StandardAction, OnUnit) {
    Rng rng(31);
    auto g = random_form(rng, 3, 2);
    Vec v = rng.vector(3);
    Vec one = Vec::Zero(8);
    one(0) = 1.0;
    EXPECT_LT((standard_action(g, v, one) - vector_table(v)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(StandardAction, GeneratorOnItself) {
    Rng rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = random_form(rng, 3, rng.integer(0, 3));
        Vec e = rng.vector(3);
        Vec out = standard_action(g, e, vector_table(e));
        Vec expect = Vec::Zero(8);
        expect(0) = -e.dot(g.gram() * e);
        EXPECT_LT((out - expect).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(StandardAction, IsotropicVectorWedges) {
    Rng rng(33);
    auto g = random_form(rng, 3, 1);
    Vec u = g.space().comp_basis().col(0);
    Vec omega = rng.vector(8);
    Vec out = standard_action(g, u, omega);
    EXPECT_LT((out - wedge(vector_table(u), omega)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_THROW(standard_action(g, Vec::Zero(2), omega), Error);
}

TEST(StandardAction, ShiftsDegreeByOne) {
    Rng rng(34);
    const int n = 4;
    auto g = random_form(rng, n, 3);
    Mat c = standard_action_matrix(g.gram(), rng.vector(n));
    for (Blade src = 0; src < (Blade{1} << n); ++src)
        for (Blade dst = 0; dst < (Blade{1} << n); ++dst) {
            const int dk = grade(dst) - grade(src);
            if (dk != 1 && dk != -1) EXPECT_EQ(c(dst, src), 0.0);
        }
}

TEST(ExtendAction, ProductBladeIsComposition) {
    Rng rng(35);
    auto g = random_form(rng, 3, 2);
    CliffordFiberPtr f = make_clifford_fiber(g);
    std::vector<Mat> ops = blade_operators(*f);
    EXPECT_LT((ops[0b011] - ops[0b001] * ops[0b010]).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((ops[0b111] - ops[0b001] * ops[0b010] * ops[0b100]).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(approx_equal(ops[0], Mat::Identity(8, 8)));
}

TEST(ExtendAction, RelationAndModuleAxiom) {
    Rng rng(36);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = rng.integer(1, 4);
        auto g = random_form(rng, n, rng.integer(0, n));
        CliffordFiberPtr f = make_clifford_fiber(g);
        Vec v = rng.vector(n), w = rng.vector(n);
        Mat cv = extend_action(*f, cl_vector(f, v).coeffs), cw = extend_action(*f, cl_vector(f, w).coeffs);
        const Eigen::Index size = cv.rows();
        EXPECT_LT(spectral_norm(cv * cv + v.dot(g.gram() * v) * Mat::Identity(size, size)), 1e-9);
        EXPECT_LT(spectral_norm(cv * cw + cw * cv + 2.0 * v.dot(g.gram() * w) * Mat::Identity(size, size)), 1e-9);
        EXPECT_LT(action_relation_residual(*f, v, w), 1e-9);
        // extended through a vector equals the standard action matrix
        EXPECT_LT((cv - standard_action_matrix(g.gram(), v)).cwiseAbs().maxCoeff(), 1e-12);

        Multivector a{f, rng.vector(size)}, b{f, rng.vector(size)};
        Mat lhs = extend_action(*f, cl_mul(a, b).coeffs);
        Mat rhs = extend_action(*f, a.coeffs) * extend_action(*f, b.coeffs);
        EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-9);
    }
}

TEST(ActionCompatibility, Builtins) {
    EXPECT_TRUE(check_actions_compatible(instantiate(builtin_wedge_lines(2.0, "x^2+4", "1")).pair).passed());
    EXPECT_TRUE(check_actions_compatible(instantiate(builtin_mixed_fibres(2.0, "x^2+4", "1")).pair).passed());
    VerificationReport bad = check_actions_compatible(instantiate(builtin_wedge_lines(2.0, "1", "1")).pair);
    ASSERT_FALSE(bad.passed());
    ASSERT_TRUE(bad.checks.front().witness.has_value());
    EXPECT_EQ(bad.checks.front().witness->point, "X2:0");
}

TEST(ActionCompatibility, EmptyDomainIsVacuous) {
    FiberSpace s = FiberSpace::standard(1);
    PseudoBundle v(sampled_base("X1", {0}), {{"0", s}}), w(sampled_base("X2", {0}), {{"0", s}});
    v = v.with_metric_grams({{"0", Mat::Constant(1, 1, 1.0)}});
    w = w.with_metric_grams({{"0", Mat::Constant(1, 1, 3.0)}});
    EXPECT_TRUE(check_actions_compatible({v, w, make_gluing(v, w, {}, {}, {})}).passed());
}

TEST(GluedAction, WedgeGluePointFormula) {
    // f1(0) = a^2 f2(0) with f2 = 3
    Instance w = instantiate(builtin_wedge_lines(2.0, "x^2+12", "3"));
    CliffordGluing cl = glue_clifford(w.pair, *w.metric);
    ExteriorIdentification ext = phi_wedge_star(w.glued);
    ActionOperator c = glued_action(w.pair, cl, ext.target);
    Rng rng(37);
    const auto& ops = c.ops.at("X2:0");
    for (int trial = 0; trial < 10; ++trial) {
        const double z2 = rng.uniform(), w2 = rng.uniform(), z = rng.uniform(), ww = rng.uniform();
        Vec a(2), omega(2);
        a << w2, z2;
        omega << ww, z;
        Vec out = act(ops, a) * omega;
        EXPECT_NEAR(out(0), w2 * ww - 3.0 * z2 * z, 1e-12);
        EXPECT_NEAR(out(1), z2 * ww + w2 * z, 1e-12);
    }
    // away from the glue point the factor action is used verbatim
    const auto& far = c.ops.at("X1:1");
    EXPECT_NEAR(far[1](0, 1), -13.0, 1e-12);
}

TEST(GluedAction, CovariantCoefficientsAreInverted) {
    Instance w = instantiate(builtin_wedge_lines(2.0, "x^2+4", "1"));
    CovariantClifford cc = covariant_clifford(w.pair, *w.metric);
    CovariantExterior ce = covariant_exterior(w.glued);
    ActionOperator c = glued_action(dual_pair(w.pair), cc.star, ce.dual_star.target);
    for (const auto& [label, ops] : c.ops) {
        const double x = std::stod(label.substr(label.find(':') + 1));
        const double f = label.rfind("X1", 0) == 0 ? x * x + 4.0 : 1.0;
        EXPECT_NEAR(ops[1](0, 1), -1.0 / f, 1e-12) << label;
    }
}

TEST(GluedAction, RefusesIncompatibleActions) {
    Instance bad = instantiate(builtin_wedge_lines(2.0, "1", "1"));
    Instance good = instantiate(builtin_wedge_lines(2.0, "x^2+4", "1"));
    CliffordGluing cl = glue_clifford(good.pair, *good.metric);
    ExteriorIdentification ext = phi_wedge_star(good.glued);
    EXPECT_THROW(glued_action(bad.pair, cl, ext.target), Error);
}

TEST(GluedAction, RelationOnGluedFibres) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Instance inst = instantiate(random_scenario(seed, 3, 3));
        CliffordGluing cl = glue_clifford(inst.pair, *inst.metric);
        ExteriorIdentification ext = phi_wedge_star(inst.glued);
        ActionOperator c = glued_action(inst.pair, cl, ext.target);
        for (const auto& p : cl.glued_algebras.bundle.base().points()) {
            const auto& ops = c.ops.at(p.label);
            const bool one = p.region == Region::I1;
            const CliffordFiber& fib = *(one ? cl.first : cl.second).fibres.at(p.origin);
            for (int i = 0; i < fib.dim(); ++i)
                for (int j = 0; j < fib.dim(); ++j) {
                    const Mat& ci = ops[Blade{1} << i];
                    const Mat& cj = ops[Blade{1} << j];
                    const double gij = i == j ? fib.ortho.lambda(i) : 0.0;
                    Mat r = ci * cj + cj * ci + 2.0 * gij * Mat::Identity(ci.rows(), ci.cols());
                    EXPECT_LT(r.cwiseAbs().maxCoeff(), 1e-9);
                }
        }
    }
}

TEST(ActionEquivalence, Builtins) {
    Instance w = instantiate(builtin_wedge_lines(2.0, "x^2+4", "1"));
    VerificationReport c = verify_equiv_contravariant(w.pair, *w.metric, 1e-12);
    VerificationReport k = verify_equiv_covariant(w.pair, *w.metric, 1e-12);
    EXPECT_TRUE(c.passed());
    EXPECT_TRUE(k.passed());
    EXPECT_EQ(k.checks.size(), 2u);
    Instance m = instantiate(builtin_mixed_fibres(2.0, "x^2+4", "1"));
    EXPECT_TRUE(verify_equiv_contravariant(m.pair, *m.metric).passed());
    EXPECT_TRUE(verify_equiv_covariant(m.pair, *m.metric).passed());
    Instance one = instantiate(builtin_wedge_lines(1.0, "1", "1"));
    VerificationReport exact = verify_equiv_contravariant(one.pair, *one.metric, 1e-15);
    EXPECT_TRUE(exact.passed());
}

TEST(ActionEquivalence, RandomScenarios) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Instance inst = instantiate(random_scenario(seed, 3, 3));
        EXPECT_TRUE(verify_equiv_contravariant(inst.pair, *inst.metric).passed()) << seed;
        EXPECT_TRUE(verify_equiv_covariant(inst.pair, *inst.metric).passed()) << seed;
    }
}
