#include <gtest/gtest.h>

#include "pseudoglue/metrics.hpp"
#include "pseudoglue/scenario.hpp"
#include "support.hpp"

using namespace pseudoglue;
using testing_support::admissible_map;
using testing_support::Rng;
using testing_support::single_pair;

namespace {

Instance wedge(const std::string& f1 = "x^2+4", double a = 2.0) {
    return instantiate(builtin_wedge_lines(a, f1, "1"));
}

Mat scalar(double v) { return Mat::Constant(1, 1, v); }

const CheckResult& only(const VerificationReport& r, const std::string& name) {
    const CheckResult* c = r.find(name);
    if (!c) throw std::runtime_error("missing " + name);
    return *c;
}

// V itself over {0, 1}, glued identically along everything.
MetricPair identity_pair(const FiberSpace& s, const Mat& gram) {
    PseudoBundle v(sampled_base("X1", {0, 1}), {{"0", s}, {"1", s}});
    PseudoBundle w(sampled_base("X2", {0, 1}), {{"0", s}, {"1", s}});
    v = v.with_metric_grams({{"0", gram}, {"1", gram}});
    w = w.with_metric_grams({{"0", gram}, {"1", gram}});
    Mat id = Mat::Identity(s.dim(), s.dim());
    return {v, w, make_gluing(v, w, {"0", "1"}, {{"0", "0"}, {"1", "1"}}, {{"0", id}, {"1", id}})};
}

GluedBundle glued_with_metric(const MetricPair& p) {
    GluedBundle g = glue_bundles(p.v1, p.v2, p.gluing);
    g.bundle = g.bundle.with_metric(induced_metric_direct(p, g));
    return g;
}

}  // namespace

TEST(CheckCompatible, WedgeBalanced) {
    EXPECT_TRUE(check_compatible(wedge().pair).passed());
}

TEST(CheckCompatible, WedgeUnbalancedWitnessAtGluePoint) {
    VerificationReport r = check_compatible(wedge("1").pair);
    ASSERT_FALSE(r.passed());
    const CheckResult& c = r.checks.front();
    ASSERT_TRUE(c.witness.has_value());
    EXPECT_EQ(c.witness->point, "X2:0");
    EXPECT_NEAR(c.max_residual, 3.0, 1e-12);
}

TEST(CheckCompatible, EmptyDomainIsVacuous) {
    FiberSpace s = FiberSpace::standard(1);
    PseudoBundle v(sampled_base("X1", {0}), {{"0", s}}), w(sampled_base("X2", {0}), {{"0", s}});
    v = v.with_metric_grams({{"0", scalar(1)}});
    w = w.with_metric_grams({{"0", scalar(9)}});
    MetricPair p{v, w, make_gluing(v, w, {}, {}, {})};
    EXPECT_TRUE(check_compatible(p).passed());
    EXPECT_TRUE(check_dual_compatible(p).passed());
}

TEST(Criterion, MixedFibresHold) {
    Instance m = instantiate(builtin_mixed_fibres(2.0, "x^2+4", "1"));
    EXPECT_TRUE(check_compatibility_criterion(m.pair).passed());
    CriterionOutcome o = compatibility_criterion(m.pair.gluing.fiber_maps.at("0"));
    EXPECT_TRUE(o.injective_on_char);
    EXPECT_TRUE(o.char_into_char);
}

TEST(Criterion, KernelMeetsCharacteristic) {
    FiberSpace plane = FiberSpace::standard(2);
    Mat f(2, 2);
    f << 1, 0, 0, 0;
    CriterionOutcome o = compatibility_criterion(LinearFiberMap(plane, plane, f));
    EXPECT_FALSE(o.injective_on_char);
    EXPECT_FALSE(o.holds());
}

TEST(Criterion, CharacteristicIntoComplement) {
    Mat c(2, 1), k(2, 1);
    c << 1, 0;
    k << 0, 1;
    FiberSpace v(c, k), target(c, k);
    Mat f(2, 2);
    f << 1, 0, 1, 1;  // e1 -> e1 + e2 leaks into the complement
    CriterionOutcome o = compatibility_criterion(LinearFiberMap(v, target, f));
    EXPECT_TRUE(o.injective_on_char);
    EXPECT_FALSE(o.char_into_char);
    EXPECT_NEAR(o.leak, 1.0, 1e-12);
}

TEST(Criterion, RoundoffImageIsNotInjective) {
    // f kills V0 up to roundoff while the complement image is of unit size
    Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        FiberSpace v = rng.space(3, 1), w = rng.space(3, 0);
        Mat f = admissible_map(v, w, Mat(0, 1), Mat::Zero(3, 1), rng.matrix(3, 2));
        EXPECT_FALSE(compatibility_criterion(LinearFiberMap(v, w, f)).injective_on_char);
    }
}

TEST(Construct, LineIntoPlane) {
    Mat f(2, 1);
    f << 1, 0;
    auto [gv, gw] = construct_compatible_metrics(FiberSpace::standard(1), FiberSpace::standard(2), f);
    EXPECT_TRUE(approx_equal(gv.gram(), scalar(1)));
    EXPECT_TRUE(approx_equal(gw.gram(), Mat::Identity(2, 2)));
}

TEST(Construct, ZeroOnNullSpace) {
    FiberSpace null(Mat(1, 0), Mat::Identity(1, 1));
    auto [gv, gw] = construct_compatible_metrics(null, null, Mat::Zero(1, 1));
    EXPECT_TRUE(gv.gram().isZero());
    EXPECT_TRUE(gw.gram().isZero());
}

TEST(Construct, RandomCriterionHoldingMapsGiveCompatiblePairs) {
    Rng rng(21);
    for (int trial = 0; trial < 200; ++trial) {
        const int n1 = rng.integer(1, 4), n2 = rng.integer(1, 4);
        const int d2 = rng.integer(0, n2);
        const int d1 = rng.integer(0, std::min(n1, d2));
        FiberSpace v = rng.space(n1, d1), w = rng.space(n2, d2);
        Mat a = rng.matrix(d2, d1);
        while (d1 > 0 && numerical_rank(a) < d1) a = rng.matrix(d2, d1);
        Mat f = admissible_map(v, w, a, Mat::Zero(n2 - d2, d1), rng.matrix(n2 - d2, n1 - d1));
        auto [gv, gw] = construct_compatible_metrics(v, w, f);
        VerificationReport r = check_compatible(single_pair(v, w, f, gv.gram(), gw.gram()));
        EXPECT_TRUE(r.passed()) << "trial " << trial;
    }
}

TEST(Construct, ThrowsWhenCriterionFails) {
    FiberSpace plane = FiberSpace::standard(2);
    EXPECT_THROW(construct_compatible_metrics(plane, plane, Mat::Zero(2, 2)), Error);
}

TEST(DualCompatible, WedgeBalanced) {
    VerificationReport r = check_dual_compatible(wedge().pair);
    EXPECT_EQ(only(r, "dual-compatibility").status, Status::Pass);
    EXPECT_EQ(only(r, "dual-map-invertibility").status, Status::Pass);
    EXPECT_EQ(only(r, "dual-criterion-equivalence").status, Status::Pass);
}

TEST(DualCompatible, IsometricLineIntoPlaneHasDualDefect) {
    Mat f(2, 1);
    f << 1, 0;
    MetricPair p = single_pair(FiberSpace::standard(1), FiberSpace::standard(2), f, scalar(1), Mat::Identity(2, 2));
    EXPECT_TRUE(check_compatible(p).passed());
    VerificationReport r = check_dual_compatible(p);
    EXPECT_EQ(only(r, "dual-compatibility").status, Status::Fail);
    EXPECT_EQ(only(r, "dual-map-invertibility").status, Status::Fail);
    EXPECT_EQ(only(r, "dual-criterion-equivalence").status, Status::Pass);
}

TEST(DualCompatible, IdentityGluing) {
    Rng rng(4);
    FiberSpace s = rng.space(3, 2);
    EXPECT_TRUE(check_dual_compatible(identity_pair(s, rng.metric_gram(s))).passed());
}

TEST(DualCompatible, EquivalenceOnRandomCompatibleScenarios) {
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        RandomMode mode = seed % 2 ? RandomMode::Standard : RandomMode::DualDefect;
        Instance inst = instantiate(random_scenario(seed, 3, 3, mode));
        ASSERT_TRUE(check_compatible(inst.pair).passed());
        VerificationReport r = check_dual_compatible(inst.pair);
        EXPECT_EQ(only(r, "dual-compatibility").status, only(r, "dual-map-invertibility").status) << seed;
    }
}

TEST(InducedMetric, WedgeBranches) {
    Instance w = wedge();
    MetricField g = induced_metric_direct(w.pair, w.glued);
    for (const auto& p : w.glued.bundle.base().points()) {
        const double x = *p.param;
        const double expect = p.side == "X1" ? x * x + 4.0 : 1.0;
        EXPECT_DOUBLE_EQ(g.at(p.label).gram()(0, 0), expect) << p.label;
    }
    EXPECT_THROW(induced_metric_direct(wedge("1").pair, wedge("1").glued), Error);
}

TEST(InducedMetric, IdentitySelfGluing) {
    Rng rng(8);
    FiberSpace s = rng.space(3, 1);
    Mat gram = rng.metric_gram(s);
    MetricPair p = identity_pair(s, gram);
    GluedBundle g = glue_bundles(p.v1, p.v2, p.gluing);
    for (const auto& [label, form] : induced_metric_direct(p, g)) EXPECT_TRUE(approx_equal(form.gram(), gram));
}

TEST(InducedMetric, ViaPhiMatchesDirect) {
    Instance w = wedge();
    MetricField direct = induced_metric_direct(w.pair, w.glued);
    MetricField phi = induced_metric_via_phi(w.pair, w.glued);
    for (const auto& [label, form] : direct) EXPECT_LT((form.gram() - phi.at(label).gram()).norm(), 1e-12);

    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Instance inst = instantiate(random_scenario(seed, 3, 3));
        MetricField a = induced_metric_direct(inst.pair, inst.glued);
        MetricField b = induced_metric_via_phi(inst.pair, inst.glued);
        for (const auto& [label, form] : a)
            EXPECT_LT((form.gram() - b.at(label).gram()).cwiseAbs().maxCoeff(), 1e-9) << seed << " " << label;
    }
}

TEST(DualMetrics, WedgeCoefficientsInverted) {
    Instance w = wedge();
    MetricField gt = dual_of_induced(*w.metric);
    MetricField tg = glued_dual_metric(w.pair);
    for (const auto& p : w.metric->bundle.base().points()) {
        const double x = *p.param;
        const double expect = p.side == "X1" ? 1.0 / (x * x + 4.0) : 1.0;
        EXPECT_NEAR(gt.at(p.label).gram()(0, 0), expect, 1e-15) << p.label;
    }
    for (const auto& [label, form] : tg) {
        const double x = std::stod(label.substr(label.find(':') + 1));
        const double expect = label.rfind("X1", 0) == 0 ? 1.0 / (x * x + 4.0) : 1.0;
        EXPECT_NEAR(form.gram()(0, 0), expect, 1e-15) << label;
    }
}

TEST(DualMetrics, PositiveDefiniteOnRandomScenarios) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Instance inst = instantiate(random_scenario(seed, 3, 3));
        for (const auto& [label, form] : dual_of_induced(*inst.metric)) {
            if (form.gram().rows() == 0) continue;
            Eigen::SelfAdjointEigenSolver<Mat> es(form.gram());
            EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
        }
    }
}

TEST(Isometry, Builtins) {
    Instance w = wedge();
    VerificationReport r = verify_isometry(w.pair, *w.metric, 1e-12);
    EXPECT_TRUE(r.passed());
    EXPECT_LT(r.checks.front().max_residual, 1e-12);
    Instance m = instantiate(builtin_mixed_fibres(2.0, "x^2+4", "1"));
    EXPECT_TRUE(verify_isometry(m.pair, *m.metric).passed());
}

TEST(Isometry, HoldsWhereverDualsAreCompatible) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Instance inst = instantiate(random_scenario(seed, 4, 3));
        ASSERT_TRUE(check_dual_compatible(inst.pair).passed());
        EXPECT_TRUE(verify_isometry(inst.pair, *inst.metric).passed()) << seed;
    }
}

TEST(CharacteristicSubbundle, MixedFibresGiveLines) {
    Instance m = instantiate(builtin_mixed_fibres(2.0, "x^2+4", "1"));
    PseudoBundle c = characteristic_subbundle(m.pair.v1);
    for (const auto& p : c.base().points()) {
        EXPECT_EQ(c.fiber(p.label).dim(), 1);
        EXPECT_DOUBLE_EQ(c.metric(p.label).gram()(0, 0), *p.param * *p.param + 4.0);
    }
}

TEST(CharacteristicSubbundle, ZeroExtension) {
    Instance m = instantiate(builtin_mixed_fibres(2.0, "x^2+4", "1"));
    MetricField g0;
    for (const auto& p : m.pair.v1.base().points())
        g0.emplace(p.label, validate_pseudometric(FiberSpace::standard(1), scalar(1)));
    MetricField g = metric_from_characteristic(m.pair.v1, g0);
    Mat expect = Mat::Zero(2, 2);
    expect(0, 0) = 1.0;
    for (const auto& [label, form] : g) EXPECT_TRUE(approx_equal(form.gram(), expect)) << label;
}

TEST(CharacteristicSubbundle, PairingMapIsBijective) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Instance inst = instantiate(random_scenario(seed, 4, 3));
        PiecewiseBundleMap psi = pairing_bundle_map(inst.pair.v1);
        for (const auto& b : psi.branches()) {
            ASSERT_EQ(b.matrix.rows(), b.matrix.cols());
            EXPECT_EQ(numerical_rank(b.matrix), b.matrix.rows());
        }
    }
}

TEST(PhiChain, Wedge) {
    Instance w = wedge();
    VerificationReport r = verify_phi_chain(w.pair, *w.metric, 1e-12);
    EXPECT_TRUE(r.passed());
    EXPECT_LT(r.checks.front().max_residual, 1e-12);
}

TEST(PhiChain, IdentityGluingIsIdentity) {
    Rng rng(9);
    FiberSpace s = rng.space(3, 2);
    MetricPair p = identity_pair(s, rng.metric_gram(s));
    GluedBundle g = glued_with_metric(p);
    PhiChain chain = build_phi_chain(p, g);
    for (const auto* m : {&chain.phi0_inverse, &chain.switch0})
        for (const auto& b : m->branches())
            EXPECT_LT((b.matrix - Mat::Identity(b.matrix.rows(), b.matrix.cols())).norm(), 1e-12);
    EXPECT_TRUE(verify_phi_chain(p, g).passed());
}

TEST(PhiChain, RandomScenarios) {
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        Instance inst = instantiate(random_scenario(seed, 3, 3));
        EXPECT_TRUE(verify_phi_chain(inst.pair, *inst.metric).passed()) << seed;
    }
}

TEST(DualPair, SwapsFactorsAndInvertsBaseMap) {
    Instance w = wedge();
    MetricPair d = dual_pair(w.pair);
    EXPECT_EQ(d.v1.base().name(), "X2");
    EXPECT_EQ(d.gluing.base_map.at("0"), "0");
    EXPECT_DOUBLE_EQ(d.v1.metric("0").gram()(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(d.v2.metric("0").gram()(0, 0), 0.25);
}
