#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "pseudoglue/clifford.hpp"
#include "pseudoglue/exterior.hpp"
#include "pseudoglue/scenario.hpp"
#include "support.hpp"

using namespace pseudoglue;
using testing_support::Rng;

namespace {

TensorElement basis_tensor(int n, std::vector<int> slots) {
    long index = 0;
    for (int s : slots) index = index * n + s;
    long size = 1;
    for (std::size_t i = 0; i < slots.size(); ++i) size *= n;
    Vec c = Vec::Zero(size);
    c(index) = 1.0;
    return {n, static_cast<int>(slots.size()), c};
}

TensorElement vector_tensor(const Vec& v) { return {static_cast<int>(v.size()), 1, v}; }

Vec blade_table(int n, Blade b, double c = 1.0) {
    Vec out = Vec::Zero(Eigen::Index{1} << n);
    out(b) = c;
    return out;
}

Vec vector_table(const Vec& v) {
    Vec out = Vec::Zero(Eigen::Index{1} << v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(Eigen::Index{1} << i) = v(i);
    return out;
}

// Homogeneous random element of grade k.
Vec random_grade(Rng& rng, int n, int k) {
    Vec out = Vec::Zero(Eigen::Index{1} << n);
    for (Blade b : blades_of_grade(n, k)) out(b) = rng.uniform();
    return out;
}

// Reference antisymmetrizer: explicit sum over permutations of the slot positions.
Vec reference_alt(const TensorElement& t) {
    const int n = t.n, k = t.degree;
    Vec out = Vec::Zero(t.coeffs.size());
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    double count = 0;
    do {
        ++count;
        int inversions = 0;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) inversions += perm[static_cast<std::size_t>(i)] > perm[static_cast<std::size_t>(j)];
        const double sign = inversions % 2 ? -1.0 : 1.0;
        for (long idx = 0; idx < t.coeffs.size(); ++idx) {
            std::vector<int> d(static_cast<std::size_t>(k));
            long r = idx;
            for (int s = k - 1; s >= 0; --s) {
                d[static_cast<std::size_t>(s)] = static_cast<int>(r % n);
                r /= n;
            }
            long moved = 0;
            for (int s = 0; s < k; ++s) moved = moved * n + d[static_cast<std::size_t>(perm[static_cast<std::size_t>(s)])];
            out(moved) += sign * t.coeffs(idx);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out / count;
}

}  // namespace

TEST(Alt, Examples) {
    Vec v(3);
    v << 1, -2, 0.5;
    EXPECT_LT(alt(tensor_product(vector_tensor(v), vector_tensor(v))).coeffs.cwiseAbs().maxCoeff(), 1e-15);

    TensorElement t = alt(basis_tensor(2, {0, 1}));
    Vec expect = 0.5 * (basis_tensor(2, {0, 1}).coeffs - basis_tensor(2, {1, 0}).coeffs);
    EXPECT_TRUE(approx_equal(t.coeffs, expect));

    TensorElement one = vector_tensor(v);
    EXPECT_TRUE(approx_equal(alt(one).coeffs, v));
}

TEST(Alt, IdempotentAndMatchesReference) {
    Rng rng(12);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = rng.integer(1, 4), k = rng.integer(1, 4);
        long size = 1;
        for (int i = 0; i < k; ++i) size *= n;
        TensorElement t{n, k, rng.vector(size)};
        TensorElement a = alt(t);
        EXPECT_LT((alt(a).coeffs - a.coeffs).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((a.coeffs - reference_alt(t)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Alt, PermutationSigns) {
    EXPECT_EQ(permutation_sign({0, 1, 2}), 1);
    EXPECT_EQ(permutation_sign({1, 0, 2}), -1);
    EXPECT_EQ(permutation_sign({1, 2, 0}), 1);
    EXPECT_EQ(permutation_sign({3, 2, 1, 0}), 1);
    EXPECT_EQ(binomial(5, 2), 10);
    EXPECT_EQ(blades_of_grade(4, 2).size(), 6u);
}

TEST(LiftProject, RoundTrip) {
    Rng rng(13);
    for (int n = 1; n <= 4; ++n)
        for (int k = 0; k <= n; ++k) {
            Vec a = random_grade(rng, n, k);
            if (k == 0) continue;
            EXPECT_LT((project(lift(a, n, k)) - a).cwiseAbs().maxCoeff(), 1e-12);
        }
}

TEST(Wedge, LineFibreClosedForm) {
    Rng rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        const double z1 = rng.uniform(), w1 = rng.uniform(), z2 = rng.uniform(), w2 = rng.uniform();
        Vec a(2), b(2);
        a << w1, z1;
        b << w2, z2;
        Vec p = wedge(a, b);
        EXPECT_NEAR(p(0), w1 * w2, 1e-15);
        EXPECT_NEAR(p(1), z1 * w2 + z2 * w1, 1e-15);
    }
}

TEST(Wedge, UnitRepeatedFactorAndOverflow) {
    Rng rng(15);
    Vec a = rng.vector(8);
    EXPECT_TRUE(approx_equal(wedge(blade_table(3, 0), a), a));
    Vec e1 = blade_table(3, 0b001), e2 = blade_table(3, 0b010);
    EXPECT_TRUE(wedge(wedge(e1, e2), e1).isZero());
    EXPECT_THROW(wedge(blade_table(2, 0b11), blade_table(2, 0b01)), Error);
    EXPECT_THROW(wedge(Vec::Zero(4), Vec::Zero(8)), Error);
}

TEST(Wedge, GradedCommutativeAndAssociative) {
    Rng rng(16);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = rng.integer(1, 4);
        const int p = rng.integer(0, n), q = rng.integer(0, n - p);
        Vec a = random_grade(rng, n, p), b = random_grade(rng, n, q);
        const double sign = (p * q) % 2 ? -1.0 : 1.0;
        EXPECT_LT((wedge(a, b) - sign * wedge(b, a)).cwiseAbs().maxCoeff(), 1e-12);
        Vec x = rng.vector(Eigen::Index{1} << n), y = rng.vector(Eigen::Index{1} << n), z = rng.vector(Eigen::Index{1} << n);
        EXPECT_LT((wedge(wedge(x, y), z) - wedge(x, wedge(y, z))).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Wedge, AgreesWithAntisymmetrizedTensors) {
    Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = rng.integer(2, 4);
        Vec u = rng.vector(n), v = rng.vector(n);
        // u ^ v corresponds to 2 Alt(u (x) v) under lift/project
        TensorElement t = alt(tensor_product(vector_tensor(u), vector_tensor(v)));
        Vec from_tensors = project(t);
        Vec direct = wedge(vector_table(u), vector_table(v));
        EXPECT_LT((from_tensors - direct).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Outermorphism, MultiplicativeAndMatchesTensors) {
    Rng rng(18);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = rng.integer(1, 4), m = rng.integer(1, 4);
        Mat f = rng.matrix(m, n);
        Mat o = outermorphism(f);
        EXPECT_LT((o - outermorphism_via_tensors(f)).cwiseAbs().maxCoeff(), 1e-12);
        const int p = rng.integer(0, n), q = rng.integer(0, n - p);
        Vec a = random_grade(rng, n, p), b = random_grade(rng, n, q);
        Vec fa = o * a, fb = o * b;
        if (p + q <= m) EXPECT_LT((o * wedge(a, b) - wedge(fa, fb)).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(InducedWedge, WedgeScalesVectorPart) {
    Instance w = instantiate(builtin_wedge_lines(3.0, "x^2+9", "1"));
    Mat star = induced_f_wedge_star(w.pair.gluing).at("0");
    Mat expect = Mat::Identity(2, 2);
    expect(1, 1) = 3.0;
    EXPECT_TRUE(approx_equal(star, expect));
    EXPECT_TRUE(approx_equal(induced_f_wedge(w.pair.gluing).at("0"), expect));

    Instance one = instantiate(builtin_wedge_lines(1.0, "1", "1"));
    EXPECT_TRUE(approx_equal(induced_f_wedge_star(one.pair.gluing).at("0"), Mat::Identity(2, 2)));
}

TEST(InducedWedge, MixedFibresInvertibleOnDualsOnly) {
    Instance m = instantiate(builtin_mixed_fibres(2.0, "x^2+4", "1"));
    Mat star = induced_f_wedge_star(m.pair.gluing).at("0");
    EXPECT_EQ(star.rows(), 2);
    EXPECT_EQ(star.cols(), 4);
    EXPECT_LT(numerical_rank(star), 4);
    Mat dual = induced_f_wedge(m.pair.gluing).at("0");
    ASSERT_EQ(dual.rows(), dual.cols());
    EXPECT_EQ(numerical_rank(dual), 2);
}

TEST(PhiWedgeStar, ResidualsOnWedgeAndRandom) {
    Instance w = instantiate(builtin_wedge_lines(2.0, "x^2+4", "1"));
    ExteriorIdentification e = phi_wedge_star(w.glued);
    EXPECT_LT(e.identity_residual, 1e-12);
    EXPECT_LT(e.alt_residual, 1e-12);
    for (const auto& b : e.map.branches()) EXPECT_TRUE(approx_equal(b.matrix, Mat::Identity(2, 2)));
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        Instance inst = instantiate(random_scenario(seed, 3, 3));
        ExteriorIdentification r = phi_wedge_star(inst.glued);
        EXPECT_LT(r.identity_residual, 1e-12) << seed;
        EXPECT_LT(r.alt_residual, 1e-12) << seed;
    }
}

TEST(PhiWedgeStar, ExteriorDimensions) {
    Instance m = instantiate(builtin_mixed_fibres(2.0, "x^2+4", "1"));
    PseudoBundle e = exterior_bundle(m.pair.v1);
    for (const auto& p : e.base().points()) EXPECT_EQ(e.fiber(p.label).dim(), 4);
    PseudoBundle d = exterior_bundle(dual_bundle(m.pair.v1));
    for (const auto& p : d.base().points()) EXPECT_EQ(d.fiber(p.label).dim(), 2);
    EXPECT_EQ(dim_of(m.glued.bundle), 2);
}

TEST(AltIntertwining, TensorPowerBranchesCommuteWithAlt) {
    Rng rng(19);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        GluedBundle g = instantiate(random_scenario(seed, 3, 3)).glued;
        for (int k = 1; k <= 3; ++k) {
            Identification id = phi_cup_otimes_n(g, k);
            for (const auto& b : id.map.branches()) {
                const int n = g.bundle.fiber(b.source).dim();
                TensorElement t{n, k, rng.vector(b.matrix.cols())};
                TensorElement moved{n, k, b.matrix * t.coeffs};
                EXPECT_LT((b.matrix * alt(t).coeffs - alt(moved).coeffs).cwiseAbs().maxCoeff(), 1e-12);
            }
        }
    }
}

TEST(CovariantExterior, ResidualsAndComposition) {
    std::vector<Instance> cases{instantiate(builtin_wedge_lines(2.0, "x^2+4", "1")),
                                instantiate(builtin_mixed_fibres(2.0, "x^2+4", "1"))};
    for (std::uint64_t seed = 1; seed <= 10; ++seed) cases.push_back(instantiate(random_scenario(seed, 3, 3)));
    for (const auto& inst : cases) {
        CovariantExterior ce = covariant_exterior(inst.glued);
        EXPECT_LT(ce.alt_residual, 1e-12);
        EXPECT_LT(ce.outermorphism_residual, 1e-12);
        EXPECT_LT(ce.dual_star.identity_residual, 1e-12);
        EXPECT_LT(max_difference(ce.phi_wedge, compose(ce.dual_star.map, ce.phi_cup_star_wedge)), 1e-12);
    }
}

TEST(CovariantExterior, WedgeScalesAtGluePoint) {
    Instance w = instantiate(builtin_wedge_lines(2.0, "x^2+4", "1"));
    CovariantExterior ce = covariant_exterior(w.glued);
    const Branch& b = ce.phi_cup_star_wedge.at("X2:0");
    Mat expect = Mat::Identity(2, 2);
    expect(1, 1) = 2.0;
    EXPECT_TRUE(approx_equal(b.matrix, expect));
}
