#include "pseudoglue/clifford.hpp"

#include <bit>
#include <cmath>
#include <vector>

namespace pseudoglue {

int grade(Blade b) { return std::popcount(b); }

double reorder_sign(Blade a, Blade b) {
    int swaps = 0;
    for (Blade x = a >> 1; x != 0; x >>= 1) swaps += std::popcount(x & b);
    return (swaps & 1) ? -1.0 : 1.0;
}

std::pair<double, Blade> blade_product(Blade a, Blade b, const Vec& lambda) {
    double c = reorder_sign(a, b);
    for (Blade common = a & b; common != 0; common &= common - 1) {
        int i = std::countr_zero(common);
        c *= -lambda(i);
    }
    return {c, a ^ b};
}

Vec blade_algebra_mul(const Vec& a, const Vec& b, const Vec& lambda) {
    Vec out = Vec::Zero(a.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) == 0.0) continue;
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            if (b(j) == 0.0) continue;
            auto [c, k] = blade_product(static_cast<Blade>(i), static_cast<Blade>(j), lambda);
            if (c != 0.0) out(k) += c * a(i) * b(j);
        }
    }
    return out;
}

CliffordFiberPtr make_clifford_fiber(const PseudoMetricForm& g) {
    if (g.space().dim() > 16) throw Error(ErrorCode::DimensionTooLarge, "fibre too large for a blade table");
    return std::make_shared<const CliffordFiber>(CliffordFiber{g.space(), g.gram(), orthogonal_basis(g)});
}

Multivector cl_scalar(const CliffordFiberPtr& fibre, double s) {
    Vec c = Vec::Zero(static_cast<Eigen::Index>(fibre->size()));
    c(0) = s;
    return {fibre, c};
}

Multivector cl_blade(const CliffordFiberPtr& fibre, Blade b) {
    Vec c = Vec::Zero(static_cast<Eigen::Index>(fibre->size()));
    c(b) = 1.0;
    return {fibre, c};
}

Multivector cl_vector(const CliffordFiberPtr& fibre, const Vec& ambient) {
    if (ambient.size() != fibre->dim()) throw Error(ErrorCode::DimensionMismatch, "vector not in fibre");
    Vec coords = fibre->ortho.inverse * ambient;
    Vec c = Vec::Zero(static_cast<Eigen::Index>(fibre->size()));
    for (int i = 0; i < fibre->dim(); ++i) c(Blade{1} << i) = coords(i);
    return {fibre, c};
}

namespace {

void require_same(const Multivector& a, const Multivector& b) {
    if (a.fibre == b.fibre) return;
    if (!a.fibre || !b.fibre || a.coeffs.size() != b.coeffs.size() || !approx_equal(a.fibre->gram, b.fibre->gram) ||
        !approx_equal(a.fibre->ortho.basis, b.fibre->ortho.basis))
        throw Error(ErrorCode::FiberMismatch, "multivectors live in different fibres");
}

}  // namespace

Multivector operator+(const Multivector& a, const Multivector& b) {
    require_same(a, b);
    return {a.fibre, a.coeffs + b.coeffs};
}

Multivector operator-(const Multivector& a, const Multivector& b) {
    require_same(a, b);
    return {a.fibre, a.coeffs - b.coeffs};
}

Multivector operator*(double s, const Multivector& a) { return {a.fibre, s * a.coeffs}; }

Multivector cl_mul(const Multivector& a, const Multivector& b) {
    require_same(a, b);
    return {a.fibre, blade_algebra_mul(a.coeffs, b.coeffs, a.fibre->ortho.lambda)};
}

namespace {

using Word = std::vector<int>;
using Poly = std::map<Word, double>;

// Words of a blade after writing each basis vector in the ambient coordinates `to`.
Poly expand_blade(Blade b, const Mat& to) {
    Poly cur{{Word{}, 1.0}};
    for (int a = 0; a < 32; ++a) {
        if (!(b & (Blade{1} << a))) continue;
        Poly next;
        for (const auto& [w, c] : cur) {
            for (Eigen::Index i = 0; i < to.rows(); ++i) {
                if (to(i, a) == 0.0) continue;
                Word x = w;
                x.push_back(static_cast<int>(i));
                next[x] += c * to(i, a);
            }
        }
        cur = std::move(next);
    }
    return cur;
}

// Normal form of a tensor polynomial modulo u_a u_b + u_b u_a + 2 G_ab.
std::map<Blade, double> reduce(const Poly& p, const Mat& gram) {
    std::vector<std::pair<Word, double>> stack(p.begin(), p.end());
    std::map<Blade, double> out;
    while (!stack.empty()) {
        auto [w, c] = std::move(stack.back());
        stack.pop_back();
        if (c == 0.0) continue;
        std::size_t k = 0;
        while (k + 1 < w.size() && w[k] < w[k + 1]) ++k;
        if (k + 1 >= w.size()) {
            Blade m = 0;
            for (int i : w) m |= Blade{1} << i;
            out[m] += c;
            continue;
        }
        const int a = w[k];
        const int b = w[k + 1];
        Word shorter = w;
        shorter.erase(shorter.begin() + static_cast<long>(k), shorter.begin() + static_cast<long>(k) + 2);
        if (a == b) {
            stack.emplace_back(shorter, -c * gram(a, a));
        } else {
            Word swapped = w;
            std::swap(swapped[k], swapped[k + 1]);
            stack.emplace_back(swapped, -c);
            stack.emplace_back(shorter, -2.0 * c * gram(a, b));
        }
    }
    return out;
}

Poly concat(const Poly& x, const Poly& y) {
    Poly out;
    for (const auto& [wx, cx] : x)
        for (const auto& [wy, cy] : y) {
            Word w = wx;
            w.insert(w.end(), wy.begin(), wy.end());
            out[w] += cx * cy;
        }
    return out;
}

Poly words_of(const Multivector& m, const Mat& to) {
    Poly out;
    for (Eigen::Index i = 0; i < m.coeffs.size(); ++i) {
        if (m.coeffs(i) == 0.0) continue;
        for (const auto& [w, c] : expand_blade(static_cast<Blade>(i), to)) out[w] += c * m.coeffs(i);
    }
    return out;
}

}  // namespace

Multivector tensor_quotient_oracle(const Multivector& a, const Multivector& b) {
    require_same(a, b);
    const CliffordFiber& f = *a.fibre;
    if (f.dim() > 3) throw Error(ErrorCode::DimensionTooLarge, "tensor oracle limited to n <= 3");
    Poly product = concat(words_of(a, f.ortho.basis), words_of(b, f.ortho.basis));
    std::map<Blade, double> ambient = reduce(product, f.gram);

    const Mat diag = f.ortho.lambda.asDiagonal();
    Vec out = Vec::Zero(a.coeffs.size());
    for (const auto& [s, c] : ambient) {
        if (c == 0.0) continue;
        for (const auto& [blade, v] : reduce(expand_blade(s, f.ortho.inverse), diag)) out(blade) += c * v;
    }
    return {a.fibre, out};
}

Mat clifford_extension(const CliffordFiber& src, const CliffordFiber& dst, const Mat& ambient) {
    if (ambient.rows() != dst.dim() || ambient.cols() != src.dim())
        throw Error(ErrorCode::DimensionMismatch, "ambient map does not fit the fibres");
    const Mat images = dst.ortho.inverse * ambient * src.ortho.basis;
    const auto rows = static_cast<Eigen::Index>(dst.size());
    Mat out = Mat::Zero(rows, static_cast<Eigen::Index>(src.size()));
    std::vector<Vec> gens;
    for (int a = 0; a < src.dim(); ++a) {
        Vec g = Vec::Zero(rows);
        for (int i = 0; i < dst.dim(); ++i) g(Blade{1} << i) = images(i, a);
        gens.push_back(g);
    }
    for (std::size_t blade = 0; blade < src.size(); ++blade) {
        Vec acc = Vec::Zero(rows);
        acc(0) = 1.0;
        for (int a = 0; a < src.dim(); ++a)
            if (blade & (std::size_t{1} << a)) acc = blade_algebra_mul(acc, gens[static_cast<std::size_t>(a)], dst.ortho.lambda);
        out.col(static_cast<Eigen::Index>(blade)) = acc;
    }
    return out;
}

double multiplicativity_residual(const CliffordFiber& src, const CliffordFiber& dst, const Mat& phi) {
    double worst = 0.0;
    const auto n = static_cast<Eigen::Index>(src.size());
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            auto [c, k] = blade_product(static_cast<Blade>(i), static_cast<Blade>(j), src.ortho.lambda);
            Vec lhs = c * phi.col(k);
            Vec rhs = blade_algebra_mul(phi.col(i), phi.col(j), dst.ortho.lambda);
            if (lhs.size() > 0) worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
        }
    return worst;
}

CliffordBundle clifford_bundle(const PseudoBundle& v) {
    CliffordBundle out{PseudoBundle(BaseSpace(), {}, false), {}};
    std::map<std::string, FiberSpace> fibers;
    for (const auto& p : v.base().points()) {
        auto f = make_clifford_fiber(v.metric(p.label));
        fibers.emplace(p.label, FiberSpace::standard(static_cast<int>(f->size())));
        out.fibres.emplace(p.label, f);
    }
    out.algebra = PseudoBundle(v.base(), std::move(fibers), false);
    return out;
}

std::map<std::string, Mat> induced_F_cl(const MetricPair& pair, double tol) {
    if (!check_compatible(pair, tol).passed())
        throw Error(ErrorCode::IncompatibleMetrics, "the Clifford extension of f~ needs compatible metrics");
    std::map<std::string, Mat> out;
    for (const auto& y : pair.gluing.domain) {
        auto src = make_clifford_fiber(pair.v1.metric(y));
        auto dst = make_clifford_fiber(pair.v2.metric(pair.gluing.base_map.at(y)));
        out.emplace(y, clifford_extension(*src, *dst, pair.gluing.fiber_maps.at(y).coeffs()));
    }
    return out;
}

CliffordGluing glue_clifford(const MetricPair& pair, const GluedBundle& glued, double tol) {
    std::map<std::string, Mat> f = induced_F_cl(pair, tol);
    CliffordBundle first = clifford_bundle(pair.v1);
    CliffordBundle second = clifford_bundle(pair.v2);
    CliffordBundle target = clifford_bundle(glued.bundle);
    GluedBundle algebras = glue_bundles(first.algebra, second.algebra,
                                        make_gluing(first.algebra, second.algebra, pair.gluing.domain,
                                                    pair.gluing.base_map, f));

    auto factor = [&](bool one, const std::string& label) -> const CliffordFiber& {
        return *(one ? first : second).fibres.at(label);
    };

    std::vector<Branch> br;
    double mult = 0.0;
    for (const auto& p : glued.bundle.base().points()) {
        const bool one = p.region == Region::I1;
        const Branch& jv = (one ? glued.j1 : glued.j2).at(p.origin);
        const Branch& ja = (one ? algebras.j1 : algebras.j2).at(p.origin);
        const CliffordFiber& dst = *target.fibres.at(p.label);
        Mat ext = clifford_extension(factor(one, p.origin), dst, jv.matrix);
        Mat phi = ext * ja.matrix.inverse();
        mult = std::max(mult, multiplicativity_residual(factor(one, p.origin), dst, phi));
        br.push_back({p.label, p.label, p.region, phi});
    }
    PiecewiseBundleMap phi(algebras.bundle.base(), target.algebra.base(), std::move(br));

    double res = 0.0;
    auto run = [&](bool one, const PiecewiseBundleMap& jv, const PiecewiseBundleMap& ja) {
        for (const auto& b : jv.branches()) {
            const Branch& a = ja.at(b.source);
            Mat ext = clifford_extension(factor(one, b.source), *target.fibres.at(b.target), b.matrix);
            Mat r = phi.at(a.target).matrix * a.matrix - ext;
            if (r.size() > 0) res = std::max(res, r.cwiseAbs().maxCoeff());
        }
    };
    run(true, glued.j1, algebras.j1);
    run(false, glued.j2, algebras.j2);

    return {std::move(first), std::move(second), std::move(target), std::move(algebras), std::move(phi), res, mult};
}

CovariantClifford covariant_clifford(const MetricPair& pair, const GluedBundle& glued, double tol) {
    DualIdentification psi = psi_cup_star(glued);
    CliffordBundle source = clifford_bundle(dual_bundle(glued.bundle));

    MetricPair dp = dual_pair(pair);
    GluedBundle dg = dual_glued(glued);
    dg.bundle = dg.bundle.with_metric(glued_dual_metric(pair));
    CliffordBundle target = clifford_bundle(dg.bundle);

    std::vector<Branch> br;
    double mult = 0.0;
    for (const auto& b : psi.map.branches()) {
        const CliffordFiber& s = *source.fibres.at(b.source);
        const CliffordFiber& t = *target.fibres.at(b.target);
        Mat m = clifford_extension(s, t, b.matrix);
        mult = std::max(mult, multiplicativity_residual(s, t, m));
        br.push_back({b.source, b.target, b.region, m});
    }
    PiecewiseBundleMap cup(source.algebra.base(), target.algebra.base(), std::move(br));

    CliffordGluing star = glue_clifford(dp, dg, tol);
    PiecewiseBundleMap composite = compose(inverse(star.phi), cup);
    return {std::move(source), std::move(target), std::move(cup), std::move(star), std::move(composite), mult};
}

}  // namespace pseudoglue
