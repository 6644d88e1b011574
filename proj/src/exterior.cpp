#include "pseudoglue/exterior.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>

namespace pseudoglue {

namespace {

long ipow(int n, int k) {
    long r = 1;
    for (int i = 0; i < k; ++i) r *= n;
    return r;
}

std::vector<int> digits(long index, int n, int k) {
    std::vector<int> d(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
        d[static_cast<std::size_t>(i)] = static_cast<int>(index % n);
        index /= n;
    }
    return d;
}

long from_digits(const std::vector<int>& d, int n) {
    long r = 0;
    for (int x : d) r = r * n + x;
    return r;
}

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

Mat kron_power(const Mat& f, int k) {
    Mat out = Mat::Identity(1, 1);
    for (int i = 0; i < k; ++i) out = kronecker(out, f);
    return out;
}

bool homogeneous(const Vec& a, int& g) {
    g = -1;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) == 0.0) continue;
        int gi = grade(static_cast<Blade>(i));
        if (g >= 0 && gi != g) return false;
        g = gi;
    }
    return true;
}

int log2_size(Eigen::Index size) { return std::countr_zero(static_cast<unsigned long>(size)); }

// Assembles a 2^m x 2^n graded map from its degree-k blocks.
Mat graded(int n, int m, const std::function<Mat(int)>& block) {
    Mat out = Mat::Zero(Eigen::Index{1} << m, Eigen::Index{1} << n);
    out(0, 0) = 1.0;
    for (int k = 1; k <= std::min(n, m); ++k) {
        Mat b = block(k);
        auto rows = blades_of_grade(m, k);
        auto cols = blades_of_grade(n, k);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols.size(); ++j)
                out(rows[i], cols[j]) = b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return out;
}

Mat graded_from_power(const Mat& f, const std::function<Mat(int)>& power) {
    const int n = static_cast<int>(f.cols());
    const int m = static_cast<int>(f.rows());
    return graded(n, m, [&](int k) { return Mat(project_matrix(m, k) * power(k) * lift_matrix(n, k)); });
}

double max_abs(const Mat& m) { return m.size() > 0 ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

int permutation_sign(const std::vector<int>& perm) {
    int inversions = 0;
    for (std::size_t i = 0; i < perm.size(); ++i)
        for (std::size_t j = i + 1; j < perm.size(); ++j)
            if (perm[i] > perm[j]) ++inversions;
    return (inversions & 1) ? -1 : 1;
}

long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

std::vector<Blade> blades_of_grade(int n, int k) {
    std::vector<Blade> out;
    for (Blade b = 0; b < (Blade{1} << n); ++b)
        if (grade(b) == k) out.push_back(b);
    return out;
}

Mat alt_matrix(int n, int k) {
    const long size = ipow(n, k);
    Mat out = Mat::Zero(size, size);
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    const double scale = 1.0 / factorial(k);
    std::vector<std::pair<std::vector<int>, int>> perms;
    do {
        perms.emplace_back(perm, permutation_sign(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (long t = 0; t < size; ++t) {
        auto d = digits(t, n, k);
        for (const auto& [p, s] : perms) {
            std::vector<int> moved(static_cast<std::size_t>(k));
            for (int i = 0; i < k; ++i) moved[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])];
            out(from_digits(moved, n), t) += s * scale;
        }
    }
    return out;
}

Mat lift_matrix(int n, int k) {
    Mat a = alt_matrix(n, k);
    auto blades = blades_of_grade(n, k);
    Mat out(a.rows(), static_cast<Eigen::Index>(blades.size()));
    for (std::size_t j = 0; j < blades.size(); ++j) {
        std::vector<int> d;
        for (int i = 0; i < n; ++i)
            if (blades[j] & (Blade{1} << i)) d.push_back(i);
        out.col(static_cast<Eigen::Index>(j)) = a.col(from_digits(d, n));
    }
    return out;
}

Mat project_matrix(int n, int k) {
    auto blades = blades_of_grade(n, k);
    Mat out = Mat::Zero(static_cast<Eigen::Index>(blades.size()), ipow(n, k));
    for (std::size_t j = 0; j < blades.size(); ++j) {
        std::vector<int> d;
        for (int i = 0; i < n; ++i)
            if (blades[j] & (Blade{1} << i)) d.push_back(i);
        out(static_cast<Eigen::Index>(j), from_digits(d, n)) = factorial(k);
    }
    return out;
}

TensorElement tensor_product(const TensorElement& a, const TensorElement& b) {
    if (a.n != b.n) throw Error(ErrorCode::FiberMismatch, "tensors over different fibres");
    return {a.n, a.degree + b.degree, kronecker(a.coeffs, b.coeffs)};
}

TensorElement alt(const TensorElement& t) { return {t.n, t.degree, alt_matrix(t.n, t.degree) * t.coeffs}; }

TensorElement lift(const Vec& blades, int n, int k) {
    auto list = blades_of_grade(n, k);
    Vec part(static_cast<Eigen::Index>(list.size()));
    for (std::size_t i = 0; i < list.size(); ++i) part(static_cast<Eigen::Index>(i)) = blades(list[i]);
    return {n, k, lift_matrix(n, k) * part};
}

Vec project(const TensorElement& t) {
    Vec part = project_matrix(t.n, t.degree) * t.coeffs;
    Vec out = Vec::Zero(Eigen::Index{1} << t.n);
    auto list = blades_of_grade(t.n, t.degree);
    for (std::size_t i = 0; i < list.size(); ++i) out(list[i]) = part(static_cast<Eigen::Index>(i));
    return out;
}

Vec wedge(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::FiberMismatch, "exterior elements over different fibres");
    const int n = log2_size(a.size());
    int ga = 0, gb = 0;
    if (homogeneous(a, ga) && homogeneous(b, gb) && ga >= 0 && gb >= 0 && ga + gb > n)
        throw Error(ErrorCode::DegreeOverflow, "degrees " + std::to_string(ga) + " + " + std::to_string(gb) +
                                                   " exceed " + std::to_string(n));
    return blade_algebra_mul(a, b, Vec::Zero(n));
}

Mat outermorphism(const Mat& f) {
    const int n = static_cast<int>(f.cols());
    const int m = static_cast<int>(f.rows());
    const Eigen::Index rows = Eigen::Index{1} << m;
    Mat out = Mat::Zero(rows, Eigen::Index{1} << n);
    std::vector<Vec> images;
    for (int a = 0; a < n; ++a) {
        Vec v = Vec::Zero(rows);
        for (int i = 0; i < m; ++i) v(Eigen::Index{1} << i) = f(i, a);
        images.push_back(v);
    }
    const Vec zero = Vec::Zero(m);
    for (Eigen::Index blade = 0; blade < out.cols(); ++blade) {
        Vec acc = Vec::Zero(rows);
        acc(0) = 1.0;
        for (int a = 0; a < n; ++a)
            if (blade & (Eigen::Index{1} << a)) acc = blade_algebra_mul(acc, images[static_cast<std::size_t>(a)], zero);
        out.col(blade) = acc;
    }
    return out;
}

Mat outermorphism_via_tensors(const Mat& f) {
    return graded_from_power(f, [&](int k) { return kron_power(f, k); });
}

PseudoBundle exterior_bundle(const PseudoBundle& v) {
    std::map<std::string, FiberSpace> fibers;
    for (const auto& p : v.base().points())
        fibers.emplace(p.label, FiberSpace::standard(1 << v.fiber(p.label).dim()));
    return PseudoBundle(v.base(), std::move(fibers), false);
}

std::map<std::string, Mat> induced_f_wedge_star(const BundleGluing& gluing) {
    std::map<std::string, Mat> out;
    for (const auto& y : gluing.domain) out.emplace(y, outermorphism(gluing.fiber_maps.at(y).coeffs()));
    return out;
}

std::map<std::string, Mat> induced_f_wedge(const BundleGluing& gluing) {
    return induced_f_wedge_star(induced_dual_gluing(gluing));
}

int dim_of(const PseudoBundle& v) { return v.max_dim(); }

ExteriorIdentification phi_wedge_star(const GluedBundle& glued) {
    PseudoBundle e1 = exterior_bundle(*glued.v1);
    PseudoBundle e2 = exterior_bundle(*glued.v2);
    GluedBundle target = glue_bundles(
        e1, e2, make_gluing(e1, e2, glued.gluing->domain, glued.gluing->base_map, induced_f_wedge_star(*glued.gluing)));
    PseudoBundle source = exterior_bundle(glued.bundle);

    const int top = dim_of(glued.bundle);
    std::vector<Identification> powers;
    double alt_res = 0.0;
    for (int k = 1; k <= top; ++k) {
        powers.push_back(phi_cup_otimes_n(glued, k));
        for (const auto& b : powers.back().map.branches()) {
            const int n = glued.bundle.fiber(b.source).dim();
            Mat a = alt_matrix(n, k);
            alt_res = std::max(alt_res, max_abs(b.matrix * a - a * b.matrix));
        }
    }

    std::vector<Branch> br;
    for (const auto& p : glued.bundle.base().points()) {
        const int n = glued.bundle.fiber(p.label).dim();
        Mat m = graded(n, n, [&](int k) {
            return Mat(project_matrix(n, k) * powers[static_cast<std::size_t>(k - 1)].map.at(p.label).matrix *
                       lift_matrix(n, k));
        });
        br.push_back({p.label, p.label, p.region, m});
    }
    PiecewiseBundleMap phi(source.base(), target.bundle.base(), std::move(br));

    double id_res = 0.0;
    auto run = [&](const PiecewiseBundleMap& jv, const PiecewiseBundleMap& je) {
        for (const auto& b : jv.branches())
            id_res = std::max(id_res, max_abs(phi.at(b.target).matrix * outermorphism(b.matrix) - je.at(b.source).matrix));
    };
    run(glued.j1, target.j1);
    run(glued.j2, target.j2);
    return {std::move(phi), std::move(source), std::move(target), id_res, alt_res};
}

CovariantExterior covariant_exterior(const GluedBundle& glued) {
    DualIdentification psi = psi_cup_star(glued);
    PseudoBundle source = exterior_bundle(psi.source);
    PseudoBundle target = exterior_bundle(psi.target.bundle);
    std::vector<Branch> br;
    double alt_res = 0.0, outer_res = 0.0;
    for (const auto& b : psi.map.branches()) {
        const Mat& d = b.matrix;
        const int n = static_cast<int>(d.cols());
        Mat m = graded_from_power(d, [&](int k) {
            Mat p = kron_power(d, k);
            Mat a = alt_matrix(n, k);
            alt_res = std::max(alt_res, max_abs(p * a - alt_matrix(static_cast<int>(d.rows()), k) * p));
            return p;
        });
        outer_res = std::max(outer_res, max_abs(m - outermorphism(d)));
        br.push_back({b.source, b.target, b.region, m});
    }
    PiecewiseBundleMap cup(source.base(), target.base(), std::move(br));
    ExteriorIdentification star = phi_wedge_star(dual_glued(glued));
    PiecewiseBundleMap wedge_map = compose(star.map, cup);
    return {std::move(cup), std::move(wedge_map), std::move(star), std::move(source), alt_res, outer_res};
}

}  // namespace pseudoglue
