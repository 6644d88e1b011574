#pragma once

// Seeded random fibres, metrics and maps shared by the test programs.

#include <random>

#include <Eigen/QR>

#include "pseudoglue/bundles.hpp"
#include "pseudoglue/metrics.hpp"

namespace testing_support {

using pseudoglue::FiberSpace;
using pseudoglue::Mat;
using pseudoglue::Vec;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    bool coin() { return integer(0, 1) == 1; }

    Mat matrix(Eigen::Index rows, Eigen::Index cols) {
        Mat m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = uniform();
        return m;
    }
    Vec vector(Eigen::Index n) { return matrix(n, 1); }

    Mat orthogonal(int n) {
        if (n == 0) return Mat(0, 0);
        Eigen::HouseholderQR<Mat> qr(matrix(n, n));
        return qr.householderQ() * Mat::Identity(n, n);
    }

    // Well conditioned: orthogonal times a diagonal in [0.5, 2].
    Mat invertible(int n) {
        Mat d = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i) d(i, i) = uniform(0.5, 2.0) * (coin() ? 1.0 : -1.0);
        return orthogonal(n) * d;
    }

    Mat spd(int n) {
        Mat a = invertible(n);
        return a.transpose() * a;
    }

    // Characteristic and complement bases are mutually orthogonal, as metric validity requires.
    FiberSpace space(int n, int d) {
        Mat q = orthogonal(n);
        return FiberSpace(q.leftCols(d) * invertible(d), q.rightCols(n - d) * invertible(n - d));
    }

    // L^T M L with M positive definite, L extracting characteristic coordinates.
    Mat metric_gram(const FiberSpace& s) {
        const Mat l = pseudoglue::char_rows(s);
        Mat g = l.transpose() * spd(s.char_dim()) * l;
        return 0.5 * (g + g.transpose());
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

// f = [C_W A + K_W B | K_W R] T_V^{-1}: admissible by construction.
inline Mat admissible_map(const FiberSpace& v, const FiberSpace& w, const Mat& a, const Mat& b, const Mat& r) {
    Mat images(w.dim(), v.dim());
    images << w.char_basis() * a + w.comp_basis() * b, w.comp_basis() * r;
    return images * v.frame_inverse();
}

// Two one-point bundles "V" and "W" glued over their single points.
inline pseudoglue::MetricPair single_pair(const FiberSpace& v, const FiberSpace& w, const Mat& f, const Mat& gv,
                                          const Mat& gw) {
    using namespace pseudoglue;
    PseudoBundle bv(sampled_base("V", {0.0}), {{"0", v}});
    PseudoBundle bw(sampled_base("W", {0.0}), {{"0", w}});
    bv = bv.with_metric_grams({{"0", gv}});
    bw = bw.with_metric_grams({{"0", gw}});
    BundleGluing gl = make_gluing(bv, bw, {"0"}, {{"0", "0"}}, {{"0", f}});
    return {bv, bw, gl};
}

}  // namespace testing_support
