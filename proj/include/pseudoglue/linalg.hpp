#pragma once

#include <Eigen/Dense>

#include "pseudoglue/errors.hpp"

namespace pseudoglue {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

namespace tol {
inline constexpr double rank = 1e-9;      // relative to the largest |eigenvalue|
inline constexpr double absolute = 1e-9;
inline constexpr double relative = 1e-9;
}  // namespace tol

bool approx_equal(double a, double b);
bool approx_equal(const Mat& a, const Mat& b);

// Numerical rank of an arbitrary matrix, singular values measured against the largest one.
int numerical_rank(const Mat& m, double eps = tol::rank);

// Fibre model: R^n with a designated characteristic subspace V0 (columns of
// char_basis) and a chosen complement V1 (columns of comp_basis).
class FiberSpace {
public:
    FiberSpace(Mat char_basis, Mat comp_basis);

    static FiberSpace standard(int n);

    int dim() const noexcept { return static_cast<int>(frame_.rows()); }
    int char_dim() const noexcept { return static_cast<int>(char_basis_.cols()); }

    const Mat& char_basis() const noexcept { return char_basis_; }
    const Mat& comp_basis() const noexcept { return comp_basis_; }

    // [char_basis | comp_basis] and its inverse.
    const Mat& frame() const noexcept { return frame_; }
    const Mat& frame_inverse() const noexcept { return frame_inv_; }

    // Coordinates of ambient vectors (columns) along V0 and V1 respectively.
    Mat char_coords(const Mat& v) const;
    Mat comp_coords(const Mat& v) const;

    bool is_standard() const noexcept { return char_dim() == dim(); }

private:
    Mat char_basis_;
    Mat comp_basis_;
    Mat frame_;
    Mat frame_inv_;
};

bool same_space(const FiberSpace& a, const FiberSpace& b);

class PseudoMetricForm {
public:
    const Mat& gram() const noexcept { return gram_; }
    const FiberSpace& space() const noexcept { return space_; }

    double operator()(const Vec& v, const Vec& w) const { return v.dot(gram_ * w); }

    // Gram matrix restricted to the characteristic basis, C^T G C.
    Mat characteristic_gram() const;

private:
    PseudoMetricForm(FiberSpace space, Mat gram) : space_(std::move(space)), gram_(std::move(gram)) {}
    friend PseudoMetricForm validate_pseudometric(const FiberSpace&, const Mat&);

    FiberSpace space_;
    Mat gram_;
};

// Throws NotSymmetric, NotPSD, RankMismatch or CharacteristicMismatch.
// The complement is required to be isotropic, so the pairing kernel is exactly V1.
PseudoMetricForm validate_pseudometric(const FiberSpace& space, const Mat& gram);

// Orthonormal basis (columns) of the positive eigenspace.
Mat characteristic_span(const PseudoMetricForm& g);

bool is_admissible(const FiberSpace& source, const FiberSpace& target, const Mat& coeffs);

class LinearFiberMap {
public:
    // Throws DimensionMismatch or NotAdmissible.
    LinearFiberMap(FiberSpace source, FiberSpace target, Mat coeffs);

    const FiberSpace& source() const noexcept { return source_; }
    const FiberSpace& target() const noexcept { return target_; }
    const Mat& coeffs() const noexcept { return coeffs_; }

    Vec operator()(const Vec& v) const { return coeffs_ * v; }

private:
    FiberSpace source_;
    FiberSpace target_;
    Mat coeffs_;
};

LinearFiberMap compose(const LinearFiberMap& outer, const LinearFiberMap& inner);

// Values of a smooth functional on the characteristic basis vectors.
using DualVector = Vec;

// Map between the standard dual fibres, target* -> source*.
LinearFiberMap dual_map(const LinearFiberMap& map);

DualVector pairing(const PseudoMetricForm& g, const Vec& v);
Vec pairing_inverse_on_characteristic(const PseudoMetricForm& g, const DualVector& phi);

// The induced form on the (standard, d-dimensional) dual fibre.
PseudoMetricForm dual_pseudometric(const PseudoMetricForm& g);

struct OrthogonalBasis {
    Mat basis;    // columns e_1..e_n: positive directions first, then isotropic
    Mat inverse;  // basis^{-1}: ambient coordinates -> basis coordinates
    Vec lambda;   // g(e_i, e_i)
    int positive = 0;
};

OrthogonalBasis orthogonal_basis(const PseudoMetricForm& g);

// Sorted descending; each vector's first nonzero coordinate made positive.
struct SymmetricEigen {
    Vec values;
    Mat vectors;
};
SymmetricEigen symmetric_eigen(const Mat& symmetric);

Mat kronecker(const Mat& a, const Mat& b);
Mat block_diagonal(const Mat& a, const Mat& b);

}  // namespace pseudoglue
