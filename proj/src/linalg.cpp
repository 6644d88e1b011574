#include "pseudoglue/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace pseudoglue {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::NotSymmetric: return "NotSymmetric";
        case ErrorCode::NotPSD: return "NotPSD";
        case ErrorCode::RankMismatch: return "RankMismatch";
        case ErrorCode::CharacteristicMismatch: return "CharacteristicMismatch";
        case ErrorCode::NotAdmissible: return "NotAdmissible";
        case ErrorCode::InvalidFiberSpace: return "InvalidFiberSpace";
        case ErrorCode::DuplicateLabel: return "DuplicateLabel";
        case ErrorCode::UnknownLabel: return "UnknownLabel";
        case ErrorCode::NonInjectiveBaseMap: return "NonInjectiveBaseMap";
        case ErrorCode::MissingFiberMap: return "MissingFiberMap";
        case ErrorCode::BaseMapNotInvertible: return "BaseMapNotInvertible";
        case ErrorCode::BaseMismatch: return "BaseMismatch";
        case ErrorCode::ProvenanceMismatch: return "ProvenanceMismatch";
        case ErrorCode::DualMapNotInvertible: return "DualMapNotInvertible";
        case ErrorCode::NotInvertible: return "NotInvertible";
        case ErrorCode::CriterionFails: return "CriterionFails";
        case ErrorCode::IncompatibleMetrics: return "IncompatibleMetrics";
        case ErrorCode::IncompatibleActions: return "IncompatibleActions";
        case ErrorCode::FiberMismatch: return "FiberMismatch";
        case ErrorCode::DimensionTooLarge: return "DimensionTooLarge";
        case ErrorCode::DegreeOverflow: return "DegreeOverflow";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::EvaluationError: return "EvaluationError";
        case ErrorCode::ZeroGluingConstant: return "ZeroGluingConstant";
        case ErrorCode::NonPositiveCoefficient: return "NonPositiveCoefficient";
        case ErrorCode::InvalidScenario: return "InvalidScenario";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

SyntaxError::SyntaxError(std::size_t position, const std::string& message)
    : Error(ErrorCode::SyntaxError, message + " at offset " + std::to_string(position)),
      position_(position) {}

bool approx_equal(double a, double b) {
    return std::abs(a - b) <= tol::absolute + tol::relative * std::max(std::abs(a), std::abs(b));
}

bool approx_equal(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            if (!approx_equal(a(i, j), b(i, j))) return false;
    return true;
}

int numerical_rank(const Mat& m, double eps) {
    if (m.size() == 0) return 0;
    Eigen::BDCSVD<Mat> svd(m);
    const Vec& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > eps * s(0)) ++r;
    return r;
}

SymmetricEigen symmetric_eigen(const Mat& symmetric) {
    const auto n = symmetric.rows();
    SymmetricEigen out{Vec(n), Mat(n, n)};
    if (n == 0) return out;
    Eigen::SelfAdjointEigenSolver<Mat> solver(symmetric);
    Vec values = solver.eigenvalues();
    Mat vectors = solver.eigenvectors();

    double scale = values.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::Index lead = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(vectors(i, j)) > 1e-12) {
                lead = i;
                break;
            }
        }
        if (vectors(lead, j) < 0) vectors.col(j) *= -1.0;
    }

    auto argmax = [&](Eigen::Index j) {
        Eigen::Index k = 0;
        vectors.col(j).cwiseAbs().maxCoeff(&k);
        return k;
    };
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    const double tie = tol::rank * std::max(scale, 1e-300);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (std::abs(values(a) - values(b)) > tie) return values(a) > values(b);
        return argmax(a) < argmax(b);
    });
    for (Eigen::Index j = 0; j < n; ++j) {
        out.values(j) = values(order[static_cast<std::size_t>(j)]);
        out.vectors.col(j) = vectors.col(order[static_cast<std::size_t>(j)]);
    }
    return out;
}

FiberSpace::FiberSpace(Mat char_basis, Mat comp_basis)
    : char_basis_(std::move(char_basis)), comp_basis_(std::move(comp_basis)) {
    if (char_basis_.rows() != comp_basis_.rows() && char_basis_.cols() > 0 && comp_basis_.cols() > 0)
        throw Error(ErrorCode::InvalidFiberSpace, "basis blocks have different ambient dimensions");
    const auto n = std::max(char_basis_.rows(), comp_basis_.rows());
    if (char_basis_.cols() == 0) char_basis_.resize(n, 0);
    if (comp_basis_.cols() == 0) comp_basis_.resize(n, 0);
    if (char_basis_.cols() + comp_basis_.cols() != n)
        throw Error(ErrorCode::InvalidFiberSpace, "basis columns do not add up to the fibre dimension");
    frame_.resize(n, n);
    frame_ << char_basis_, comp_basis_;
    if (n > 0) {
        if (numerical_rank(frame_) != n)
            throw Error(ErrorCode::InvalidFiberSpace, "[char | comp] is not invertible");
        frame_inv_ = frame_.inverse();
    } else {
        frame_inv_.resize(0, 0);
    }
}

FiberSpace FiberSpace::standard(int n) { return FiberSpace(Mat::Identity(n, n), Mat(n, 0)); }

Mat FiberSpace::char_coords(const Mat& v) const { return frame_inv_.topRows(char_dim()) * v; }

Mat FiberSpace::comp_coords(const Mat& v) const {
    return frame_inv_.bottomRows(dim() - char_dim()) * v;
}

bool same_space(const FiberSpace& a, const FiberSpace& b) {
    return a.dim() == b.dim() && a.char_dim() == b.char_dim() &&
           approx_equal(a.char_basis(), b.char_basis()) && approx_equal(a.comp_basis(), b.comp_basis());
}

Mat PseudoMetricForm::characteristic_gram() const {
    const Mat& c = space_.char_basis();
    return c.transpose() * gram_ * c;
}

PseudoMetricForm validate_pseudometric(const FiberSpace& space, const Mat& gram) {
    const int n = space.dim();
    if (gram.rows() != n || gram.cols() != n)
        throw Error(ErrorCode::DimensionMismatch, "gram is not " + std::to_string(n) + "x" + std::to_string(n));
    if (!approx_equal(gram, gram.transpose())) throw Error(ErrorCode::NotSymmetric, "gram is not symmetric");
    Mat sym = 0.5 * (gram + gram.transpose());
    if (n == 0) return PseudoMetricForm(space, sym);

    auto eig = symmetric_eigen(sym);
    const double lmax = eig.values.cwiseAbs().maxCoeff();
    const double cut = tol::rank * lmax;
    if (eig.values.minCoeff() < -cut) throw Error(ErrorCode::NotPSD, "negative eigenvalue");
    int rank = 0;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
        if (eig.values(i) > cut) ++rank;
    if (rank != space.char_dim())
        throw Error(ErrorCode::RankMismatch,
                    "rank " + std::to_string(rank) + " but d = " + std::to_string(space.char_dim()));

    const Mat& c = space.char_basis();
    const Mat p = eig.vectors.leftCols(rank);
    const double cnorm = std::max(c.norm(), 1.0);
    if ((c - p * (p.transpose() * c)).norm() > 1e-8 * cnorm)
        throw Error(ErrorCode::CharacteristicMismatch, "positive eigenspace differs from span(char_basis)");
    const Mat& k = space.comp_basis();
    if (k.cols() > 0 && (sym * k).norm() > 1e-8 * std::max(lmax, 1e-300) * std::max(k.norm(), 1.0))
        throw Error(ErrorCode::CharacteristicMismatch, "comp_basis is not isotropic");
    return PseudoMetricForm(space, sym);
}

Mat characteristic_span(const PseudoMetricForm& g) {
    const int n = g.space().dim();
    if (n == 0 || g.space().char_dim() == 0) return Mat(n, 0);
    return symmetric_eigen(g.gram()).vectors.leftCols(g.space().char_dim());
}

bool is_admissible(const FiberSpace& source, const FiberSpace& target, const Mat& coeffs) {
    if (coeffs.rows() != target.dim() || coeffs.cols() != source.dim())
        throw Error(ErrorCode::DimensionMismatch, "map shape does not match its fibres");
    if (source.comp_basis().cols() == 0 || target.char_dim() == 0) return true;
    const Mat leak = target.char_coords(coeffs * source.comp_basis());
    const double scale = std::max(1.0, coeffs.norm());
    return leak.cwiseAbs().maxCoeff() <= tol::absolute * scale;
}

LinearFiberMap::LinearFiberMap(FiberSpace source, FiberSpace target, Mat coeffs)
    : source_(std::move(source)), target_(std::move(target)), coeffs_(std::move(coeffs)) {
    if (!is_admissible(source_, target_, coeffs_))
        throw Error(ErrorCode::NotAdmissible, "complement is sent into the target characteristic subspace");
}

LinearFiberMap compose(const LinearFiberMap& outer, const LinearFiberMap& inner) {
    if (outer.source().dim() != inner.target().dim())
        throw Error(ErrorCode::DimensionMismatch, "cannot compose maps");
    return LinearFiberMap(inner.source(), outer.target(), outer.coeffs() * inner.coeffs());
}

LinearFiberMap dual_map(const LinearFiberMap& map) {
    const FiberSpace& s = map.source();
    const FiberSpace& t = map.target();
    Mat images = t.char_coords(map.coeffs() * s.char_basis());  // d_t x d_s
    return LinearFiberMap(FiberSpace::standard(t.char_dim()), FiberSpace::standard(s.char_dim()),
                          images.transpose());
}

DualVector pairing(const PseudoMetricForm& g, const Vec& v) {
    if (v.size() != g.space().dim()) throw Error(ErrorCode::DimensionMismatch, "vector not in fibre");
    return g.space().char_basis().transpose() * (g.gram() * v);
}

Vec pairing_inverse_on_characteristic(const PseudoMetricForm& g, const DualVector& phi) {
    const int d = g.space().char_dim();
    if (phi.size() != d) throw Error(ErrorCode::DimensionMismatch, "dual vector has wrong length");
    if (d == 0) return Vec::Zero(g.space().dim());
    Vec alpha = g.characteristic_gram().ldlt().solve(phi);
    return g.space().char_basis() * alpha;
}

PseudoMetricForm dual_pseudometric(const PseudoMetricForm& g) {
    const int d = g.space().char_dim();
    FiberSpace dual = FiberSpace::standard(d);
    if (d == 0) return validate_pseudometric(dual, Mat(0, 0));
    Mat inv = g.characteristic_gram().inverse();
    return validate_pseudometric(dual, 0.5 * (inv + inv.transpose()));
}

OrthogonalBasis orthogonal_basis(const PseudoMetricForm& g) {
    const int n = g.space().dim();
    const int d = g.space().char_dim();
    OrthogonalBasis out;
    out.positive = d;
    if (n == 0) {
        out.basis = out.inverse = Mat(0, 0);
        out.lambda = Vec(0);
        return out;
    }
    auto eig = symmetric_eigen(g.gram());
    out.basis = eig.vectors;
    out.inverse = eig.vectors.transpose();
    out.lambda = Vec::Zero(n);
    for (int i = 0; i < d; ++i) out.lambda(i) = eig.values(i);
    return out;
}

Mat kronecker(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Mat block_diagonal(const Mat& a, const Mat& b) {
    Mat out = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    out.topLeftCorner(a.rows(), a.cols()) = a;
    out.bottomRightCorner(b.rows(), b.cols()) = b;
    return out;
}

}  // namespace pseudoglue
