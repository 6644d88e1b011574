#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>

#include "pseudoglue/metrics.hpp"

namespace pseudoglue {

// Blades are bitmasks over basis indices; bit i set means e_i is a factor.
using Blade = std::uint32_t;

int grade(Blade b);
// Sign of reordering e_A e_B into increasing index order.
double reorder_sign(Blade a, Blade b);

// e_A e_B = coefficient * e_{A xor B} with e_i^2 = -lambda_i. Zero lambda gives the wedge product.
std::pair<double, Blade> blade_product(Blade a, Blade b, const Vec& lambda);
// Bilinear extension of blade_product to coefficient tables of length 2^n.
Vec blade_algebra_mul(const Vec& a, const Vec& b, const Vec& lambda);

struct CliffordFiber {
    FiberSpace space;
    Mat gram;
    OrthogonalBasis ortho;  // blades are taken in this basis

    int dim() const noexcept { return space.dim(); }
    std::size_t size() const noexcept { return std::size_t{1} << dim(); }
};

using CliffordFiberPtr = std::shared_ptr<const CliffordFiber>;

CliffordFiberPtr make_clifford_fiber(const PseudoMetricForm& g);

struct Multivector {
    CliffordFiberPtr fibre;
    Vec coeffs;
};

Multivector cl_scalar(const CliffordFiberPtr& fibre, double s);
Multivector cl_blade(const CliffordFiberPtr& fibre, Blade b);
// An ambient vector written in the orthogonal basis of the fibre.
Multivector cl_vector(const CliffordFiberPtr& fibre, const Vec& ambient);

Multivector operator+(const Multivector& a, const Multivector& b);
Multivector operator-(const Multivector& a, const Multivector& b);
Multivector operator*(double s, const Multivector& a);

// Throws FiberMismatch.
Multivector cl_mul(const Multivector& a, const Multivector& b);

// Multiplication of the ambient tensor words of a and b followed by reduction modulo
// v(x)w + w(x)v + 2g(v,w). Independent of cl_mul. Throws DimensionTooLarge for n > 3, FiberMismatch.
Multivector tensor_quotient_oracle(const Multivector& a, const Multivector& b);

// The algebra map induced by an ambient linear map: e_A |-> F(e_a1)...F(e_ak).
// Returns a dst.size() x src.size() matrix.
Mat clifford_extension(const CliffordFiber& src, const CliffordFiber& dst, const Mat& ambient);

// max over blade pairs of |phi(e_A e_B) - phi(e_A) phi(e_B)|.
double multiplicativity_residual(const CliffordFiber& src, const CliffordFiber& dst, const Mat& phi);

struct CliffordBundle {
    PseudoBundle algebra;  // standard fibres of dimension 2^n
    std::map<std::string, CliffordFiberPtr> fibres;
};

// Requires a metric on v.
CliffordBundle clifford_bundle(const PseudoBundle& v);

// F~^Cl per point of Y. Throws IncompatibleMetrics.
std::map<std::string, Mat> induced_F_cl(const MetricPair& pair, double tol = tol::absolute);

struct CliffordGluing {
    CliffordBundle first;
    CliffordBundle second;
    CliffordBundle glued_metric_algebra;  // Cl(V1 u V2, g~)
    GluedBundle glued_algebras;           // Cl(V1) u_{F~^Cl} Cl(V2)
    PiecewiseBundleMap phi;               // glued_algebras -> glued_metric_algebra
    double identity_residual = 0.0;
    double multiplicativity = 0.0;
};

// `glued` must carry the induced metric. Throws IncompatibleMetrics.
CliffordGluing glue_clifford(const MetricPair& pair, const GluedBundle& glued, double tol = tol::absolute);

struct CovariantClifford {
    CliffordBundle dual_of_glued;  // Cl((V1 u V2)*, g~*)
    CliffordBundle glued_of_duals; // Cl(V2* u V1*, ~g*)
    PiecewiseBundleMap phi_cup_star;   // Cl((V1 u V2)*) -> Cl(V2* u V1*)
    CliffordGluing star;               // Cl(V2*) u Cl(V1*) -> Cl(V2* u V1*)
    PiecewiseBundleMap phi_cup_cl_star;  // (phi_cl_star)^-1 o phi_cup_star
    double multiplicativity = 0.0;       // of phi_cup_star
};

// `glued` must carry g~. Throws IncompatibleMetrics when the duals are not compatible.
CovariantClifford covariant_clifford(const MetricPair& pair, const GluedBundle& glued, double tol = tol::absolute);

}  // namespace pseudoglue
