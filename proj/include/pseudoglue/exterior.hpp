#pragma once

#include <map>
#include <string>
#include <vector>

#include "pseudoglue/bundles.hpp"
#include "pseudoglue/clifford.hpp"

namespace pseudoglue {

// Degree-k tensor over R^n; entry index is the base-n number whose leading digit is the first slot.
struct TensorElement {
    int n = 0;
    int degree = 0;
    Vec coeffs;
};

TensorElement tensor_product(const TensorElement& a, const TensorElement& b);
// (1/k!) sum over permutations of sign(sigma) times the permuted tensor.
TensorElement alt(const TensorElement& t);

int permutation_sign(const std::vector<int>& perm);
long binomial(int n, int k);
std::vector<Blade> blades_of_grade(int n, int k);

Mat alt_matrix(int n, int k);
// Blades of grade k to their alternating tensors, n^k x C(n,k), and back.
Mat lift_matrix(int n, int k);
Mat project_matrix(int n, int k);

TensorElement lift(const Vec& blades, int n, int k);  // grade-k part only
Vec project(const TensorElement& t);                   // onto the blade table

// Exterior elements are blade tables of length 2^n in the ambient basis.
// Throws FiberMismatch; throws DegreeOverflow when both factors are homogeneous and the grades exceed n.
Vec wedge(const Vec& a, const Vec& b);

// e_A |-> F e_a1 ^ ... ^ F e_ak, a 2^m x 2^n matrix for an m x n matrix F.
Mat outermorphism(const Mat& f);
// The same map built degree by degree as project o F^(x)k o lift.
Mat outermorphism_via_tensors(const Mat& f);

// Exterior algebra bundle: standard fibres of dimension 2^n over the same base.
PseudoBundle exterior_bundle(const PseudoBundle& v);

// f~^{wedge*} per point of Y.
std::map<std::string, Mat> induced_f_wedge_star(const BundleGluing& gluing);
// f~^{wedge} := (f~*)^{wedge*} per point of f(Y). Throws BaseMapNotInvertible.
std::map<std::string, Mat> induced_f_wedge(const BundleGluing& gluing);

int dim_of(const PseudoBundle& v);  // largest fibre dimension

struct ExteriorIdentification {
    PiecewiseBundleMap map;
    PseudoBundle source;
    GluedBundle target;          // for maps landing on a glued exterior bundle
    double identity_residual = 0.0;  // j-identities
    double alt_residual = 0.0;       // Alt intertwining of the tensor powers used
};

// wedge*(V1 u V2) -> wedge*(V1) u_{f~^wedge*} wedge*(V2), over the identity.
ExteriorIdentification phi_wedge_star(const GluedBundle& glued);

struct CovariantExterior {
    PiecewiseBundleMap phi_cup_star_wedge;  // wedge(V1 u V2) -> wedge*(V2* u V1*)
    PiecewiseBundleMap phi_wedge;           // wedge(V1 u V2) -> wedge(V2) u_{f~^wedge} wedge(V1)
    ExteriorIdentification dual_star;       // wedge*(V2* u V1*) -> wedge(V2) u wedge(V1)
    PseudoBundle source;                    // wedge(V1 u V2)
    double alt_residual = 0.0;
    double outermorphism_residual = 0.0;    // tensor construction vs blade outermorphism
};

// Throws the errors of psi_cup_star.
CovariantExterior covariant_exterior(const GluedBundle& glued);

}  // namespace pseudoglue
