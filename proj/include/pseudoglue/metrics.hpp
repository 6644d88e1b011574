#pragma once

#include <utility>

#include "pseudoglue/bundles.hpp"
#include "pseudoglue/report.hpp"

namespace pseudoglue {

// Two bundles carrying metrics, and the gluing between them.
struct MetricPair {
    PseudoBundle v1;
    PseudoBundle v2;
    BundleGluing gluing;
};

// (V2*, V1*) with their dual metrics, glued along (f~*, f^-1).
MetricPair dual_pair(const MetricPair& pair);

// g1(y)(v, w) = g2(f(y))(f~v, f~w) over every y in Y.
VerificationReport check_compatible(const MetricPair& pair, double tol = tol::absolute);

struct CriterionOutcome {
    bool injective_on_char = true;  // Ker f~ meets V0 trivially
    bool char_into_char = true;     // f~(V0) lies in W0
    double leak = 0.0;              // largest W1-coordinate of f~(V0)
    bool holds() const noexcept { return injective_on_char && char_into_char; }
};

CriterionOutcome compatibility_criterion(const LinearFiberMap& f, double tol = tol::absolute);
VerificationReport check_compatibility_criterion(const MetricPair& pair, double tol = tol::absolute);
VerificationReport check_compatibility_criterion(const PseudoBundle& v1, const PseudoBundle& v2,
                                                 const BundleGluing& gluing, double tol = tol::absolute);

// Follows the basis completion of the existence argument. Throws CriterionFails.
std::pair<PseudoMetricForm, PseudoMetricForm> construct_compatible_metrics(const FiberSpace& v, const FiberSpace& w,
                                                                           const Mat& f);

// Checks "dual-compatibility" (g2*, g1* compatible along (f~*, f^-1)), "dual-map-invertibility"
// and "dual-criterion-equivalence" (the two agree at every glued point). Throws BaseMapNotInvertible.
VerificationReport check_dual_compatible(const MetricPair& pair, double tol = tol::absolute);

// Throws IncompatibleMetrics.
MetricField induced_metric_direct(const MetricPair& pair, const GluedBundle& glued, double tol = tol::absolute);
// Through the switch, the factor metrics seen as dual tensors and Psi^{-1} (x) Psi^{-1}.
MetricField induced_metric_via_phi(const MetricPair& pair, const GluedBundle& glued);

// g~* on (V1 u V2)* from pairing inverses of g~; `glued` must carry g~.
MetricField dual_of_induced(const GluedBundle& glued);
// ~g* on V2* u V1*: g2* over i1(X2 \ f(Y)), g1* over i2(X1).
MetricField glued_dual_metric(const MetricPair& pair);

// g~*(x)(Psi^-1 v*, Psi^-1 w*) = ~g*(phi x)(v*, w*). `glued` must carry g~.
VerificationReport verify_isometry(const MetricPair& pair, const GluedBundle& glued, double tol = tol::absolute);

// Characteristic sub-bundle in characteristic coordinates; carries C^T G C when v has a metric.
PseudoBundle characteristic_subbundle(const PseudoBundle& v);
// The unique form restricting to g0 on V0 and vanishing on V1.
MetricField metric_from_characteristic(const PseudoBundle& v, const MetricField& g0);
// V0 -> V*, w |-> g(w, .), over the identity.
PiecewiseBundleMap pairing_bundle_map(const PseudoBundle& v);

struct PhiChain {
    PiecewiseBundleMap psi0_glued_inverse;  // (V1 u V2)* -> (V1 u V2)0
    PiecewiseBundleMap phi0_inverse;        // (V1 u V2)0 -> V1_0 u V2_0
    PiecewiseBundleMap switch0;             // V1_0 u V2_0 -> V2_0 u V1_0
    PiecewiseBundleMap psi0_factors;        // V2_0 u V1_0 -> V2* u V1*
    PiecewiseBundleMap composite;
};

// `glued` must carry g~. Throws NotInvertible when f~ restricted to V0 is not invertible.
PhiChain build_phi_chain(const MetricPair& pair, const GluedBundle& glued);
VerificationReport verify_phi_chain(const MetricPair& pair, const GluedBundle& glued, double tol = tol::absolute);

// Characteristic coordinates of f~ restricted to V0, d_target x d_source.
Mat characteristic_restriction(const LinearFiberMap& f);

// Rows extracting characteristic coordinates; G = L^T M L rebuilds an ambient form from M.
Mat char_rows(const FiberSpace& s);

}  // namespace pseudoglue
