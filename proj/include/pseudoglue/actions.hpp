#pragma once

#include <map>
#include <string>
#include <vector>

#include "pseudoglue/clifford.hpp"
#include "pseudoglue/exterior.hpp"

namespace pseudoglue {

// c(v) on the blade table of wedge*(R^n) in the ambient basis:
// v ^ w minus the contraction of w against g(v, .).
Mat standard_action_matrix(const Mat& gram, const Vec& v);
// Throws FiberMismatch when v or omega do not fit the fibre of g.
Vec standard_action(const PseudoMetricForm& g, const Vec& v, const Vec& omega);

// Operators of the orthogonal-basis blades: c(e_a1) o ... o c(e_ak), indexed by blade.
std::vector<Mat> blade_operators(const CliffordFiber& fibre);
// sum_A a_A c(e_A).
Mat extend_action(const CliffordFiber& fibre, const Vec& a);
Mat act(const std::vector<Mat>& ops, const Vec& a);

// Per point, one operator on the exterior blade table for each Clifford blade.
struct ActionOperator {
    std::map<std::string, std::vector<Mat>> ops;
};

// Standard action of Cl(V, g) on wedge*(V) over every point; v must carry a metric.
ActionOperator standard_action_operator(const PseudoBundle& v);

// f~^{wedge*}(c1(v)(e)) = c2(f~ v)(f~^{wedge*} e) on ambient generators and exterior blades over Y.
VerificationReport check_actions_compatible(const MetricPair& pair, double tol = tol::absolute);

// The action on a glued exterior bundle: over each region, the factor action conjugated by
// the j-identifications of the Clifford and exterior gluings. Throws IncompatibleActions.
ActionOperator glued_action(const MetricPair& pair, const CliffordGluing& cl, const GluedBundle& exterior,
                            double tol = tol::absolute);

double action_relation_residual(const CliffordFiber& fibre, const Vec& v, const Vec& w);

// `glued` must carry g~.
VerificationReport verify_equiv_contravariant(const MetricPair& pair, const GluedBundle& glued,
                                              double tol = tol::absolute);
// Reports "covariant-action-equivalence" and "covariant-action-equivalence-glued".
VerificationReport verify_equiv_covariant(const MetricPair& pair, const GluedBundle& glued,
                                          double tol = tol::absolute);

}  // namespace pseudoglue
