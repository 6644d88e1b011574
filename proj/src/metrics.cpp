#include "pseudoglue/metrics.hpp"

#include "pseudoglue/anchors.hpp"

#include <cmath>
#include <limits>

namespace pseudoglue {

namespace {


Vec basis_vector(int n, int i) {
    Vec e = Vec::Zero(n);
    e(i) = 1.0;
    return e;
}

// Largest entry of r together with its position.
double worst_entry(const Mat& r, int& row, int& col) {
    row = col = 0;
    if (r.size() == 0) return 0.0;
    Eigen::Index i = 0, j = 0;
    double w = r.cwiseAbs().maxCoeff(&i, &j);
    row = static_cast<int>(i);
    col = static_cast<int>(j);
    return w;
}

void observe_matrix(ResidualTracker& t, const Mat& r, const std::string& point, const std::string& what) {
    int i = 0, j = 0;
    double w = worst_entry(r, i, j);
    Vec e = r.rows() > 0 ? basis_vector(static_cast<int>(r.rows()), i) : Vec();
    t.observe(w, point, e, what + " differs at basis pair (" + std::to_string(i) + ", " + std::to_string(j) + ")");
}

Mat flatten(const Mat& m) {
    Mat v(m.rows() * m.cols(), 1);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) v(i * m.cols() + j, 0) = m(i, j);
    return v;
}

Mat unflatten(const Mat& v, Eigen::Index rows, Eigen::Index cols) {
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = v(i * cols + j, 0);
    return m;
}

Mat checked_inverse(const Mat& m, ErrorCode code, const std::string& where) {
    if (m.rows() != m.cols() || (m.rows() > 0 && numerical_rank(m) != m.rows()))
        throw Error(code, "map over '" + where + "' is not invertible");
    return m.rows() > 0 ? Mat(m.inverse()) : m;
}

}  // namespace

Mat char_rows(const FiberSpace& s) { return s.frame_inverse().topRows(s.char_dim()); }

Mat characteristic_restriction(const LinearFiberMap& f) {
    return f.target().char_coords(f.coeffs() * f.source().char_basis());
}

MetricPair dual_pair(const MetricPair& pair) {
    return {dual_bundle(pair.v2), dual_bundle(pair.v1), induced_dual_gluing(pair.gluing)};
}

VerificationReport check_compatible(const MetricPair& pair, double tol) {
    ResidualTracker t(tol);
    for (const auto& y : pair.gluing.domain) {
        const LinearFiberMap& f = pair.gluing.fiber_maps.at(y);
        const Mat& g1 = pair.v1.metric(y).gram();
        const Mat& g2 = pair.v2.metric(pair.gluing.base_map.at(y)).gram();
        Mat r = g1 - f.coeffs().transpose() * g2 * f.coeffs();
        observe_matrix(t, r, glued_label(pair.v2.base().name(), pair.gluing.base_map.at(y)), "g1 vs g2(f~, f~)");
    }
    VerificationReport rep;
    rep.add(t.finish("metric-compatibility", anchors::compatible));
    return rep;
}

CriterionOutcome compatibility_criterion(const LinearFiberMap& f, double tol) {
    CriterionOutcome out;
    const int d = f.source().char_dim();
    if (d == 0) return out;
    Mat b = f.coeffs() * f.source().char_basis();
    // rank threshold measured against |f||C|, so roundoff images do not count as injective
    const double scale = f.coeffs().norm() * f.source().char_basis().norm();
    const Vec sv = Eigen::BDCSVD<Mat>(b).singularValues();
    out.injective_on_char = sv.size() == d && scale > 0.0 && sv(d - 1) > tol::rank * scale;
    Mat comp = f.target().comp_coords(b);
    out.leak = comp.size() > 0 ? comp.cwiseAbs().maxCoeff() : 0.0;
    out.char_into_char = out.leak < tol;
    return out;
}

VerificationReport check_compatibility_criterion(const PseudoBundle&, const PseudoBundle& v2,
                                                 const BundleGluing& gluing, double tol) {
    ResidualTracker t(tol);
    for (const auto& y : gluing.domain) {
        const auto& f = gluing.fiber_maps.at(y);
        CriterionOutcome c = compatibility_criterion(f, tol);
        const std::string point = glued_label(v2.base().name(), gluing.base_map.at(y));
        if (!c.injective_on_char) t.fail(point, "(a) fails: f~ kills a nonzero characteristic vector");
        if (!c.char_into_char) t.fail(point, "(b) fails: f~(V0) leaves the characteristic subspace of the target");
        t.observe(c.char_into_char ? c.leak : 0.0, point);
    }
    VerificationReport rep;
    rep.add(t.finish("compatibility-criterion", anchors::criterion));
    return rep;
}

VerificationReport check_compatibility_criterion(const MetricPair& pair, double tol) {
    return check_compatibility_criterion(pair.v1, pair.v2, pair.gluing, tol);
}

std::pair<PseudoMetricForm, PseudoMetricForm> construct_compatible_metrics(const FiberSpace& v, const FiberSpace& w,
                                                                           const Mat& f) {
    LinearFiberMap map(v, w, f);
    CriterionOutcome c = compatibility_criterion(map);
    if (!c.holds()) throw Error(ErrorCode::CriterionFails, "no compatible pair exists for this map");

    const Mat lv = char_rows(v);
    Mat gv = lv.transpose() * lv;

    const int dv = v.char_dim();
    const int dw = w.char_dim();
    Mat a = characteristic_restriction(map);
    Mat p(dw, dw);
    if (dw > 0) {
        Mat u = Mat::Identity(dw, dw);
        if (dv > 0) {
            Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullU);
            u = svd.matrixU();
        }
        p << a, u.rightCols(dw - dv);
    }
    Mat m = dw > 0 ? Mat((p * p.transpose()).inverse()) : Mat(0, 0);
    const Mat lw = char_rows(w);
    Mat gw = lw.transpose() * m * lw;
    return {validate_pseudometric(v, 0.5 * (gv + gv.transpose())), validate_pseudometric(w, 0.5 * (gw + gw.transpose()))};
}

VerificationReport check_dual_compatible(const MetricPair& pair, double tol) {
    invert_label_map(pair.gluing.base_map);
    ResidualTracker direct(tol), invertible(tol), agree(tol);
    for (const auto& y : pair.gluing.domain) {
        const std::string& fy = pair.gluing.base_map.at(y);
        const std::string point = glued_label(pair.v2.base().name(), fy);
        Mat dmap = dual_map(pair.gluing.fiber_maps.at(y)).coeffs();
        Mat g1s = dual_pseudometric(pair.v1.metric(y)).gram();
        Mat g2s = dual_pseudometric(pair.v2.metric(fy)).gram();

        ResidualTracker here(tol);
        Mat r = g2s - dmap.transpose() * g1s * dmap;
        observe_matrix(here, r, point, "g2* vs g1*(f~*, f~*)");
        observe_matrix(direct, r, point, "g2* vs g1*(f~*, f~*)");

        const bool inv = dmap.rows() == dmap.cols() && (dmap.rows() == 0 || numerical_rank(dmap) == dmap.rows());
        if (!inv)
            invertible.fail(point, "f~* is " + std::to_string(dmap.rows()) + "x" + std::to_string(dmap.cols()) +
                                       " of rank " + std::to_string(numerical_rank(dmap)));
        if (here.ok() != inv)
            agree.fail(point, std::string("direct identity ") + (here.ok() ? "holds" : "fails") +
                                  " but f~* is " + (inv ? "invertible" : "not invertible"));
    }
    VerificationReport rep;
    rep.add(direct.finish("dual-compatibility", anchors::dual));
    rep.add(invertible.finish("dual-map-invertibility", anchors::dual));
    rep.add(agree.finish("dual-criterion-equivalence", anchors::dual));
    return rep;
}

MetricField induced_metric_direct(const MetricPair& pair, const GluedBundle& glued, double tol) {
    if (!check_compatible(pair, tol).passed())
        throw Error(ErrorCode::IncompatibleMetrics, "g1 and g2 are not compatible along the gluing");
    MetricField out;
    for (const auto& p : glued.bundle.base().points()) {
        const PseudoBundle& src = p.side == pair.v1.base().name() ? pair.v1 : pair.v2;
        out.emplace(p.label, src.metric(p.origin));
    }
    return out;
}

MetricField induced_metric_via_phi(const MetricPair& pair, const GluedBundle& glued) {
    DualIdentification psi = psi_cup_star(glued);
    GluedBundle dg = dual_glued(glued);
    Identification otimes = phi_cup_otimes(dg, dg);
    PiecewiseBundleMap back = inverse(otimes.map);
    MetricField out;
    for (const auto& p : glued.bundle.base().points()) {
        const Branch& b = psi.map.at(p.label);
        const BasePoint& q = psi.map.target_base().point(b.target);
        const PseudoBundle& src = q.side == pair.v1.base().name() ? pair.v1 : pair.v2;
        Mat mq = src.metric(q.origin).characteristic_gram();
        Mat t = back.at(q.label).matrix * flatten(mq);
        Mat dinv = checked_inverse(b.matrix, ErrorCode::DualMapNotInvertible, p.label);
        Mat pulled = kronecker(dinv, dinv) * t;
        Mat m = unflatten(pulled, dinv.rows(), dinv.rows());
        const Mat l = char_rows(glued.bundle.fiber(p.label));
        Mat g = l.transpose() * m * l;
        out.emplace(p.label, validate_pseudometric(glued.bundle.fiber(p.label), 0.5 * (g + g.transpose())));
    }
    return out;
}

MetricField dual_of_induced(const GluedBundle& glued) {
    MetricField out;
    for (const auto& p : glued.bundle.base().points()) {
        const PseudoMetricForm& g = glued.bundle.metric(p.label);
        const int d = g.space().char_dim();
        Mat u(g.space().dim(), d);
        for (int i = 0; i < d; ++i) u.col(i) = pairing_inverse_on_characteristic(g, basis_vector(d, i));
        Mat gram = u.transpose() * g.gram() * u;
        out.emplace(p.label, validate_pseudometric(FiberSpace::standard(d), 0.5 * (gram + gram.transpose())));
    }
    return out;
}

MetricField glued_dual_metric(const MetricPair& pair) {
    BaseMap sw = switch_map(pair.v1.base(), pair.v2.base(), pair.gluing.domain, pair.gluing.base_map);
    MetricField out;
    for (const auto& q : sw.target.points()) {
        const PseudoBundle& src = q.side == pair.v1.base().name() ? pair.v1 : pair.v2;
        out.emplace(q.label, dual_pseudometric(src.metric(q.origin)));
    }
    return out;
}

VerificationReport verify_isometry(const MetricPair& pair, const GluedBundle& glued, double tol) {
    DualIdentification psi = psi_cup_star(glued);
    MetricField gstar = dual_of_induced(glued);
    MetricField tilde = glued_dual_metric(pair);
    ResidualTracker t(tol);
    for (const auto& b : psi.map.branches()) {
        Mat dinv = checked_inverse(b.matrix, ErrorCode::DualMapNotInvertible, b.source);
        Mat lhs = dinv.transpose() * gstar.at(b.source).gram() * dinv;
        observe_matrix(t, lhs - tilde.at(b.target).gram(), b.source, "g~*(Psi^-1, Psi^-1) vs ~g*");
    }
    VerificationReport rep;
    rep.add(t.finish("isometry", anchors::isometry));
    return rep;
}

PseudoBundle characteristic_subbundle(const PseudoBundle& v) {
    std::map<std::string, FiberSpace> fibers;
    for (const auto& p : v.base().points())
        fibers.emplace(p.label, FiberSpace::standard(v.fiber(p.label).char_dim()));
    PseudoBundle out(v.base(), std::move(fibers), false);
    if (v.has_metric()) {
        std::map<std::string, Mat> grams;
        for (const auto& p : v.base().points()) grams.emplace(p.label, v.metric(p.label).characteristic_gram());
        out = out.with_metric_grams(grams);
    }
    return out;
}

MetricField metric_from_characteristic(const PseudoBundle& v, const MetricField& g0) {
    MetricField out;
    for (const auto& p : v.base().points()) {
        const Mat l = char_rows(v.fiber(p.label));
        Mat g = l.transpose() * g0.at(p.label).gram() * l;
        out.emplace(p.label, validate_pseudometric(v.fiber(p.label), 0.5 * (g + g.transpose())));
    }
    return out;
}

PiecewiseBundleMap pairing_bundle_map(const PseudoBundle& v) {
    std::vector<Branch> br;
    for (const auto& p : v.base().points())
        br.push_back({p.label, p.label, p.region, v.metric(p.label).characteristic_gram()});
    return PiecewiseBundleMap(v.base(), v.base(), std::move(br));
}

PhiChain build_phi_chain(const MetricPair& pair, const GluedBundle& glued) {
    PhiChain c;
    c.psi0_glued_inverse = inverse(pairing_bundle_map(glued.bundle));

    std::map<std::string, Mat> restricted;
    for (const auto& y : pair.gluing.domain) restricted.emplace(y, characteristic_restriction(pair.gluing.fiber_maps.at(y)));
    PseudoBundle c1 = characteristic_subbundle(pair.v1);
    PseudoBundle c2 = characteristic_subbundle(pair.v2);
    GluedBundle glued0 =
        glue_bundles(c1, c2, make_gluing(c1, c2, pair.gluing.domain, pair.gluing.base_map, restricted));

    // Phi0 o j_k^0 = (j_k)^0, read off on the branches of j1 outside Y and of j2.
    std::vector<Branch> phi0;
    for (const auto& p : glued.bundle.base().points()) {
        const bool first = p.region == Region::I1;
        const Branch& s = (first ? glued0.j1 : glued0.j2).at(p.origin);
        const Branch& j = (first ? glued.j1 : glued.j2).at(p.origin);
        const FiberSpace& from = (first ? pair.v1 : pair.v2).fiber(p.origin);
        Mat jt = glued.bundle.fiber(p.label).char_coords(j.matrix * from.char_basis());
        phi0.push_back({p.label, p.label, p.region, jt * checked_inverse(s.matrix, ErrorCode::NotInvertible, p.label)});
    }
    PiecewiseBundleMap phi0_map(glued0.bundle.base(), glued.bundle.base(), std::move(phi0));
    c.phi0_inverse = inverse(phi0_map);

    BaseMap sw = switch_map(glued);
    std::vector<Branch> s0;
    for (const auto& p : glued0.bundle.base().points()) {
        const int d = glued0.bundle.fiber(p.label).dim();
        Mat m = Mat::Identity(d, d);
        if (p.region == Region::I2Glue) {
            const std::string& y = invert_label_map(pair.gluing.base_map).at(p.origin);
            m = checked_inverse(restricted.at(y), ErrorCode::NotInvertible, p.label);
        }
        s0.push_back({p.label, sw.map.at(p.label), p.region, m});
    }
    c.switch0 = PiecewiseBundleMap(glued0.bundle.base(), sw.target, std::move(s0));

    std::vector<Branch> pf;
    for (const auto& q : sw.target.points()) {
        const PseudoBundle& src = q.side == pair.v1.base().name() ? pair.v1 : pair.v2;
        pf.push_back({q.label, q.label, q.region, src.metric(q.origin).characteristic_gram()});
    }
    c.psi0_factors = PiecewiseBundleMap(sw.target, sw.target, std::move(pf));

    c.composite = compose(c.psi0_factors, compose(c.switch0, compose(c.phi0_inverse, c.psi0_glued_inverse)));
    return c;
}

VerificationReport verify_phi_chain(const MetricPair& pair, const GluedBundle& glued, double tol) {
    DualIdentification psi = psi_cup_star(glued);
    PhiChain chain = build_phi_chain(pair, glued);
    ResidualTracker t(tol);
    for (const auto& b : psi.map.branches()) {
        const Branch& c = chain.composite.at(b.source);
        if (c.target != b.target || c.matrix.rows() != b.matrix.rows() || c.matrix.cols() != b.matrix.cols()) {
            t.fail(b.source, "composite lands over '" + c.target + "' instead of '" + b.target + "'");
            continue;
        }
        observe_matrix(t, c.matrix - b.matrix, b.source, "composite vs Psi");
    }
    VerificationReport rep;
    rep.add(t.finish("phi-chain", anchors::chain));
    return rep;
}

}  // namespace pseudoglue
