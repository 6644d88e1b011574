#include "pseudoglue/actions.hpp"

#include "pseudoglue/anchors.hpp"

namespace pseudoglue {

namespace {

Vec unit(Eigen::Index n, Eigen::Index i) {
    Vec e = Vec::Zero(n);
    e(i) = 1.0;
    return e;
}

void observe(ResidualTracker& t, const Mat& r, const std::string& point, const std::string& what) {
    if (r.size() == 0) {
        t.observe(0.0, point);
        return;
    }
    Eigen::Index i = 0, j = 0;
    double w = r.cwiseAbs().maxCoeff(&i, &j);
    t.observe(w, point, unit(r.cols(), j), what + ", exterior blade " + std::to_string(j));
}

Mat inverse_of(const Mat& m, const std::string& where) {
    if (m.rows() != m.cols() || numerical_rank(m) != m.rows())
        throw Error(ErrorCode::NotInvertible, "identification over '" + where + "' is singular");
    return m.inverse();
}

}  // namespace

Mat standard_action_matrix(const Mat& gram, const Vec& v) {
    const int n = static_cast<int>(gram.rows());
    if (v.size() != n) throw Error(ErrorCode::FiberMismatch, "vector does not fit the fibre");
    const Eigen::Index size = Eigen::Index{1} << n;
    const Vec gv = gram * v;
    const Vec zero = Vec::Zero(n);
    Mat out = Mat::Zero(size, size);
    for (Eigen::Index a = 0; a < size; ++a) {
        const auto blade = static_cast<Blade>(a);
        for (int i = 0; i < n; ++i) {
            if (v(i) == 0.0) continue;
            auto [s, m] = blade_product(Blade{1} << i, blade, zero);
            if (s != 0.0) out(m, a) += s * v(i);
        }
        int j = 0;
        for (int i = 0; i < n; ++i) {
            if (!(blade & (Blade{1} << i))) continue;
            ++j;
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;  // -(-1)^{j+1}
            out(blade & ~(Blade{1} << i), a) += sign * gv(i);
        }
    }
    return out;
}

Vec standard_action(const PseudoMetricForm& g, const Vec& v, const Vec& omega) {
    const int n = g.space().dim();
    if (omega.size() != (Eigen::Index{1} << n)) throw Error(ErrorCode::FiberMismatch, "element not in wedge of the fibre");
    return standard_action_matrix(g.gram(), v) * omega;
}

std::vector<Mat> blade_operators(const CliffordFiber& fibre) {
    const int n = fibre.dim();
    std::vector<Mat> gens;
    for (int i = 0; i < n; ++i) gens.push_back(standard_action_matrix(fibre.gram, fibre.ortho.basis.col(i)));
    const Eigen::Index size = Eigen::Index{1} << n;
    std::vector<Mat> ops;
    ops.reserve(static_cast<std::size_t>(size));
    for (Eigen::Index b = 0; b < size; ++b) {
        Mat acc = Mat::Identity(size, size);
        for (int i = 0; i < n; ++i)
            if (b & (Eigen::Index{1} << i)) acc = acc * gens[static_cast<std::size_t>(i)];
        ops.push_back(acc);
    }
    return ops;
}

Mat act(const std::vector<Mat>& ops, const Vec& a) {
    if (ops.empty() || a.size() != static_cast<Eigen::Index>(ops.size()))
        throw Error(ErrorCode::FiberMismatch, "Clifford element does not fit the action");
    Mat out = Mat::Zero(ops[0].rows(), ops[0].cols());
    for (std::size_t i = 0; i < ops.size(); ++i)
        if (a(static_cast<Eigen::Index>(i)) != 0.0) out += a(static_cast<Eigen::Index>(i)) * ops[i];
    return out;
}

Mat extend_action(const CliffordFiber& fibre, const Vec& a) { return act(blade_operators(fibre), a); }

ActionOperator standard_action_operator(const PseudoBundle& v) {
    ActionOperator out;
    for (const auto& p : v.base().points()) out.ops.emplace(p.label, blade_operators(*make_clifford_fiber(v.metric(p.label))));
    return out;
}

double action_relation_residual(const CliffordFiber& fibre, const Vec& v, const Vec& w) {
    Mat cv = standard_action_matrix(fibre.gram, v);
    Mat cw = standard_action_matrix(fibre.gram, w);
    Mat r = cv * cw + cw * cv + 2.0 * v.dot(fibre.gram * w) * Mat::Identity(cv.rows(), cv.cols());
    Eigen::BDCSVD<Mat> svd(r);
    return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

VerificationReport check_actions_compatible(const MetricPair& pair, double tol) {
    ResidualTracker t(tol);
    for (const auto& y : pair.gluing.domain) {
        const Mat& f = pair.gluing.fiber_maps.at(y).coeffs();
        const Mat& g1 = pair.v1.metric(y).gram();
        const Mat& g2 = pair.v2.metric(pair.gluing.base_map.at(y)).gram();
        Mat fw = outermorphism(f);
        const std::string point = glued_label(pair.v2.base().name(), pair.gluing.base_map.at(y));
        for (Eigen::Index i = 0; i < f.cols(); ++i) {
            Vec e = unit(f.cols(), i);
            Mat r = fw * standard_action_matrix(g1, e) - standard_action_matrix(g2, f * e) * fw;
            observe(t, r, point, "generator " + std::to_string(i));
        }
    }
    VerificationReport rep;
    rep.add(t.finish("action-compatibility", anchors::action_compat));
    return rep;
}

ActionOperator glued_action(const MetricPair& pair, const CliffordGluing& cl, const GluedBundle& exterior,
                            double tol) {
    if (!check_actions_compatible(pair, tol).passed())
        throw Error(ErrorCode::IncompatibleActions, "factor actions do not intertwine along the gluing");
    ActionOperator out;
    for (const auto& p : cl.glued_algebras.bundle.base().points()) {
        const bool one = p.region == Region::I1;
        const CliffordFiber& factor = *(one ? cl.first : cl.second).fibres.at(p.origin);
        std::vector<Mat> base_ops = blade_operators(factor);
        Mat jcl_inv = inverse_of((one ? cl.glued_algebras.j1 : cl.glued_algebras.j2).at(p.origin).matrix, p.label);
        const Mat& je = (one ? exterior.j1 : exterior.j2).at(p.origin).matrix;
        Mat je_inv = inverse_of(je, p.label);
        std::vector<Mat> ops;
        for (Eigen::Index b = 0; b < jcl_inv.rows(); ++b)
            ops.push_back(je * act(base_ops, jcl_inv * unit(jcl_inv.rows(), b)) * je_inv);
        out.ops.emplace(p.label, std::move(ops));
    }
    return out;
}

VerificationReport verify_equiv_contravariant(const MetricPair& pair, const GluedBundle& glued, double tol) {
    CliffordGluing cl = glue_clifford(pair, glued, tol);
    ExteriorIdentification ext = phi_wedge_star(glued);
    ActionOperator c = standard_action_operator(glued.bundle);
    ActionOperator ctil = glued_action(pair, cl, ext.target, tol);
    ResidualTracker t(tol);
    for (const auto& p : glued.bundle.base().points()) {
        Mat phicl_inv = inverse_of(cl.phi.at(p.label).matrix, p.label);
        const Mat& phiw = ext.map.at(p.label).matrix;
        const auto& ops = c.ops.at(p.label);
        for (std::size_t b = 0; b < ops.size(); ++b) {
            Vec v = unit(static_cast<Eigen::Index>(ops.size()), static_cast<Eigen::Index>(b));
            Mat r = phiw * ops[b] - act(ctil.ops.at(p.label), phicl_inv * v) * phiw;
            observe(t, r, p.label, "Clifford blade " + std::to_string(b));
        }
    }
    VerificationReport rep;
    rep.add(t.finish("contravariant-action-equivalence", anchors::contra_action));
    return rep;
}

VerificationReport verify_equiv_covariant(const MetricPair& pair, const GluedBundle& glued, double tol) {
    CovariantClifford cc = covariant_clifford(pair, glued, tol);
    CovariantExterior ce = covariant_exterior(glued);
    ActionOperator cstar = standard_action_operator(dual_bundle(glued.bundle));
    GluedBundle dg = dual_glued(glued);
    dg.bundle = dg.bundle.with_metric(glued_dual_metric(pair));
    ActionOperator ctilde = standard_action_operator(dg.bundle);

    ResidualTracker first(tol);
    for (const auto& b : cc.phi_cup_star.branches()) {
        const Mat& w = ce.phi_cup_star_wedge.at(b.source).matrix;
        const auto& ops = cstar.ops.at(b.source);
        for (std::size_t i = 0; i < ops.size(); ++i) {
            Vec v = unit(static_cast<Eigen::Index>(ops.size()), static_cast<Eigen::Index>(i));
            Mat r = w * ops[i] - act(ctilde.ops.at(b.target), b.matrix * v) * w;
            observe(first, r, b.source, "Clifford blade " + std::to_string(i));
        }
    }

    ResidualTracker second(tol);
    ActionOperator cunion = glued_action(dual_pair(pair), cc.star, ce.dual_star.target, tol);
    PiecewiseBundleMap psi_wedge = compose(ce.phi_cup_star_wedge, inverse(ce.phi_wedge));
    for (const auto& q : dg.bundle.base().points()) {
        const Mat& w = psi_wedge.at(q.label).matrix;
        const Mat& k = cc.star.phi.at(q.label).matrix;
        const auto& ops = cunion.ops.at(q.label);
        for (std::size_t i = 0; i < ops.size(); ++i) {
            Vec v = unit(static_cast<Eigen::Index>(ops.size()), static_cast<Eigen::Index>(i));
            Mat r = w * ops[i] - act(ctilde.ops.at(psi_wedge.at(q.label).target), k * v) * w;
            observe(second, r, q.label, "Clifford blade " + std::to_string(i));
        }
    }
    VerificationReport rep;
    rep.add(first.finish("covariant-action-equivalence", anchors::cov_action));
    rep.add(second.finish("covariant-action-equivalence-glued", anchors::cov_action_glued));
    return rep;
}

}  // namespace pseudoglue
