#include "pseudoglue/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "pseudoglue/actions.hpp"
#include "pseudoglue/anchors.hpp"
#include "pseudoglue/clifford.hpp"
#include "pseudoglue/exterior.hpp"

namespace pseudoglue {

namespace {

constexpr int kTensorCap = 3;  // highest tensor power checked directly

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
    t.observe(w, point, unit(r.cols(), j), what + " at entry (" + std::to_string(i) + ", " + std::to_string(j) + ")");
}

VerificationReport single(const ResidualTracker& t, const char* name, const char* anchor) {
    VerificationReport r;
    r.add(t.finish(name, anchor));
    return r;
}

struct Context {
    const Instance& inst;
    double tol;

    const MetricPair& pair() const { return inst.pair; }
    const GluedBundle& glued() const { return inst.glued; }
    const GluedBundle& metric() const {
        if (!inst.metric) throw Error(ErrorCode::IncompatibleMetrics, "no induced metric on the glued bundle");
        return *inst.metric;
    }
};

VerificationReport induced_metric(const Context& c) {
    const GluedBundle& g = c.metric();
    const MetricPair& pr = c.pair();
    ResidualTracker t(c.tol);
    for (const auto& p : g.bundle.base().points()) {
        const bool one = p.region == Region::I1;
        const Mat& expected = (one ? pr.v1 : pr.v2).metric(p.origin).gram();
        observe(t, g.bundle.metric(p.label).gram() - expected, p.label, "g~ vs factor metric");
    }
    for (const auto& b : g.j1.branches()) {
        Mat pulled = b.matrix.transpose() * g.bundle.metric(b.target).gram() * b.matrix;
        observe(t, pulled - pr.v1.metric(b.source).gram(), b.target, "j1* g~ vs g1");
    }
    for (const auto& b : g.j2.branches()) {
        Mat pulled = b.matrix.transpose() * g.bundle.metric(b.target).gram() * b.matrix;
        observe(t, pulled - pr.v2.metric(b.source).gram(), b.target, "j2* g~ vs g2");
    }
    return single(t, "induced-metric", anchors::induced);
}

VerificationReport induced_metric_phi(const Context& c) {
    const GluedBundle& g = c.metric();
    MetricField via = induced_metric_via_phi(c.pair(), g);
    ResidualTracker t(c.tol);
    for (const auto& p : g.bundle.base().points())
        observe(t, via.at(p.label).gram() - g.bundle.metric(p.label).gram(), p.label, "composite vs direct g~");
    return single(t, "induced-metric-via-phi", anchors::via_phi);
}

VerificationReport commutativity(const Context& c) {
    const GluedBundle& g = c.glued();
    ResidualTracker t(c.tol);
    t.observe(phi_cup_oplus(g, g).residual, "", Vec(), "direct-sum identities");
    t.observe(phi_cup_otimes(g, g).residual, "", Vec(), "tensor identities");
    const int top = std::min(kTensorCap, g.bundle.max_dim());
    for (int k = 2; k <= top; ++k) {
        Identification id = phi_cup_otimes_n(g, k);
        t.observe(id.residual, "", Vec(), "tensor power " + std::to_string(k) + " identities");
        t.observe(max_difference(id.map, phi_cup_otimes_n_direct(g, k)), "", Vec(),
                  "tensor power " + std::to_string(k) + ": induction vs direct");
    }
    t.observe(phi_cup_oplus_k(g, 3).residual, "", Vec(), "threefold direct-sum identities");
    return single(t, "commutativity-identities", anchors::identities);
}

// Psi against functionals given by the metric: g(w, .) over i2(f(Y)) must pull back to g2(w, f~ .).
VerificationReport gluing_dual(const Context& c) {
    const GluedBundle& g = c.metric();
    const MetricPair& pr = c.pair();
    DualIdentification psi = psi_cup_star(g);
    BaseMap sw = switch_map(g);
    LabelMap pre = invert_label_map(pr.gluing.base_map);
    ResidualTracker t(c.tol);
    for (const auto& b : psi.map.branches()) {
        const BasePoint& p = g.bundle.base().point(b.source);
        if (sw.map.at(b.source) != b.target) t.fail(b.source, "branch does not cover the switch map");
        const FiberSpace& fs = g.bundle.fiber(b.source);
        const Mat& gram = g.bundle.metric(b.source).gram();
        Mat phi = fs.char_basis().transpose() * gram;  // columns: g(w, .) for ambient basis vectors w
        Mat expected = phi;
        if (p.region == Region::I2Glue) {
            const std::string& y = pre.at(p.origin);
            const LinearFiberMap& f = pr.gluing.fiber_maps.at(y);
            expected = (f.coeffs() * f.source().char_basis()).transpose() * gram;
        }
        observe(t, b.matrix * phi - expected, b.source, std::string(to_string(p.region)) + " branch");
    }
    return single(t, "gluing-dual-commutativity", anchors::switch_cover);
}

VerificationReport clifford_relation(const Context& c) {
    ResidualTracker t(c.tol);
    for (const PseudoBundle* v : {&c.pair().v1, &c.pair().v2}) {
        for (const auto& p : v->base().points()) {
            const PseudoMetricForm& g = v->metric(p.label);
            CliffordFiberPtr f = make_clifford_fiber(g);
            const int n = f->dim();
            const std::string point = glued_label(v->base().name(), p.label);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    Multivector a = cl_vector(f, unit(n, i));
                    Multivector b = cl_vector(f, unit(n, j));
                    Multivector r = cl_mul(a, b) + cl_mul(b, a) + cl_scalar(f, 2.0 * g(unit(n, i), unit(n, j)));
                    t.observe(r.coeffs.cwiseAbs().maxCoeff(), point, Vec(),
                              "vw + wv + 2g(v,w) for ambient e" + std::to_string(i) + ", e" + std::to_string(j));
                }
            if (n > kTensorCap) continue;
            for (Blade a = 0; a < f->size(); ++a)
                for (Blade b = 0; b < f->size(); ++b) {
                    Vec d = cl_mul(cl_blade(f, a), cl_blade(f, b)).coeffs -
                            tensor_quotient_oracle(cl_blade(f, a), cl_blade(f, b)).coeffs;
                    t.observe(d.cwiseAbs().maxCoeff(), point, Vec(),
                              "blade product vs tensor quotient for blades " + std::to_string(a) + ", " + std::to_string(b));
                }
        }
    }
    return single(t, "clifford-relation", anchors::relation);
}

VerificationReport clifford_gluing_map(const Context& c) {
    const MetricPair& pr = c.pair();
    std::map<std::string, Mat> fcl = induced_F_cl(pr, c.tol);
    ResidualTracker t(c.tol);
    for (const auto& y : pr.gluing.domain) {
        const std::string& fy = pr.gluing.base_map.at(y);
        const std::string point = glued_label(pr.v2.base().name(), fy);
        CliffordFiberPtr src = make_clifford_fiber(pr.v1.metric(y));
        CliffordFiberPtr dst = make_clifford_fiber(pr.v2.metric(fy));
        const Mat& F = fcl.at(y);
        const Mat& f = pr.gluing.fiber_maps.at(y).coeffs();
        t.observe(multiplicativity_residual(*src, *dst, F), point, Vec(), "F~(ab) vs F~(a)F~(b)");
        t.observe((F * cl_scalar(src, 1.0).coeffs - cl_scalar(dst, 1.0).coeffs).cwiseAbs().maxCoeff(), point, Vec(),
                  "unit");
        for (int i = 0; i < src->dim(); ++i) {
            Vec e = unit(src->dim(), i);
            Vec d = F * cl_vector(src, e).coeffs - cl_vector(dst, f * e).coeffs;
            t.observe(d.cwiseAbs().maxCoeff(), point, e, "F~ on generators vs f~");
        }
    }
    return single(t, "clifford-gluing-map", anchors::universal);
}

VerificationReport clifford_identification(const Context& c) {
    CliffordGluing cg = glue_clifford(c.pair(), c.metric(), c.tol);
    ResidualTracker t(c.tol);
    t.observe(cg.identity_residual, "", Vec(), "Phi^Cl o j^Cl vs extension of j");
    t.observe(cg.multiplicativity, "", Vec(), "Phi^Cl multiplicativity");
    return single(t, "clifford-identification", anchors::cl_identity);
}

VerificationReport covariant_clifford_check(const Context& c) {
    CovariantClifford cc = covariant_clifford(c.pair(), c.metric(), c.tol);
    ResidualTracker t(c.tol);
    t.observe(cc.multiplicativity, "", Vec(), "Phi_{u,*}^Cl multiplicativity");
    t.observe(cc.star.identity_residual, "", Vec(), "Phi^Cl(*) j-identities");
    t.observe(cc.star.multiplicativity, "", Vec(), "Phi^Cl(*) multiplicativity");
    for (const auto& b : cc.phi_cup_star.branches()) {
        const Mat via = cc.star.phi.at(b.target).matrix * cc.phi_cup_cl_star.at(b.source).matrix;
        observe(t, via - b.matrix, b.source, "Phi^Cl(*) o Phi_u^Cl(*) vs Phi_{u,*}^Cl");
    }
    return single(t, "covariant-clifford", anchors::three_shapes);
}

VerificationReport alt_intertwining(const Context& c) {
    ExteriorIdentification e = phi_wedge_star(c.glued());
    ResidualTracker t(c.tol);
    t.observe(e.alt_residual, "", Vec(), "Phi^(x)n Alt vs Alt Phi^(x)n");
    return single(t, "alt-intertwining", anchors::alt);
}

VerificationReport contravariant_exterior(const Context& c) {
    const GluedBundle& g = c.glued();
    ExteriorIdentification e = phi_wedge_star(g);
    ResidualTracker t(c.tol);
    t.observe(e.identity_residual, "", Vec(), "Phi^wedge* j-identities");
    for (const auto& y : g.gluing->domain) {
        const Mat& f = g.gluing->fiber_maps.at(y).coeffs();
        observe(t, outermorphism(f) - outermorphism_via_tensors(f), glued_label(g.v2->base().name(), g.gluing->base_map.at(y)),
                "outermorphism vs tensor construction");
    }
    for (const auto& b : e.map.branches()) {
        const int n = g.bundle.fiber(b.source).dim();
        const Eigen::Index size = Eigen::Index{1} << n;
        for (Eigen::Index x = 0; x < size; ++x)
            for (Eigen::Index y = 0; y < size; ++y) {
                if (grade(static_cast<Blade>(x)) + grade(static_cast<Blade>(y)) > n) continue;
                Vec a = unit(size, x), bb = unit(size, y);
                Vec d = b.matrix * wedge(a, bb) - wedge(b.matrix * a, b.matrix * bb);
                t.observe(d.cwiseAbs().maxCoeff(), b.source, Vec(),
                          "Phi(a ^ b) vs Phi(a) ^ Phi(b) on blades " + std::to_string(x) + ", " + std::to_string(y));
            }
    }
    return single(t, "contravariant-exterior", anchors::contra_exterior);
}

VerificationReport covariant_exterior_check(const Context& c) {
    CovariantExterior ce = covariant_exterior(c.glued());
    ResidualTracker t(c.tol);
    t.observe(ce.alt_residual, "", Vec(), "Phi_{u,*}^(x)k Alt vs Alt Phi_{u,*}^(x)k");
    t.observe(ce.outermorphism_residual, "", Vec(), "graded tensor powers vs outermorphism");
    t.observe(ce.dual_star.identity_residual, "", Vec(), "Phi^wedge j-identities on the duals");
    t.observe(ce.dual_star.alt_residual, "", Vec(), "Alt intertwining on the duals");
    return single(t, "covariant-exterior", anchors::cov_exterior);
}

struct CheckDef {
    std::string name;
    std::string anchor;
    std::vector<std::string> groups;
    std::vector<std::string> requires_;
    std::function<VerificationReport(const Context&)> run;
};

const std::vector<CheckDef>& registry() {
    static const std::vector<CheckDef> defs = [] {
        const std::string mc = "metric-compatibility", dmi = "dual-map-invertibility", dc = "dual-compatibility",
                          ac = "action-compatibility";
        auto dual = [](const Context& c) { return check_dual_compatible(c.pair(), c.tol); };
        auto cov_actions = [](const Context& c) { return verify_equiv_covariant(c.pair(), c.metric(), c.tol); };
        std::vector<CheckDef> d;
        d.push_back({mc, anchors::compatible, {"metrics"}, {}, [](const Context& c) { return check_compatible(c.pair(), c.tol); }});
        d.push_back({"compatibility-criterion", anchors::criterion, {"metrics"}, {},
                     [](const Context& c) { return check_compatibility_criterion(c.pair(), c.tol); }});
        d.push_back({dc, anchors::dual, {"metrics"}, {}, dual});
        d.push_back({dmi, anchors::dual, {"metrics"}, {}, dual});
        d.push_back({"dual-criterion-equivalence", anchors::dual, {"metrics"}, {mc}, dual});
        d.push_back({"induced-metric", anchors::induced, {"metrics"}, {mc}, induced_metric});
        d.push_back({"induced-metric-via-phi", anchors::via_phi, {"metrics"}, {mc, dmi}, induced_metric_phi});
        d.push_back({"phi-chain", anchors::chain, {"metrics"}, {mc, dmi},
                     [](const Context& c) { return verify_phi_chain(c.pair(), c.metric(), c.tol); }});
        d.push_back({"commutativity-identities", anchors::identities, {"metrics"}, {}, commutativity});
        d.push_back({"gluing-dual-commutativity", anchors::switch_cover, {"metrics"}, {mc, dmi}, gluing_dual});
        d.push_back({"isometry", anchors::isometry, {"metrics", "isometry"}, {mc, dc},
                     [](const Context& c) { return verify_isometry(c.pair(), c.metric(), c.tol); }});
        d.push_back({"clifford-relation", anchors::relation, {"clifford"}, {}, clifford_relation});
        d.push_back({"clifford-gluing-map", anchors::universal, {"clifford"}, {mc}, clifford_gluing_map});
        d.push_back({"clifford-identification", anchors::cl_identity, {"clifford"}, {mc}, clifford_identification});
        d.push_back({"covariant-clifford", anchors::three_shapes, {"clifford"}, {mc, dc}, covariant_clifford_check});
        d.push_back({"alt-intertwining", anchors::alt, {"exterior"}, {}, alt_intertwining});
        d.push_back({"contravariant-exterior", anchors::contra_exterior, {"exterior"}, {}, contravariant_exterior});
        d.push_back({"covariant-exterior", anchors::cov_exterior, {"exterior"}, {dmi}, covariant_exterior_check});
        d.push_back({ac, anchors::action_compat, {"actions"}, {mc},
                     [](const Context& c) { return check_actions_compatible(c.pair(), c.tol); }});
        d.push_back({"contravariant-action-equivalence", anchors::contra_action, {"actions"}, {mc, ac},
                     [](const Context& c) { return verify_equiv_contravariant(c.pair(), c.metric(), c.tol); }});
        d.push_back({"covariant-action-equivalence", anchors::cov_action, {"actions"}, {mc, ac, dc}, cov_actions});
        d.push_back({"covariant-action-equivalence-glued", anchors::cov_action_glued, {"actions"}, {mc, ac, dc}, cov_actions});
        return d;
    }();
    return defs;
}

const CheckDef& def_of(const std::string& name) {
    for (const auto& d : registry())
        if (d.name == name) return d;
    throw Error(ErrorCode::InvalidScenario, "unknown check " + name);
}

class Runner {
public:
    explicit Runner(const Context& c) : c_(c) {}

    const CheckResult& get(const std::string& name) {
        if (auto it = done_.find(name); it != done_.end()) return it->second;
        const CheckDef& d = def_of(name);
        for (const auto& req : d.requires_) {
            const CheckResult& r = get(req);
            if (r.status != Status::Pass) {
                CheckResult s;
                s.name = name;
                s.anchor = d.anchor;
                s.status = Status::Skipped;
                s.max_residual = std::nan("");
                s.note = "requires " + req;
                return done_[name] = s;
            }
        }
        try {
            VerificationReport rep = d.run(c_);
            for (const auto& r : rep.checks) {
                if (!done_.count(r.name) && (r.name == name || same_requirements(r.name, d))) done_[r.name] = r;
            }
            if (!done_.count(name)) throw Error(ErrorCode::InvalidScenario, "check " + name + " produced no result");
        } catch (const Error& e) {
            CheckResult f;
            f.name = name;
            f.anchor = d.anchor;
            f.status = Status::Fail;
            f.max_residual = std::numeric_limits<double>::infinity();
            f.witness = Witness{"", {}, e.what()};
            done_[name] = f;
        }
        return done_[name];
    }

private:
    const Context& c_;
    std::map<std::string, CheckResult> done_;

    static bool same_requirements(const std::string& other, const CheckDef& d) {
        for (const auto& x : registry())
            if (x.name == other) return x.requires_ == d.requires_;
        return false;
    }
};

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {"all", "metrics", "clifford", "exterior", "actions", "isometry"};
    return names;
}

std::vector<std::string> suite_checks(const std::string& suite) {
    const auto& names = suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end())
        throw Error(ErrorCode::InvalidScenario, "unknown suite '" + suite + "'");
    std::vector<std::string> out;
    for (const auto& d : registry())
        if (suite == "all" || std::find(d.groups.begin(), d.groups.end(), suite) != d.groups.end()) out.push_back(d.name);
    return out;
}

Report run_suite(const Scenario& s, const Instance& inst, const std::string& suite) {
    auto start = std::chrono::steady_clock::now();
    std::vector<std::string> names = suite_checks(suite);
    Context ctx{inst, s.options.tol};
    Runner runner(ctx);
    Report r;
    r.suite = suite;
    r.digest = digest_hex(s);
    for (const auto& n : names) r.checks.add(runner.get(n));
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

Report run_suite(const Scenario& s, const std::string& suite) {
    suite_checks(suite);
    return run_suite(s, instantiate(s), suite);
}

std::string report_json(const Report& r, bool with_timing) {
    nlohmann::json j;
    j["suite"] = r.suite;
    j["scenario_digest"] = r.digest;
    j["passed"] = r.passed();
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : r.checks.checks) {
        nlohmann::json e;
        e["name"] = c.name;
        e["paper_anchor"] = c.anchor;
        e["status"] = std::string(to_string(c.status));
        if (std::isfinite(c.max_residual)) e["max_residual"] = c.max_residual;
        else e["max_residual"] = nullptr;
        if (c.witness) {
            e["witness"] = {{"point", c.witness->point}, {"vector", c.witness->vector}, {"detail", c.witness->detail}};
        } else {
            e["witness"] = nullptr;
        }
        if (!c.note.empty()) e["note"] = c.note;
        checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);
    if (with_timing) j["timing"] = {{"seconds", r.seconds}};
    return j.dump(2) + "\n";
}

std::string report_text(const Report& r) {
    std::ostringstream out;
    out << "suite " << r.suite << ", scenario " << r.digest << "\n";
    for (const auto& c : r.checks.checks) {
        out << to_string(c.status) << "  " << c.name;
        if (c.status != Status::Skipped) out << "  max_residual=" << c.max_residual;
        if (!c.note.empty()) out << "  (" << c.note << ")";
        out << "\n";
        if (c.witness) {
            out << "    witness at '" << c.witness->point << "': " << c.witness->detail;
            if (!c.witness->vector.empty()) {
                out << " [";
                for (std::size_t i = 0; i < c.witness->vector.size(); ++i) out << (i ? ", " : "") << c.witness->vector[i];
                out << "]";
            }
            out << "\n";
        }
    }
    std::size_t pass = 0, fail = 0, skip = 0;
    for (const auto& c : r.checks.checks)
        (c.status == Status::Pass ? pass : c.status == Status::Fail ? fail : skip)++;
    out << pass << " passed, " << fail << " failed, " << skip << " skipped\n";
    return out.str();
}

}  // namespace pseudoglue
