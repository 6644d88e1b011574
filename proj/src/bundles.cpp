#include "pseudoglue/bundles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

namespace pseudoglue {

std::string_view to_string(Region r) {
    switch (r) {
        case Region::Plain: return "plain";
        case Region::I1: return "i1";
        case Region::I2Glue: return "i2-glue";
        case Region::I2Free: return "i2-free";
    }
    return "plain";
}

BaseSpace::BaseSpace(std::string name, std::vector<BasePoint> points)
    : name_(std::move(name)), points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!index_.emplace(points_[i].label, i).second)
            throw Error(ErrorCode::DuplicateLabel, "label '" + points_[i].label + "' repeated in " + name_);
    }
}

const BasePoint& BaseSpace::point(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw Error(ErrorCode::UnknownLabel, "no point '" + label + "' in " + name_);
    return points_[it->second];
}

std::vector<std::string> BaseSpace::labels() const {
    std::vector<std::string> out;
    out.reserve(points_.size());
    for (const auto& p : points_) out.push_back(p.label);
    return out;
}

namespace {

std::string format_param(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

}  // namespace

BaseSpace sampled_base(const std::string& name, const std::vector<double>& params) {
    std::vector<BasePoint> pts;
    for (double x : params) pts.push_back({format_param(x), x, "", "", Region::Plain});
    return BaseSpace(name, std::move(pts));
}

PseudoBundle::PseudoBundle(BaseSpace base, std::map<std::string, FiberSpace> fibers, bool uniform)
    : base_(std::move(base)), fibers_(std::move(fibers)) {
    if (fibers_.size() != base_.size())
        throw Error(ErrorCode::UnknownLabel, "fibres must be given exactly over the base points");
    for (const auto& p : base_.points())
        if (!fibers_.count(p.label)) throw Error(ErrorCode::UnknownLabel, "no fibre over '" + p.label + "'");
    if (uniform && !fibers_.empty()) {
        const auto& first = fibers_.begin()->second;
        for (const auto& [label, f] : fibers_)
            if (f.dim() != first.dim() || f.char_dim() != first.char_dim())
                throw Error(ErrorCode::DimensionMismatch, "fibre over '" + label + "' has a different (n, d)");
    }
}

const FiberSpace& PseudoBundle::fiber(const std::string& label) const {
    auto it = fibers_.find(label);
    if (it == fibers_.end()) throw Error(ErrorCode::UnknownLabel, "no fibre over '" + label + "'");
    return it->second;
}

const PseudoMetricForm& PseudoBundle::metric(const std::string& label) const {
    if (!metric_) throw Error(ErrorCode::UnknownLabel, "bundle carries no metric");
    auto it = metric_->find(label);
    if (it == metric_->end()) throw Error(ErrorCode::UnknownLabel, "no metric over '" + label + "'");
    return it->second;
}

const MetricField& PseudoBundle::metric_field() const {
    if (!metric_) throw Error(ErrorCode::UnknownLabel, "bundle carries no metric");
    return *metric_;
}

PseudoBundle PseudoBundle::with_metric(const MetricField& metric) const {
    std::map<std::string, Mat> grams;
    for (const auto& [label, g] : metric) grams.emplace(label, g.gram());
    return with_metric_grams(grams);
}

PseudoBundle PseudoBundle::with_metric_grams(const std::map<std::string, Mat>& grams) const {
    MetricField field;
    for (const auto& p : base_.points()) {
        auto it = grams.find(p.label);
        if (it == grams.end()) throw Error(ErrorCode::UnknownLabel, "no metric over '" + p.label + "'");
        field.emplace(p.label, validate_pseudometric(fiber(p.label), it->second));
    }
    if (field.size() != grams.size()) throw Error(ErrorCode::UnknownLabel, "metric given over unknown points");
    PseudoBundle out = *this;
    out.metric_ = std::move(field);
    return out;
}

int PseudoBundle::max_dim() const {
    int m = 0;
    for (const auto& [label, f] : fibers_) m = std::max(m, f.dim());
    return m;
}

BundleGluing make_gluing(const PseudoBundle& v1, const PseudoBundle& v2, std::vector<std::string> domain,
                         LabelMap base_map, const std::map<std::string, Mat>& fiber_maps) {
    std::set<std::string> seen;
    std::set<std::string> images;
    BundleGluing out;
    for (const auto& y : domain) {
        if (!v1.base().contains(y)) throw Error(ErrorCode::UnknownLabel, "gluing domain point '" + y + "' not in X1");
        if (!seen.insert(y).second) throw Error(ErrorCode::DuplicateLabel, "gluing domain repeats '" + y + "'");
        auto f = base_map.find(y);
        if (f == base_map.end()) throw Error(ErrorCode::UnknownLabel, "base map undefined at '" + y + "'");
        if (!v2.base().contains(f->second))
            throw Error(ErrorCode::UnknownLabel, "base map sends '" + y + "' outside X2");
        if (!images.insert(f->second).second)
            throw Error(ErrorCode::NonInjectiveBaseMap, "two points are sent to '" + f->second + "'");
        auto m = fiber_maps.find(y);
        if (m == fiber_maps.end()) throw Error(ErrorCode::MissingFiberMap, "no fibre map over '" + y + "'");
        const FiberSpace& s = v1.fiber(y);
        const FiberSpace& t = v2.fiber(f->second);
        if (m->second.rows() != t.dim() || m->second.cols() != s.dim())
            throw Error(ErrorCode::DimensionMismatch, "fibre map over '" + y + "' has the wrong shape");
        out.fiber_maps.emplace(y, LinearFiberMap(s, t, m->second));
    }
    if (base_map.size() != domain.size())
        throw Error(ErrorCode::UnknownLabel, "base map defined outside the gluing domain");
    for (const auto& [y, m] : fiber_maps)
        if (!seen.count(y)) throw Error(ErrorCode::UnknownLabel, "fibre map over '" + y + "' outside the domain");
    out.domain = std::move(domain);
    out.base_map = std::move(base_map);
    return out;
}

std::string glued_label(const std::string& side, const std::string& label) { return side + ":" + label; }

GluedBase glue_bases(const BaseSpace& x1, const BaseSpace& x2, const std::vector<std::string>& domain,
                     const LabelMap& f) {
    if (x1.name() == x2.name())
        throw Error(ErrorCode::DuplicateLabel, "factor bases must have different names");
    std::set<std::string> y(domain.begin(), domain.end());
    std::set<std::string> fy;
    for (const auto& p : domain) {
        if (!x1.contains(p)) throw Error(ErrorCode::UnknownLabel, "'" + p + "' not in " + x1.name());
        auto it = f.find(p);
        if (it == f.end()) throw Error(ErrorCode::UnknownLabel, "base map undefined at '" + p + "'");
        if (!x2.contains(it->second)) throw Error(ErrorCode::UnknownLabel, "'" + it->second + "' not in " + x2.name());
        if (!fy.insert(it->second).second)
            throw Error(ErrorCode::NonInjectiveBaseMap, "two points are sent to '" + it->second + "'");
    }
    GluedBase out;
    std::vector<BasePoint> pts;
    for (const auto& p : x1.points()) {
        if (y.count(p.label)) continue;
        std::string l = glued_label(x1.name(), p.label);
        pts.push_back({l, p.param, x1.name(), p.label, Region::I1});
        out.i1.emplace(p.label, l);
    }
    for (const auto& p : x2.points()) {
        std::string l = glued_label(x2.name(), p.label);
        pts.push_back({l, p.param, x2.name(), p.label, fy.count(p.label) ? Region::I2Glue : Region::I2Free});
        out.i2.emplace(p.label, l);
    }
    out.space = BaseSpace(x1.name() + "u" + x2.name(), std::move(pts));
    return out;
}

PiecewiseBundleMap::PiecewiseBundleMap(BaseSpace source_base, BaseSpace target_base, std::vector<Branch> branches)
    : source_base_(std::move(source_base)), target_base_(std::move(target_base)), branches_(std::move(branches)) {
    for (std::size_t i = 0; i < branches_.size(); ++i)
        if (!index_.emplace(branches_[i].source, i).second)
            throw Error(ErrorCode::DuplicateLabel, "two branches over '" + branches_[i].source + "'");
}

const Branch& PiecewiseBundleMap::at(const std::string& source_label) const {
    auto it = index_.find(source_label);
    if (it == index_.end()) throw Error(ErrorCode::UnknownLabel, "map undefined over '" + source_label + "'");
    return branches_[it->second];
}

LabelMap PiecewiseBundleMap::base_map() const {
    LabelMap out;
    for (const auto& b : branches_) out.emplace(b.source, b.target);
    return out;
}

PiecewiseBundleMap identity_map(const PseudoBundle& v) {
    std::vector<Branch> br;
    for (const auto& p : v.base().points()) {
        int n = v.fiber(p.label).dim();
        br.push_back({p.label, p.label, p.region, Mat::Identity(n, n)});
    }
    return PiecewiseBundleMap(v.base(), v.base(), std::move(br));
}

PiecewiseBundleMap compose(const PiecewiseBundleMap& outer, const PiecewiseBundleMap& inner) {
    std::vector<Branch> br;
    for (const auto& b : inner.branches()) {
        const Branch& o = outer.at(b.target);
        if (o.matrix.cols() != b.matrix.rows())
            throw Error(ErrorCode::DimensionMismatch, "fibre dimensions disagree over '" + b.target + "'");
        br.push_back({b.source, o.target, b.region, o.matrix * b.matrix});
    }
    return PiecewiseBundleMap(inner.source_base(), outer.target_base(), std::move(br));
}

PiecewiseBundleMap inverse(const PiecewiseBundleMap& map) {
    std::vector<Branch> br;
    std::set<std::string> targets;
    for (const auto& b : map.branches()) {
        if (!targets.insert(b.target).second)
            throw Error(ErrorCode::BaseMapNotInvertible, "two points are sent to '" + b.target + "'");
        const Mat& m = b.matrix;
        if (m.rows() != m.cols() || (m.rows() > 0 && numerical_rank(m) != m.rows()))
            throw Error(ErrorCode::NotInvertible, "fibre map over '" + b.source + "' is not invertible");
        Region r = map.target_base().contains(b.target) ? map.target_base().point(b.target).region : Region::Plain;
        br.push_back({b.target, b.source, r, m.rows() > 0 ? Mat(m.inverse()) : m});
    }
    if (targets.size() != map.target_base().size())
        throw Error(ErrorCode::BaseMapNotInvertible, "base map is not surjective");
    std::sort(br.begin(), br.end(), [&](const Branch& a, const Branch& b) {
        const auto& pts = map.target_base().points();
        auto pos = [&](const std::string& l) {
            return std::find_if(pts.begin(), pts.end(), [&](const BasePoint& p) { return p.label == l; }) - pts.begin();
        };
        return pos(a.source) < pos(b.source);
    });
    return PiecewiseBundleMap(map.target_base(), map.source_base(), std::move(br));
}

namespace {

PiecewiseBundleMap pointwise(const PiecewiseBundleMap& a, const PiecewiseBundleMap& b,
                             const std::function<Mat(const Mat&, const Mat&)>& op) {
    std::vector<Branch> br;
    for (const auto& x : a.branches()) {
        const Branch& y = b.at(x.source);
        if (y.target != x.target) throw Error(ErrorCode::BaseMismatch, "maps cover different base maps");
        br.push_back({x.source, x.target, x.region, op(x.matrix, y.matrix)});
    }
    return PiecewiseBundleMap(a.source_base(), a.target_base(), std::move(br));
}

}  // namespace

PiecewiseBundleMap kronecker(const PiecewiseBundleMap& a, const PiecewiseBundleMap& b) {
    return pointwise(a, b, [](const Mat& x, const Mat& y) { return kronecker(x, y); });
}

PiecewiseBundleMap direct_sum(const PiecewiseBundleMap& a, const PiecewiseBundleMap& b) {
    return pointwise(a, b, [](const Mat& x, const Mat& y) { return block_diagonal(x, y); });
}

double max_difference(const PiecewiseBundleMap& a, const PiecewiseBundleMap& b) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (a.branches().size() != b.branches().size()) return inf;
    double worst = 0.0;
    for (const auto& x : a.branches()) {
        if (!b.defined_at(x.source)) return inf;
        const Branch& y = b.at(x.source);
        if (y.target != x.target || y.matrix.rows() != x.matrix.rows() || y.matrix.cols() != x.matrix.cols())
            return inf;
        if (x.matrix.size() > 0) worst = std::max(worst, (x.matrix - y.matrix).cwiseAbs().maxCoeff());
    }
    return worst;
}

bool verify_covers(const PiecewiseBundleMap& map, const LabelMap& base_map) {
    for (const auto& p : map.source_base().points()) {
        if (!map.defined_at(p.label)) return false;
        auto it = base_map.find(p.label);
        if (it == base_map.end() || map.at(p.label).target != it->second) return false;
    }
    for (const auto& b : map.branches())
        if (!map.target_base().contains(b.target) || !map.source_base().contains(b.source)) return false;
    return map.branches().size() == map.source_base().size();
}

GluedBundle glue_bundles(const PseudoBundle& v1, const PseudoBundle& v2, const BundleGluing& gluing) {
    std::map<std::string, Mat> raw;
    for (const auto& [y, m] : gluing.fiber_maps) raw.emplace(y, m.coeffs());
    for (const auto& y : gluing.domain)
        if (!gluing.fiber_maps.count(y)) throw Error(ErrorCode::MissingFiberMap, "no fibre map over '" + y + "'");
    BundleGluing checked = make_gluing(v1, v2, gluing.domain, gluing.base_map, raw);

    GluedBase gb = glue_bases(v1.base(), v2.base(), checked.domain, checked.base_map);
    std::map<std::string, FiberSpace> fibers;
    for (const auto& p : gb.space.points()) {
        const PseudoBundle& src = p.side == v1.base().name() ? v1 : v2;
        fibers.emplace(p.label, src.fiber(p.origin));
    }
    PseudoBundle total(gb.space, std::move(fibers), false);

    std::vector<Branch> j1;
    for (const auto& p : v1.base().points()) {
        if (auto it = checked.base_map.find(p.label); it != checked.base_map.end()) {
            const std::string& t = gb.i2.at(it->second);
            j1.push_back({p.label, t, Region::I2Glue, checked.fiber_maps.at(p.label).coeffs()});
        } else {
            int n = v1.fiber(p.label).dim();
            j1.push_back({p.label, gb.i1.at(p.label), Region::I1, Mat::Identity(n, n)});
        }
    }
    std::vector<Branch> j2;
    for (const auto& p : v2.base().points()) {
        const std::string& t = gb.i2.at(p.label);
        int n = v2.fiber(p.label).dim();
        j2.push_back({p.label, t, gb.space.point(t).region, Mat::Identity(n, n)});
    }
    GluedBundle out{total,
                    gb.i1,
                    gb.i2,
                    PiecewiseBundleMap(v1.base(), gb.space, std::move(j1)),
                    PiecewiseBundleMap(v2.base(), gb.space, std::move(j2)),
                    std::make_shared<const PseudoBundle>(v1),
                    std::make_shared<const PseudoBundle>(v2),
                    std::make_shared<const BundleGluing>(std::move(checked))};
    return out;
}

LabelMap invert_label_map(const LabelMap& f) {
    LabelMap out;
    for (const auto& [a, b] : f)
        if (!out.emplace(b, a).second)
            throw Error(ErrorCode::BaseMapNotInvertible, "two points are sent to '" + b + "'");
    return out;
}

BaseMap switch_map(const BaseSpace& x1, const BaseSpace& x2, const std::vector<std::string>& domain,
                   const LabelMap& f) {
    LabelMap finv = invert_label_map(f);
    GluedBase fwd = glue_bases(x1, x2, domain, f);
    std::vector<std::string> fy;
    for (const auto& p : x2.points())
        if (finv.count(p.label)) fy.push_back(p.label);
    GluedBase rev = glue_bases(x2, x1, fy, finv);
    LabelMap m;
    for (const auto& p : fwd.space.points()) {
        if (p.region == Region::I1) {
            m.emplace(p.label, rev.i2.at(p.origin));
        } else if (p.region == Region::I2Glue) {
            m.emplace(p.label, rev.i2.at(finv.at(p.origin)));
        } else {
            m.emplace(p.label, rev.i1.at(p.origin));
        }
    }
    return {fwd.space, rev.space, std::move(m)};
}

BaseMap switch_map(const GluedBundle& glued) {
    return switch_map(glued.v1->base(), glued.v2->base(), glued.gluing->domain, glued.gluing->base_map);
}

namespace {

bool same_labels(const BaseSpace& a, const BaseSpace& b) { return a.name() == b.name() && a.labels() == b.labels(); }

PseudoBundle combine(const PseudoBundle& a, const PseudoBundle& b,
                     const std::function<FiberSpace(const FiberSpace&, const FiberSpace&)>& fib,
                     const std::function<Mat(const Mat&, const Mat&)>& gram) {
    if (!same_labels(a.base(), b.base())) throw Error(ErrorCode::BaseMismatch, "bundles live over different bases");
    std::map<std::string, FiberSpace> fibers;
    for (const auto& p : a.base().points()) fibers.emplace(p.label, fib(a.fiber(p.label), b.fiber(p.label)));
    PseudoBundle out(a.base(), std::move(fibers), false);
    if (a.has_metric() && b.has_metric()) {
        std::map<std::string, Mat> grams;
        for (const auto& p : a.base().points())
            grams.emplace(p.label, gram(a.metric(p.label).gram(), b.metric(p.label).gram()));
        out = out.with_metric_grams(grams);
    }
    return out;
}

}  // namespace

FiberSpace direct_sum(const FiberSpace& a, const FiberSpace& b) {
    return FiberSpace(block_diagonal(a.char_basis(), b.char_basis()), block_diagonal(a.comp_basis(), b.comp_basis()));
}

FiberSpace tensor_product(const FiberSpace& a, const FiberSpace& b) {
    const int n = a.dim() * b.dim();
    Mat c = kronecker(a.char_basis(), b.char_basis());
    Mat k1 = kronecker(a.char_basis(), b.comp_basis());
    Mat k2 = kronecker(a.comp_basis(), b.char_basis());
    Mat k3 = kronecker(a.comp_basis(), b.comp_basis());
    Mat k(n, k1.cols() + k2.cols() + k3.cols());
    k << k1, k2, k3;
    return FiberSpace(c, k);
}

PseudoBundle direct_sum(const PseudoBundle& a, const PseudoBundle& b) {
    return combine(a, b, [](const FiberSpace& x, const FiberSpace& y) { return direct_sum(x, y); },
                   [](const Mat& x, const Mat& y) { return block_diagonal(x, y); });
}

PseudoBundle tensor_product(const PseudoBundle& a, const PseudoBundle& b) {
    return combine(a, b, [](const FiberSpace& x, const FiberSpace& y) { return tensor_product(x, y); },
                   [](const Mat& x, const Mat& y) { return kronecker(x, y); });
}

PseudoBundle dual_bundle(const PseudoBundle& v) {
    std::map<std::string, FiberSpace> fibers;
    for (const auto& p : v.base().points())
        fibers.emplace(p.label, FiberSpace::standard(v.fiber(p.label).char_dim()));
    PseudoBundle out(v.base(), std::move(fibers), false);
    if (v.has_metric()) {
        std::map<std::string, Mat> grams;
        for (const auto& p : v.base().points()) grams.emplace(p.label, dual_pseudometric(v.metric(p.label)).gram());
        out = out.with_metric_grams(grams);
    }
    return out;
}

BundleGluing induced_dual_gluing(const BundleGluing& gluing) {
    LabelMap finv = invert_label_map(gluing.base_map);
    BundleGluing out;
    for (const auto& y : gluing.domain) {
        const std::string& fy = gluing.base_map.at(y);
        out.domain.push_back(fy);
        out.fiber_maps.emplace(fy, dual_map(gluing.fiber_maps.at(y)));
    }
    out.base_map = std::move(finv);
    return out;
}

namespace {

BundleGluing combine(const BundleGluing& a, const BundleGluing& b,
                     const std::function<FiberSpace(const FiberSpace&, const FiberSpace&)>& fib,
                     const std::function<Mat(const Mat&, const Mat&)>& op) {
    if (a.domain != b.domain || a.base_map != b.base_map)
        throw Error(ErrorCode::ProvenanceMismatch, "gluings are along different base maps");
    BundleGluing out{a.domain, a.base_map, {}};
    for (const auto& y : a.domain) {
        const auto& x = a.fiber_maps.at(y);
        const auto& z = b.fiber_maps.at(y);
        out.fiber_maps.emplace(y, LinearFiberMap(fib(x.source(), z.source()), fib(x.target(), z.target()),
                                                 op(x.coeffs(), z.coeffs())));
    }
    return out;
}

}  // namespace

BundleGluing direct_sum(const BundleGluing& a, const BundleGluing& b) {
    return combine(a, b, [](const FiberSpace& x, const FiberSpace& y) { return direct_sum(x, y); },
                   [](const Mat& x, const Mat& y) { return block_diagonal(x, y); });
}

BundleGluing tensor_product(const BundleGluing& a, const BundleGluing& b) {
    return combine(a, b, [](const FiberSpace& x, const FiberSpace& y) { return tensor_product(x, y); },
                   [](const Mat& x, const Mat& y) { return kronecker(x, y); });
}

namespace {

using MatOp = std::function<Mat(const Mat&, const Mat&)>;

void check_provenance(const GluedBundle& a, const GluedBundle& b) {
    if (!same_labels(a.v1->base(), b.v1->base()) || !same_labels(a.v2->base(), b.v2->base()) ||
        a.gluing->domain != b.gluing->domain || a.gluing->base_map != b.gluing->base_map)
        throw Error(ErrorCode::ProvenanceMismatch, "glued bundles come from different base gluings");
}

Mat solve_right(const Mat& target, const Mat& source, const std::string& where) {
    if (source.rows() == 0) return Mat::Zero(target.rows(), 0);
    if (source.rows() != source.cols() || numerical_rank(source) != source.rows())
        throw Error(ErrorCode::NotInvertible, "identification over '" + where + "' is singular");
    return target * source.inverse();
}

// Residual of phi o js = jt on every branch of the two j-maps of each side.
double identity_residual(const PiecewiseBundleMap& phi, const PiecewiseBundleMap& js1, const PiecewiseBundleMap& js2,
                         const GluedBundle& target) {
    double worst = 0.0;
    auto run = [&](const PiecewiseBundleMap& js, const PiecewiseBundleMap& jt) {
        for (const auto& b : js.branches()) {
            const Branch& t = jt.at(b.source);
            const Branch& p = phi.at(b.target);
            if (p.target != t.target) {
                worst = std::numeric_limits<double>::infinity();
                continue;
            }
            Mat r = p.matrix * b.matrix - t.matrix;
            if (r.size() > 0) worst = std::max(worst, r.cwiseAbs().maxCoeff());
        }
    };
    run(js1, target.j1);
    run(js2, target.j2);
    return worst;
}

PiecewiseBundleMap from_identities(const BaseSpace& base, const PiecewiseBundleMap& js1,
                                   const PiecewiseBundleMap& js2, const GluedBundle& target) {
    std::vector<Branch> br;
    for (const auto& p : base.points()) {
        const bool first = p.region == Region::I1;
        const PiecewiseBundleMap& js = first ? js1 : js2;
        const PiecewiseBundleMap& jt = first ? target.j1 : target.j2;
        const Branch& s = js.at(p.origin);
        const Branch& t = jt.at(p.origin);
        br.push_back({p.label, t.target, p.region, solve_right(t.matrix, s.matrix, p.label)});
    }
    return PiecewiseBundleMap(base, target.bundle.base(), std::move(br));
}

Identification cup_identification(const GluedBundle& a, const GluedBundle& b, const MatOp& op, bool tensor) {
    check_provenance(a, b);
    PseudoBundle source = tensor ? tensor_product(a.bundle, b.bundle) : direct_sum(a.bundle, b.bundle);
    GluedBundle target = tensor ? glue_bundles(tensor_product(*a.v1, *b.v1), tensor_product(*a.v2, *b.v2),
                                               tensor_product(*a.gluing, *b.gluing))
                                : glue_bundles(direct_sum(*a.v1, *b.v1), direct_sum(*a.v2, *b.v2),
                                               direct_sum(*a.gluing, *b.gluing));
    PiecewiseBundleMap js1 = pointwise(a.j1, b.j1, op);
    PiecewiseBundleMap js2 = pointwise(a.j2, b.j2, op);
    PiecewiseBundleMap phi = from_identities(source.base(), js1, js2, target);
    double res = identity_residual(phi, js1, js2, target);
    return {std::move(phi), std::move(source), std::move(target), res};
}

Identification cup_power(const GluedBundle& g, int n, bool tensor) {
    if (n < 1) throw Error(ErrorCode::DimensionMismatch, "power must be at least 1");
    if (n == 1) return {identity_map(g.bundle), g.bundle, g, 0.0};
    MatOp op = tensor ? MatOp([](const Mat& x, const Mat& y) { return kronecker(x, y); })
                      : MatOp([](const Mat& x, const Mat& y) { return block_diagonal(x, y); });
    Identification prev = cup_power(g, n - 1, tensor);
    Identification step = cup_identification(prev.target, g, op, tensor);
    PiecewiseBundleMap lifted = pointwise(prev.map, identity_map(g.bundle), op);
    PiecewiseBundleMap phi = compose(step.map, lifted);
    PseudoBundle source = tensor ? tensor_product(prev.source, g.bundle) : direct_sum(prev.source, g.bundle);
    return {std::move(phi), std::move(source), std::move(step.target), std::max(prev.residual, step.residual)};
}

}  // namespace

Identification phi_cup_oplus(const GluedBundle& a, const GluedBundle& b) {
    return cup_identification(a, b, [](const Mat& x, const Mat& y) { return block_diagonal(x, y); }, false);
}

Identification phi_cup_otimes(const GluedBundle& a, const GluedBundle& b) {
    return cup_identification(a, b, [](const Mat& x, const Mat& y) { return kronecker(x, y); }, true);
}

Identification phi_cup_otimes_n(const GluedBundle& glued, int n) { return cup_power(glued, n, true); }

Identification phi_cup_oplus_k(const GluedBundle& glued, int k) { return cup_power(glued, k, false); }

PiecewiseBundleMap phi_cup_otimes_n_direct(const GluedBundle& glued, int n) {
    PseudoBundle w1 = *glued.v1, w2 = *glued.v2;
    BundleGluing h = *glued.gluing;
    PiecewiseBundleMap js1 = glued.j1, js2 = glued.j2;
    PseudoBundle source = glued.bundle;
    for (int k = 1; k < n; ++k) {
        w1 = tensor_product(w1, *glued.v1);
        w2 = tensor_product(w2, *glued.v2);
        h = tensor_product(h, *glued.gluing);
        js1 = kronecker(js1, glued.j1);
        js2 = kronecker(js2, glued.j2);
        source = tensor_product(source, glued.bundle);
    }
    GluedBundle target = glue_bundles(w1, w2, h);
    return from_identities(source.base(), js1, js2, target);
}

GluedBundle dual_glued(const GluedBundle& glued) {
    return glue_bundles(dual_bundle(*glued.v2), dual_bundle(*glued.v1), induced_dual_gluing(*glued.gluing));
}

DualIdentification psi_cup_star(const GluedBundle& glued) {
    BaseMap sw = switch_map(glued);
    BundleGluing dg = induced_dual_gluing(*glued.gluing);
    PseudoBundle source = dual_bundle(glued.bundle);
    GluedBundle target = glue_bundles(dual_bundle(*glued.v2), dual_bundle(*glued.v1), dg);
    std::vector<Branch> br;
    for (const auto& p : sw.source.points()) {
        const int d = source.fiber(p.label).dim();
        Mat m = Mat::Identity(d, d);
        if (p.region == Region::I2Glue) {
            m = dg.fiber_maps.at(p.origin).coeffs();
            if (m.rows() != m.cols() || (m.rows() > 0 && numerical_rank(m) != m.rows()))
                throw Error(ErrorCode::DualMapNotInvertible, "dual fibre map over '" + p.label + "' is not invertible");
        }
        br.push_back({p.label, sw.map.at(p.label), p.region, m});
    }
    return {PiecewiseBundleMap(source.base(), target.bundle.base(), std::move(br)), std::move(source),
            std::move(target)};
}

DualIdentification phi_cup_star_star(const GluedBundle& glued) {
    BaseMap sw = switch_map(glued);
    LabelMap back = invert_label_map(sw.map);
    GluedBundle middle = dual_glued(glued);
    PseudoBundle source = dual_bundle(middle.bundle);
    GluedBundle target = glue_bundles(dual_bundle(dual_bundle(*glued.v1)), dual_bundle(dual_bundle(*glued.v2)),
                                      induced_dual_gluing(induced_dual_gluing(*glued.gluing)));
    std::vector<Branch> br;
    for (const auto& p : sw.target.points()) {
        const int d = source.fiber(p.label).dim();
        Mat m = Mat::Identity(d, d);
        if (p.region == Region::I2Glue) {
            const LinearFiberMap& f = glued.gluing->fiber_maps.at(p.origin);
            m = f.target().char_coords(f.coeffs() * f.source().char_basis());
            if (m.rows() != m.cols() || (m.rows() > 0 && numerical_rank(m) != m.rows()))
                throw Error(ErrorCode::DualMapNotInvertible, "dual fibre map over '" + p.label + "' is not invertible");
        }
        br.push_back({p.label, back.at(p.label), p.region, m});
    }
    return {PiecewiseBundleMap(source.base(), target.bundle.base(), std::move(br)), std::move(source),
            std::move(target)};
}

}  // namespace pseudoglue
