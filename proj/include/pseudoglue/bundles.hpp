#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pseudoglue/linalg.hpp"

namespace pseudoglue {

using LabelMap = std::map<std::string, std::string>;

// Where a point of a glued base comes from.
enum class Region {
    Plain,   // not a glued base
    I1,      // i1(X1 \ Y)
    I2Glue,  // i2(f(Y))
    I2Free,  // i2(X2 \ f(Y))
};

std::string_view to_string(Region r);

struct BasePoint {
    std::string label;
    std::optional<double> param;
    std::string side;    // factor base name for glued points, empty otherwise
    std::string origin;  // label in that factor
    Region region = Region::Plain;
};

class BaseSpace {
public:
    BaseSpace() = default;
    // Throws DuplicateLabel.
    BaseSpace(std::string name, std::vector<BasePoint> points);

    const std::string& name() const noexcept { return name_; }
    const std::vector<BasePoint>& points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }

    bool contains(const std::string& label) const { return index_.count(label) > 0; }
    // Throws UnknownLabel.
    const BasePoint& point(const std::string& label) const;
    std::vector<std::string> labels() const;

private:
    std::string name_;
    std::vector<BasePoint> points_;
    std::map<std::string, std::size_t> index_;
};

BaseSpace sampled_base(const std::string& name, const std::vector<double>& params);

using MetricField = std::map<std::string, PseudoMetricForm>;

class PseudoBundle {
public:
    // With uniform = true every fibre must share (n, d).
    PseudoBundle(BaseSpace base, std::map<std::string, FiberSpace> fibers, bool uniform = true);

    const BaseSpace& base() const noexcept { return base_; }
    const FiberSpace& fiber(const std::string& label) const;
    const std::map<std::string, FiberSpace>& fibers() const noexcept { return fibers_; }

    bool has_metric() const noexcept { return metric_.has_value(); }
    const PseudoMetricForm& metric(const std::string& label) const;
    const MetricField& metric_field() const;

    // Metrics are re-validated against the fibres. Throws UnknownLabel or the validation errors.
    PseudoBundle with_metric(const MetricField& metric) const;
    PseudoBundle with_metric_grams(const std::map<std::string, Mat>& grams) const;

    int max_dim() const;

private:
    BaseSpace base_;
    std::map<std::string, FiberSpace> fibers_;
    std::optional<MetricField> metric_;
};

struct BundleGluing {
    std::vector<std::string> domain;  // Y, in X1 order
    LabelMap base_map;                // f : Y -> X2
    std::map<std::string, LinearFiberMap> fiber_maps;  // keyed by y
};

// Throws UnknownLabel, NonInjectiveBaseMap, MissingFiberMap, DimensionMismatch or NotAdmissible.
BundleGluing make_gluing(const PseudoBundle& v1, const PseudoBundle& v2, std::vector<std::string> domain,
                         LabelMap base_map, const std::map<std::string, Mat>& fiber_maps);

struct GluedBase {
    BaseSpace space;
    LabelMap i1;  // X1 \ Y -> glued
    LabelMap i2;  // X2 -> glued
};

std::string glued_label(const std::string& side, const std::string& label);

// Labels of the result are "<X1 name>:x" and "<X2 name>:x'". Throws UnknownLabel or NonInjectiveBaseMap.
GluedBase glue_bases(const BaseSpace& x1, const BaseSpace& x2, const std::vector<std::string>& domain,
                     const LabelMap& f);

// A fibrewise linear map between bundles, stored case by case.
struct Branch {
    std::string source;
    std::string target;
    Region region = Region::Plain;
    Mat matrix;
};

class PiecewiseBundleMap {
public:
    PiecewiseBundleMap() = default;
    PiecewiseBundleMap(BaseSpace source_base, BaseSpace target_base, std::vector<Branch> branches);

    const BaseSpace& source_base() const noexcept { return source_base_; }
    const BaseSpace& target_base() const noexcept { return target_base_; }
    const std::vector<Branch>& branches() const noexcept { return branches_; }
    const Branch& at(const std::string& source_label) const;
    bool defined_at(const std::string& source_label) const { return index_.count(source_label) > 0; }

    LabelMap base_map() const;

private:
    BaseSpace source_base_;
    BaseSpace target_base_;
    std::vector<Branch> branches_;
    std::map<std::string, std::size_t> index_;
};

PiecewiseBundleMap identity_map(const PseudoBundle& v);
PiecewiseBundleMap compose(const PiecewiseBundleMap& outer, const PiecewiseBundleMap& inner);
// Throws BaseMapNotInvertible or NotInvertible.
PiecewiseBundleMap inverse(const PiecewiseBundleMap& map);
// Pointwise Kronecker product / direct sum of two maps over the same base map.
PiecewiseBundleMap kronecker(const PiecewiseBundleMap& a, const PiecewiseBundleMap& b);
PiecewiseBundleMap direct_sum(const PiecewiseBundleMap& a, const PiecewiseBundleMap& b);
// Largest entrywise difference over shared branches; infinity when the branch sets or targets differ.
double max_difference(const PiecewiseBundleMap& a, const PiecewiseBundleMap& b);

bool verify_covers(const PiecewiseBundleMap& map, const LabelMap& base_map);

struct GluedBundle {
    PseudoBundle bundle;
    LabelMap i1;
    LabelMap i2;
    PiecewiseBundleMap j1;  // V1 -> glued, f~ over Y
    PiecewiseBundleMap j2;  // V2 -> glued
    std::shared_ptr<const PseudoBundle> v1;
    std::shared_ptr<const PseudoBundle> v2;
    std::shared_ptr<const BundleGluing> gluing;
};

// Fibres of the result may have different dimensions on the two sides.
GluedBundle glue_bundles(const PseudoBundle& v1, const PseudoBundle& v2, const BundleGluing& gluing);

struct BaseMap {
    BaseSpace source;
    BaseSpace target;
    LabelMap map;
};

// Inverse of an injective label map. Throws BaseMapNotInvertible.
LabelMap invert_label_map(const LabelMap& f);

// X1 u_f X2 -> X2 u_{f^-1} X1.
BaseMap switch_map(const GluedBundle& glued);
BaseMap switch_map(const BaseSpace& x1, const BaseSpace& x2, const std::vector<std::string>& domain,
                   const LabelMap& f);

// Throws BaseMismatch.
PseudoBundle direct_sum(const PseudoBundle& a, const PseudoBundle& b);
PseudoBundle tensor_product(const PseudoBundle& a, const PseudoBundle& b);
FiberSpace direct_sum(const FiberSpace& a, const FiberSpace& b);
FiberSpace tensor_product(const FiberSpace& a, const FiberSpace& b);

// Standard dual fibres of dimension d; dual metrics are attached when v carries a metric.
PseudoBundle dual_bundle(const PseudoBundle& v);

// Gluing of V2* to V1* along (f~*, f^-1). Throws BaseMapNotInvertible.
BundleGluing induced_dual_gluing(const BundleGluing& gluing);

BundleGluing direct_sum(const BundleGluing& a, const BundleGluing& b);
BundleGluing tensor_product(const BundleGluing& a, const BundleGluing& b);

// A commutativity identification together with the bundles it connects and the
// largest residual of its defining identities.
struct Identification {
    PiecewiseBundleMap map;
    PseudoBundle source;
    GluedBundle target;
    double residual = 0.0;
};

// (V1 u V2) + (V1' u V2') -> (V1 + V1') u (V2 + V2'). Throws ProvenanceMismatch.
Identification phi_cup_oplus(const GluedBundle& a, const GluedBundle& b);
Identification phi_cup_otimes(const GluedBundle& a, const GluedBundle& b);
// Iterated versions for n copies of one glued bundle, built by induction on n.
Identification phi_cup_otimes_n(const GluedBundle& glued, int n);
Identification phi_cup_oplus_k(const GluedBundle& glued, int k);

// Same map as phi_cup_otimes_n, computed at each point straight from the n-fold j-identities.
PiecewiseBundleMap phi_cup_otimes_n_direct(const GluedBundle& glued, int n);

struct DualIdentification {
    PiecewiseBundleMap map;
    PseudoBundle source;
    GluedBundle target;
};

// (V1 u V2)* -> V2* u V1*, covering the switch map.
// Throws BaseMapNotInvertible or DualMapNotInvertible.
DualIdentification psi_cup_star(const GluedBundle& glued);

// (V2* u V1*)* -> V1** u V2**, covering the inverse switch.
DualIdentification phi_cup_star_star(const GluedBundle& glued);

GluedBundle dual_glued(const GluedBundle& glued);

}  // namespace pseudoglue
