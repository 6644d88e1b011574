#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pseudoglue/expr.hpp"
#include "pseudoglue/metrics.hpp"

namespace pseudoglue {

// A matrix entry is a number or an expression in x and the scenario constants.
using Entry = std::variant<double, std::string>;
using EntryMatrix = std::vector<std::vector<Entry>>;  // row-major
using NumberMatrix = std::vector<std::vector<double>>;

struct BundleSpec {
    std::string name;
    std::vector<double> samples;  // base point parameters; labels are their shortest decimal form
    int dim = 0;
    int char_dim = 0;
    NumberMatrix char_basis;  // char_dim vectors of length dim
    NumberMatrix comp_basis;  // dim - char_dim vectors of length dim
    std::optional<EntryMatrix> metric_expr;             // gram entries evaluated at each sample
    std::map<std::string, NumberMatrix> gram_per_point;  // used when metric_expr is absent
};

struct GluingSpec {
    std::vector<std::string> domain;
    LabelMap base_map;
    std::map<std::string, EntryMatrix> fiber_map;  // keyed by y, entries evaluated at y
};

struct ScenarioOptions {
    double tol = tol::absolute;
    std::string suite = "all";
    std::uint64_t seed = 0;
};

struct Scenario {
    int version = 1;
    std::array<BundleSpec, 2> bundles;
    GluingSpec gluing;
    Constants constants;
    ScenarioOptions options;
};

constexpr int kScenarioVersion = 1;

// Throws InvalidScenario on malformed JSON, schema violations and unparsable expressions.
// A fibre map given as a single array applies at every point of the domain.
Scenario parse_scenario(std::string_view json);
// Canonical form: sorted keys, two-space indent, shortest round-trip numbers.
std::string serialize(const Scenario& s);
std::uint64_t digest(const Scenario& s);  // FNV-1a of the canonical form
std::string digest_hex(const Scenario& s);

struct Instance {
    MetricPair pair;
    GluedBundle glued;                  // without a metric
    std::optional<GluedBundle> metric;  // carries g~ when the factor metrics are compatible
    double tol = tol::absolute;
};

// Throws InvalidScenario.
Instance instantiate(const Scenario& s);

// The wedge of two lines: X1 = X2 = samples, fibres R, f~ = a over {0}, metrics f1(x), f2(x).
// Throws ZeroGluingConstant, NonPositiveCoefficient, InvalidScenario (0 not sampled), SyntaxError.
Scenario builtin_wedge_lines(double a, const std::string& f1, const std::string& f2,
                             const std::vector<double>& samples = {-1.0, 0.0, 1.0});
// V1 has fibre R^2 with characteristic line e1; f~(y, z) = a y; g1 = f1(x) dy^2.
Scenario builtin_mixed_fibres(double a, const std::string& f1, const std::string& f2,
                              const std::vector<double>& samples = {-1.0, 0.0, 1.0});

enum class RandomMode {
    Standard,    // compatible, with f~ invertible on characteristic subspaces
    DualDefect,  // compatible, but d1 < d2 so f~* cannot be invertible
    Mutated,     // criterion violated, independent metrics
};

std::string_view to_string(RandomMode m);

// dims bounds every fibre dimension, points bounds each base. Deterministic per seed.
Scenario random_scenario(std::uint64_t seed, int dims, int points, RandomMode mode = RandomMode::Standard);

}  // namespace pseudoglue
