#include "pseudoglue/scenario.hpp"
#include "pseudoglue/suite.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <random>

#include <json.hpp>

namespace pseudoglue {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::InvalidScenario, what); }

const json& field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object()) invalid(path + " must be an object");
    auto it = j.find(key);
    if (it == j.end()) invalid(path + "." + key + " is missing");
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) invalid(path + " must be a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) invalid(path + " must be an integer");
    return j.get<int>();
}

std::string text(const json& j, const std::string& path) {
    if (!j.is_string()) invalid(path + " must be a string");
    return j.get<std::string>();
}

NumberMatrix number_matrix(const json& j, const std::string& path) {
    if (!j.is_array()) invalid(path + " must be an array of arrays");
    NumberMatrix out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array()) invalid(p + " must be an array");
        std::vector<double> row;
        for (std::size_t k = 0; k < j[i].size(); ++k) row.push_back(number(j[i][k], p + "[" + std::to_string(k) + "]"));
        out.push_back(std::move(row));
    }
    return out;
}

Entry entry(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        try {
            parse_expr(s);
        } catch (const SyntaxError& e) {
            invalid(path + ": " + e.what());
        }
        return s;
    }
    invalid(path + " must be a number or an expression string");
}

EntryMatrix entry_matrix(const json& j, const std::string& path) {
    if (!j.is_array()) invalid(path + " must be an array of arrays");
    EntryMatrix out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string p = path + "[" + std::to_string(i) + "]";
        if (!j[i].is_array()) invalid(p + " must be an array");
        std::vector<Entry> row;
        for (std::size_t k = 0; k < j[i].size(); ++k) row.push_back(entry(j[i][k], p + "[" + std::to_string(k) + "]"));
        out.push_back(std::move(row));
    }
    return out;
}

json to_json(const EntryMatrix& m) {
    json out = json::array();
    for (const auto& row : m) {
        json r = json::array();
        for (const auto& e : row) {
            if (std::holds_alternative<double>(e)) r.push_back(std::get<double>(e));
            else r.push_back(std::get<std::string>(e));
        }
        out.push_back(std::move(r));
    }
    return out;
}

json to_json(const NumberMatrix& m) {
    json out = json::array();
    for (const auto& row : m) out.push_back(row);
    return out;
}

BundleSpec parse_bundle(const json& j, const std::string& path) {
    BundleSpec b;
    b.name = text(field(j, "name", path), path + ".name");
    const json& samples = field(field(j, "base", path), "samples", path + ".base");
    if (!samples.is_array()) invalid(path + ".base.samples must be an array");
    for (std::size_t i = 0; i < samples.size(); ++i)
        b.samples.push_back(number(samples[i], path + ".base.samples[" + std::to_string(i) + "]"));
    const json& fiber = field(j, "fiber", path);
    b.dim = integer(field(fiber, "dim", path + ".fiber"), path + ".fiber.dim");
    b.char_dim = integer(field(fiber, "char_dim", path + ".fiber"), path + ".fiber.char_dim");
    b.char_basis = number_matrix(field(fiber, "char_basis", path + ".fiber"), path + ".fiber.char_basis");
    b.comp_basis = number_matrix(field(fiber, "comp_basis", path + ".fiber"), path + ".fiber.comp_basis");
    const json& metric = field(j, "metric", path);
    const bool has_expr = metric.contains("expr");
    const bool has_grams = metric.contains("gram_per_point");
    if (has_expr == has_grams) invalid(path + ".metric needs exactly one of expr or gram_per_point");
    if (has_expr) {
        b.metric_expr = entry_matrix(metric["expr"], path + ".metric.expr");
    } else {
        const json& g = metric["gram_per_point"];
        if (!g.is_object()) invalid(path + ".metric.gram_per_point must be an object");
        for (auto it = g.begin(); it != g.end(); ++it)
            b.gram_per_point.emplace(it.key(), number_matrix(it.value(), path + ".metric.gram_per_point." + it.key()));
    }
    return b;
}

json bundle_json(const BundleSpec& b) {
    json j;
    j["name"] = b.name;
    j["base"]["samples"] = b.samples;
    j["fiber"]["dim"] = b.dim;
    j["fiber"]["char_dim"] = b.char_dim;
    j["fiber"]["char_basis"] = to_json(b.char_basis);
    j["fiber"]["comp_basis"] = to_json(b.comp_basis);
    if (b.metric_expr) {
        j["metric"]["expr"] = to_json(*b.metric_expr);
    } else {
        json g = json::object();
        for (const auto& [label, m] : b.gram_per_point) g[label] = to_json(m);
        j["metric"]["gram_per_point"] = g;
    }
    return j;
}

double evaluate_entry(const Entry& e, double x, const Constants& c) {
    if (std::holds_alternative<double>(e)) return std::get<double>(e);
    return evaluate(parse_expr(std::get<std::string>(e)), x, c);
}

Mat evaluate_matrix(const EntryMatrix& m, double x, const Constants& c, Eigen::Index rows, Eigen::Index cols,
                    const std::string& what) {
    if (static_cast<Eigen::Index>(m.size()) != rows) invalid(what + " must have " + std::to_string(rows) + " rows");
    Mat out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = m[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != cols)
            invalid(what + " must have " + std::to_string(cols) + " columns");
        for (Eigen::Index k = 0; k < cols; ++k) out(i, k) = evaluate_entry(row[static_cast<std::size_t>(k)], x, c);
    }
    return out;
}

Mat numbers(const NumberMatrix& m, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
    if (static_cast<Eigen::Index>(m.size()) != rows) invalid(what + " must have " + std::to_string(rows) + " rows");
    Mat out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = m[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != cols)
            invalid(what + " must have " + std::to_string(cols) + " columns");
        for (Eigen::Index k = 0; k < cols; ++k) out(i, k) = row[static_cast<std::size_t>(k)];
    }
    return out;
}

// Basis vectors are stored one per row; the fibre wants them as columns.
Mat basis_columns(const NumberMatrix& vectors, int count, int dim, const std::string& what) {
    return numbers(vectors, count, dim, what).transpose();
}

PseudoBundle build_bundle(const BundleSpec& b, const Constants& c, const std::string& path) {
    if (b.name.empty()) invalid(path + ".name must not be empty");
    if (b.dim < 1) invalid(path + ".fiber.dim must be at least 1");
    if (b.char_dim < 0 || b.char_dim > b.dim) invalid(path + ".fiber.char_dim must lie in [0, dim]");
    if (b.samples.empty()) invalid(path + ".base.samples must not be empty");
    Mat cb = basis_columns(b.char_basis, b.char_dim, b.dim, path + ".fiber.char_basis");
    Mat kb = basis_columns(b.comp_basis, b.dim - b.char_dim, b.dim, path + ".fiber.comp_basis");
    FiberSpace space(cb, kb);
    BaseSpace base = sampled_base(b.name, b.samples);
    std::map<std::string, FiberSpace> fibers;
    for (const auto& p : base.points()) fibers.emplace(p.label, space);
    PseudoBundle bundle(base, fibers);

    std::map<std::string, Mat> grams;
    for (const auto& p : base.points()) {
        if (b.metric_expr) {
            grams.emplace(p.label, evaluate_matrix(*b.metric_expr, *p.param, c, b.dim, b.dim,
                                                   path + ".metric.expr at x = " + p.label));
        } else {
            auto it = b.gram_per_point.find(p.label);
            if (it == b.gram_per_point.end()) invalid(path + ".metric.gram_per_point lacks point " + p.label);
            grams.emplace(p.label, numbers(it->second, b.dim, b.dim, path + ".metric.gram_per_point." + p.label));
        }
    }
    for (const auto& [label, m] : b.gram_per_point)
        if (!base.contains(label)) invalid(path + ".metric.gram_per_point names unknown point " + label);
    return bundle.with_metric_grams(grams);
}

std::string label_of(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void require_positive(const std::string& f, const std::vector<double>& samples, const Constants& c,
                      const char* which) {
    Expr e = parse_expr(f);
    for (double x : samples) {
        double v = evaluate(e, x, c);
        if (!(v > 0.0))
            throw Error(ErrorCode::NonPositiveCoefficient,
                        std::string(which) + " = " + f + " is not positive at x = " + label_of(x));
    }
}

void require_builtin(double a, const std::string& f1, const std::string& f2, const std::vector<double>& samples) {
    if (a == 0.0 || !std::isfinite(a)) throw Error(ErrorCode::ZeroGluingConstant, "the gluing constant a must be non-zero");
    if (std::find(samples.begin(), samples.end(), 0.0) == samples.end())
        invalid("the samples must contain the glue point 0");
    Constants c{{"a", a}};
    require_positive(f1, samples, c, "f1");
    require_positive(f2, samples, c, "f2");
}

BundleSpec line_bundle(const std::string& name, const std::vector<double>& samples, const std::string& f) {
    BundleSpec b;
    b.name = name;
    b.samples = samples;
    b.dim = 1;
    b.char_dim = 1;
    b.char_basis = {{1.0}};
    b.metric_expr = EntryMatrix{{Entry{f}}};
    return b;
}

// Random helpers. Every draw goes through one engine so scenarios depend on the seed alone.
class Draw {
public:
    explicit Draw(std::uint64_t seed) : rng_(seed) {}

    int between(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double gauss() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

    Mat gaussian(Eigen::Index r, Eigen::Index c) {
        Mat m(r, c);
        for (Eigen::Index i = 0; i < r; ++i)
            for (Eigen::Index k = 0; k < c; ++k) m(i, k) = gauss();
        return m;
    }

    Mat orthogonal(int n) {
        if (n == 0) return Mat(0, 0);
        Eigen::HouseholderQR<Mat> qr(gaussian(n, n));
        return qr.householderQ() * Mat::Identity(n, n);
    }

    Mat spread(int n) {
        Vec s(n);
        for (int i = 0; i < n; ++i) s(i) = uniform(0.5, 2.0);
        return s.asDiagonal();
    }

    Mat invertible(int n) { return orthogonal(n) * spread(n) * orthogonal(n); }

    Mat spd(int n) {
        Mat q = orthogonal(n);
        return q * spread(n) * q.transpose();
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[static_cast<std::size_t>(between(0, static_cast<int>(i) - 1))]);
    }

private:
    std::mt19937_64 rng_;
};

NumberMatrix rows_of(const Mat& m) {
    NumberMatrix out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> row;
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        out.push_back(std::move(row));
    }
    return out;
}

EntryMatrix entries_of(const Mat& m) {
    EntryMatrix out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<Entry> row;
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.emplace_back(m(i, k));
        out.push_back(std::move(row));
    }
    return out;
}

Mat symmetric(const Mat& m) { return 0.5 * (m + m.transpose()); }

}  // namespace

Scenario parse_scenario(std::string_view source) {
    json j;
    try {
        j = json::parse(source);
    } catch (const json::parse_error& e) {
        invalid(std::string("malformed JSON: ") + e.what());
    }
    Scenario s;
    s.version = integer(field(j, "version", "scenario"), "version");
    if (s.version != kScenarioVersion) invalid("unsupported scenario version " + std::to_string(s.version));
    const json& bundles = field(j, "bundles", "scenario");
    if (!bundles.is_array() || bundles.size() != 2) invalid("bundles must hold exactly two entries");
    for (std::size_t i = 0; i < 2; ++i) s.bundles[i] = parse_bundle(bundles[i], "bundles[" + std::to_string(i) + "]");

    const json& gluing = field(j, "gluing", "scenario");
    const json& domain = field(gluing, "domain", "gluing");
    if (!domain.is_array()) invalid("gluing.domain must be an array");
    for (std::size_t i = 0; i < domain.size(); ++i)
        s.gluing.domain.push_back(text(domain[i], "gluing.domain[" + std::to_string(i) + "]"));
    const json& base_map = field(gluing, "base_map", "gluing");
    if (!base_map.is_object()) invalid("gluing.base_map must be an object");
    for (auto it = base_map.begin(); it != base_map.end(); ++it)
        s.gluing.base_map.emplace(it.key(), text(it.value(), "gluing.base_map." + it.key()));
    const json& fiber_map = field(gluing, "fiber_map", "gluing");
    if (fiber_map.is_array()) {
        EntryMatrix m = entry_matrix(fiber_map, "gluing.fiber_map");
        for (const auto& y : s.gluing.domain) s.gluing.fiber_map[y] = m;
    } else if (fiber_map.is_object()) {
        for (auto it = fiber_map.begin(); it != fiber_map.end(); ++it)
            s.gluing.fiber_map.emplace(it.key(), entry_matrix(it.value(), "gluing.fiber_map." + it.key()));
    } else {
        invalid("gluing.fiber_map must be an array or an object keyed by domain point");
    }

    if (j.contains("constants")) {
        const json& c = j["constants"];
        if (!c.is_object()) invalid("constants must be an object");
        for (auto it = c.begin(); it != c.end(); ++it) {
            if (it.key() == "x" || it.key() == "exp") invalid("constant name '" + it.key() + "' is reserved");
            s.constants.emplace(it.key(), number(it.value(), "constants." + it.key()));
        }
    }
    if (j.contains("options")) {
        const json& o = j["options"];
        if (!o.is_object()) invalid("options must be an object");
        if (o.contains("tol")) s.options.tol = number(o["tol"], "options.tol");
        if (o.contains("suite")) {
            s.options.suite = text(o["suite"], "options.suite");
            const auto& names = suite_names();
            if (std::find(names.begin(), names.end(), s.options.suite) == names.end())
                invalid("unknown suite '" + s.options.suite + "'");
        }
        if (o.contains("seed")) {
            if (!o["seed"].is_number_unsigned()) invalid("options.seed must be a non-negative integer");
            s.options.seed = o["seed"].get<std::uint64_t>();
        }
    }
    if (!(s.options.tol > 0.0)) invalid("options.tol must be positive");
    return s;
}

std::string serialize(const Scenario& s) {
    json j;
    j["version"] = s.version;
    j["bundles"] = json::array({bundle_json(s.bundles[0]), bundle_json(s.bundles[1])});
    j["gluing"]["domain"] = s.gluing.domain;
    j["gluing"]["base_map"] = json::object();
    for (const auto& [y, fy] : s.gluing.base_map) j["gluing"]["base_map"][y] = fy;
    j["gluing"]["fiber_map"] = json::object();
    for (const auto& [y, m] : s.gluing.fiber_map) j["gluing"]["fiber_map"][y] = to_json(m);
    j["constants"] = json::object();
    for (const auto& [k, v] : s.constants) j["constants"][k] = v;
    j["options"]["tol"] = s.options.tol;
    j["options"]["suite"] = s.options.suite;
    j["options"]["seed"] = s.options.seed;
    return j.dump(2) + "\n";
}

std::uint64_t digest(const Scenario& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : serialize(s)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string digest_hex(const Scenario& s) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest(s)));
    return buf;
}

Instance instantiate(const Scenario& s) {
    try {
        if (s.bundles[0].name == s.bundles[1].name) invalid("the two bundles need distinct names");
        PseudoBundle v1 = build_bundle(s.bundles[0], s.constants, "bundles[0]");
        PseudoBundle v2 = build_bundle(s.bundles[1], s.constants, "bundles[1]");
        std::map<std::string, Mat> maps;
        for (const auto& y : s.gluing.domain) {
            if (!v1.base().contains(y)) invalid("gluing.domain names unknown point " + y);
            auto it = s.gluing.fiber_map.find(y);
            if (it == s.gluing.fiber_map.end()) invalid("gluing.fiber_map lacks point " + y);
            maps.emplace(y, evaluate_matrix(it->second, *v1.base().point(y).param, s.constants, s.bundles[1].dim,
                                            s.bundles[0].dim, "gluing.fiber_map." + y));
        }
        for (const auto& [y, m] : s.gluing.fiber_map)
            if (std::find(s.gluing.domain.begin(), s.gluing.domain.end(), y) == s.gluing.domain.end())
                invalid("gluing.fiber_map names a point outside the domain: " + y);
        BundleGluing gluing = make_gluing(v1, v2, s.gluing.domain, s.gluing.base_map, maps);
        Instance inst{{v1, v2, gluing}, glue_bundles(v1, v2, gluing), std::nullopt, s.options.tol};
        if (check_compatible(inst.pair, s.options.tol).passed()) {
            GluedBundle g = inst.glued;
            g.bundle = g.bundle.with_metric(induced_metric_direct(inst.pair, inst.glued, s.options.tol));
            inst.metric = std::move(g);
        }
        return inst;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidScenario) throw;
        invalid(e.what());
    }
}

Scenario builtin_wedge_lines(double a, const std::string& f1, const std::string& f2, const std::vector<double>& samples) {
    require_builtin(a, f1, f2, samples);
    Scenario s;
    s.bundles[0] = line_bundle("X1", samples, f1);
    s.bundles[1] = line_bundle("X2", samples, f2);
    s.gluing.domain = {"0"};
    s.gluing.base_map = {{"0", "0"}};
    s.gluing.fiber_map["0"] = EntryMatrix{{Entry{std::string("a")}}};
    s.constants = {{"a", a}};
    return s;
}

Scenario builtin_mixed_fibres(double a, const std::string& f1, const std::string& f2, const std::vector<double>& samples) {
    require_builtin(a, f1, f2, samples);
    Scenario s;
    BundleSpec& v1 = s.bundles[0];
    v1.name = "X1";
    v1.samples = samples;
    v1.dim = 2;
    v1.char_dim = 1;
    v1.char_basis = {{1.0, 0.0}};
    v1.comp_basis = {{0.0, 1.0}};
    v1.metric_expr = EntryMatrix{{Entry{f1}, Entry{0.0}}, {Entry{0.0}, Entry{0.0}}};
    s.bundles[1] = line_bundle("X2", samples, f2);
    s.gluing.domain = {"0"};
    s.gluing.base_map = {{"0", "0"}};
    s.gluing.fiber_map["0"] = EntryMatrix{{Entry{std::string("a")}, Entry{0.0}}};
    s.constants = {{"a", a}};
    return s;
}

std::string_view to_string(RandomMode m) {
    switch (m) {
        case RandomMode::Standard: return "standard";
        case RandomMode::DualDefect: return "dual-defect";
        case RandomMode::Mutated: return "mutated";
    }
    return "?";
}

Scenario random_scenario(std::uint64_t seed, int dims, int points, RandomMode mode) {
    dims = std::max(dims, 1);
    points = std::max(points, 1);
    if (mode == RandomMode::DualDefect && dims < 2) mode = RandomMode::Standard;
    Draw draw(seed);

    int n1 = 0, n2 = 0, d1 = 0, d2 = 0;
    if (mode == RandomMode::DualDefect) {
        n2 = draw.between(2, dims);
        d2 = draw.between(2, n2);
        d1 = draw.between(1, d2 - 1);
        n1 = draw.between(d1, dims);
    } else {
        n1 = draw.between(1, dims);
        n2 = draw.between(1, dims);
        d1 = d2 = draw.between(1, std::min(n1, n2));
    }

    auto frame = [&](int n, int d, Mat& c, Mat& k) {
        Mat q = draw.orthogonal(n);
        c = q.leftCols(d) * draw.invertible(d);
        k = q.rightCols(n - d) * draw.invertible(n - d);
    };
    Mat c1, k1, c2, k2;
    frame(n1, d1, c1, k1);
    frame(n2, d2, c2, k2);
    FiberSpace s1(c1, k1), s2(c2, k2);

    const int p1 = draw.between(1, points);
    const int p2 = draw.between(1, points);
    const int ny = draw.between(1, std::min(p1, p2));
    std::vector<double> x1, x2;
    for (int i = 0; i < p1; ++i) x1.push_back(i);
    for (int i = 0; i < p2; ++i) x2.push_back(i);
    std::vector<std::string> l1, l2;
    for (double v : x1) l1.push_back(label_of(v));
    for (double v : x2) l2.push_back(label_of(v));
    std::vector<int> pick(static_cast<std::size_t>(p1));
    for (int i = 0; i < p1; ++i) pick[static_cast<std::size_t>(i)] = i;
    draw.shuffle(pick);
    pick.resize(static_cast<std::size_t>(ny));
    std::sort(pick.begin(), pick.end());
    std::vector<std::string> targets = l2;
    draw.shuffle(targets);

    Scenario s;
    s.options.seed = seed;
    auto& b1 = s.bundles[0];
    auto& b2 = s.bundles[1];
    b1.name = "X1";
    b2.name = "X2";
    b1.samples = x1;
    b2.samples = x2;
    b1.dim = n1;
    b2.dim = n2;
    b1.char_dim = d1;
    b2.char_dim = d2;
    b1.char_basis = rows_of(c1.transpose());
    b1.comp_basis = rows_of(k1.transpose());
    b2.char_basis = rows_of(c2.transpose());
    b2.comp_basis = rows_of(k2.transpose());

    const Mat t1_inv = s1.frame_inverse();
    std::map<std::string, Mat> g1, g2;
    for (int i = 0; i < ny; ++i) {
        const std::string y = l1[static_cast<std::size_t>(pick[static_cast<std::size_t>(i)])];
        const std::string fy = targets[static_cast<std::size_t>(i)];
        Mat a = mode == RandomMode::DualDefect ? Mat(draw.orthogonal(d2).leftCols(d1) * draw.invertible(d1))
                                               : draw.invertible(d1);
        Mat lift = c2 * a;
        if (mode == RandomMode::Mutated && i == 0) {
            a.col(0).setZero();
            lift = c2 * a;
            if (n2 > d2) lift += k2 * draw.gaussian(n2 - d2, d1);
        }
        Mat f(n2, n1);
        f << lift, k2 * draw.gaussian(n2 - d2, n1 - d1);
        f = f * t1_inv;
        s.gluing.domain.push_back(y);
        s.gluing.base_map[y] = fy;
        s.gluing.fiber_map[y] = entries_of(f);
        if (mode != RandomMode::Mutated) {
            auto [m1, m2] = construct_compatible_metrics(s1, s2, f);
            g1[y] = m1.gram();
            g2[fy] = m2.gram();
        }
    }
    std::sort(s.gluing.domain.begin(), s.gluing.domain.end(), [&](const std::string& a, const std::string& b) {
        return std::find(l1.begin(), l1.end(), a) < std::find(l1.begin(), l1.end(), b);
    });

    auto fill = [&](const FiberSpace& space, const std::vector<std::string>& labels, std::map<std::string, Mat>& g) {
        const Mat l = char_rows(space);
        for (const auto& label : labels)
            if (!g.count(label)) g[label] = symmetric(l.transpose() * draw.spd(space.char_dim()) * l);
    };
    fill(s1, l1, g1);
    fill(s2, l2, g2);
    for (const auto& [label, m] : g1) b1.gram_per_point[label] = rows_of(m);
    for (const auto& [label, m] : g2) b2.gram_per_point[label] = rows_of(m);
    return s;
}

}  // namespace pseudoglue
