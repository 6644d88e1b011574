// pseudoglue: validate and verify gluing scenarios from the command line.
//
// Exit codes: 0 every check passed, 1 a verification failed, 2 invalid input.

#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pseudoglue/suite.hpp"

namespace {

using namespace pseudoglue;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInvalid = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidScenario, "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<double> parse_csv(const std::string& csv) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        std::size_t end = csv.find(',', start);
        if (end == std::string::npos) end = csv.size();
        std::string item = csv.substr(start, end - start);
        std::size_t b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw Error(ErrorCode::InvalidScenario, "empty entry in --samples");
        item = item.substr(b, e - b + 1);
        double v = 0.0;
        auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc() || res.ptr != item.data() + item.size())
            throw Error(ErrorCode::InvalidScenario, "bad sample '" + item + "'");
        out.push_back(v);
        start = end + 1;
    }
    return out;
}

int emit(const Report& r, const std::string& format) {
    std::cout << (format == "json" ? report_json(r) : report_text(r));
    return r.passed() ? kPass : kFail;
}

// What a random scenario of each mode is expected to produce.
bool as_expected(const Report& r, RandomMode mode) {
    auto status = [&](const char* name) {
        const CheckResult* c = r.checks.find(name);
        return c ? c->status : Status::Skipped;
    };
    switch (mode) {
        case RandomMode::Standard: return r.passed();
        case RandomMode::DualDefect:
            for (const auto& c : r.checks.checks) {
                const bool expected_fail = c.name == "dual-compatibility" || c.name == "dual-map-invertibility";
                if (expected_fail != (c.status == Status::Fail)) return false;
            }
            return true;
        case RandomMode::Mutated:
            return status("metric-compatibility") == Status::Fail && status("compatibility-criterion") == Status::Fail;
    }
    return false;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verify gluing constructions on finite-dimensional pseudo-bundles"};
    app.require_subcommand(1);

    std::string file, suite = "all", format = "json";
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;

    auto* validate = app.add_subcommand("validate", "Check that a scenario file is well formed");
    validate->add_option("file", file, "Scenario JSON")->required();

    auto* verify = app.add_subcommand("verify", "Run a verification suite on a scenario file");
    verify->add_option("file", file, "Scenario JSON")->required();
    verify->add_option("--suite", suite)->check(CLI::IsMember(suite_names()));
    verify->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
    verify->add_option("--seed", seed);
    verify->add_option("--tol", tol)->check(CLI::PositiveNumber);

    std::string which;
    double a = 2.0;
    std::string f1 = "x^2+4", f2 = "1", samples = "-1,0,1";
    bool print_scenario = false;
    auto* example = app.add_subcommand("example", "Run one of the built-in scenarios");
    example->add_option("name", which)->required()->check(CLI::IsMember({"wedge-lines", "mixed-fibres"}));
    example->add_option("--a", a, "Gluing constant");
    example->add_option("--f1", f1, "Metric coefficient on the first bundle");
    example->add_option("--f2", f2, "Metric coefficient on the second bundle");
    example->add_option("--samples", samples, "Comma-separated base samples");
    example->add_option("--suite", suite)->check(CLI::IsMember(suite_names()));
    example->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
    example->add_option("--tol", tol)->check(CLI::PositiveNumber);
    example->add_flag("--print-scenario", print_scenario, "Print the canonical scenario instead of verifying");

    int seeds = 100, dims = 3, points = 3;
    std::string mode = "standard";
    auto* fuzz = app.add_subcommand("fuzz", "Run the full suite on seeded random scenarios");
    fuzz->add_option("--seeds", seeds)->check(CLI::PositiveNumber);
    fuzz->add_option("--dims", dims)->check(CLI::Range(1, 4));
    fuzz->add_option("--points", points)->check(CLI::Range(1, 6));
    fuzz->add_option("--mode", mode)->check(CLI::IsMember({"standard", "dual-defect", "mutated"}));
    fuzz->add_option("--suite", suite)->check(CLI::IsMember(suite_names()));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kPass : kInvalid;
    }

    try {
        if (*validate) {
            Scenario s = parse_scenario(read_file(file));
            instantiate(s);
            std::cout << "valid scenario " << digest_hex(s) << "\n";
            return kPass;
        }
        if (*verify) {
            Scenario s = parse_scenario(read_file(file));
            if (seed) s.options.seed = *seed;
            if (tol) s.options.tol = *tol;
            const bool chosen = verify->count("--suite") > 0;
            return emit(run_suite(s, chosen ? suite : s.options.suite), format);
        }
        if (*example) {
            std::vector<double> xs = parse_csv(samples);
            Scenario s = which == "wedge-lines" ? builtin_wedge_lines(a, f1, f2, xs) : builtin_mixed_fibres(a, f1, f2, xs);
            if (tol) s.options.tol = *tol;
            if (print_scenario) {
                std::cout << serialize(s);
                return kPass;
            }
            return emit(run_suite(s, suite), format);
        }
        if (*fuzz) {
            RandomMode m = mode == "standard" ? RandomMode::Standard
                           : mode == "mutated" ? RandomMode::Mutated : RandomMode::DualDefect;
            // a dual defect needs two distinct dimensions
            const RandomMode expect = m == RandomMode::DualDefect && dims < 2 ? RandomMode::Standard : m;
            int good = 0;
            for (int i = 1; i <= seeds; ++i) {
                Scenario s = random_scenario(static_cast<std::uint64_t>(i), dims, points, m);
                Report r = run_suite(s, suite);
                const bool ok = as_expected(r, expect);
                good += ok;
                std::cout << "seed " << i << " " << r.digest << " " << (ok ? "as expected" : "UNEXPECTED") << "\n";
                if (!ok) std::cout << report_text(r);
            }
            std::cout << good << "/" << seeds << " scenarios behaved as expected (" << mode << ")\n";
            return good == seeds ? kPass : kFail;
        }
    } catch (const Error& e) {
        std::cerr << "pseudoglue: " << e.what() << "\n";
        return kInvalid;
    }
    return kInvalid;
}
