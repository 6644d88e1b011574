#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pseudoglue/linalg.hpp"

namespace pseudoglue {

enum class Status { Pass, Fail, Skipped };

std::string_view to_string(Status s);

struct Witness {
    std::string point;
    std::vector<double> vector;
    std::string detail;
};

struct CheckResult {
    std::string name;
    std::string anchor;  // short quoted phrase naming the statement being checked
    Status status = Status::Pass;
    double max_residual = 0.0;
    std::optional<Witness> witness;
    std::string note;  // why a check was skipped
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    bool passed() const;  // no check failed
    const CheckResult* find(const std::string& name) const;
    void add(CheckResult c) { checks.push_back(std::move(c)); }
    void merge(const VerificationReport& other);
};

// Accumulates residuals of one check and keeps a witness at the worst one.
// Passes iff every residual is finite and strictly below tol and no explicit failure was recorded.
class ResidualTracker {
public:
    explicit ResidualTracker(double tol = tol::absolute) : tol_(tol) {}

    void observe(double residual, const std::string& point, const Vec& vector = Vec(), const std::string& detail = "");
    void fail(const std::string& point, const std::string& detail, const Vec& vector = Vec());

    double worst() const noexcept { return worst_; }
    bool ok() const noexcept;

    CheckResult finish(std::string name, std::string anchor) const;

private:
    double tol_;
    double worst_ = 0.0;
    bool forced_ = false;
    std::optional<Witness> at_worst_;
    std::optional<Witness> forced_at_;
};

std::vector<double> to_std(const Vec& v);

}  // namespace pseudoglue
