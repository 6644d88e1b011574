#include "pseudoglue/report.hpp"

#include <cmath>
#include <limits>

namespace pseudoglue {

std::string_view to_string(Status s) {
    switch (s) {
        case Status::Pass: return "pass";
        case Status::Fail: return "fail";
        case Status::Skipped: return "skipped";
    }
    return "fail";
}

bool VerificationReport::passed() const {
    for (const auto& c : checks)
        if (c.status == Status::Fail) return false;
    return true;
}

const CheckResult* VerificationReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

void VerificationReport::merge(const VerificationReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void ResidualTracker::observe(double residual, const std::string& point, const Vec& vector,
                              const std::string& detail) {
    if (std::isnan(residual)) residual = std::numeric_limits<double>::infinity();
    if (!at_worst_ || residual > worst_) {
        worst_ = std::max(worst_, residual);
        at_worst_ = Witness{point, to_std(vector), detail};
    }
}

void ResidualTracker::fail(const std::string& point, const std::string& detail, const Vec& vector) {
    if (!forced_) forced_at_ = Witness{point, to_std(vector), detail};
    forced_ = true;
}

bool ResidualTracker::ok() const noexcept { return !forced_ && worst_ < tol_; }

CheckResult ResidualTracker::finish(std::string name, std::string anchor) const {
    CheckResult c;
    c.name = std::move(name);
    c.anchor = std::move(anchor);
    c.max_residual = worst_;
    c.status = ok() ? Status::Pass : Status::Fail;
    if (c.status == Status::Fail) c.witness = forced_ ? forced_at_ : at_worst_;
    return c;
}

}  // namespace pseudoglue
