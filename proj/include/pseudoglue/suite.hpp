#pragma once

#include <string>
#include <vector>

#include "pseudoglue/report.hpp"
#include "pseudoglue/scenario.hpp"

namespace pseudoglue {

struct Report {
    std::string suite;
    std::string digest;  // of the canonical scenario
    VerificationReport checks;
    double seconds = 0.0;  // wall time, not part of the deterministic content

    bool passed() const { return checks.passed(); }
};

// Selections: all, metrics, clifford, exterior, actions, isometry.
const std::vector<std::string>& suite_names();
// Names of the checks a selection reports, in report order. Throws InvalidScenario for unknown selections.
std::vector<std::string> suite_checks(const std::string& suite);

// Runs every selected check in a fixed order. A check whose hypotheses fail is marked skipped;
// hypotheses outside the selection are evaluated but not reported. Throws InvalidScenario.
Report run_suite(const Scenario& s, const std::string& suite = "all");
Report run_suite(const Scenario& s, const Instance& inst, const std::string& suite = "all");

std::string report_json(const Report& r, bool with_timing = true);
std::string report_text(const Report& r);

}  // namespace pseudoglue
