#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace extham {

// One end-to-end check of the toolkit, judged against a fixed tolerance.
struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

// Runs the full acceptance suite, printing one [PASS]/[FAIL] line per
// criterion to `log`. Deterministic; every run takes a few seconds.
std::vector<CriterionResult> run_acceptance(std::ostream& log);

bool all_pass(const std::vector<CriterionResult>& results);

}  // namespace extham
