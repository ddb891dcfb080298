#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace coopreg::verify {

struct CriterionResult {
    int id = 0;
    std::string name;
    std::string expected;
    std::string observed;
    bool pass = false;
    double seconds = 0.0;
};

// Runs the whole regression battery (gain reproduction, convergence runs,
// property suites, kernel oracles, determinism). Deterministic.
std::vector<CriterionResult> run_all();

// Prints one line per criterion plus a summary; returns 0 iff all passed.
int print_report(std::ostream& os, const std::vector<CriterionResult>& results);

} // namespace coopreg::verify
