#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace illposed::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;   // failure descriptions, empty on pass
    double seconds = 0.0;
};

CriterionResult algebraic_identities();                  // 1
CriterionResult analytic_singular_system();              // 2
CriterionResult deterministic_rates(bool reduced = false);  // 3
CriterionResult landweber_structure();                   // 4
CriterionResult saturation();                            // 5
CriterionResult projection_bounds();                     // 6
CriterionResult nonlinear_methods();                     // 7
CriterionResult statistics_suite();                      // 8
CriterionResult bayes_suite();                           // 9
CriterionResult heuristic_rules();                       // 10
CriterionResult cli_determinism(const std::string& cli_path);  // 11

// Criteria 1, 2 and a reduced 3; prints one line per criterion.
// Returns 0 on success, 4 on any failure.
int run_selftest(std::ostream& out);

// All criteria; pass an empty cli_path to skip criterion 11.
std::vector<CriterionResult> run_all(const std::string& cli_path, std::ostream& out);

}  // namespace illposed::acceptance
