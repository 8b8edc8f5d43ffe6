#ifndef HAMFLOW_VERIFY_HPP
#define HAMFLOW_VERIFY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hamflow/types.hpp"

namespace hamflow {

/// One acceptance criterion outcome. `value` is the measured quantity,
/// `threshold` the pinned bound it is compared against.
struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    Real value = 0.0;
    Real threshold = 0.0;
    std::string detail;
    Real seconds = 0.0;
};

/// Runs the nine acceptance criteria at their pinned tolerances, printing one
/// pass/fail line per criterion to `log`.
std::vector<CriterionResult> run_acceptance(std::ostream& log, std::uint64_t seed = 0);

bool all_pass(const std::vector<CriterionResult>& results);

std::string acceptance_report_json(const std::vector<CriterionResult>& results);

} // namespace hamflow

#endif
