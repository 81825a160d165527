#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nwe {

enum class AcceptanceLevel { Fast, Full };

struct AcceptanceOptions {
    AcceptanceLevel level = AcceptanceLevel::Full;
    /// Flip the sign of Gamma(0, 1) before the spectrum check.
    bool injectSpectrumFault = false;
    std::uint64_t seed = 7;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// {0.25, 0.5, 0.75} for Fast, 0.1 .. 0.9 step 0.1 for Full.
std::vector<double> acceptance_grid(AcceptanceLevel level);

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// One line per criterion: "PASS [3] ud-optimum: ... (0.12 s)".
void print_acceptance(std::ostream& out, const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

} // namespace nwe
