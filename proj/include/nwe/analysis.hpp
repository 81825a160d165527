#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "nwe/numerics.hpp"

namespace nwe {

inline constexpr const char* kVerdictIndistinguishable = "not_locc_distinguishable";
inline constexpr const char* kVerdictUndetermined = "undetermined";

struct ChenSummary {
    Complex mu11;
    Complex mu12;
    Complex mu14;
    std::array<Complex, 3> k{};
    bool rayIsProduct = false;
    double rayMinorResidual = 0.0;
    double raySchmidtGap = 0.0;
    std::size_t mu1SchmidtRank = 0;
    std::string verdict;
};

struct AnalysisReport {
    double s = 0.0;
    std::vector<double> gramEigenvalues;
    double lambdaMin = 0.0;
    double srmSuccess = 0.0;
    bool srmOptimal = false;
    double srmDiagonalSpread = 0.0;
    double udValue = 0.0;
    double udGap = 0.0;
    bool udEqualsLambdaMin = false;
    double loccUdSuccess = 0.0;
    bool loccUdAttains = false;
    ChenSummary chen;
    std::size_t schmidtRank = 0;
    double timingMs = 0.0;
};

/// Full pipeline at one overlap s in (0, 1).
AnalysisReport analyze(double s);

/// Evenly spaced grid from sMin to sMax inclusive; 0 < sMin < sMax < 1, steps >= 2.
std::vector<double> sweep_grid(double sMin, double sMax, std::size_t steps);
/// analyze() over the grid, in parallel, returned in grid order.
std::vector<AnalysisReport> sweep(double sMin, double sMax, std::size_t steps);

/// x rounded to 12 significant digits.
double round_significant(double x);

/// Deterministic JSON: fixed field order, 12 significant digits, no timing.
nlohmann::ordered_json to_json(const AnalysisReport& report);
void write_text(std::ostream& out, const AnalysisReport& report);

inline constexpr const char* kSweepHeader =
    "s,lambda_min,ud_value,srm_success,srm_diag_spread,mu11,mu12,mu14,schmidt_rank,chen_verdict";
void write_sweep_csv(std::ostream& out, const std::vector<AnalysisReport>& reports);

} // namespace nwe
