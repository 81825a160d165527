#include "nwe/analysis.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nwe/ensembles.hpp"
#include "nwe/minerr.hpp"
#include "nwe/parallel.hpp"
#include "nwe/unambig.hpp"

namespace nwe {

AnalysisReport analyze(double s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw ValidationError("analyze: s = " + std::to_string(s) + " outside (0, 1)");
    }
    const auto start = std::chrono::steady_clock::now();
    AnalysisReport report;
    report.s = s;

    const Ensemble family = make_product_family(s);
    const ComplexMatrix gram = gram_matrix(family.states());
    const auto eig = hermitian_eig(gram);
    report.gramEigenvalues.assign(eig.eigenvalues.data(), eig.eigenvalues.data() + eig.eigenvalues.size());
    report.lambdaMin = eig.min();

    const SrmResult srm = build_srm(family);
    report.srmSuccess = srm.success;
    const auto optimality = srm_optimality_check(gram);
    report.srmOptimal = optimality.optimal;
    report.srmDiagonalSpread = optimality.diagonalSpread;
    report.schmidtRank = srm.basis.schmidtRanks.front();

    const UdSolution ud = solve_ud_primal(gram, family.priors());
    report.udValue = ud.value;
    report.udGap = ud.gap;
    report.udEqualsLambdaMin = std::abs(ud.value - equiprobable_optimum(gram)) <= 1e-6;
    report.loccUdSuccess = sequential_protocol_exact(s).exactSuccess;
    report.loccUdAttains = std::abs(report.loccUdSuccess - ud.value) <= 1e-6;

    const ChenReport chen = chen_analysis(s);
    report.chen.mu11 = chen.denominatorComponents[0];
    report.chen.mu12 = chen.denominatorComponents[1];
    report.chen.mu14 = chen.denominatorComponents[2];
    report.chen.k = chen.kRatios;
    report.chen.rayIsProduct = chen.rayIsProduct;
    report.chen.rayMinorResidual = chen.rayMinorResidual;
    report.chen.raySchmidtGap = chen.raySchmidtGap;
    report.chen.mu1SchmidtRank = chen.mu1SchmidtRank;
    report.chen.verdict = chen.loccDistinguishable ? kVerdictUndetermined : kVerdictIndistinguishable;

    report.timingMs =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::vector<double> sweep_grid(double sMin, double sMax, std::size_t steps) {
    if (!(sMin > 0.0 && sMin < sMax && sMax < 1.0)) {
        throw ValidationError("sweep: need 0 < s-min < s-max < 1");
    }
    if (steps < 2) {
        throw ValidationError("sweep: need at least 2 steps");
    }
    std::vector<double> grid(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        grid[k] = sMin + (sMax - sMin) * static_cast<double>(k) / static_cast<double>(steps - 1);
    }
    grid.back() = sMax;
    return grid;
}

std::vector<AnalysisReport> sweep(double sMin, double sMax, std::size_t steps) {
    const std::vector<double> grid = sweep_grid(sMin, sMax, steps);
    std::vector<AnalysisReport> reports(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) { reports[k] = analyze(grid[k]); });
    return reports;
}

double round_significant(double x) {
    if (!std::isfinite(x) || x == 0.0) {
        return x;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

namespace {

nlohmann::ordered_json complex_json(Complex z) {
    return nlohmann::ordered_json::array({round_significant(z.real()), round_significant(z.imag())});
}

std::string csv_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

} // namespace

nlohmann::ordered_json to_json(const AnalysisReport& r) {
    using json = nlohmann::ordered_json;
    json eigenvalues = json::array();
    for (double v : r.gramEigenvalues) {
        eigenvalues.push_back(round_significant(v));
    }
    json chen;
    chen["mu11"] = complex_json(r.chen.mu11);
    chen["mu12"] = complex_json(r.chen.mu12);
    chen["mu14"] = complex_json(r.chen.mu14);
    chen["k1"] = complex_json(r.chen.k[0]);
    chen["k2"] = complex_json(r.chen.k[1]);
    chen["k3"] = complex_json(r.chen.k[2]);
    chen["ray_is_product"] = r.chen.rayIsProduct;
    chen["ray_minor_residual"] = round_significant(r.chen.rayMinorResidual);
    chen["ray_schmidt_gap"] = round_significant(r.chen.raySchmidtGap);
    chen["mu1_schmidt_rank"] = r.chen.mu1SchmidtRank;
    chen["verdict"] = r.chen.verdict;

    json out;
    out["s"] = round_significant(r.s);
    out["gram_eigenvalues"] = std::move(eigenvalues);
    out["lambda_min"] = round_significant(r.lambdaMin);
    out["srm_success"] = round_significant(r.srmSuccess);
    out["srm_optimal"] = r.srmOptimal;
    out["srm_diag_spread"] = round_significant(r.srmDiagonalSpread);
    out["ud_value"] = round_significant(r.udValue);
    out["ud_gap"] = round_significant(r.udGap);
    out["ud_equals_lambda_min"] = r.udEqualsLambdaMin;
    out["locc_ud_success"] = round_significant(r.loccUdSuccess);
    out["locc_ud_attains"] = r.loccUdAttains;
    out["schmidt_rank"] = r.schmidtRank;
    out["chen"] = std::move(chen);
    return out;
}

void write_text(std::ostream& out, const AnalysisReport& r) {
    const auto flags = out.flags();
    const auto precision = out.precision();
    out << std::fixed << std::setprecision(6);
    out << "s                    " << r.s << '\n';
    out << "gram eigenvalues    ";
    for (double v : r.gramEigenvalues) {
        out << ' ' << v;
    }
    out << '\n';
    out << "lambda_min           " << r.lambdaMin << '\n';
    out << "srm success          " << r.srmSuccess << '\n';
    out << "srm optimal          " << (r.srmOptimal ? "yes" : "no") << " (diagonal spread "
        << std::scientific << std::setprecision(2) << r.srmDiagonalSpread << ")\n"
        << std::fixed << std::setprecision(6);
    out << "ud optimum           " << r.udValue << '\n';
    out << "ud = lambda_min      " << (r.udEqualsLambdaMin ? "yes" : "no") << '\n';
    out << "locc ud success      " << r.loccUdSuccess << '\n';
    out << "locc ud attains      " << (r.loccUdAttains ? "yes" : "no") << '\n';
    out << "mu11 mu12 mu14       " << r.chen.mu11.real() << ' ' << r.chen.mu12.real() << ' '
        << r.chen.mu14.real() << '\n';
    out << "ray is product       " << (r.chen.rayIsProduct ? "yes" : "no") << '\n';
    out << "schmidt rank         " << r.schmidtRank << '\n';
    out << "verdict              " << r.chen.verdict << '\n';
    out << "time                 " << std::setprecision(1) << r.timingMs << " ms\n";
    out.flags(flags);
    out.precision(precision);
}

void write_sweep_csv(std::ostream& out, const std::vector<AnalysisReport>& reports) {
    out << kSweepHeader << "\r\n";
    for (const auto& r : reports) {
        out << csv_number(r.s) << ',' << csv_number(r.lambdaMin) << ',' << csv_number(r.udValue) << ','
            << csv_number(r.srmSuccess) << ',' << csv_number(r.srmDiagonalSpread) << ','
            << csv_number(r.chen.mu11.real()) << ',' << csv_number(r.chen.mu12.real()) << ','
            << csv_number(r.chen.mu14.real()) << ',' << r.schmidtRank << ',' << r.chen.verdict << "\r\n";
    }
}

} // namespace nwe
