#include "nwe/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "nwe/closed_form.hpp"
#include "nwe/ensembles.hpp"
#include "nwe/minerr.hpp"
#include "nwe/oblique.hpp"
#include "nwe/unambig.hpp"

namespace nwe {

namespace {

struct Outcome {
    bool passed = true;
    std::ostringstream detail;

    // Records the first failure message only.
    void fail(const std::string& why) {
        if (passed) {
            detail.str("");
            detail << why;
        }
        passed = false;
    }
};

std::string sci(double x) {
    std::ostringstream out;
    out << std::scientific << std::setprecision(2) << x;
    return out.str();
}

std::string at(double s) {
    std::ostringstream out;
    out << " at s=" << s;
    return out.str();
}

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

ComplexMatrix family_gram(double s) {
    return gram_matrix(make_product_family(s).states());
}

ComplexMatrix symmetric_gram(double s, Index count) {
    ComplexMatrix g = ComplexMatrix::Constant(count, count, Complex(s));
    g.diagonal().setOnes();
    return g;
}

void spectrum(const std::vector<double>& grid, bool fault, Outcome& out) {
    double worst = 0.0;
    double worstTrace = 0.0;
    for (double s : grid) {
        ComplexMatrix g = family_gram(s);
        if (fault) {
            g(0, 1) = -g(0, 1);
            g(1, 0) = std::conj(g(0, 1));
        }
        const Eigen::VectorXd numeric = hermitian_eig(g).eigenvalues;
        const Eigen::VectorXd expected = closed_form::gram_spectrum(s);
        const double err = (numeric - expected).cwiseAbs().maxCoeff();
        const double traceErr = std::abs(g.trace().real() - 6.0);
        worst = std::max(worst, err);
        worstTrace = std::max(worstTrace, traceErr);
        if (err > 1e-10) {
            out.fail("eigenvalues off by " + sci(err) + at(s));
        }
        if (traceErr > 1e-10) {
            out.fail("trace off by " + sci(traceErr) + at(s));
        }
    }
    if (out.passed) {
        out.detail << "max eigenvalue error " << sci(worst) << ", trace error " << sci(worstTrace);
    }
}

void gram_sqrt(const std::vector<double>& grid, Outcome& out) {
    double worst = 0.0;
    double worstSpread = 0.0;
    for (double s : grid) {
        const ComplexMatrix root = sqrtm_psd(family_gram(s));
        const double err = max_abs(root - closed_form::gram_sqrt(s).cast<Complex>());
        const Eigen::VectorXd diag = root.diagonal().real();
        const double spread = diag.maxCoeff() - diag.minCoeff();
        worst = std::max(worst, err);
        worstSpread = std::max(worstSpread, spread);
        if (err > 1e-9) {
            out.fail("sqrt(Gamma) entry off by " + sci(err) + at(s));
        }
        if (spread > 1e-12) {
            out.fail("diagonal spread " + sci(spread) + at(s));
        }
    }
    if (out.passed) {
        out.detail << "max entry error " << sci(worst) << ", diagonal spread " << sci(worstSpread);
    }
}

void ud_optimum(const std::vector<double>& grid, Outcome& out) {
    double worst = 0.0;
    double worstGap = 0.0;
    for (double s : grid) {
        const Ensemble family = make_product_family(s);
        const ComplexMatrix g = gram_matrix(family.states());
        const double expected = closed_form::ud_optimum_product(s);
        const UdSolution sol = solve_ud_primal(g, family.priors());
        const double err = std::abs(sol.value - expected);
        worst = std::max(worst, err);
        worstGap = std::max(worstGap, sol.gap);
        if (err > 1e-6 || sol.gap > 1e-6 || sol.gap < -1e-8) {
            out.fail("product family value " + sci(sol.value) + " gap " + sci(sol.gap) + at(s));
        }
        const auto cert = check_dual_certificate(g, family.priors(), sol.dualZ, sol.dualz, sol.value);
        if (!cert.feasible) {
            out.fail("dual certificate rejected" + at(s) + ": " + cert.violations.front());
        }
        const double eq = std::abs(equiprobable_optimum(g) - expected);
        if (eq > 1e-10) {
            out.fail("lambda_min off by " + sci(eq) + at(s));
        }
    }
    std::vector<double> symmetric = grid;
    symmetric.push_back(-0.4);
    symmetric.push_back(-0.2);
    const std::vector<double> priors(3, 1.0 / 3.0);
    for (double s : symmetric) {
        const UdSolution sol = solve_ud_primal(symmetric_gram(s, 3), priors);
        const double expected = closed_form::ud_optimum_symmetric(s, 3);
        const double err = std::abs(sol.value - expected);
        worst = std::max(worst, err);
        if (err > 1e-6 || sol.gap > 1e-6) {
            out.fail("symmetric family value " + sci(sol.value) + " expected " + sci(expected) + at(s));
        }
    }
    if (out.passed) {
        out.detail << "max value error " << sci(worst) << ", max gap " << sci(worstGap);
    }
}

void locc_attainment(const std::vector<double>& grid, std::uint64_t seed, Outcome& out) {
    constexpr std::size_t kTrials = 100000;
    double worst = 0.0;
    double worstSigmas = 0.0;
    std::size_t wrong = 0;
    for (double s : grid) {
        const Ensemble family = make_product_family(s);
        const UdSolution sol = solve_ud_primal(gram_matrix(family.states()), family.priors());
        const ProtocolResult exact = sequential_protocol_exact(s);
        const double err = std::abs(exact.exactSuccess - sol.value);
        worst = std::max(worst, err);
        if (err > 1e-6) {
            out.fail("protocol " + sci(exact.exactSuccess) + " vs optimum " + sci(sol.value) + at(s));
        }
        const ProtocolResult mc = monte_carlo_protocol(s, kTrials, seed);
        const double p = exact.exactSuccess;
        const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(kTrials));
        const double sigmas = std::abs(*mc.empiricalSuccess - p) / sigma;
        worstSigmas = std::max(worstSigmas, sigmas);
        wrong += mc.wrongConclusive;
        if (sigmas > 4.0) {
            out.fail("Monte Carlo " + std::to_string(sigmas) + " sigma from exact" + at(s));
        }
        if (mc.wrongConclusive != 0) {
            out.fail(std::to_string(mc.wrongConclusive) + " wrong conclusive outcomes" + at(s));
        }
    }
    if (out.passed) {
        out.detail << "max |protocol - SDP| " << sci(worst) << ", worst Monte Carlo deviation "
                   << std::fixed << std::setprecision(2) << worstSigmas << " sigma, wrong conclusive "
                   << wrong;
    }
}

void distilled_basis(const std::vector<double>& grid, Outcome& out) {
    double worstOrtho = 0.0;
    double worstWitness = 0.0;
    double worstSchmidt = 0.0;
    std::size_t minRank = 9;
    for (double s : grid) {
        const SrmResult srm = build_srm(make_product_family(s));
        const auto& mu = srm.basis.vectors;
        const ComplexMatrix cols = as_columns(mu);
        const double ortho = max_abs(cols.adjoint() * cols - ComplexMatrix::Identity(cols.cols(), cols.cols()));
        worstOrtho = std::max(worstOrtho, ortho);
        if (ortho > 1e-10) {
            out.fail("orthonormality defect " + sci(ortho) + at(s));
        }
        for (std::size_t i = 0; i < mu.size(); ++i) {
            for (std::size_t j = 0; j < mu.size(); ++j) {
                if (i == j) {
                    continue;
                }
                const double r = witness_residual(srm.basis, i, j, local_unitary_witness(srm.basis, i, j));
                worstWitness = std::max(worstWitness, r);
                if (r > 1e-9) {
                    out.fail("witness " + std::to_string(i) + "->" + std::to_string(j) + " residual " +
                             sci(r) + at(s));
                }
            }
        }
        const auto reference = schmidt_decompose(mu.front().amplitudes(), 3, 3);
        for (const auto& m : mu) {
            const auto sd = schmidt_decompose(m.amplitudes(), 3, 3);
            for (std::size_t k = 0; k < sd.coefficients.size(); ++k) {
                worstSchmidt = std::max(worstSchmidt, std::abs(sd.coefficients[k] - reference.coefficients[k]));
            }
            minRank = std::min(minRank, sd.rank);
        }
        if (worstSchmidt > 1e-9) {
            out.fail("Schmidt coefficients differ by " + sci(worstSchmidt) + at(s));
        }
        if (minRank < 2) {
            out.fail("product vector in the distilled basis" + at(s));
        }
    }
    if (out.passed) {
        out.detail << "orthonormality " << sci(worstOrtho) << ", 30 witnesses max residual "
                   << sci(worstWitness) << ", Schmidt spread " << sci(worstSchmidt) << ", min rank "
                   << minRank;
    }
}

void chen(const std::vector<double>& grid, std::uint64_t seed, Outcome& out) {
    double smallest = std::numeric_limits<double>::infinity();
    std::size_t products = 0;
    std::size_t overlapping = 0;
    std::size_t rayProducts = 0;
    for (double s : grid) {
        const ChenReport report = chen_analysis(s);
        for (const Complex& c : report.denominatorComponents) {
            smallest = std::min(smallest, std::abs(c));
            if (std::abs(c) <= 1e-6) {
                out.fail("vanishing mu1 component" + at(s));
            }
        }
        for (const Complex& k : report.kRatios) {
            if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) {
                out.fail("non-finite k ratio" + at(s));
            }
        }
        rayProducts += report.rayIsProduct ? 1 : 0;
        const auto probe = probe_product_vectors(report, 24, seed);
        products += probe.productsFound;
        overlapping += probe.withMu1Overlap;
        if (probe.parallelToRay != probe.withMu1Overlap) {
            out.fail("product vector with mu1 overlap not parallel to the ray (residual " +
                     sci(probe.worstParallelResidual) + ")" + at(s));
        }
        if (report.loccDistinguishable) {
            out.fail("verdict is not not_locc_distinguishable" + at(s));
        }
    }
    if (out.passed) {
        out.detail << "min |mu11,mu12,mu14| " << sci(smallest) << ", ray product at " << rayProducts
                   << " points, probe found " << products << " product vectors (" << overlapping
                   << " with mu1 overlap), verdict not_locc_distinguishable";
    }
}

void srm_optimality(const std::vector<double>& grid, std::uint64_t seed, Outcome& out) {
    for (double s : grid) {
        const auto check = srm_optimality_check(family_gram(s));
        if (!check.optimal) {
            out.fail("sqrt(Gamma) diagonal spread " + sci(check.diagonalSpread) + at(s));
        }
    }
    const Ensemble family = make_product_family(0.5);
    const double srm = build_srm(family).success;
    double bestRandom = 0.0;
    for (std::uint64_t k = 0; k < 200; ++k) {
        const Povm random = random_orthonormal_measurement(family.states(), seed * 1000003u + k);
        bestRandom = std::max(bestRandom, success_probability(family, random));
    }
    if (bestRandom > srm + 1e-12) {
        out.fail("random measurement beats the SRM: " + std::to_string(bestRandom) + " > " + std::to_string(srm));
    }
    if (out.passed) {
        out.detail << std::fixed << std::setprecision(6) << "SRM success " << srm
                   << " >= best of 200 random measurements " << bestRandom;
    }
}

void oblique_round_trips(Outcome& out) {
    double worstCoords = 0.0;
    double worstChange = 0.0;
    double worstClosed = 0.0;
    for (double s : {0.25, 0.5, 0.75}) {
        const Ensemble family = make_product_family(s);
        const auto& factors = family.product()->factors;
        const ObliqueBasis b = make_pair_basis(factors);
        const ObliqueBasis bp = make_pair_basis(reciprocal_states(factors));
        const SrmResult srm = build_srm(family);

        std::vector<PureState> probes = family.states();
        probes.insert(probes.end(), srm.basis.vectors.begin(), srm.basis.vectors.end());
        for (const auto& v : probes) {
            const ObliqueCoords c = coords_in_basis(v, b);
            worstCoords = std::max(worstCoords, (c.reconstruct() - v.amplitudes()).norm());
            const ObliqueCoords back = convert(convert(c, bp), b);
            worstChange = std::max(worstChange, (back.coeffs - c.coeffs).cwiseAbs().maxCoeff());
        }
        const ComplexMatrix loop = change_of_basis(bp, b) * change_of_basis(b, bp);
        worstChange = std::max(worstChange, max_abs(loop - ComplexMatrix::Identity(9, 9)));

        const ClosedFormReport closed = srm_matches_closed_form(s);
        worstClosed = std::max({worstClosed, closed.rhoResidual, closed.rhoInvSqrtResidual,
                                closed.rhoInvSqrtObliqueResidual});
    }
    if (worstCoords > 1e-10) {
        out.fail("reconstruction error " + sci(worstCoords));
    }
    if (worstChange > 1e-10) {
        out.fail("change-of-basis round trip error " + sci(worstChange));
    }
    if (worstClosed > 1e-9) {
        out.fail("rho_B / rho_B^{-1/2} off the closed form by " + sci(worstClosed));
    }
    if (out.passed) {
        out.detail << "reconstruction " << sci(worstCoords) << ", round trip " << sci(worstChange)
                   << ", closed forms " << sci(worstClosed);
    }
}

void trine(Outcome& out) {
    const auto alpha = trine_states();
    const Ensemble doubled = make_double_trine();
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            if (i == j) {
                continue;
            }
            worst = std::max(worst, std::abs(inner(alpha[i], alpha[j]) - Complex(-0.5)));
            worst = std::max(worst, std::abs(inner(doubled.state(i), doubled.state(j)) - Complex(0.25)));
        }
    }
    if (worst > 1e-12) {
        out.fail("trine overlaps off by " + sci(worst));
    } else {
        out.detail << "max overlap error " << sci(worst);
    }
}

} // namespace

std::vector<double> acceptance_grid(AcceptanceLevel level) {
    if (level == AcceptanceLevel::Fast) {
        return {0.25, 0.5, 0.75};
    }
    std::vector<double> grid;
    for (int k = 1; k <= 9; ++k) {
        grid.push_back(k / 10.0);
    }
    return grid;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
    const std::vector<double> grid = acceptance_grid(options.level);
    struct Check {
        int id;
        const char* name;
        double limitSeconds;
        std::function<void(Outcome&)> body;
    };
    const std::vector<Check> checks{
        {1, "spectrum", 1.0, [&](Outcome& o) { spectrum(grid, options.injectSpectrumFault, o); }},
        {2, "gram-sqrt", 1.0, [&](Outcome& o) { gram_sqrt(grid, o); }},
        {3, "ud-optimum", 5.0, [&](Outcome& o) { ud_optimum(grid, o); }},
        {4, "locc-attainment", 10.0, [&](Outcome& o) { locc_attainment(grid, options.seed, o); }},
        {5, "distilled-basis", 0.0, [&](Outcome& o) { distilled_basis(grid, o); }},
        {6, "chen-analysis", 0.0, [&](Outcome& o) { chen(grid, options.seed, o); }},
        {7, "srm-optimality", 0.0, [&](Outcome& o) { srm_optimality(grid, options.seed, o); }},
        {8, "oblique-round-trips", 0.0, [&](Outcome& o) { oblique_round_trips(o); }},
        {9, "trine", 0.0, [&](Outcome& o) { trine(o); }},
    };

    std::vector<CriterionResult> results;
    for (const auto& check : checks) {
        Outcome outcome;
        const auto start = std::chrono::steady_clock::now();
        try {
            check.body(outcome);
        } catch (const std::exception& e) {
            outcome.fail(std::string("exception: ") + e.what());
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (check.limitSeconds > 0.0 && seconds > check.limitSeconds) {
            outcome.fail("took " + std::to_string(seconds) + " s, limit " + std::to_string(check.limitSeconds) +
                         " s");
        }
        results.push_back({check.id, check.name, outcome.passed, outcome.detail.str(), seconds});
    }
    return results;
}

void print_acceptance(std::ostream& out, const std::vector<CriterionResult>& results) {
    for (const auto& r : results) {
        out << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.detail << " ("
            << std::fixed << std::setprecision(2) << r.seconds << " s)\n";
    }
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
}

} // namespace nwe
