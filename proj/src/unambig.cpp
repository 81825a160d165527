#include "nwe/unambig.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "nwe/parallel.hpp"

namespace nwe {

std::vector<double> ud_condition_check(const Povm& povm, std::span<const PureState> states) {
    if (!povm.inconclusive()) {
        throw ValidationError("ud_condition_check: measurement has no inconclusive element");
    }
    if (povm.size() != states.size()) {
        throw ValidationError("ud_condition_check: " + std::to_string(povm.size()) +
                              " conclusive outcomes for " + std::to_string(states.size()) + " states");
    }
    std::vector<double> efficiencies(states.size());
    for (std::size_t i = 0; i < povm.size(); ++i) {
        for (std::size_t j = 0; j < states.size(); ++j) {
            const double r = povm.response(i, states[j]);
            if (i == j) {
                efficiencies[i] = r;
            } else if (std::abs(r) > kUnambiguityTol) {
                throw AmbiguityError(i, j, r);
            }
        }
    }
    return efficiencies;
}

Povm build_reciprocal_povm(std::span<const PureState> states, double targetEfficiency) {
    if (!(targetEfficiency > 0.0 && targetEfficiency <= 1.0)) {
        throw ValidationError("build_reciprocal_povm: efficiency " + std::to_string(targetEfficiency) +
                              " outside (0, 1]");
    }
    const std::vector<PureState> dual = reciprocal_states(states);
    const Index dim = states.front().dim();
    std::vector<ComplexMatrix> elements;
    ComplexMatrix unitSum = ComplexMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < states.size(); ++i) {
        const double overlap = std::norm(inner(dual[i], states[i]));
        const ComplexMatrix e = projector(dual[i]) / overlap;
        unitSum += e;
        elements.push_back(targetEfficiency * e);
    }
    ComplexMatrix inconclusive = ComplexMatrix::Identity(dim, dim) - targetEfficiency * unitSum;
    inconclusive = (0.5 * (inconclusive + inconclusive.adjoint())).eval();
    if (min_eigenvalue(inconclusive) < -kInconclusivePsdTol) {
        const double maxFeasible = 1.0 / hermitian_eig(unitSum).max();
        std::ostringstream msg;
        msg << "build_reciprocal_povm: efficiency " << targetEfficiency
            << " leaves the inconclusive element non-PSD; largest feasible is " << maxFeasible;
        throw InfeasibleError(msg.str(), maxFeasible);
    }
    return Povm::complete(std::move(elements), std::move(inconclusive), kInconclusivePsdTol);
}

namespace {

void validate_ud_inputs(const ComplexMatrix& gram, std::span<const double> priors) {
    require_hermitian(gram, "solve_ud_primal");
    const Index n = gram.rows();
    if (static_cast<std::size_t>(n) != priors.size() || n == 0) {
        throw ValidationError("solve_ud_primal: Gram matrix and priors disagree in size");
    }
    if ((gram.diagonal().real().array() - 1.0).abs().maxCoeff() > 1e-10) {
        throw ValidationError("solve_ud_primal: Gram matrix must have a unit diagonal");
    }
    double total = 0.0;
    for (double eta : priors) {
        if (!(eta >= 0.0)) {
            throw ValidationError("solve_ud_primal: negative prior");
        }
        total += eta;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw ValidationError("solve_ud_primal: priors do not sum to one");
    }
}

struct BarrierPoint {
    Eigen::VectorXd p;
    ComplexMatrix slackInverse;
    double objective = 0.0;
};

// Barrier objective at p, or nullopt outside the open feasible cone.
std::optional<BarrierPoint> evaluate(const ComplexMatrix& gram, const Eigen::VectorXd& eta,
                                     const Eigen::VectorXd& p, double mu) {
    if ((p.array() <= 0.0).any()) {
        return std::nullopt;
    }
    ComplexMatrix slack = gram;
    slack.diagonal() -= p.cast<Complex>();
    Eigen::LLT<ComplexMatrix> llt(slack);
    if (llt.info() != Eigen::Success) {
        return std::nullopt;
    }
    const double logDet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().real().array().log().sum();
    if (!std::isfinite(logDet)) {
        return std::nullopt;
    }
    BarrierPoint point;
    point.p = p;
    point.slackInverse = llt.solve(ComplexMatrix::Identity(gram.rows(), gram.cols()));
    point.objective = eta.dot(p) + mu * (logDet + p.array().log().sum());
    return point;
}

} // namespace

UdSolution solve_ud_primal(const ComplexMatrix& gram, std::span<const double> priors, double gapTol) {
    validate_ud_inputs(gram, priors);
    const Index n = gram.rows();
    const Eigen::VectorXd eta = Eigen::Map<const Eigen::VectorXd>(priors.data(), n);

    const double lmin = min_eigenvalue(gram);
    if (lmin <= 1e-12) {
        throw ValidationError("solve_ud_primal: Gram matrix is singular (states linearly dependent); "
                              "unambiguous discrimination is impossible");
    }

    double mu = 0.1;
    auto current = evaluate(gram, eta, Eigen::VectorXd::Constant(n, lmin / 2.0), mu);
    if (!current) {
        throw NumericError("solve_ud_primal: could not find a strictly feasible start");
    }

    constexpr int kMaxNewton = 2000;
    constexpr int kMaxOuter = 100;
    int newtonSteps = 0;
    UdSolution best;
    best.gap = std::numeric_limits<double>::infinity();

    for (int outer = 0; outer < kMaxOuter; ++outer) {
        current = evaluate(gram, eta, current->p, mu);
        // Centering by damped Newton.
        for (int inner = 0; inner < 100; ++inner) {
            const Eigen::VectorXd& p = current->p;
            const ComplexMatrix& sInv = current->slackInverse;
            const Eigen::VectorXd invP = p.cwiseInverse();
            const Eigen::VectorXd grad = eta - mu * sInv.diagonal().real() + mu * invP;
            Eigen::MatrixXd negHessian = mu * sInv.cwiseAbs2();
            negHessian.diagonal() += mu * invP.cwiseAbs2();
            const Eigen::VectorXd step = negHessian.ldlt().solve(grad);
            const double decrement = grad.dot(step);
            if (!(decrement > 1e-14 * std::max(1.0, std::abs(current->objective)))) {
                break;
            }
            double t = 1.0;
            std::optional<BarrierPoint> trial;
            for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
                trial = evaluate(gram, eta, p + t * step, mu);
                if (trial && trial->objective >= current->objective + 0.25 * t * decrement) {
                    break;
                }
                trial.reset();
            }
            ++newtonSteps;
            if (!trial || newtonSteps > kMaxNewton) {
                break;
            }
            current = std::move(trial);
        }

        // Dual certificate from the (approximate) center, rescaled so the
        // linear constraint holds exactly.
        const Eigen::VectorXd& p = current->p;
        const ComplexMatrix z0 = mu * current->slackInverse;
        const Eigen::VectorXd z = mu * p.cwiseInverse();
        Eigen::VectorXd d(n);
        for (Index i = 0; i < n; ++i) {
            d(i) = std::sqrt((eta(i) + z(i)) / z0(i, i).real());
        }
        ComplexMatrix Z = d.cast<Complex>().asDiagonal() * z0 * d.cast<Complex>().asDiagonal();
        Z = (0.5 * (Z + Z.adjoint())).eval();
        const double value = eta.dot(p);
        const double gap = (gram * Z).trace().real() - value;

        if (gap < best.gap) {
            best.efficiencies.assign(p.data(), p.data() + n);
            best.value = value;
            best.dualZ = Z;
            best.dualz.assign(z.data(), z.data() + n);
            best.gap = gap;
            best.newtonSteps = newtonSteps;
        }
        if (gap <= gapTol) {
            return best;
        }
        if (newtonSteps > kMaxNewton) {
            break;
        }
        mu *= 0.5;
    }
    std::ostringstream msg;
    msg << "solve_ud_primal: no convergence; best value " << best.value << " with gap " << best.gap;
    throw NumericError(msg.str());
}

CertificateReport check_dual_certificate(const ComplexMatrix& gram, std::span<const double> priors,
                                         const ComplexMatrix& Z, std::span<const double> z,
                                         std::optional<double> primalValue) {
    const Index n = gram.rows();
    if (gram.cols() != n || Z.rows() != n || Z.cols() != n || priors.size() != static_cast<std::size_t>(n) ||
        z.size() != static_cast<std::size_t>(n)) {
        throw ValidationError("check_dual_certificate: shape mismatch");
    }
    CertificateReport report;
    for (Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double residual = std::abs(z[k] + priors[k] - Z(i, i).real());
        report.linearResidual = std::max(report.linearResidual, residual);
        if (residual > kCertificateTol) {
            std::ostringstream msg;
            msg << "z_" << i << " + eta_" << i << " - Z_" << i << i << " = "
                << z[k] + priors[k] - Z(i, i).real();
            report.violations.push_back(msg.str());
        }
    }
    report.minz = *std::min_element(z.begin(), z.end());
    if (report.minz < -kCertificateTol) {
        report.violations.push_back("z has a negative entry " + std::to_string(report.minz));
    }
    if (hermitian_defect(Z) > kHermitianTol * std::max(1.0, Z.cwiseAbs().maxCoeff())) {
        report.violations.push_back("Z is not Hermitian");
        report.minEigenvalueZ = -std::numeric_limits<double>::infinity();
    } else {
        report.minEigenvalueZ = min_eigenvalue(Z);
        if (report.minEigenvalueZ < -kCertificateTol) {
            report.violations.push_back("Z is not PSD (min eigenvalue " +
                                        std::to_string(report.minEigenvalueZ) + ")");
        }
    }
    report.value = (gram * Z).trace().real();
    if (primalValue) {
        report.weakDuality = report.value >= *primalValue - kCertificateTol;
        if (!*report.weakDuality) {
            report.violations.push_back("dual value below primal value");
        }
    }
    report.feasible = report.violations.empty();
    return report;
}

double equiprobable_optimum(const ComplexMatrix& gram) {
    require_hermitian(gram, "equiprobable_optimum");
    return min_eigenvalue(gram);
}

SymmetrizationReport symmetrize_solution(const ComplexMatrix& gram, std::span<const double> efficiencies) {
    const std::size_t n = efficiencies.size();
    if (n == 0 || n > 8 || gram.rows() != static_cast<Index>(n)) {
        throw ValidationError("symmetrize_solution: need between 1 and 8 efficiencies matching the Gram matrix");
    }
    std::vector<std::size_t> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(static_cast<Index>(n), static_cast<Index>(n));
    std::size_t count = 0;
    do {
        for (std::size_t i = 0; i < n; ++i) {
            sum(static_cast<Index>(i), static_cast<Index>(i)) += efficiencies[sigma[i]];
        }
        ++count;
    } while (std::next_permutation(sigma.begin(), sigma.end()));

    SymmetrizationReport report;
    report.averaged = sum / static_cast<double>(count);
    report.commonEfficiency = std::accumulate(efficiencies.begin(), efficiencies.end(), 0.0) / static_cast<double>(n);
    report.scalar =
        (report.averaged - report.commonEfficiency * Eigen::MatrixXd::Identity(static_cast<Index>(n), static_cast<Index>(n)))
            .cwiseAbs()
            .maxCoeff() <= 1e-12;
    report.feasible = min_eigenvalue(ComplexMatrix(gram - report.averaged.cast<Complex>())) >= -kCertificateTol;
    return report;
}

namespace {

// Outcome tables for the two-round protocol. Alice's outcomes 0..2 name a
// factor label, 3 is inconclusive. Bob's table is indexed by Alice's label.
struct ProtocolTables {
    double perRound = 0.0;
    std::vector<std::pair<int, int>> slots;
    // alice[state][outcome]
    std::vector<std::array<double, 4>> alice;
    // bob[aliceLabel][factor][outcome]; outcomes 0, 1 name remaining[aliceLabel][0/1], 2 inconclusive.
    std::array<std::array<std::array<double, 3>, 3>, 3> bob{};
    std::array<std::array<int, 2>, 3> remaining{};
};

ProtocolTables protocol_tables(double s) {
    const Ensemble family = make_product_family(s);
    const auto& product = *family.product();
    const auto& factors = product.factors;
    const double efficiency = 1.0 - s;

    ProtocolTables tables;
    tables.slots = product.slots;
    const Povm alice = build_reciprocal_povm(factors, efficiency);
    for (const auto& [a, b] : product.slots) {
        std::array<double, 4> row{};
        const PureState& f = factors[static_cast<std::size_t>(a)];
        for (std::size_t k = 0; k < 3; ++k) {
            row[k] = std::max(0.0, alice.response(k, f));
        }
        row[3] = std::max(0.0, 1.0 - row[0] - row[1] - row[2]);
        tables.alice.push_back(row);
    }
    double conclusive = 0.0;
    for (std::size_t a = 0; a < 3; ++a) {
        conclusive += alice.response(a, factors[a]);
    }
    tables.perRound = conclusive / 3.0;

    for (int a = 0; a < 3; ++a) {
        std::array<int, 2> rest{};
        int k = 0;
        for (int c = 0; c < 3; ++c) {
            if (c != a) {
                rest[static_cast<std::size_t>(k++)] = c;
            }
        }
        tables.remaining[static_cast<std::size_t>(a)] = rest;
        const std::array<PureState, 2> pair{factors[static_cast<std::size_t>(rest[0])],
                                            factors[static_cast<std::size_t>(rest[1])]};
        const Povm bob = build_reciprocal_povm(pair, efficiency);
        for (std::size_t f = 0; f < 3; ++f) {
            auto& row = tables.bob[static_cast<std::size_t>(a)][f];
            row[0] = std::max(0.0, bob.response(0, factors[f]));
            row[1] = std::max(0.0, bob.response(1, factors[f]));
            row[2] = std::max(0.0, 1.0 - row[0] - row[1]);
        }
    }
    return tables;
}

} // namespace

ProtocolResult sequential_protocol_exact(double s) {
    const ProtocolTables tables = protocol_tables(s);
    ProtocolResult result;
    result.perRoundEfficiency = tables.perRound;
    const double prior = 1.0 / static_cast<double>(tables.slots.size());
    for (std::size_t i = 0; i < tables.slots.size(); ++i) {
        const auto [a, b] = tables.slots[i];
        for (int k = 0; k < 3; ++k) {
            const double pa = tables.alice[i][static_cast<std::size_t>(k)];
            const auto& bobRow = tables.bob[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)];
            for (int m = 0; m < 2; ++m) {
                const int named = tables.remaining[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)];
                const double p = prior * pa * bobRow[static_cast<std::size_t>(m)];
                if (k == a && named == b) {
                    result.exactSuccess += p;
                } else {
                    result.exactWrong += p;
                }
            }
            if (k != a) {
                // A wrong first-round label is already a wrong conclusive outcome.
                result.exactWrong += prior * pa * bobRow[2];
            }
        }
    }
    return result;
}

namespace {

constexpr std::size_t kShardTrials = 1u << 14;

template <std::size_t N>
std::size_t sample(const std::array<double, N>& probabilities, double u) {
    double cumulative = 0.0;
    for (std::size_t k = 0; k + 1 < N; ++k) {
        cumulative += probabilities[k];
        if (u < cumulative) {
            return k;
        }
    }
    return N - 1;
}

} // namespace

ProtocolResult monte_carlo_protocol(double s, std::size_t trials, std::uint64_t seed) {
    if (trials < 1) {
        throw ValidationError("monte_carlo_protocol: need at least one trial");
    }
    ProtocolResult result = sequential_protocol_exact(s);
    const ProtocolTables tables = protocol_tables(s);
    const std::size_t shards = (trials + kShardTrials - 1) / kShardTrials;
    std::vector<std::size_t> successes(shards, 0);
    std::vector<std::size_t> wrong(shards, 0);

    parallel_for(shards, [&](std::size_t shard) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(shard), static_cast<std::uint32_t>(shard >> 32)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<std::size_t> pickState(0, tables.slots.size() - 1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        const std::size_t begin = shard * kShardTrials;
        const std::size_t end = std::min(trials, begin + kShardTrials);
        for (std::size_t t = begin; t < end; ++t) {
            const std::size_t i = pickState(rng);
            const auto [a, b] = tables.slots[i];
            const std::size_t k = sample(tables.alice[i], unit(rng));
            if (k == 3) {
                continue;
            }
            if (static_cast<int>(k) != a) {
                ++wrong[shard];
                continue;
            }
            const std::size_t m = sample(tables.bob[k][static_cast<std::size_t>(b)], unit(rng));
            if (m == 2) {
                continue;
            }
            if (tables.remaining[k][m] == b) {
                ++successes[shard];
            } else {
                ++wrong[shard];
            }
        }
    });

    const std::size_t hits = std::accumulate(successes.begin(), successes.end(), std::size_t{0});
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / n;
    result.trials = trials;
    result.seed = seed;
    result.empiricalSuccess = p;
    result.standardError = std::sqrt(p * (1.0 - p) / n);
    result.wrongConclusive = std::accumulate(wrong.begin(), wrong.end(), std::size_t{0});
    return result;
}

} // namespace nwe
