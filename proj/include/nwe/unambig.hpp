#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nwe/ensembles.hpp"
#include "nwe/minerr.hpp"

namespace nwe {

inline constexpr double kUnambiguityTol = 1e-9;
/// E_0 may dip this far below zero and still count as PSD; the optimal
/// reciprocal measurement is exactly tight.
inline constexpr double kInconclusivePsdTol = 1e-9;
inline constexpr double kCertificateTol = 1e-8;

/// Conclusive efficiencies p_i = <chi_i|E_i|chi_i>. Throws AmbiguityError for
/// any off-diagonal response above kUnambiguityTol.
std::vector<double> ud_condition_check(const Povm& povm, std::span<const PureState> states);

/// E_i = p / |<psi'_i|psi_i>|^2 |psi'_i><psi'_i|, E_0 = I - sum E_i.
/// Throws InfeasibleError (carrying the largest feasible p) when E_0 is not PSD.
Povm build_reciprocal_povm(std::span<const PureState> states, double targetEfficiency);

struct UdSolution {
    std::vector<double> efficiencies;
    double value = 0.0;
    ComplexMatrix dualZ;
    std::vector<double> dualz;
    /// Tr(Gamma Z) - value.
    double gap = 0.0;
    int newtonSteps = 0;
};

/// Maximizes sum eta_i p_i subject to Gamma - diag(p) >= 0, p >= 0 with a
/// log-det barrier and damped Newton steps, halving the barrier weight until
/// the certified gap is below gapTol.
UdSolution solve_ud_primal(const ComplexMatrix& gram, std::span<const double> priors,
                           double gapTol = 1e-7);

struct CertificateReport {
    bool feasible = false;
    /// Tr(Gamma Z).
    double value = 0.0;
    double linearResidual = 0.0;
    double minEigenvalueZ = 0.0;
    double minz = 0.0;
    /// Tr(Gamma Z) >= primal - 1e-8, when a primal value was supplied.
    std::optional<bool> weakDuality;
    std::vector<std::string> violations;
};

/// Checks z_i + eta_i - Z_ii = 0, Z >= 0, z >= 0 and reports Tr(Gamma Z).
CertificateReport check_dual_certificate(const ComplexMatrix& gram, std::span<const double> priors,
                                         const ComplexMatrix& Z, std::span<const double> z,
                                         std::optional<double> primalValue = std::nullopt);

/// Equal-efficiency optimum: lambda_min(gram).
double equiprobable_optimum(const ComplexMatrix& gram);

struct SymmetrizationReport {
    /// Average of diag(p_sigma) over all permutations sigma.
    Eigen::MatrixXd averaged;
    double commonEfficiency = 0.0;
    /// averaged == commonEfficiency * I.
    bool scalar = false;
    /// lambda_min(gram - averaged) >= -1e-8.
    bool feasible = false;
};

/// At most 8 states (the average runs over all N! permutations).
SymmetrizationReport symmetrize_solution(const ComplexMatrix& gram, std::span<const double> efficiencies);

struct ProtocolResult {
    double exactSuccess = 0.0;
    std::optional<double> empiricalSuccess;
    std::size_t trials = 0;
    std::uint64_t seed = 0;
    double perRoundEfficiency = 0.0;
    std::optional<double> standardError;
    std::size_t wrongConclusive = 0;
    /// Exact probability of a conclusive but wrong identification.
    double exactWrong = 0.0;
};

/// Two-round protocol on the product family: Alice runs the three-state
/// reciprocal measurement on her factor, then Bob the two-state one on the
/// remaining candidates. Probabilities come from the measurement elements.
ProtocolResult sequential_protocol_exact(double s);

/// Samples the same protocol. Trials are split into fixed-size shards with
/// seeds derived from (seed, shard), so results do not depend on thread count.
ProtocolResult monte_carlo_protocol(double s, std::size_t trials, std::uint64_t seed);

} // namespace nwe
