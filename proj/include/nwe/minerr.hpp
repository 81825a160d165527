#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nwe/ensembles.hpp"
#include "nwe/oblique.hpp"

namespace nwe {

inline constexpr double kPovmTol = 1e-10;

/// Measurement given as PSD elements summing to a closure target: the identity
/// for a complete measurement, or a projector when the measurement lives on a
/// subspace. An optional inconclusive element (unambiguous measurements) takes
/// part in the closure but is not one of the conclusive outcomes.
class Povm {
  public:
    /// psdTol bounds how negative an element's smallest eigenvalue may be.
    Povm(std::vector<ComplexMatrix> elements, ComplexMatrix closureTarget,
         std::optional<ComplexMatrix> inconclusive = std::nullopt, double psdTol = kPovmTol);

    /// Closure target = identity.
    static Povm complete(std::vector<ComplexMatrix> elements,
                         std::optional<ComplexMatrix> inconclusive = std::nullopt,
                         double psdTol = kPovmTol);
    /// Rank-one projectors onto the given orthonormal states; closure is their
    /// span projector.
    static Povm projective(std::span<const PureState> states);

    std::size_t size() const { return elements_.size(); }
    Index dim() const { return closureTarget_.rows(); }
    const std::vector<ComplexMatrix>& elements() const { return elements_; }
    const ComplexMatrix& element(std::size_t i) const { return elements_.at(i); }
    const ComplexMatrix& closure_target() const { return closureTarget_; }
    const std::optional<ComplexMatrix>& inconclusive() const { return inconclusive_; }

    /// <state|E_i|state>, real part.
    double response(std::size_t i, const PureState& state) const;

  private:
    std::vector<ComplexMatrix> elements_;
    ComplexMatrix closureTarget_;
    std::optional<ComplexMatrix> inconclusive_;
};

/// sum_{i != j} eta_i <psi_i|M_j|psi_i>; the inconclusive element is ignored.
double error_probability(const Ensemble& ensemble, const Povm& povm);
/// sum_i eta_i <psi_i|M_i|psi_i>.
double success_probability(const Ensemble& ensemble, const Povm& povm);

/// The orthonormal basis mu_i = rho^{-1/2} sqrt(eta_i) psi_i of the span of
/// the ensemble, whose perfect discrimination is equivalent to optimal
/// minimum-error discrimination of the ensemble.
struct DistilledBasis {
    std::vector<PureState> vectors;
    Ensemble sourceEnsemble;
    /// Filled when the source carries a ProductStructure.
    std::vector<std::size_t> schmidtRanks;
};

struct SrmResult {
    Povm povm;
    DistilledBasis basis;
    double success = 0.0;
    /// rho = sum eta_i |psi_i><psi_i|.
    ComplexMatrix rho;
};

/// Square-root measurement. Requires linearly independent states with equal priors.
SrmResult build_srm(const Ensemble& ensemble);

struct SrmOptimalityReport {
    bool optimal = false;
    /// max - min of diag(sqrt(gram)).
    double diagonalSpread = 0.0;
    ComplexMatrix sqrtGram;
};

/// The square-root measurement is minimum-error optimal for linearly
/// independent pure states when sqrt(gram) has a constant diagonal.
SrmOptimalityReport srm_optimality_check(const ComplexMatrix& gram, double tol = 1e-9);

struct ClosedFormReport {
    double s = 0.0;
    /// max |sqrt(Gamma) numeric - closed form|.
    double gramSqrtResidual = 0.0;
    double gramSqrtDiagonalSpread = 0.0;
    /// max |rho_B numeric - closed form|.
    double rhoResidual = 0.0;
    /// max |rho_B^{-1/2} numeric - closed form|, numeric from the canonical
    /// inverse square root re-expressed in the pair basis.
    double rhoInvSqrtResidual = 0.0;
    /// Same, numeric from the oblique P f(D) P^-1 route.
    double rhoInvSqrtObliqueResidual = 0.0;
    double srmSuccessResidual = 0.0;

    double max_residual() const;
};

ClosedFormReport srm_matches_closed_form(double s);

/// Local unitaries U_A, U_B with (U_A (x) U_B)|mu_i> = |mu_j> up to phase.
/// Both factors are U_sigma = Psi P_sigma Psi^-1 for the unique permutation
/// sigma of the factor labels with sigma(i1) = j1 and sigma(i2) = j2; that
/// operator permutes the product states among themselves and so commutes with rho.
std::pair<ComplexMatrix, ComplexMatrix> local_unitary_witness(const DistilledBasis& basis,
                                                              std::size_t i, std::size_t j);

/// ||(U_A (x) U_B) mu_i - e^{i theta} mu_j|| minimized over the phase.
double witness_residual(const DistilledBasis& basis, std::size_t i, std::size_t j,
                        const std::pair<ComplexMatrix, ComplexMatrix>& witness);

struct ChenReport {
    double s = 0.0;
    PureState mu1;
    ObliqueCoords mu1CoordsB;
    ObliqueCoords mu1CoordsBprime;
    /// k1, k2, k3: the coefficients any product vector a0 mu1 + sum a_i psi'_i psi'_i
    /// must satisfy a_i = k_i a0.
    std::array<Complex, 3> kRatios{};
    /// mu1 + sum_i k_i psi'_i psi'_i in the canonical basis (not normalized).
    ComplexVector candidateRay;
    /// 3x3 coefficient matrix of the ray over psi'_a psi'_b.
    ComplexMatrix rayCoefficients;
    /// Largest |2x2 minor| of rayCoefficients / ||rayCoefficients||^2.
    double rayMinorResidual = 0.0;
    /// Second Schmidt coefficient of the normalized ray.
    double raySchmidtGap = 0.0;
    bool rayIsProduct = false;
    /// max |residual| of the three necessary product conditions on the ray.
    double rayConditionResidual = 0.0;
    std::size_t mu1SchmidtRank = 0;
    bool loccDistinguishable = true;
    /// mu_11, mu_12, mu_14 (coordinates 1, 2 and 4 in the psi' pair basis).
    std::array<Complex, 3> denominatorComponents{};
    /// psi' pair basis (columns 7-9 are psi'_i psi'_i).
    ObliqueBasis reciprocalPairBasis;
};

inline constexpr double kChenDegeneracyTol = 1e-9;

/// Product-vector analysis of mu_1 against the span {mu_1, psi'_i psi'_i}.
/// Throws DegeneracyError when mu_11, mu_12 or mu_14 vanish.
ChenReport chen_analysis(double s);

/// The three necessary conditions zeta1 zeta9 = zeta2 zeta6,
/// zeta2 zeta8 = zeta1 zeta4, zeta4 zeta7 = zeta2 zeta3 on coordinates in a
/// pair basis; returns the largest absolute residual.
double pair_product_condition_residual(const ComplexVector& coords);

/// 3x3 coefficient matrix C(a, b) of pair-basis coordinates.
ComplexMatrix pair_coefficient_matrix(const ComplexVector& coords);

struct ProductProbeResult {
    std::size_t attempts = 0;
    /// Product vectors found in the span (converged alternating projections).
    std::size_t productsFound = 0;
    /// Among those, the ones with |<mu1|x>| above the overlap threshold.
    std::size_t withMu1Overlap = 0;
    /// Among those, the ones parallel to the candidate ray.
    std::size_t parallelToRay = 0;
    double worstParallelResidual = 0.0;
};

/// Searches span{mu1, psi'_i psi'_i} for product vectors from random starts
/// (alternating projections between the span and rank-one tensors) and checks
/// that every one with nonzero mu1 overlap is parallel to the candidate ray.
ProductProbeResult probe_product_vectors(const ChenReport& report, std::size_t attempts,
                                         std::uint64_t seed);

/// True iff the states are perfectly discriminated: <xi_j|E_i|xi_j> = delta_ij.
/// Throws ValidationError for non-orthonormal states.
bool perfect_discrimination_check(std::span<const PureState> states, const Povm& povm,
                                  double tol = 1e-9);

/// Rank-one orthonormal measurement on span(states) drawn from a random unitary.
Povm random_orthonormal_measurement(std::span<const PureState> spanning, std::uint64_t seed);

} // namespace nwe
