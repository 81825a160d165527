#pragma once

#include <array>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "nwe/numerics.hpp"

namespace nwe {

/// Unit vector in C^dim.
class PureState {
  public:
    static constexpr double kNormTol = 1e-12;

    /// Throws ValidationError unless the amplitudes have unit norm to kNormTol.
    explicit PureState(ComplexVector amplitudes);

    /// Rescales a nonzero vector to unit norm.
    static PureState normalized(const ComplexVector& v);
    /// Canonical basis vector |k> of C^dim.
    static PureState basis(Index dim, Index k);

    Index dim() const { return amplitudes_.size(); }
    const ComplexVector& amplitudes() const { return amplitudes_; }
    Complex operator[](Index i) const { return amplitudes_(i); }

  private:
    ComplexVector amplitudes_;
};

/// <a|b>
Complex inner(const PureState& a, const PureState& b);
PureState tensor(const PureState& a, const PureState& b);
ComplexMatrix projector(const PureState& state);
/// dim x N matrix whose columns are the amplitude vectors.
ComplexMatrix as_columns(std::span<const PureState> states);

/// Ordered (first factor, second factor) index pairs of the six-state product
/// family: psi1psi2, psi1psi3, psi2psi1, psi2psi3, psi3psi1, psi3psi2.
inline constexpr std::array<std::pair<int, int>, 6> kProductSlots{
    {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}}};

/// Records that every state of an ensemble is factors[a] (x) factors[b].
struct ProductStructure {
    std::vector<PureState> factors;
    std::vector<std::pair<int, int>> slots;
};

class Ensemble {
  public:
    static constexpr double kPriorTol = 1e-12;

    Ensemble(std::vector<PureState> states, std::vector<double> priors,
             std::optional<ProductStructure> product = std::nullopt);
    static Ensemble equiprobable(std::vector<PureState> states,
                                 std::optional<ProductStructure> product = std::nullopt);

    std::size_t size() const { return states_.size(); }
    Index dim() const { return states_.front().dim(); }
    const std::vector<PureState>& states() const { return states_; }
    const std::vector<double>& priors() const { return priors_; }
    const PureState& state(std::size_t i) const { return states_.at(i); }
    double prior(std::size_t i) const { return priors_.at(i); }
    const std::optional<ProductStructure>& product() const { return product_; }
    bool equal_priors(double tol = kPriorTol) const;

  private:
    std::vector<PureState> states_;
    std::vector<double> priors_;
    std::optional<ProductStructure> product_;
};

/// N states in C^d with all pairwise inner products equal to the real s.
struct SymmetricFamilyParams {
    double s = 0.5;
    int count = 3;
    int dim = 3;

    /// -1/(N-1), the open lower end of the linear-independence interval.
    double lower_bound() const { return -1.0 / (count - 1); }
    void validate() const;
};

std::vector<PureState> make_symmetric_states(const SymmetricFamilyParams& params);

/// The six equiprobable states psi_a (x) psi_b, a != b, of the symmetric
/// triple with overlap s in (0, 1), ordered as kProductSlots.
Ensemble make_product_family(double s);
/// Product family built from arbitrary factor states (exactly three).
Ensemble make_product_family(std::vector<PureState> factors);

/// Three equiprobable two-qubit states alpha_i (x) alpha_i of the trine.
Ensemble make_double_trine();
std::array<PureState, 3> trine_states();

/// G_ij = <state_i|state_j>.
ComplexMatrix gram_matrix(std::span<const PureState> states);

/// Unit states psi'_i in span(states) with <psi'_i|psi_j> = 0 for i != j and
/// <psi'_i|psi_i> real positive.
std::vector<PureState> reciprocal_states(std::span<const PureState> states);

struct IndependenceReport {
    bool independent = false;
    Index rank = 0;
    Index count = 0;
    double minEigenvalue = 0.0;
    /// Present when the Gram has a single real off-diagonal value s: whether s
    /// lies in (-1/(N-1), 1).
    std::optional<bool> intervalCriterion;
    std::optional<double> commonOverlap;
};

IndependenceReport linear_independence_check(std::span<const PureState> states);

} // namespace nwe
