#include "nwe/ensembles.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace nwe {

PureState::PureState(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) {
        throw ValidationError("PureState: empty amplitude vector");
    }
    const double norm2 = amplitudes_.squaredNorm();
    if (!(std::abs(norm2 - 1.0) <= kNormTol)) {
        throw ValidationError("PureState: squared norm " + std::to_string(norm2) + " is not 1");
    }
}

PureState PureState::normalized(const ComplexVector& v) {
    const double norm = v.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw ValidationError("PureState::normalized: vector has zero or non-finite norm");
    }
    return PureState(v / norm);
}

PureState PureState::basis(Index dim, Index k) {
    if (k < 0 || k >= dim) {
        throw ValidationError("PureState::basis: index out of range");
    }
    ComplexVector v = ComplexVector::Zero(dim);
    v(k) = 1.0;
    return PureState(std::move(v));
}

Complex inner(const PureState& a, const PureState& b) {
    if (a.dim() != b.dim()) {
        throw ValidationError("inner: dimension mismatch");
    }
    return a.amplitudes().dot(b.amplitudes());
}

PureState tensor(const PureState& a, const PureState& b) {
    ComplexVector out(a.dim() * b.dim());
    for (Index i = 0; i < a.dim(); ++i) {
        out.segment(i * b.dim(), b.dim()) = a[i] * b.amplitudes();
    }
    return PureState::normalized(out);
}

ComplexMatrix projector(const PureState& state) {
    return state.amplitudes() * state.amplitudes().adjoint();
}

ComplexMatrix as_columns(std::span<const PureState> states) {
    if (states.empty()) {
        return ComplexMatrix(0, 0);
    }
    const Index dim = states.front().dim();
    ComplexMatrix out(dim, static_cast<Index>(states.size()));
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].dim() != dim) {
            throw ValidationError("as_columns: states have different dimensions");
        }
        out.col(static_cast<Index>(i)) = states[i].amplitudes();
    }
    return out;
}

Ensemble::Ensemble(std::vector<PureState> states, std::vector<double> priors,
                   std::optional<ProductStructure> product)
    : states_(std::move(states)), priors_(std::move(priors)), product_(std::move(product)) {
    if (states_.empty()) {
        throw ValidationError("Ensemble: no states");
    }
    if (states_.size() != priors_.size()) {
        throw ValidationError("Ensemble: " + std::to_string(states_.size()) + " states but " +
                              std::to_string(priors_.size()) + " priors");
    }
    for (const auto& s : states_) {
        if (s.dim() != states_.front().dim()) {
            throw ValidationError("Ensemble: states have different dimensions");
        }
    }
    for (double p : priors_) {
        if (!(p >= 0.0)) {
            throw ValidationError("Ensemble: negative prior");
        }
    }
    const double total = std::accumulate(priors_.begin(), priors_.end(), 0.0);
    if (!(std::abs(total - 1.0) <= kPriorTol)) {
        throw ValidationError("Ensemble: priors sum to " + std::to_string(total));
    }
    if (product_ && product_->slots.size() != states_.size()) {
        throw ValidationError("Ensemble: product structure does not match state count");
    }
}

Ensemble Ensemble::equiprobable(std::vector<PureState> states,
                                std::optional<ProductStructure> product) {
    const std::size_t n = states.size();
    if (n == 0) {
        throw ValidationError("Ensemble: no states");
    }
    std::vector<double> priors(n, 1.0 / static_cast<double>(n));
    return Ensemble(std::move(states), std::move(priors), std::move(product));
}

bool Ensemble::equal_priors(double tol) const {
    for (double p : priors_) {
        if (std::abs(p - priors_.front()) > tol) {
            return false;
        }
    }
    return true;
}

void SymmetricFamilyParams::validate() const {
    if (count < 2) {
        throw ValidationError("SymmetricFamilyParams: need at least two states");
    }
    if (dim < count) {
        throw ValidationError("SymmetricFamilyParams: dimension " + std::to_string(dim) +
                              " is smaller than the state count " + std::to_string(count));
    }
    if (!(s > lower_bound() && s < 1.0)) {
        throw ValidationError("SymmetricFamilyParams: overlap " + std::to_string(s) +
                              " outside the linear-independence interval (" +
                              std::to_string(lower_bound()) + ", 1)");
    }
}

std::vector<PureState> make_symmetric_states(const SymmetricFamilyParams& params) {
    params.validate();
    const Index n = params.count;
    Eigen::MatrixXd target = Eigen::MatrixXd::Constant(n, n, params.s);
    target.diagonal().setOnes();

    // target = V diag(lambda) V^T, so the columns of diag(sqrt(lambda)) V^T
    // have exactly this Gram matrix.
    const auto eig = hermitian_eig(target);
    const Eigen::MatrixXd amplitudes =
        eig.eigenvalues.cwiseMax(0.0).cwiseSqrt().asDiagonal() * eig.eigenvectors.transpose();

    std::vector<PureState> states;
    states.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        ComplexVector v = ComplexVector::Zero(params.dim);
        v.head(n) = amplitudes.col(i).cast<Complex>();
        states.push_back(PureState::normalized(v));
    }
    return states;
}

Ensemble make_product_family(std::vector<PureState> factors) {
    if (factors.size() != 3) {
        throw ValidationError("make_product_family: need exactly three factor states");
    }
    std::vector<PureState> states;
    ProductStructure product{factors, {}};
    for (const auto& [a, b] : kProductSlots) {
        states.push_back(tensor(factors[static_cast<std::size_t>(a)], factors[static_cast<std::size_t>(b)]));
        product.slots.emplace_back(a, b);
    }
    return Ensemble::equiprobable(std::move(states), std::move(product));
}

Ensemble make_product_family(double s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw ValidationError("make_product_family: overlap " + std::to_string(s) +
                              " outside (0, 1)");
    }
    return make_product_family(make_symmetric_states({s, 3, 3}));
}

std::array<PureState, 3> trine_states() {
    const double h = std::sqrt(3.0) / 2.0;
    return {PureState(ComplexVector{{1.0, 0.0}}), PureState(ComplexVector{{-0.5, -h}}),
            PureState(ComplexVector{{-0.5, h}})};
}

Ensemble make_double_trine() {
    const auto trine = trine_states();
    std::vector<PureState> states;
    ProductStructure product{{trine.begin(), trine.end()}, {}};
    for (int i = 0; i < 3; ++i) {
        states.push_back(tensor(trine[static_cast<std::size_t>(i)], trine[static_cast<std::size_t>(i)]));
        product.slots.emplace_back(i, i);
    }
    return Ensemble::equiprobable(std::move(states), std::move(product));
}

ComplexMatrix gram_matrix(std::span<const PureState> states) {
    const ComplexMatrix cols = as_columns(states);
    ComplexMatrix g = cols.adjoint() * cols;
    // Exact Hermitian symmetry and unit diagonal up to rounding of the products.
    g = (g + g.adjoint()).eval() / 2.0;
    return g;
}

std::vector<PureState> reciprocal_states(std::span<const PureState> states) {
    const auto report = linear_independence_check(states);
    if (!report.independent) {
        throw ValidationError("reciprocal_states: states are linearly dependent (rank " +
                              std::to_string(report.rank) + " of " +
                              std::to_string(report.count) + ")");
    }
    const ComplexMatrix cols = as_columns(states);
    // Columns of cols * G^-1 are the dual vectors: <psi_j|dual_i> = delta_ij.
    const ComplexMatrix duals = cols * pinv_hermitian(gram_matrix(states));
    std::vector<PureState> out;
    out.reserve(states.size());
    for (Index i = 0; i < duals.cols(); ++i) {
        out.push_back(PureState::normalized(duals.col(i)));
    }
    return out;
}

IndependenceReport linear_independence_check(std::span<const PureState> states) {
    IndependenceReport report;
    report.count = static_cast<Index>(states.size());
    if (states.empty()) {
        report.independent = true;
        return report;
    }
    const ComplexMatrix g = gram_matrix(states);
    const auto eig = hermitian_eig(g);
    report.minEigenvalue = eig.min();
    report.rank = (eig.eigenvalues.array() > kRelativeNullTol).count();
    report.independent = report.rank == report.count;

    if (report.count >= 2) {
        const Complex first = g(0, 1);
        bool common = std::abs(first.imag()) <= 1e-12;
        for (Index i = 0; i < g.rows() && common; ++i) {
            for (Index j = 0; j < g.cols() && common; ++j) {
                if (i != j && std::abs(g(i, j) - first) > 1e-12) {
                    common = false;
                }
            }
        }
        if (common) {
            const double s = first.real();
            report.commonOverlap = s;
            report.intervalCriterion = s > -1.0 / static_cast<double>(report.count - 1) && s < 1.0;
        }
    }
    return report;
}

} // namespace nwe
