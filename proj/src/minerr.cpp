#include "nwe/minerr.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "nwe/closed_form.hpp"

namespace nwe {

namespace {

double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

ComplexMatrix orthonormal_span(const ComplexMatrix& columns) {
    Eigen::HouseholderQR<ComplexMatrix> qr(columns);
    return qr.householderQ() * ComplexMatrix::Identity(columns.rows(), columns.cols());
}

ComplexMatrix random_unitary(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    ComplexMatrix z(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            z(i, j) = Complex(normal(rng), normal(rng));
        }
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(z);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the column phases so the draw is Haar distributed.
    for (Index k = 0; k < n; ++k) {
        const Complex d = r(k, k);
        if (std::abs(d) > 0) {
            q.col(k) *= d / std::abs(d);
        }
    }
    return q;
}

ComplexVector random_complex_vector(Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    ComplexVector v(n);
    for (Index i = 0; i < n; ++i) {
        v(i) = Complex(normal(rng), normal(rng));
    }
    return v;
}

} // namespace

Povm::Povm(std::vector<ComplexMatrix> elements, ComplexMatrix closureTarget,
           std::optional<ComplexMatrix> inconclusive, double psdTol)
    : elements_(std::move(elements)), closureTarget_(std::move(closureTarget)),
      inconclusive_(std::move(inconclusive)) {
    if (elements_.empty()) {
        throw ValidationError("Povm: no elements");
    }
    require_hermitian(closureTarget_, "Povm closure target");
    const Index dim = closureTarget_.rows();
    ComplexMatrix total = ComplexMatrix::Zero(dim, dim);
    auto check = [&](const ComplexMatrix& e, const std::string& label) {
        if (e.rows() != dim || e.cols() != dim) {
            throw ValidationError("Povm: " + label + " has the wrong shape");
        }
        require_hermitian(e, "Povm " + label);
        const double lmin = min_eigenvalue(e);
        if (lmin < -psdTol) {
            throw ValidationError("Povm: " + label + " is not PSD (min eigenvalue " +
                                  std::to_string(lmin) + ")");
        }
        total += e;
    };
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        check(elements_[i], "element " + std::to_string(i));
    }
    if (inconclusive_) {
        check(*inconclusive_, "inconclusive element");
    }
    const double closure = max_abs(total - closureTarget_);
    if (closure > kPovmTol) {
        throw ValidationError("Povm: elements do not sum to the closure target (max deviation " +
                              std::to_string(closure) + ")");
    }
}

Povm Povm::complete(std::vector<ComplexMatrix> elements, std::optional<ComplexMatrix> inconclusive,
                    double psdTol) {
    if (elements.empty()) {
        throw ValidationError("Povm: no elements");
    }
    const Index dim = elements.front().rows();
    return Povm(std::move(elements), ComplexMatrix::Identity(dim, dim), std::move(inconclusive), psdTol);
}

Povm Povm::projective(std::span<const PureState> states) {
    std::vector<ComplexMatrix> elements;
    if (states.empty()) {
        throw ValidationError("Povm::projective: no states");
    }
    ComplexMatrix closure = ComplexMatrix::Zero(states.front().dim(), states.front().dim());
    for (const auto& s : states) {
        elements.push_back(projector(s));
        closure += elements.back();
    }
    return Povm(std::move(elements), std::move(closure));
}

double Povm::response(std::size_t i, const PureState& state) const {
    const ComplexMatrix& e = elements_.at(i);
    if (state.dim() != e.rows()) {
        throw ValidationError("Povm::response: dimension mismatch");
    }
    return state.amplitudes().dot(e * state.amplitudes()).real();
}

namespace {

void require_matching(const Ensemble& ensemble, const Povm& povm, const char* context) {
    if (povm.size() != ensemble.size()) {
        throw ValidationError(std::string(context) + ": " + std::to_string(povm.size()) +
                              " outcomes for " + std::to_string(ensemble.size()) + " states");
    }
    if (povm.dim() != ensemble.dim()) {
        throw ValidationError(std::string(context) + ": dimension mismatch");
    }
}

} // namespace

double error_probability(const Ensemble& ensemble, const Povm& povm) {
    require_matching(ensemble, povm, "error_probability");
    double error = 0.0;
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        for (std::size_t j = 0; j < povm.size(); ++j) {
            if (i != j) {
                error += ensemble.prior(i) * povm.response(j, ensemble.state(i));
            }
        }
    }
    return error;
}

double success_probability(const Ensemble& ensemble, const Povm& povm) {
    require_matching(ensemble, povm, "success_probability");
    double success = 0.0;
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        success += ensemble.prior(i) * povm.response(i, ensemble.state(i));
    }
    return success;
}

SrmResult build_srm(const Ensemble& ensemble) {
    if (!ensemble.equal_priors()) {
        throw ValidationError("build_srm: priors must be equal");
    }
    const auto independence = linear_independence_check(ensemble.states());
    if (!independence.independent) {
        throw ValidationError("build_srm: states are linearly dependent (rank " +
                              std::to_string(independence.rank) + " of " +
                              std::to_string(independence.count) + ")");
    }

    const Index dim = ensemble.dim();
    ComplexMatrix rho = ComplexMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        rho += ensemble.prior(i) * projector(ensemble.state(i));
    }
    const ComplexMatrix rhoInvSqrt = inv_sqrtm_psd(rho);

    std::vector<PureState> mu;
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        const ComplexVector v = rhoInvSqrt * (std::sqrt(ensemble.prior(i)) * ensemble.state(i).amplitudes());
        if (std::abs(v.norm() - 1.0) > 1e-8) {
            throw NumericError("build_srm: measurement vector " + std::to_string(i) +
                               " has norm " + std::to_string(v.norm()));
        }
        mu.push_back(PureState::normalized(v));
    }

    const ComplexMatrix muCols = as_columns(mu);
    const double orthoDefect =
        max_abs(muCols.adjoint() * muCols - ComplexMatrix::Identity(muCols.cols(), muCols.cols()));
    if (orthoDefect > 1e-10) {
        throw NumericError("build_srm: measurement vectors are not orthonormal (defect " +
                           std::to_string(orthoDefect) + ")");
    }
    const ComplexMatrix cols = as_columns(ensemble.states());
    const ComplexMatrix spanProjector = cols * pinv_hermitian(gram_matrix(ensemble.states())) * cols.adjoint();
    const double spanDefect = max_abs(muCols * muCols.adjoint() - spanProjector);
    if (spanDefect > 1e-9) {
        throw NumericError("build_srm: measurement vectors do not span the ensemble span (defect " +
                           std::to_string(spanDefect) + ")");
    }

    std::vector<std::size_t> ranks;
    if (const auto& product = ensemble.product()) {
        const Index dimA = product->factors.front().dim();
        const Index dimB = dim / dimA;
        for (const auto& m : mu) {
            ranks.push_back(schmidt_decompose(m.amplitudes(), dimA, dimB).rank);
        }
    }

    Povm povm = Povm::projective(mu);
    const double success = success_probability(ensemble, povm);
    return SrmResult{std::move(povm), DistilledBasis{std::move(mu), ensemble, std::move(ranks)}, success,
                     std::move(rho)};
}

SrmOptimalityReport srm_optimality_check(const ComplexMatrix& gram, double tol) {
    require_hermitian(gram, "srm_optimality_check");
    SrmOptimalityReport report;
    report.sqrtGram = sqrtm_psd(gram);
    const Eigen::VectorXd diag = report.sqrtGram.diagonal().real();
    report.diagonalSpread = diag.maxCoeff() - diag.minCoeff();
    report.optimal = report.diagonalSpread <= tol;
    return report;
}

double ClosedFormReport::max_residual() const {
    return std::max({gramSqrtResidual, rhoResidual, rhoInvSqrtResidual, rhoInvSqrtObliqueResidual,
                     srmSuccessResidual});
}

ClosedFormReport srm_matches_closed_form(double s) {
    const Ensemble family = make_product_family(s);
    ClosedFormReport report;
    report.s = s;

    const ComplexMatrix gram = gram_matrix(family.states());
    const ComplexMatrix sqrtGram = sqrtm_psd(gram);
    report.gramSqrtResidual = max_abs(sqrtGram - closed_form::gram_sqrt(s).cast<Complex>());
    const Eigen::VectorXd diag = sqrtGram.diagonal().real();
    report.gramSqrtDiagonalSpread = diag.maxCoeff() - diag.minCoeff();

    const ObliqueBasis pairBasis = make_pair_basis(family.product()->factors);
    ComplexMatrix rho = ComplexMatrix::Zero(9, 9);
    for (const auto& phi : family.states()) {
        rho += projector(phi) / 6.0;
    }
    const ComplexMatrix rhoB = operator_matrix_in_basis(rho, pairBasis);
    report.rhoResidual = max_abs(rhoB - closed_form::rho_in_pair_basis(s).cast<Complex>());

    const ComplexMatrix expectedInvSqrt = closed_form::rho_inv_sqrt_in_pair_basis(s).cast<Complex>();
    const ComplexMatrix invSqrtB = operator_matrix_in_basis(inv_sqrtm_psd(rho), pairBasis);
    report.rhoInvSqrtResidual = max_abs(invSqrtB - expectedInvSqrt);
    const ComplexMatrix invSqrtOblique =
        operator_function_in_basis(rhoB, pairBasis, [](double x) { return 1.0 / std::sqrt(x); });
    report.rhoInvSqrtObliqueResidual = max_abs(invSqrtOblique - expectedInvSqrt);

    report.srmSuccessResidual = std::abs(build_srm(family).success - closed_form::srm_success(s));
    return report;
}

namespace {

const ProductStructure& require_product(const DistilledBasis& basis) {
    const auto& product = basis.sourceEnsemble.product();
    if (!product) {
        throw ValidationError("local_unitary_witness: source ensemble has no product structure");
    }
    return *product;
}

ComplexMatrix permutation_unitary(const ProductStructure& product, const std::vector<int>& sigma) {
    const ComplexMatrix psi = as_columns(product.factors);
    if (psi.rows() != psi.cols()) {
        throw ValidationError("local_unitary_witness: factor states must form a basis");
    }
    const Index n = psi.cols();
    ComplexMatrix perm = ComplexMatrix::Zero(n, n);
    for (Index a = 0; a < n; ++a) {
        perm(sigma[static_cast<std::size_t>(a)], a) = 1.0;
    }
    const ComplexMatrix psiInverse = pinv_hermitian(gram_matrix(product.factors)) * psi.adjoint();
    ComplexMatrix u = psi * perm * psiInverse;
    const double defect = max_abs(u.adjoint() * u - ComplexMatrix::Identity(n, n));
    if (defect > 1e-9) {
        throw ValidationError("local_unitary_witness: factor permutation is not unitary (defect " +
                              std::to_string(defect) + ")");
    }
    return u;
}

} // namespace

std::pair<ComplexMatrix, ComplexMatrix> local_unitary_witness(const DistilledBasis& basis,
                                                              std::size_t i, std::size_t j) {
    const ProductStructure& product = require_product(basis);
    if (i >= basis.vectors.size() || j >= basis.vectors.size()) {
        throw ValidationError("local_unitary_witness: index out of range");
    }
    const int n = static_cast<int>(product.factors.size());
    const auto [i1, i2] = product.slots[i];
    const auto [j1, j2] = product.slots[j];

    std::vector<int> sigma(static_cast<std::size_t>(n), -1);
    auto assign = [&](int from, int to) {
        auto& slot = sigma[static_cast<std::size_t>(from)];
        if (slot != -1 && slot != to) {
            throw ValidationError("local_unitary_witness: slot patterns are not related by a permutation");
        }
        slot = to;
    };
    assign(i1, j1);
    assign(i2, j2);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    for (int t : sigma) {
        if (t >= 0) {
            if (used[static_cast<std::size_t>(t)]) {
                throw ValidationError("local_unitary_witness: slot patterns are not related by a permutation");
            }
            used[static_cast<std::size_t>(t)] = true;
        }
    }
    for (auto& t : sigma) {
        if (t == -1) {
            t = static_cast<int>(std::find(used.begin(), used.end(), false) - used.begin());
            used[static_cast<std::size_t>(t)] = true;
        }
    }
    ComplexMatrix u = permutation_unitary(product, sigma);
    return {u, u};
}

double witness_residual(const DistilledBasis& basis, std::size_t i, std::size_t j,
                        const std::pair<ComplexMatrix, ComplexMatrix>& witness) {
    const ComplexVector mapped = kron(witness.first, witness.second) * basis.vectors.at(i).amplitudes();
    const ComplexVector& target = basis.vectors.at(j).amplitudes();
    const Complex overlap = target.dot(mapped);
    const Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1.0);
    return (mapped - phase * target).norm();
}

ComplexMatrix pair_coefficient_matrix(const ComplexVector& coords) {
    if (coords.size() != 9) {
        throw ValidationError("pair_coefficient_matrix: need nine pair-basis coordinates");
    }
    ComplexMatrix c(3, 3);
    for (std::size_t k = 0; k < kProductSlots.size(); ++k) {
        const auto [a, b] = kProductSlots[k];
        c(a, b) = coords(static_cast<Index>(k));
    }
    for (Index d = 0; d < 3; ++d) {
        c(d, d) = coords(6 + d);
    }
    return c;
}

double pair_product_condition_residual(const ComplexVector& z) {
    if (z.size() != 9) {
        throw ValidationError("pair_product_condition_residual: need nine coordinates");
    }
    return std::max({std::abs(z(0) * z(8) - z(1) * z(5)), std::abs(z(1) * z(7) - z(0) * z(3)),
                     std::abs(z(3) * z(6) - z(1) * z(2))});
}

namespace {

double max_minor(const ComplexMatrix& c) {
    double worst = 0.0;
    for (Index r0 = 0; r0 < c.rows(); ++r0) {
        for (Index r1 = r0 + 1; r1 < c.rows(); ++r1) {
            for (Index c0 = 0; c0 < c.cols(); ++c0) {
                for (Index c1 = c0 + 1; c1 < c.cols(); ++c1) {
                    worst = std::max(worst, std::abs(c(r0, c0) * c(r1, c1) - c(r0, c1) * c(r1, c0)));
                }
            }
        }
    }
    return worst;
}

} // namespace

ChenReport chen_analysis(double s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw ValidationError("chen_analysis: overlap " + std::to_string(s) + " outside (0, 1)");
    }
    const Ensemble family = make_product_family(s);
    const auto& factors = family.product()->factors;
    const std::vector<PureState> dual = reciprocal_states(factors);
    const ObliqueBasis pairB = make_pair_basis(factors);
    const ObliqueBasis pairBprime = make_pair_basis(dual);

    const SrmResult srm = build_srm(family);
    const PureState& mu1 = srm.basis.vectors.front();

    ObliqueCoords inB = coords_in_basis(mu1, pairB);
    ObliqueCoords inBprime{pairBprime, change_of_basis(pairB, pairBprime) * inB.coeffs};
    const ComplexVector& m = inBprime.coeffs;

    const std::array<Complex, 3> denominators{m(0), m(1), m(3)};
    for (std::size_t k = 0; k < denominators.size(); ++k) {
        if (std::abs(denominators[k]) < kChenDegeneracyTol) {
            static constexpr const char* names[] = {"mu_11", "mu_12", "mu_14"};
            throw DegeneracyError(std::string("chen_analysis: component ") + names[k] +
                                  " vanishes at s = " + std::to_string(s));
        }
    }

    const std::array<Complex, 3> k{m(1) * m(2) / m(3) - m(6), m(0) * m(3) / m(1) - m(7),
                                   m(1) * m(5) / m(0) - m(8)};
    ComplexVector rayCoords = m;
    for (Index d = 0; d < 3; ++d) {
        rayCoords(6 + d) += k[static_cast<std::size_t>(d)];
    }
    ComplexVector ray = pairBprime.columns() * rayCoords;
    const ComplexMatrix coefficients = pair_coefficient_matrix(rayCoords);
    const double minorResidual = max_minor(coefficients) / coefficients.squaredNorm();
    const auto raySchmidt = schmidt_decompose(ComplexVector(ray.normalized()), 3, 3);
    const auto mu1Schmidt = schmidt_decompose(mu1.amplitudes(), 3, 3);

    // At most one independent product vector with nonzero mu1 overlap fits in
    // the span (the ray, if it is product at all); an entangled mu1 would need two.
    const bool distinguishable = mu1Schmidt.rank < 2;

    return ChenReport{
        .s = s,
        .mu1 = mu1,
        .mu1CoordsB = std::move(inB),
        .mu1CoordsBprime = inBprime,
        .kRatios = k,
        .candidateRay = std::move(ray),
        .rayCoefficients = coefficients,
        .rayMinorResidual = minorResidual,
        .raySchmidtGap = raySchmidt.gap(),
        .rayIsProduct = minorResidual <= 1e-10,
        .rayConditionResidual = pair_product_condition_residual(rayCoords),
        .mu1SchmidtRank = mu1Schmidt.rank,
        .loccDistinguishable = distinguishable,
        .denominatorComponents = denominators,
        .reciprocalPairBasis = pairBprime,
    };
}

ProductProbeResult probe_product_vectors(const ChenReport& report, std::size_t attempts,
                                         std::uint64_t seed) {
    ComplexMatrix spanning(9, 4);
    spanning.col(0) = report.mu1.amplitudes();
    for (Index d = 0; d < 3; ++d) {
        spanning.col(1 + d) = report.reciprocalPairBasis.columns().col(6 + d);
    }
    const ComplexMatrix q = orthonormal_span(spanning);
    const ComplexMatrix projectorOnSpan = q * q.adjoint();
    const ComplexVector rayUnit = report.candidateRay.normalized();

    std::mt19937_64 rng(seed);
    ProductProbeResult result;
    result.attempts = attempts;
    for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
        ComplexVector x = (q * random_complex_vector(4, rng)).normalized();
        bool converged = false;
        for (int iter = 0; iter < 5000; ++iter) {
            const auto schmidt = schmidt_decompose(x, 3, 3);
            double tail = 0.0;
            for (std::size_t t = 1; t < schmidt.coefficients.size(); ++t) {
                tail += schmidt.coefficients[t] * schmidt.coefficients[t];
            }
            if (std::sqrt(tail) <= 1e-11) {
                converged = true;
                break;
            }
            const ComplexVector rankOne =
                schmidt.coefficients[0] * kron(schmidt.leftVectors[0], schmidt.rightVectors[0]);
            const ComplexVector next = projectorOnSpan * rankOne;
            if (next.norm() < 1e-14) {
                break;
            }
            x = next.normalized();
        }
        if (!converged) {
            continue;
        }
        ++result.productsFound;
        if (std::abs(report.mu1.amplitudes().dot(x)) <= 1e-6) {
            continue;
        }
        ++result.withMu1Overlap;
        const double residual = (x - rayUnit.dot(x) * rayUnit).norm();
        result.worstParallelResidual = std::max(result.worstParallelResidual, residual);
        if (residual <= 1e-8) {
            ++result.parallelToRay;
        }
    }
    return result;
}

bool perfect_discrimination_check(std::span<const PureState> states, const Povm& povm, double tol) {
    const ComplexMatrix g = gram_matrix(states);
    const double defect = max_abs(g - ComplexMatrix::Identity(g.rows(), g.cols()));
    if (defect > 1e-9) {
        throw ValidationError("perfect_discrimination_check: states are not orthonormal (defect " +
                              std::to_string(defect) + ")");
    }
    if (povm.size() != states.size()) {
        return false;
    }
    for (std::size_t i = 0; i < povm.size(); ++i) {
        for (std::size_t j = 0; j < states.size(); ++j) {
            const double expected = i == j ? 1.0 : 0.0;
            if (std::abs(povm.response(i, states[j]) - expected) > tol) {
                return false;
            }
        }
    }
    return true;
}

Povm random_orthonormal_measurement(std::span<const PureState> spanning, std::uint64_t seed) {
    const ComplexMatrix q = orthonormal_span(as_columns(spanning));
    std::mt19937_64 rng(seed);
    const ComplexMatrix frame = q * random_unitary(q.cols(), rng);
    std::vector<PureState> vectors;
    for (Index k = 0; k < frame.cols(); ++k) {
        vectors.push_back(PureState::normalized(frame.col(k)));
    }
    return Povm::projective(vectors);
}

} // namespace nwe
