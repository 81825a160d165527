#include "nwe/oblique.hpp"

#include <string>

namespace nwe {

ObliqueBasis::ObliqueBasis(std::vector<PureState> vectors) {
    if (vectors.empty()) {
        throw ValidationError("ObliqueBasis: no vectors");
    }
    auto data = std::make_shared<Data>();
    data->columns = as_columns(vectors);
    data->metric = gram_matrix(vectors);
    const auto eig = hermitian_eig(data->metric);
    data->metricMin = eig.min();
    if (!(data->metricMin > kMetricMinEigenvalue)) {
        throw ValidationError("ObliqueBasis: vectors are not linearly independent (metric min "
                              "eigenvalue " + std::to_string(data->metricMin) + ")");
    }
    // Full rank, so the support functions are the ordinary ones.
    data->metricInverse = matrix_function_on_support(eig, [](double x) { return 1.0 / x; }, 0.0);
    data->metricSqrt = matrix_function_on_support(eig, [](double x) { return std::sqrt(x); }, 0.0);
    data->metricInvSqrt =
        matrix_function_on_support(eig, [](double x) { return 1.0 / std::sqrt(x); }, 0.0);
    data->vectors = std::move(vectors);
    data_ = std::move(data);
}

namespace {

ComplexVector solve_coords(const ComplexVector& v, const ObliqueBasis& basis, const char* context) {
    if (v.size() != basis.ambient_dim()) {
        throw ValidationError(std::string(context) + ": vector dimension " +
                              std::to_string(v.size()) + " does not match basis ambient dimension " +
                              std::to_string(basis.ambient_dim()));
    }
    ComplexVector c = basis.metric_inverse() * (basis.columns().adjoint() * v);
    const double norm = v.norm();
    if (norm > 0.0) {
        const double residual = (basis.columns() * c - v).norm() / norm;
        if (residual > kSpanTol) {
            throw SpanError(std::string(context) + ": vector is outside the span of the basis",
                            residual);
        }
    }
    return c;
}

} // namespace

ObliqueCoords coords_in_basis(const ComplexVector& v, const ObliqueBasis& basis) {
    return {basis, solve_coords(v, basis, "coords_in_basis")};
}

ObliqueCoords coords_in_basis(const PureState& v, const ObliqueBasis& basis) {
    return coords_in_basis(v.amplitudes(), basis);
}

ComplexMatrix operator_matrix_in_basis(const ComplexMatrix& op, const ObliqueBasis& basis) {
    if (op.rows() != basis.ambient_dim() || op.cols() != basis.ambient_dim()) {
        throw ValidationError("operator_matrix_in_basis: operator shape does not match basis");
    }
    ComplexMatrix out(basis.size(), basis.size());
    for (Index k = 0; k < basis.size(); ++k) {
        out.col(k) = solve_coords(op * basis.columns().col(k), basis, "operator_matrix_in_basis");
    }
    return out;
}

ComplexMatrix change_of_basis(const ObliqueBasis& from, const ObliqueBasis& to) {
    if (from.size() != to.size() || from.ambient_dim() != to.ambient_dim()) {
        throw SpanError("change_of_basis: bases have different sizes", 1.0);
    }
    ComplexMatrix out(to.size(), from.size());
    for (Index j = 0; j < from.size(); ++j) {
        out.col(j) = solve_coords(from.columns().col(j), to, "change_of_basis");
    }
    return out;
}

ObliqueCoords convert(const ObliqueCoords& coords, const ObliqueBasis& to) {
    return {to, change_of_basis(coords.basis, to) * coords.coeffs};
}

Complex oblique_inner_product(const ObliqueCoords& a, const ObliqueCoords& b) {
    if (!a.basis.same_as(b.basis)) {
        throw ValidationError("oblique_inner_product: coordinates refer to different bases");
    }
    return a.coeffs.dot(a.basis.metric() * b.coeffs);
}

ObliqueBasis make_pair_basis(std::span<const PureState> factors) {
    if (factors.size() != 3) {
        throw ValidationError("make_pair_basis: need exactly three factor states");
    }
    std::vector<PureState> vectors;
    for (const auto& [a, b] : kProductSlots) {
        vectors.push_back(tensor(factors[static_cast<std::size_t>(a)], factors[static_cast<std::size_t>(b)]));
    }
    for (const auto& f : factors) {
        vectors.push_back(tensor(f, f));
    }
    return ObliqueBasis(std::move(vectors));
}

} // namespace nwe
