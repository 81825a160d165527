#pragma once

// Coordinates and operator matrices with respect to ordered, linearly
// independent but nonorthogonal bases. Coordinates always come from the metric
// normal equations c = G^-1 V^dagger v, with G^-1 taken from the Hermitian
// eigensolver.

#include <memory>
#include <span>
#include <vector>

#include "nwe/ensembles.hpp"

namespace nwe {

inline constexpr double kSpanTol = 1e-9;
inline constexpr double kMetricMinEigenvalue = 1e-10;

/// Immutable ordered basis of span(vectors). Copies share identity, which is
/// what ObliqueCoords uses to tell whether two coordinate vectors are comparable.
class ObliqueBasis {
  public:
    explicit ObliqueBasis(std::vector<PureState> vectors);

    Index size() const { return data_->columns.cols(); }
    Index ambient_dim() const { return data_->columns.rows(); }
    const std::vector<PureState>& vectors() const { return data_->vectors; }
    const PureState& vector(Index k) const { return data_->vectors.at(static_cast<std::size_t>(k)); }
    /// ambient_dim x size, column k is vector k.
    const ComplexMatrix& columns() const { return data_->columns; }
    /// metric(i, j) = <v_i|v_j>.
    const ComplexMatrix& metric() const { return data_->metric; }
    const ComplexMatrix& metric_inverse() const { return data_->metricInverse; }
    const ComplexMatrix& metric_sqrt() const { return data_->metricSqrt; }
    const ComplexMatrix& metric_inv_sqrt() const { return data_->metricInvSqrt; }
    double metric_min_eigenvalue() const { return data_->metricMin; }

    bool same_as(const ObliqueBasis& other) const { return data_ == other.data_; }

  private:
    struct Data {
        std::vector<PureState> vectors;
        ComplexMatrix columns;
        ComplexMatrix metric;
        ComplexMatrix metricInverse;
        ComplexMatrix metricSqrt;
        ComplexMatrix metricInvSqrt;
        double metricMin = 0.0;
    };
    std::shared_ptr<const Data> data_;
};

struct ObliqueCoords {
    ObliqueBasis basis;
    ComplexVector coeffs;

    /// sum_k coeffs_k v_k in the canonical basis.
    ComplexVector reconstruct() const { return basis.columns() * coeffs; }
};

/// Throws SpanError when v is not in span(basis) to kSpanTol relative residual.
ObliqueCoords coords_in_basis(const ComplexVector& v, const ObliqueBasis& basis);
ObliqueCoords coords_in_basis(const PureState& v, const ObliqueBasis& basis);

/// Column k holds the coordinates of op * v_k. Throws SpanError when op does
/// not map span(basis) into itself.
ComplexMatrix operator_matrix_in_basis(const ComplexMatrix& op, const ObliqueBasis& basis);

/// Column j holds the coordinates of from.vector(j) in `to`. Throws SpanError
/// unless the two bases span the same subspace.
ComplexMatrix change_of_basis(const ObliqueBasis& from, const ObliqueBasis& to);

/// Re-expresses coordinates in another basis of the same span.
ObliqueCoords convert(const ObliqueCoords& coords, const ObliqueBasis& to);

/// a^dagger G b. Throws ValidationError when the coordinates refer to different bases.
Complex oblique_inner_product(const ObliqueCoords& a, const ObliqueCoords& b);

/// f(A) given the matrix of a self-adjoint operator A in `basis` (as produced
/// by operator_matrix_in_basis) and returned in the same basis.
///
/// This is the P f(D) P^-1 construction: the oblique matrix A_B is similar to
/// the Hermitian H = G^1/2 A_B G^-1/2, so the eigenvector matrix is
/// P = G^-1/2 W with W the unitary eigenvectors of H. Eigenvalues in the null
/// band are dropped exactly as in matrix_function_on_support.
template <typename F>
ComplexMatrix operator_function_in_basis(const ComplexMatrix& opInBasis, const ObliqueBasis& basis,
                                         F&& f, double nullTol = -1.0) {
    if (opInBasis.rows() != basis.size() || opInBasis.cols() != basis.size()) {
        throw ValidationError("operator_function_in_basis: matrix shape does not match basis");
    }
    ComplexMatrix h = basis.metric_sqrt() * opInBasis * basis.metric_inv_sqrt();
    require_hermitian(h, "operator_function_in_basis (operator is not self-adjoint)");
    h = (h + h.adjoint()).eval() / 2.0;
    const ComplexMatrix fh = matrix_function_on_support(hermitian_eig(h), std::forward<F>(f), nullTol);
    return basis.metric_inv_sqrt() * fh * basis.metric_sqrt();
}

/// The nine-element ordered basis of C^3 (x) C^3 built from three factor states:
/// the six kProductSlots pairs followed by f1f1, f2f2, f3f3.
ObliqueBasis make_pair_basis(std::span<const PureState> factors);

} // namespace nwe
