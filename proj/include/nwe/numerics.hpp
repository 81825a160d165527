#pragma once

// Dense Hermitian kernel shared by every other module: cyclic Jacobi
// eigendecomposition, spectral matrix functions restricted to the support,
// Schmidt decomposition and PSD testing. Everything is templated on the Eigen
// scalar so the same code serves real symmetric and complex Hermitian input.

#include <Eigen/Dense>
#include <Eigen/Jacobi>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "nwe/errors.hpp"

namespace nwe {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kSchmidtRankTol = 1e-9;
inline constexpr double kRelativeNullTol = 1e-10;

/// max|A - A^dagger|; +inf for non-square input.
template <typename Derived>
double hermitian_defect(const Eigen::MatrixBase<Derived>& a) {
    if (a.rows() != a.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    if (a.size() == 0) {
        return 0.0;
    }
    return static_cast<double>((a - a.adjoint()).cwiseAbs().maxCoeff());
}

/// Throws ValidationError unless `a` is square and Hermitian to
/// kHermitianTol * max(1, max|a|).
template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& a, std::string_view context) {
    if (a.rows() != a.cols()) {
        throw ValidationError(std::string(context) + ": matrix is not square (" +
                              std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + ")");
    }
    const double scale =
        a.size() == 0 ? 1.0 : std::max(1.0, static_cast<double>(a.cwiseAbs().maxCoeff()));
    const double defect = hermitian_defect(a);
    if (!(defect <= kHermitianTol * scale)) {
        throw ValidationError(std::string(context) + ": matrix is not Hermitian (defect " +
                              std::to_string(defect) + ")");
    }
}

template <typename Scalar>
struct EigDecomposition {
    /// Ascending.
    DenseVector<RealOf<Scalar>> eigenvalues;
    /// Orthonormal columns, column k belongs to eigenvalues[k].
    DenseMatrix<Scalar> eigenvectors;

    Index size() const { return eigenvalues.size(); }
    RealOf<Scalar> min() const { return eigenvalues(0); }
    RealOf<Scalar> max() const { return eigenvalues(eigenvalues.size() - 1); }
    RealOf<Scalar> max_magnitude() const { return eigenvalues.cwiseAbs().maxCoeff(); }

    DenseMatrix<Scalar> reconstruct() const {
        return eigenvectors * eigenvalues.template cast<Scalar>().asDiagonal() *
               eigenvectors.adjoint();
    }
};

/// Cyclic Jacobi eigensolver for Hermitian (or real symmetric) matrices.
///
/// Every sweep visits all off-diagonal pairs in row order and annihilates them
/// with a unitary plane rotation. Stops once the off-diagonal Frobenius norm is
/// below machine epsilon relative to the full norm. Intended for the small
/// dense matrices of this library (n <= ~100).
template <typename Derived>
EigDecomposition<typename Derived::Scalar> hermitian_eig(const Eigen::MatrixBase<Derived>& input,
                                                         int maxSweeps = 64) {
    using Scalar = typename Derived::Scalar;
    using Real = RealOf<Scalar>;
    using Mat = DenseMatrix<Scalar>;

    require_hermitian(input, "hermitian_eig");
    const Index n = input.rows();
    Mat a = (input + input.adjoint()) / Real(2);
    Mat v = Mat::Identity(n, n);

    const Real eps = Eigen::NumTraits<Real>::epsilon();
    const Real scale = a.norm();
    auto offNorm = [&a, n]() {
        Real off = 0;
        for (Index q = 1; q < n; ++q) {
            for (Index p = 0; p < q; ++p) {
                off += Eigen::numext::abs2(a(p, q));
            }
        }
        return std::sqrt(off);
    };

    bool converged = n < 2 || scale == Real(0);
    for (int sweep = 0; sweep < maxSweeps && !converged; ++sweep) {
        if (offNorm() <= eps * scale) {
            converged = true;
            break;
        }
        for (Index p = 0; p < n - 1; ++p) {
            for (Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) <= eps * eps * scale) {
                    a(p, q) = a(q, p) = Scalar(0);
                    continue;
                }
                Eigen::JacobiRotation<Scalar> rot;
                rot.makeJacobi(a, p, q);
                a.applyOnTheLeft(p, q, rot.adjoint());
                a.applyOnTheRight(p, q, rot);
                v.applyOnTheRight(p, q, rot);
                a(p, q) = a(q, p) = Scalar(0);
                a(p, p) = Scalar(Eigen::numext::real(a(p, p)));
                a(q, q) = Scalar(Eigen::numext::real(a(q, q)));
            }
        }
    }
    if (!converged && offNorm() > eps * scale) {
        throw NumericError("hermitian_eig: no convergence after " + std::to_string(maxSweeps) +
                           " sweeps");
    }

    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index(0));
    std::stable_sort(order.begin(), order.end(), [&a](Index i, Index j) {
        return Eigen::numext::real(a(i, i)) < Eigen::numext::real(a(j, j));
    });

    EigDecomposition<Scalar> out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    for (Index k = 0; k < n; ++k) {
        const Index src = order[static_cast<std::size_t>(k)];
        out.eigenvalues(k) = Eigen::numext::real(a(src, src));
        out.eigenvectors.col(k) = v.col(src);
    }
    return out;
}

/// Default support cutoff: kRelativeNullTol times the largest |eigenvalue|.
template <typename Scalar>
RealOf<Scalar> default_null_tol(const EigDecomposition<Scalar>& eig) {
    return eig.size() == 0 ? RealOf<Scalar>(0) : RealOf<Scalar>(kRelativeNullTol) * eig.max_magnitude();
}

/// sum over |lambda_k| > nullTol of f(lambda_k) |v_k><v_k|.
///
/// Eigenvalues inside the null band are dropped (support convention). A
/// non-finite f(lambda) on a kept eigenvalue raises DomainError. Pass a
/// negative nullTol to get default_null_tol.
template <typename Scalar, typename F>
DenseMatrix<Scalar> matrix_function_on_support(const EigDecomposition<Scalar>& eig, F&& f,
                                               double nullTol = -1.0) {
    using Real = RealOf<Scalar>;
    const Real tol = nullTol < 0 ? default_null_tol(eig) : Real(nullTol);
    const Index n = eig.size();
    DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(n, n);
    for (Index k = 0; k < n; ++k) {
        const Real lambda = eig.eigenvalues(k);
        if (std::abs(lambda) <= tol) {
            continue;
        }
        const Real value = static_cast<Real>(f(lambda));
        if (!std::isfinite(value)) {
            throw DomainError("matrix_function_on_support: f is undefined at eigenvalue " +
                              std::to_string(static_cast<double>(lambda)));
        }
        out.noalias() += Scalar(value) * eig.eigenvectors.col(k) * eig.eigenvectors.col(k).adjoint();
    }
    return out;
}

template <typename Derived, typename F>
DenseMatrix<typename Derived::Scalar> matrix_function_on_support(const Eigen::MatrixBase<Derived>& a,
                                                                 F&& f, double nullTol = -1.0) {
    return matrix_function_on_support(hermitian_eig(a), std::forward<F>(f), nullTol);
}

/// Square root on the support; negative eigenvalues beyond the null band are a DomainError.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> sqrtm_psd(const Eigen::MatrixBase<Derived>& a,
                                                double nullTol = -1.0) {
    return matrix_function_on_support(a, [](double x) { return std::sqrt(x); }, nullTol);
}

/// Inverse square root on the support (the pseudo-inverse square root).
template <typename Derived>
DenseMatrix<typename Derived::Scalar> inv_sqrtm_psd(const Eigen::MatrixBase<Derived>& a,
                                                    double nullTol = -1.0) {
    return matrix_function_on_support(a, [](double x) { return 1.0 / std::sqrt(x); }, nullTol);
}

/// Moore-Penrose inverse of a Hermitian matrix.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> pinv_hermitian(const Eigen::MatrixBase<Derived>& a,
                                                     double nullTol = -1.0) {
    return matrix_function_on_support(a, [](double x) { return 1.0 / x; }, nullTol);
}

template <typename Derived>
bool psd_check(const Eigen::MatrixBase<Derived>& a, double tol) {
    if (a.rows() == 0) {
        return true;
    }
    return static_cast<double>(hermitian_eig(a).min()) >= -tol;
}

template <typename Derived>
double min_eigenvalue(const Eigen::MatrixBase<Derived>& a) {
    return static_cast<double>(hermitian_eig(a).min());
}

/// Kronecker product a (x) b.
template <typename DerivedA, typename DerivedB>
DenseMatrix<typename DerivedA::Scalar> kron(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
    DenseMatrix<typename DerivedA::Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

template <typename Scalar>
struct SchmidtDecomposition {
    /// Descending, length min(dimA, dimB).
    std::vector<double> coefficients;
    /// One entry per coefficient above kSchmidtRankTol.
    std::vector<DenseVector<Scalar>> leftVectors;
    std::vector<DenseVector<Scalar>> rightVectors;
    std::size_t rank = 0;

    double gap() const { return coefficients.size() > 1 ? coefficients[1] : 0.0; }
};

/// Schmidt decomposition of v in C^dimA (x) C^dimB, with v[a * dimB + b] the
/// coefficient of |a>|b> (Kronecker ordering).
///
/// The singular vectors on the smaller side come from hermitian_eig of the
/// reshaped Gram; the coefficients are then re-measured as norms of the
/// projected columns, which keeps small coefficients accurate to ~eps instead
/// of ~sqrt(eps).
template <typename Derived>
SchmidtDecomposition<typename Derived::Scalar> schmidt_decompose(const Eigen::MatrixBase<Derived>& v,
                                                                 Index dimA, Index dimB) {
    using Scalar = typename Derived::Scalar;
    using Mat = DenseMatrix<Scalar>;
    using Vec = DenseVector<Scalar>;

    if (v.cols() != 1 || dimA <= 0 || dimB <= 0 || dimA * dimB != v.rows()) {
        throw ValidationError("schmidt_decompose: vector of size " + std::to_string(v.rows()) +
                              " does not factor as " + std::to_string(dimA) + " x " +
                              std::to_string(dimB));
    }
    Mat c(dimA, dimB);
    for (Index a = 0; a < dimA; ++a) {
        for (Index b = 0; b < dimB; ++b) {
            c(a, b) = v(a * dimB + b);
        }
    }

    struct Term {
        double sigma;
        Vec left;
        Vec right;
    };
    std::vector<Term> terms;
    if (dimA <= dimB) {
        const auto eig = hermitian_eig(Mat(c * c.adjoint()));
        for (Index k = 0; k < dimA; ++k) {
            Vec u = eig.eigenvectors.col(k);
            Vec w = c.adjoint() * u;
            const double sigma = static_cast<double>(w.norm());
            Vec right = sigma > 0 ? Vec(w.conjugate() / sigma) : Vec::Zero(dimB);
            terms.push_back({sigma, std::move(u), std::move(right)});
        }
    } else {
        const auto eig = hermitian_eig(Mat(c.adjoint() * c));
        for (Index k = 0; k < dimB; ++k) {
            Vec x = c * eig.eigenvectors.col(k);
            const double sigma = static_cast<double>(x.norm());
            Vec left = sigma > 0 ? Vec(x / sigma) : Vec::Zero(dimA);
            terms.push_back({sigma, std::move(left), Vec(eig.eigenvectors.col(k).conjugate())});
        }
    }
    std::stable_sort(terms.begin(), terms.end(),
                     [](const Term& x, const Term& y) { return x.sigma > y.sigma; });

    SchmidtDecomposition<Scalar> out;
    for (auto& term : terms) {
        out.coefficients.push_back(term.sigma);
        if (term.sigma > kSchmidtRankTol) {
            ++out.rank;
            out.leftVectors.push_back(std::move(term.left));
            out.rightVectors.push_back(std::move(term.right));
        }
    }
    return out;
}

} // namespace nwe
