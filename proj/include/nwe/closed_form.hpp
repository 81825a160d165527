#pragma once

// Closed-form expressions for the six-state product family with overlap s.
// Reference values only: the numerical pipeline never reads them, they are
// what its results get compared against.

#include <Eigen/Dense>

#include <array>
#include <complex>

namespace nwe::closed_form {

/// 6x6 Gram matrix: 1 on the diagonal, s where the two states share a factor
/// in the same slot, s^2 otherwise.
Eigen::MatrixXd gram(double s);

/// Ascending spectrum of gram(s):
/// {1-s, 1-s, (1-s)^2, 1+s-2s^2, 1+s-2s^2, 1+2s+3s^2}.
Eigen::VectorXd gram_spectrum(double s);

/// The gamma_0..gamma_3 circulant-like coefficients of sqrt(gram(s)), times 6.
std::array<double, 4> gram_sqrt_gammas(double s);
Eigen::MatrixXd gram_sqrt(double s);

/// Matrix of rho = (1/6) sum |phi_i><phi_i| in the nine-element pair basis.
Eigen::MatrixXd rho_in_pair_basis(double s);

/// Matrix of rho^{-1/2} (support inverse) in the nine-element pair basis.
/// The leading 6x6 block uses the same index pattern as gram_sqrt with
/// inverse-square-root coefficients; columns 7-9 carry gamma_4, gamma_5 with
/// v5 = (s^2 + 2s) / (3s^2 + 2s + 1)^{3/2}.
Eigen::MatrixXd rho_inv_sqrt_in_pair_basis(double s);
std::array<double, 6> rho_inv_sqrt_gammas(double s);

/// Change of basis from the pair basis of psi to the pair basis of the
/// reciprocal states psi'.
Eigen::MatrixXd pair_change_of_basis(double s);

/// |<psi'_i|psi_i>| for the symmetric triple.
double reciprocal_overlap(double s);

/// Unit-norm mu_1 coordinates in the psi pair basis.
Eigen::VectorXd mu1_in_pair_basis(double s);

/// Unit-norm mu_1 coordinates in the psi' pair basis. Evaluated with complex
/// square roots so the component formulas can be probed outside (0, 1).
std::array<std::complex<double>, 9> mu1_in_reciprocal_pair_basis(std::complex<double> s);
Eigen::VectorXd mu1_in_reciprocal_pair_basis(double s);

/// Square-root-measurement success probability (gamma_0 / 6)^2.
double srm_success(double s);

/// Optimal unambiguous success for N equiprobable states with common overlap s:
/// 1 - s for s >= 0, 1 + (N - 1) s for s <= 0.
double ud_optimum_symmetric(double s, int count);

/// (1 - s)^2.
double ud_optimum_product(double s);

} // namespace nwe::closed_form
