#include "nwe/closed_form.hpp"

#include <algorithm>
#include <cmath>

namespace nwe::closed_form {

namespace {

// Entry codes: 0 -> 1, 1 -> s, 2 -> s^2.
constexpr int kGramPattern[6][6] = {
    {0, 1, 2, 2, 2, 1}, {1, 0, 2, 1, 2, 2}, {2, 2, 0, 1, 1, 2},
    {2, 1, 1, 0, 2, 2}, {2, 2, 1, 2, 0, 1}, {1, 2, 2, 2, 1, 0},
};

// Overlaps of the six product states with psi_k psi_k, k = 1..3.
constexpr int kDiagonalPattern[6][3] = {
    {1, 1, 2}, {1, 2, 1}, {1, 1, 2}, {2, 1, 1}, {1, 2, 1}, {2, 1, 1},
};

// Pair-basis Gram rows 7-9.
constexpr int kTailPattern[3][9] = {
    {1, 1, 1, 2, 1, 2, 0, 2, 2},
    {1, 2, 1, 1, 2, 1, 2, 0, 2},
    {2, 1, 2, 1, 1, 1, 2, 2, 0},
};

// Index into gamma_0..gamma_3.
constexpr int kSqrtPattern[6][6] = {
    {0, 1, 2, 3, 3, 1}, {1, 0, 3, 1, 2, 3}, {2, 3, 0, 1, 1, 3},
    {3, 1, 1, 0, 3, 2}, {3, 2, 1, 3, 0, 1}, {1, 3, 3, 2, 1, 0},
};

// Index into gamma_4, gamma_5 (0 -> gamma_4).
constexpr int kInvSqrtTail[6][3] = {
    {0, 0, 1}, {0, 1, 0}, {0, 0, 1}, {1, 0, 0}, {0, 1, 0}, {1, 0, 0},
};

double code_value(int code, double s) {
    switch (code) {
    case 0:
        return 1.0;
    case 1:
        return s;
    default:
        return s * s;
    }
}

std::array<double, 4> gammas_from(double v0, double v1, double v2, double v3) {
    return {2 * v0 + 2 * v1 + v2 + v3, -v0 + v1 - v2 + v3, 2 * v0 - 2 * v1 - v2 + v3,
            -v0 - v1 + v2 + v3};
}

Eigen::MatrixXd from_sqrt_pattern(const std::array<double, 4>& g) {
    Eigen::MatrixXd out(6, 6);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            out(i, j) = g[static_cast<std::size_t>(kSqrtPattern[i][j])];
        }
    }
    return out;
}

Eigen::MatrixXd pair_basis_gram(double s) {
    Eigen::MatrixXd out(9, 9);
    for (int i = 0; i < 6; ++i) {
        for (int j = 0; j < 6; ++j) {
            out(i, j) = code_value(kGramPattern[i][j], s);
        }
        for (int k = 0; k < 3; ++k) {
            out(i, 6 + k) = code_value(kDiagonalPattern[i][k], s);
        }
    }
    for (int r = 0; r < 3; ++r) {
        for (int j = 0; j < 9; ++j) {
            out(6 + r, j) = code_value(kTailPattern[r][j], s);
        }
    }
    return out;
}

} // namespace

Eigen::MatrixXd gram(double s) {
    return pair_basis_gram(s).topLeftCorner(6, 6);
}

Eigen::VectorXd gram_spectrum(double s) {
    Eigen::VectorXd v(6);
    v << 1 - s, 1 - s, (1 - s) * (1 - s), 1 + s - 2 * s * s, 1 + s - 2 * s * s, 1 + 2 * s + 3 * s * s;
    std::sort(v.data(), v.data() + v.size());
    return v;
}

std::array<double, 4> gram_sqrt_gammas(double s) {
    return gammas_from(std::sqrt(1 - s), std::sqrt(-2 * s * s + s + 1), std::sqrt((s - 1) * (s - 1)),
                       std::sqrt(3 * s * s + 2 * s + 1));
}

Eigen::MatrixXd gram_sqrt(double s) {
    return from_sqrt_pattern(gram_sqrt_gammas(s)) / 6.0;
}

Eigen::MatrixXd rho_in_pair_basis(double s) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(9, 9);
    out.topRows(6) = pair_basis_gram(s).topRows(6) / 6.0;
    return out;
}

std::array<double, 6> rho_inv_sqrt_gammas(double s) {
    const double q3 = 3 * s * s + 2 * s + 1;
    const auto g = gammas_from(1 / std::sqrt(1 - s), 1 / std::sqrt(-2 * s * s + s + 1),
                               1 / std::sqrt((s - 1) * (s - 1)), 1 / std::sqrt(q3));
    const double v4 = s / std::sqrt(1 - s);
    const double v5 = (s * s + 2 * s) / (q3 * std::sqrt(q3));
    return {g[0], g[1], g[2], g[3], 2 * v4 + 2 * v5, -4 * v4 + 2 * v5};
}

Eigen::MatrixXd rho_inv_sqrt_in_pair_basis(double s) {
    const auto g = rho_inv_sqrt_gammas(s);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(9, 9);
    out.topLeftCorner(6, 6) = from_sqrt_pattern({g[0], g[1], g[2], g[3]});
    for (int i = 0; i < 6; ++i) {
        for (int k = 0; k < 3; ++k) {
            out(i, 6 + k) = g[static_cast<std::size_t>(4 + kInvSqrtTail[i][k])];
        }
    }
    return out / std::sqrt(6.0);
}

Eigen::MatrixXd pair_change_of_basis(double s) {
    return (1 + s) / (1 + s - 2 * s * s) * pair_basis_gram(s);
}

double reciprocal_overlap(double s) {
    return std::sqrt((1 + s - 2 * s * s) / (1 + s));
}

Eigen::VectorXd mu1_in_pair_basis(double s) {
    const auto g = rho_inv_sqrt_gammas(s);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(9);
    out.head(6) << g[0], g[1], g[2], g[3], g[3], g[1];
    return out / 6.0;
}

std::array<std::complex<double>, 9> mu1_in_reciprocal_pair_basis(std::complex<double> s) {
    using C = std::complex<double>;
    const C one(1.0);
    const C q = std::sqrt(-2.0 * s * s + s + one);
    const C a = std::sqrt(one - s);
    const C b = std::sqrt(s * (3.0 * s + 2.0) + one);
    const C den = 6.0 * (s - one) * (2.0 * s + one);
    const C tailDen = 3.0 * std::pow(one - s, 1.5) * (2.0 * s + one) * b;

    const C c1 = -(s + one) * (2.0 * q - s + 2.0 * a + b + one) / den;
    const C c2 = (s + one) * (-q - s + a - b + one) / den;
    const C c3 = -(s + one) * (-2.0 * q + s + 2.0 * a + b - one) / den;
    const C c4 = (s + one) * (q + s + a - b - one) / den;
    const C c7 = s * (s + one) * (2.0 * a + s * (a - b) + b) / tailDen;
    const C c9 = s * (s + one) * (s * a + 2.0 * a + 2.0 * s * b - 2.0 * b) / tailDen;
    return {c1, c2, c3, c4, c4, c2, c7, c7, c9};
}

Eigen::VectorXd mu1_in_reciprocal_pair_basis(double s) {
    const auto c = mu1_in_reciprocal_pair_basis(std::complex<double>(s, 0.0));
    Eigen::VectorXd out(9);
    for (int i = 0; i < 9; ++i) {
        out(i) = c[static_cast<std::size_t>(i)].real();
    }
    return out;
}

double srm_success(double s) {
    const double diagonal = gram_sqrt_gammas(s)[0] / 6.0;
    return diagonal * diagonal;
}

double ud_optimum_symmetric(double s, int count) {
    return s >= 0.0 ? 1.0 - s : 1.0 + (count - 1) * s;
}

double ud_optimum_product(double s) {
    return (1 - s) * (1 - s);
}

} // namespace nwe::closed_form
