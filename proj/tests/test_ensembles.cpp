#include <gtest/gtest.h>

#include <Eigen/LU>

#include <random>

#include "nwe/ensembles.hpp"
#include "test_support.hpp"

using namespace nwe;
using nwe::testing::max_abs;

TEST(PureState, RejectsUnnormalizedAmplitudes) {
    EXPECT_THROW(PureState(ComplexVector::Ones(2)), ValidationError);
    EXPECT_THROW(PureState::normalized(ComplexVector::Zero(3)), ValidationError);
    EXPECT_NO_THROW(PureState::normalized(ComplexVector::Ones(2)));
    EXPECT_THROW(PureState::basis(3, 3), ValidationError);
}

TEST(PureState, TensorUsesKroneckerOrdering) {
    const PureState a = PureState::basis(3, 1);
    const PureState b = PureState::basis(3, 2);
    const PureState ab = tensor(a, b);
    EXPECT_EQ(ab.dim(), 9);
    EXPECT_EQ(ab.amplitudes()(1 * 3 + 2), Complex(1.0));
}

TEST(Ensemble, ValidatesPriors) {
    std::vector<PureState> states{PureState::basis(2, 0), PureState::basis(2, 1)};
    EXPECT_THROW(Ensemble(states, {0.5, 0.6}), ValidationError);
    EXPECT_THROW(Ensemble(states, {1.2, -0.2}), ValidationError);
    EXPECT_THROW(Ensemble(states, {1.0}), ValidationError);
    const Ensemble e(states, {0.3, 0.7});
    EXPECT_FALSE(e.equal_priors());
    EXPECT_TRUE(Ensemble::equiprobable(states).equal_priors());
}

TEST(SymmetricStates, GramHasCommonOverlap) {
    for (int count : {2, 3, 4}) {
        for (double s : {-0.3, 0.0, 0.2, 0.5, 0.9}) {
            const SymmetricFamilyParams params{s, count, count};
            if (s <= params.lower_bound()) {
                continue;
            }
            const auto states = make_symmetric_states(params);
            const ComplexMatrix g = gram_matrix(states);
            ComplexMatrix expected = ComplexMatrix::Constant(count, count, Complex(s));
            expected.diagonal().setOnes();
            EXPECT_LE(max_abs(g - expected), 1e-12) << "N=" << count << " s=" << s;
        }
    }
}

TEST(SymmetricStates, RejectsOverlapOutsideInterval) {
    EXPECT_THROW(make_symmetric_states({1.0, 3, 3}), ValidationError);
    EXPECT_THROW(make_symmetric_states({-0.5, 3, 3}), ValidationError);
    EXPECT_THROW(make_symmetric_states({0.5, 3, 2}), ValidationError);
}

TEST(SymmetricStates, AgreesWithCholeskyConstruction) {
    // Independent construction: columns of the Cholesky factor L^T have Gram L L^T.
    const double s = 0.4;
    Eigen::MatrixXd target = Eigen::MatrixXd::Constant(3, 3, s);
    target.diagonal().setOnes();
    const Eigen::MatrixXd lt = Eigen::LLT<Eigen::MatrixXd>(target).matrixU();
    const auto states = make_symmetric_states({s, 3, 3});
    EXPECT_LE((gram_matrix(states).real() - lt.transpose() * lt).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ProductFamily, GramEntriesFollowSharedFactors) {
    const double s = 0.3;
    const Ensemble family = make_product_family(s);
    ASSERT_EQ(family.size(), 6u);
    const ComplexMatrix g = gram_matrix(family.states());
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            const auto [a, b] = kProductSlots[i];
            const auto [c, d] = kProductSlots[j];
            const double left = a == c ? 1.0 : s;
            const double right = b == d ? 1.0 : s;
            EXPECT_NEAR(g(static_cast<Index>(i), static_cast<Index>(j)).real(), left * right, 1e-12);
        }
    }
    EXPECT_NEAR(g.trace().real(), 6.0, 1e-12);
}

TEST(ProductFamily, RejectsEndpoints) {
    EXPECT_THROW(make_product_family(0.0), ValidationError);
    EXPECT_THROW(make_product_family(1.0), ValidationError);
    EXPECT_THROW(make_product_family(std::vector<PureState>{PureState::basis(2, 0)}), ValidationError);
}

TEST(DoubleTrine, Overlaps) {
    const auto t = trine_states();
    const Ensemble d = make_double_trine();
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            const double expected = i == j ? 1.0 : -0.5;
            EXPECT_NEAR(std::abs(inner(t[i], t[j]) - Complex(expected)), 0.0, 1e-12);
            const double productExpected = i == j ? 1.0 : 0.25;
            EXPECT_NEAR(std::abs(inner(d.state(i), d.state(j)) - Complex(productExpected)), 0.0, 1e-12);
        }
    }
}

TEST(Reciprocal, BiorthogonalAndInSpan) {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<PureState> states;
        for (int k = 0; k < 4; ++k) {
            states.push_back(PureState::normalized(nwe::testing::random_unit(6, rng)));
        }
        const auto dual = reciprocal_states(states);
        const ComplexMatrix cols = as_columns(states);
        // Oracle: the component of psi_i orthogonal to the other states, via a
        // FullPivLU kernel computation.
        for (std::size_t i = 0; i < states.size(); ++i) {
            ComplexMatrix others(6, 3);
            Index c = 0;
            for (std::size_t j = 0; j < states.size(); ++j) {
                if (j != i) {
                    others.col(c++) = states[j].amplitudes();
                }
            }
            const ComplexMatrix kernel = Eigen::FullPivLU<ComplexMatrix>(others.adjoint()).kernel();
            // Project psi_i onto the kernel then onto span(states).
            const ComplexMatrix q = Eigen::HouseholderQR<ComplexMatrix>(kernel).householderQ() *
                                    ComplexMatrix::Identity(6, kernel.cols());
            ComplexVector v = q * (q.adjoint() * states[i].amplitudes());
            const ComplexMatrix qs = Eigen::HouseholderQR<ComplexMatrix>(cols).householderQ() *
                                     ComplexMatrix::Identity(6, 4);
            v = (qs * (qs.adjoint() * v)).normalized();
            const Complex phase = v.dot(dual[i].amplitudes());
            EXPECT_NEAR(std::abs(phase), 1.0, 1e-10);
            for (std::size_t j = 0; j < states.size(); ++j) {
                const double overlap = std::abs(inner(dual[i], states[j]));
                if (i == j) {
                    EXPECT_GT(overlap, 1e-6);
                    EXPECT_NEAR(inner(dual[i], states[j]).imag(), 0.0, 1e-12);
                    EXPECT_GT(inner(dual[i], states[j]).real(), 0.0);
                } else {
                    EXPECT_LE(overlap, 1e-12);
                }
            }
        }
    }
}

TEST(Reciprocal, SymmetricTripleOverlap) {
    const double s = 0.5;
    const auto psi = make_symmetric_states({s, 3, 3});
    const auto dual = reciprocal_states(psi);
    for (std::size_t i = 0; i < 3; ++i) {
        // |<psi'|psi>|^2 = 1 / (G^-1)_ii.
        const double ginv = pinv_hermitian(gram_matrix(psi))(static_cast<Index>(i), static_cast<Index>(i)).real();
        EXPECT_NEAR(std::norm(inner(dual[i], psi[i])), 1.0 / ginv, 1e-12);
    }
}

TEST(Reciprocal, DependentInputRejected) {
    const PureState a = PureState::basis(2, 0);
    const PureState b = PureState::basis(2, 1);
    const PureState c = PureState::normalized(a.amplitudes() + b.amplitudes());
    EXPECT_THROW(reciprocal_states(std::vector<PureState>{a, b, c}), ValidationError);
}

TEST(Independence, IntervalCriterionAgreesWithRank) {
    for (double s : {-0.45, -0.2, 0.1, 0.5, 0.95}) {
        const auto states = make_symmetric_states({s, 3, 3});
        const auto report = linear_independence_check(states);
        ASSERT_TRUE(report.intervalCriterion.has_value());
        EXPECT_EQ(*report.intervalCriterion, report.independent) << "s=" << s;
        EXPECT_NEAR(*report.commonOverlap, s, 1e-12);
        EXPECT_NEAR(report.minEigenvalue, std::min(1 - s, 1 + 2 * s), 1e-12);
    }
}

TEST(Independence, DependentSetReportsRank) {
    const PureState a = PureState::basis(2, 0);
    const PureState b = PureState::basis(2, 1);
    const PureState c = PureState::normalized(a.amplitudes() - b.amplitudes());
    const auto report = linear_independence_check(std::vector<PureState>{a, b, c});
    EXPECT_FALSE(report.independent);
    EXPECT_EQ(report.rank, 2);
    EXPECT_FALSE(report.commonOverlap.has_value());
}
