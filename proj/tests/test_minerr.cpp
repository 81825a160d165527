#include <gtest/gtest.h>

#include <random>

#include "nwe/ensembles.hpp"
#include "nwe/minerr.hpp"
#include "test_support.hpp"

using namespace nwe;
using nwe::testing::max_abs;

TEST(Povm, ValidatesElements) {
    const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
    ComplexMatrix half = id / 2.0;
    EXPECT_NO_THROW(Povm::complete({half, half}));
    EXPECT_THROW(Povm::complete({half, half / 2.0}), ValidationError);
    ComplexMatrix negative = ComplexMatrix::Zero(2, 2);
    negative(0, 0) = -0.1;
    EXPECT_THROW(Povm::complete({id - negative, negative}), ValidationError);
    ComplexMatrix nonHermitian = half;
    nonHermitian(0, 1) = 0.1;
    EXPECT_THROW(Povm::complete({nonHermitian, id - nonHermitian}), ValidationError);
}

TEST(Povm, ProjectiveClosureIsSpanProjector) {
    const std::vector<PureState> states{PureState::basis(3, 0), PureState::basis(3, 2)};
    const Povm p = Povm::projective(states);
    EXPECT_EQ(p.size(), 2u);
    EXPECT_NEAR(p.closure_target().trace().real(), 2.0, 1e-15);
    EXPECT_DOUBLE_EQ(p.response(0, states[0]), 1.0);
    EXPECT_DOUBLE_EQ(p.response(1, states[0]), 0.0);
}

TEST(Probabilities, ErrorAndSuccessSumToConclusiveMass) {
    const Ensemble e = make_product_family(0.4);
    const Povm srm = build_srm(e).povm;
    // Every state lies in the span, so the outcomes exhaust the probability.
    EXPECT_NEAR(error_probability(e, srm) + success_probability(e, srm), 1.0, 1e-12);
}

TEST(Srm, DistilledBasisIsOrthonormalAndSpansEnsemble) {
    for (double s : {0.1, 0.5, 0.9}) {
        const Ensemble e = make_product_family(s);
        const SrmResult r = build_srm(e);
        const ComplexMatrix mu = as_columns(r.basis.vectors);
        EXPECT_LE(max_abs(mu.adjoint() * mu - ComplexMatrix::Identity(6, 6)), 1e-10);
        for (const auto& psi : e.states()) {
            EXPECT_NEAR((mu * (mu.adjoint() * psi.amplitudes())).norm(), 1.0, 1e-10);
        }
        ASSERT_EQ(r.basis.schmidtRanks.size(), 6u);
        for (std::size_t rank : r.basis.schmidtRanks) {
            EXPECT_GE(rank, 2u);
        }
    }
}

TEST(Srm, SuccessEqualsSquaredSqrtGramDiagonal) {
    // For an ensemble whose sqrt(Gamma) has a constant diagonal d, the SRM
    // success is d^2. Oracle: the Gram of the measurement/state overlaps.
    const Ensemble e = make_product_family(0.35);
    const SrmResult r = build_srm(e);
    const ComplexMatrix overlaps = as_columns(r.basis.vectors).adjoint() * as_columns(e.states());
    const ComplexMatrix root = sqrtm_psd(gram_matrix(e.states()));
    EXPECT_LE(max_abs(overlaps - root), 1e-10);
    EXPECT_NEAR(r.success, std::norm(root(0, 0)), 1e-12);
}

TEST(Srm, OrthonormalEnsembleIsPerfectlyDiscriminated) {
    std::vector<PureState> basis;
    for (Index k = 0; k < 4; ++k) {
        basis.push_back(PureState::basis(4, k));
    }
    const SrmResult r = build_srm(Ensemble::equiprobable(basis));
    EXPECT_NEAR(r.success, 1.0, 1e-12);
    EXPECT_TRUE(perfect_discrimination_check(basis, r.povm));
}

TEST(Srm, RejectsUnequalPriorsAndDependentStates) {
    const std::vector<PureState> states{PureState::basis(2, 0), PureState::basis(2, 1)};
    EXPECT_THROW(build_srm(Ensemble(states, {0.3, 0.7})), ValidationError);
    const PureState plus = PureState::normalized(ComplexVector::Ones(2));
    EXPECT_THROW(build_srm(Ensemble::equiprobable({states[0], states[1], plus})), ValidationError);
}

TEST(Srm, BeatsRandomOrthonormalMeasurements) {
    const Ensemble e = make_product_family(0.5);
    const double srm = build_srm(e).success;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Povm random = random_orthonormal_measurement(e.states(), seed);
        EXPECT_LE(success_probability(e, random), srm + 1e-12);
    }
}

TEST(SrmOptimality, ConstantDiagonalDetected) {
    const auto check = srm_optimality_check(gram_matrix(make_product_family(0.5).states()));
    EXPECT_TRUE(check.optimal);
    EXPECT_LE(check.diagonalSpread, 1e-12);
    // A generic Gram matrix has an uneven sqrt diagonal.
    std::mt19937_64 rng(3);
    std::vector<PureState> states;
    for (int k = 0; k < 3; ++k) {
        states.push_back(PureState::normalized(nwe::testing::random_unit(3, rng)));
    }
    EXPECT_FALSE(srm_optimality_check(gram_matrix(states)).optimal);
}

TEST(LocalUnitaries, AllThirtyWitnessesHold) {
    for (double s : {0.2, 0.5, 0.8}) {
        const SrmResult r = build_srm(make_product_family(s));
        for (std::size_t i = 0; i < 6; ++i) {
            for (std::size_t j = 0; j < 6; ++j) {
                if (i == j) {
                    continue;
                }
                const auto w = local_unitary_witness(r.basis, i, j);
                EXPECT_LE(max_abs(w.first.adjoint() * w.first - ComplexMatrix::Identity(3, 3)), 1e-10);
                EXPECT_LE(witness_residual(r.basis, i, j, w), 1e-9) << i << "->" << j << " s=" << s;
            }
        }
    }
}

TEST(LocalUnitaries, SchmidtCoefficientsAgree) {
    const SrmResult r = build_srm(make_product_family(0.5));
    const auto reference = schmidt_decompose(r.basis.vectors[0].amplitudes(), 3, 3);
    EXPECT_NEAR(reference.coefficients[0], 0.996, 1e-3);
    for (const auto& mu : r.basis.vectors) {
        const auto sd = schmidt_decompose(mu.amplitudes(), 3, 3);
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_NEAR(sd.coefficients[k], reference.coefficients[k], 1e-9);
        }
    }
}

TEST(LocalUnitaries, NoProductStructureRejected) {
    const SrmResult r = build_srm(Ensemble::equiprobable({PureState::basis(2, 0), PureState::basis(2, 1)}));
    EXPECT_THROW(local_unitary_witness(r.basis, 0, 1), ValidationError);
}

TEST(PairConditions, ProductVectorsSatisfyThem) {
    std::mt19937_64 rng(9);
    const auto psi = make_symmetric_states({0.5, 3, 3});
    const ObliqueBasis b = make_pair_basis(psi);
    for (int rep = 0; rep < 10; ++rep) {
        const ComplexVector u = nwe::testing::random_complex(3, 1, rng).col(0);
        const ComplexVector w = nwe::testing::random_complex(3, 1, rng).col(0);
        // (sum u_a psi_a) (x) (sum w_b psi_b) has pair coordinates u_a w_b.
        ComplexVector coords(9);
        for (std::size_t k = 0; k < kProductSlots.size(); ++k) {
            coords(static_cast<Index>(k)) = u(kProductSlots[k].first) * w(kProductSlots[k].second);
        }
        for (Index d = 0; d < 3; ++d) {
            coords(6 + d) = u(d) * w(d);
        }
        EXPECT_LE(pair_product_condition_residual(coords), 1e-12);
        const ComplexMatrix c = pair_coefficient_matrix(coords);
        EXPECT_LE(max_abs(c - u * w.transpose()), 1e-15);
        const ComplexVector v = b.columns() * coords;
        EXPECT_EQ(schmidt_decompose(ComplexVector(v.normalized()), 3, 3).rank, 1u);
    }
}

TEST(Chen, ComponentsNonzeroAndVerdict) {
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const ChenReport r = chen_analysis(s);
        for (const Complex& c : r.denominatorComponents) {
            EXPECT_GT(std::abs(c), 1e-6) << s;
        }
        for (const Complex& k : r.kRatios) {
            EXPECT_TRUE(std::isfinite(k.real()) && std::isfinite(k.imag()));
        }
        EXPECT_EQ(r.mu1SchmidtRank, 3u);
        EXPECT_FALSE(r.loccDistinguishable);
        EXPECT_LE(r.rayConditionResidual, 1e-12);
        EXPECT_LE((r.mu1CoordsB.reconstruct() - r.mu1.amplitudes()).norm(), 1e-10);
        EXPECT_LE((r.mu1CoordsBprime.reconstruct() - r.mu1.amplitudes()).norm(), 1e-10);
    }
}

TEST(Chen, CandidateRayIsEntangledAtHalf) {
    // The three necessary conditions pin the ray but do not make it rank one.
    const ChenReport r = chen_analysis(0.5);
    EXPECT_FALSE(r.rayIsProduct);
    // Reference from an independent SVD of the reshaped ray.
    EXPECT_NEAR(r.raySchmidtGap, 6.80100847e-3, 1e-9);
    EXPECT_GT(r.rayMinorResidual, 1e-4);
}

TEST(Chen, ProductVectorsInSpanAvoidMu1) {
    const ChenReport r = chen_analysis(0.5);
    const ProductProbeResult probe = probe_product_vectors(r, 40, 11);
    EXPECT_EQ(probe.attempts, 40u);
    EXPECT_GT(probe.productsFound, 0u);
    EXPECT_EQ(probe.parallelToRay, probe.withMu1Overlap);
}

TEST(Chen, RejectsOutOfRangeOverlap) {
    EXPECT_THROW(chen_analysis(0.0), ValidationError);
    EXPECT_THROW(chen_analysis(1.0), ValidationError);
}

TEST(PerfectDiscrimination, DetectsWrongMeasurement) {
    const std::vector<PureState> basis{PureState::basis(2, 0), PureState::basis(2, 1)};
    const Povm swapped = Povm::projective(std::vector<PureState>{basis[1], basis[0]});
    EXPECT_FALSE(perfect_discrimination_check(basis, swapped));
    const PureState plus = PureState::normalized(ComplexVector::Ones(2));
    EXPECT_THROW(perfect_discrimination_check(std::vector<PureState>{basis[0], plus}, swapped), ValidationError);
}

TEST(RandomMeasurement, IsDeterministicPerSeed) {
    const Ensemble e = make_product_family(0.5);
    const Povm a = random_orthonormal_measurement(e.states(), 4);
    const Povm b = random_orthonormal_measurement(e.states(), 4);
    const Povm c = random_orthonormal_measurement(e.states(), 5);
    EXPECT_EQ(max_abs(a.element(0) - b.element(0)), 0.0);
    EXPECT_GT(max_abs(a.element(0) - c.element(0)), 1e-6);
    EXPECT_EQ(a.size(), 6u);
}
