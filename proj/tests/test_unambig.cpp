#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "nwe/ensembles.hpp"
#include "nwe/unambig.hpp"
#include "test_support.hpp"

using namespace nwe;
using nwe::testing::max_abs;

namespace {

ComplexMatrix symmetric_gram(double s, Index n) {
    ComplexMatrix g = ComplexMatrix::Constant(n, n, Complex(s));
    g.diagonal().setOnes();
    return g;
}

std::vector<double> uniform(std::size_t n) {
    return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

} // namespace

TEST(UdCondition, OrthonormalProjectorsGiveUnitEfficiency) {
    std::vector<PureState> basis;
    std::vector<ComplexMatrix> elements;
    for (Index k = 0; k < 3; ++k) {
        basis.push_back(PureState::basis(3, k));
        elements.push_back(projector(basis.back()));
    }
    const Povm p = Povm::complete(elements, ComplexMatrix::Zero(3, 3));
    for (double e : ud_condition_check(p, basis)) {
        EXPECT_NEAR(e, 1.0, 1e-15);
    }
}

TEST(UdCondition, SwappedElementIsAmbiguous) {
    const auto psi = make_symmetric_states({0.5, 3, 3});
    const Povm good = build_reciprocal_povm(psi, 0.5);
    std::vector<ComplexMatrix> elements = good.elements();
    std::swap(elements[0], elements[1]);
    const Povm bad = Povm::complete(elements, *good.inconclusive(), kInconclusivePsdTol);
    try {
        ud_condition_check(bad, psi);
        FAIL() << "expected AmbiguityError";
    } catch (const AmbiguityError& e) {
        EXPECT_EQ(e.outcome(), 0u);
        EXPECT_EQ(e.state(), 1u);
    }
}

TEST(UdCondition, RequiresInconclusiveElement) {
    const std::vector<PureState> basis{PureState::basis(2, 0), PureState::basis(2, 1)};
    EXPECT_THROW(ud_condition_check(Povm::projective(basis), basis), ValidationError);
}

TEST(ReciprocalPovm, SymmetricTripleAtOptimum) {
    const auto psi = make_symmetric_states({0.5, 3, 3});
    const Povm p = build_reciprocal_povm(psi, 0.5);
    for (double e : ud_condition_check(p, psi)) {
        EXPECT_NEAR(e, 0.5, 1e-12);
    }
    // Tight: the inconclusive element is singular.
    EXPECT_NEAR(min_eigenvalue(*p.inconclusive()), 0.0, 1e-9);
}

TEST(ReciprocalPovm, AboveOptimumIsInfeasible) {
    const auto psi = make_symmetric_states({0.5, 3, 3});
    try {
        build_reciprocal_povm(psi, 0.6);
        FAIL() << "expected InfeasibleError";
    } catch (const InfeasibleError& e) {
        EXPECT_NEAR(e.max_feasible(), 0.5, 1e-10);
    }
    EXPECT_THROW(build_reciprocal_povm(psi, 0.0), ValidationError);
}

TEST(ReciprocalPovm, OrthonormalStatesAtUnitEfficiency) {
    const std::vector<PureState> basis{PureState::basis(2, 0), PureState::basis(2, 1)};
    const Povm p = build_reciprocal_povm(basis, 1.0);
    EXPECT_LE(max_abs(*p.inconclusive()), 1e-12);
}

TEST(ReciprocalPovm, MaxFeasibleIsMinGramEigenvalue) {
    std::mt19937_64 rng(8);
    for (int rep = 0; rep < 5; ++rep) {
        const double s = std::uniform_real_distribution<double>(-0.4, 0.9)(rng);
        const auto psi = make_symmetric_states({s, 3, 3});
        const double lmin = min_eigenvalue(gram_matrix(psi));
        EXPECT_NO_THROW(build_reciprocal_povm(psi, lmin));
        EXPECT_THROW(build_reciprocal_povm(psi, lmin + 1e-6), InfeasibleError);
    }
}

TEST(Primal, SymmetricFamilyBothBranches) {
    for (double s : {0.1, 0.5, 0.9}) {
        const UdSolution sol = solve_ud_primal(symmetric_gram(s, 3), uniform(3));
        EXPECT_NEAR(sol.value, 1 - s, 1e-6) << s;
        EXPECT_LE(sol.gap, 1e-6);
    }
    for (double s : {-0.4, -0.3, -0.2}) {
        const UdSolution sol = solve_ud_primal(symmetric_gram(s, 3), uniform(3));
        EXPECT_NEAR(sol.value, 1 + 2 * s, 1e-6) << s;
    }
}

TEST(Primal, ProductFamilyEqualsSquaredComplement) {
    for (double s : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        const Ensemble e = make_product_family(s);
        const ComplexMatrix g = gram_matrix(e.states());
        const UdSolution sol = solve_ud_primal(g, e.priors());
        EXPECT_NEAR(sol.value, (1 - s) * (1 - s), 1e-6) << s;
        EXPECT_NEAR(equiprobable_optimum(g), (1 - s) * (1 - s), 1e-10);
    }
}

TEST(Primal, SolutionInvariants) {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        // Random linearly independent states with random priors.
        std::vector<PureState> states;
        for (int k = 0; k < 4; ++k) {
            states.push_back(PureState::normalized(nwe::testing::random_unit(5, rng)));
        }
        std::vector<double> priors(4);
        std::uniform_real_distribution<double> u(0.1, 1.0);
        for (double& p : priors) {
            p = u(rng);
        }
        const double total = std::accumulate(priors.begin(), priors.end(), 0.0);
        for (double& p : priors) {
            p /= total;
        }
        const ComplexMatrix g = gram_matrix(states);
        const UdSolution sol = solve_ud_primal(g, priors);
        ComplexMatrix slack = g;
        for (Index i = 0; i < 4; ++i) {
            slack(i, i) -= sol.efficiencies[static_cast<std::size_t>(i)];
            EXPECT_GE(sol.efficiencies[static_cast<std::size_t>(i)], 0.0);
            EXPECT_LE(sol.efficiencies[static_cast<std::size_t>(i)], 1.0);
        }
        EXPECT_GE(min_eigenvalue(slack), -1e-8);
        EXPECT_GE(sol.gap, -1e-8);
        EXPECT_LE(sol.gap, 1e-6);
        const auto cert = check_dual_certificate(g, priors, sol.dualZ, sol.dualz, sol.value);
        EXPECT_TRUE(cert.feasible);
        EXPECT_NEAR(cert.value - sol.value, sol.gap, 1e-12);
        // Equal efficiencies can never beat the optimum.
        EXPECT_LE(equiprobable_optimum(g), sol.value + 1e-6);
    }
}

TEST(Primal, PermutationInvariance) {
    const Ensemble e = make_product_family(0.4);
    const ComplexMatrix g = gram_matrix(e.states());
    std::vector<double> priors{0.05, 0.1, 0.15, 0.2, 0.22, 0.28};
    const UdSolution base = solve_ud_primal(g, priors);
    std::vector<Index> sigma{3, 0, 5, 1, 4, 2};
    ComplexMatrix gp(6, 6);
    std::vector<double> pp(6);
    for (Index i = 0; i < 6; ++i) {
        pp[static_cast<std::size_t>(i)] = priors[static_cast<std::size_t>(sigma[static_cast<std::size_t>(i)])];
        for (Index j = 0; j < 6; ++j) {
            gp(i, j) = g(sigma[static_cast<std::size_t>(i)], sigma[static_cast<std::size_t>(j)]);
        }
    }
    const UdSolution permuted = solve_ud_primal(gp, pp);
    EXPECT_NEAR(permuted.value, base.value, 1e-6);
}

TEST(Primal, RejectsSingularAndMalformedInput) {
    ComplexMatrix singular = ComplexMatrix::Ones(2, 2);
    EXPECT_THROW(solve_ud_primal(singular, uniform(2)), ValidationError);
    EXPECT_THROW(solve_ud_primal(symmetric_gram(0.3, 3), uniform(2)), ValidationError);
    EXPECT_THROW(solve_ud_primal(symmetric_gram(0.3, 3), std::vector<double>{0.5, 0.5, 0.5}), ValidationError);
    ComplexMatrix scaled = symmetric_gram(0.3, 3) * 2.0;
    EXPECT_THROW(solve_ud_primal(scaled, uniform(3)), ValidationError);
}

TEST(Certificate, SolverCertificateAtHalf) {
    const Ensemble e = make_product_family(0.5);
    const ComplexMatrix g = gram_matrix(e.states());
    const UdSolution sol = solve_ud_primal(g, e.priors());
    const auto cert = check_dual_certificate(g, e.priors(), sol.dualZ, sol.dualz, sol.value);
    EXPECT_TRUE(cert.feasible);
    EXPECT_NEAR(cert.value, 0.25, 1e-6);
    ASSERT_TRUE(cert.weakDuality.has_value());
    EXPECT_TRUE(*cert.weakDuality);
}

TEST(Certificate, DiagonalPointGivesUpperBoundOne) {
    const Ensemble e = make_product_family(0.5);
    const ComplexMatrix g = gram_matrix(e.states());
    const ComplexMatrix z = Eigen::Map<const Eigen::VectorXd>(e.priors().data(), 6).cast<Complex>().asDiagonal();
    const auto cert = check_dual_certificate(g, e.priors(), z, std::vector<double>(6, 0.0));
    EXPECT_TRUE(cert.feasible);
    EXPECT_NEAR(cert.value, 1.0, 1e-12);
}

TEST(Certificate, TamperedZIsRejected) {
    const Ensemble e = make_product_family(0.5);
    const ComplexMatrix g = gram_matrix(e.states());
    const UdSolution sol = solve_ud_primal(g, e.priors());
    ComplexMatrix tampered = sol.dualZ;
    tampered(0, 0) -= 0.1;
    const auto cert = check_dual_certificate(g, e.priors(), tampered, sol.dualz);
    EXPECT_FALSE(cert.feasible);
    EXPECT_FALSE(cert.violations.empty());
    EXPECT_GT(cert.linearResidual, 0.05);
    EXPECT_THROW(check_dual_certificate(g, e.priors(), tampered, std::vector<double>(3, 0.0)), ValidationError);
}

TEST(Equiprobable, IdentityAndSpectrum) {
    EXPECT_NEAR(equiprobable_optimum(ComplexMatrix::Identity(4, 4)), 1.0, 1e-15);
    EXPECT_NEAR(equiprobable_optimum(gram_matrix(make_product_family(0.5).states())), 0.25, 1e-12);
}

TEST(Equiprobable, SymmetrizationGivesScalarFeasiblePoint) {
    const Ensemble e = make_product_family(0.5);
    const ComplexMatrix g = gram_matrix(e.states());
    std::vector<double> priors{0.1, 0.1, 0.2, 0.2, 0.2, 0.2};
    const UdSolution sol = solve_ud_primal(g, priors);
    const auto report = symmetrize_solution(g, sol.efficiencies);
    EXPECT_TRUE(report.scalar);
    EXPECT_TRUE(report.feasible);
    const double mean = std::accumulate(sol.efficiencies.begin(), sol.efficiencies.end(), 0.0) / 6.0;
    EXPECT_NEAR(report.commonEfficiency, mean, 1e-15);
    EXPECT_LE(report.commonEfficiency, equiprobable_optimum(g) + 1e-8);
    EXPECT_THROW(symmetrize_solution(ComplexMatrix::Identity(9, 9), std::vector<double>(9, 0.1)), ValidationError);
}

TEST(Protocol, ExactMatchesProductOfRounds) {
    for (double s : {1e-9, 0.1, 0.5, 0.9}) {
        const ProtocolResult r = sequential_protocol_exact(s);
        EXPECT_NEAR(r.perRoundEfficiency, 1 - s, 1e-12);
        EXPECT_NEAR(r.exactSuccess, r.perRoundEfficiency * r.perRoundEfficiency, 1e-12);
        EXPECT_LE(r.exactWrong, 1e-12);
    }
    EXPECT_NEAR(sequential_protocol_exact(0.5).exactSuccess, 0.25, 1e-12);
    EXPECT_NEAR(sequential_protocol_exact(1e-9).exactSuccess, 1.0, 1e-8);
}

TEST(Protocol, AttainsGlobalOptimum) {
    for (double s : {0.2, 0.5, 0.8}) {
        const Ensemble e = make_product_family(s);
        const UdSolution sol = solve_ud_primal(gram_matrix(e.states()), e.priors());
        EXPECT_NEAR(sequential_protocol_exact(s).exactSuccess, sol.value, 1e-6);
    }
}

TEST(MonteCarlo, WithinFourSigmaAndUnambiguous) {
    const ProtocolResult r = monte_carlo_protocol(0.5, 100000, 7);
    ASSERT_TRUE(r.empiricalSuccess.has_value());
    EXPECT_GE(*r.empiricalSuccess, 0.2445);
    EXPECT_LE(*r.empiricalSuccess, 0.2555);
    EXPECT_EQ(r.wrongConclusive, 0u);
    EXPECT_NEAR(*r.standardError, 0.00137, 1e-4);
}

TEST(MonteCarlo, DeterministicPerSeed) {
    const ProtocolResult a = monte_carlo_protocol(0.3, 50000, 99);
    const ProtocolResult b = monte_carlo_protocol(0.3, 50000, 99);
    const ProtocolResult c = monte_carlo_protocol(0.3, 50000, 100);
    EXPECT_EQ(*a.empiricalSuccess, *b.empiricalSuccess);
    EXPECT_NE(*a.empiricalSuccess, *c.empiricalSuccess);
    const ProtocolResult one = monte_carlo_protocol(0.5, 1, 3);
    EXPECT_TRUE(*one.empiricalSuccess == 0.0 || *one.empiricalSuccess == 1.0);
    EXPECT_EQ(*one.empiricalSuccess, *monte_carlo_protocol(0.5, 1, 3).empiricalSuccess);
    EXPECT_THROW(monte_carlo_protocol(0.5, 0, 1), ValidationError);
}

TEST(MonteCarlo, IndependentOfThreadCount) {
    setenv("NWE_DISC_THREADS", "1", 1);
    const double single = *monte_carlo_protocol(0.4, 70000, 5).empiricalSuccess;
    setenv("NWE_DISC_THREADS", "4", 1);
    const double multi = *monte_carlo_protocol(0.4, 70000, 5).empiricalSuccess;
    unsetenv("NWE_DISC_THREADS");
    EXPECT_EQ(single, multi);
}
