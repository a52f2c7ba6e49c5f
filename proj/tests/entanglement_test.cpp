#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "test_support.hpp"

namespace ct = cavity_tangle;
using ct::CMatrix;
using ct::CVector;
using ct::Complex;
using namespace ct::testing;

namespace {

CVector ghz() {
    CVector v = CVector::Zero(8);
    v(0) = v(7) = 1.0 / std::sqrt(2.0);
    return v;
}

// Wootters concurrence of a two-qubit density matrix.
double wootters(const CMatrix& rho) {
    CMatrix sy(2, 2);
    sy << 0, Complex(0, -1), Complex(0, 1), 0;
    const CMatrix yy = kron(sy, sy);
    const CMatrix tilde = yy * rho.conjugate() * yy;
    const Eigen::ComplexEigenSolver<CMatrix> es(rho * tilde);
    std::vector<double> l;
    for (Eigen::Index i = 0; i < 4; ++i) l.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i).real())));
    std::sort(l.rbegin(), l.rend());
    return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

CMatrix w_mixture() { return 0.5 * projector(w_state()) + 0.5 * projector(basis_state(8, 0)); }

}  // namespace

TEST(SubsetPurity, Examples) {
    const CVector product = basis_state(8, 0);
    for (unsigned mask = 1; mask < 7; ++mask) EXPECT_NEAR(ct::subset_purity(product, mask), 1.0, 1e-15);
    for (int q = 1; q <= 3; ++q) EXPECT_NEAR(ct::subset_purity(w_state(), ct::subset_mask({q})), 5.0 / 9.0, 1e-14);
    for (unsigned mask = 1; mask < 7; ++mask) EXPECT_NEAR(ct::subset_purity(ghz(), mask), 0.5, 1e-14);
}

TEST(SubsetPurity, ComplementsAgreeAndSwapForm) {
    Rng rng(31);
    for (int draw = 0; draw < 20; ++draw) {
        const CVector psi = haar_state(rng, 8);
        for (unsigned mask = 1; mask < 7; ++mask) {
            const double p = ct::subset_purity(psi, mask);
            EXPECT_NEAR(p, ct::subset_purity(psi, 7u ^ mask), 1e-12);
            EXPECT_NEAR(p, ct::swap_contraction(psi, psi, psi, psi, mask).real(), 1e-12);
            EXPECT_LE(p, 1.0 + 1e-12);
            EXPECT_GE(p, 0.25 - 1e-12);
        }
    }
}

TEST(SubsetPurity, RejectsImproperSubsets) {
    EXPECT_THROW(ct::subset_purity(w_state(), 0), ct::InvalidInput);
    EXPECT_THROW(ct::subset_purity(w_state(), 7), ct::InvalidInput);
    EXPECT_THROW(ct::subset_purity(w_state(), 8), ct::InvalidInput);
    EXPECT_THROW(ct::subset_mask({0}), ct::InvalidInput);
}

TEST(ConcurrencePure, Examples) {
    EXPECT_NEAR(ct::concurrence_pure(w_state()), 2.0 / std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(ct::concurrence_pure(ghz()), std::sqrt(1.5), 1e-12);
    EXPECT_NEAR(ct::concurrence_pure(basis_state(8, 0)), 0.0, 1e-12);
    const auto bell = ct::build_initial_state({ct::StateFamily::phi, std::numbers::pi / 4, 1});
    EXPECT_NEAR(ct::concurrence_pure(ct::qubit_state(bell)), 1.0, 1e-12);
}

TEST(ConcurrencePure, InputErrors) {
    EXPECT_THROW(ct::concurrence_pure(2.0 * w_state()), ct::InvalidInput);
    EXPECT_THROW(ct::concurrence_pure(CVector::Ones(6) / std::sqrt(6.0)), ct::InvalidInput);
    EXPECT_THROW(ct::concurrence_pure(basis_state(128, 0)), ct::InvalidInput);
}

TEST(FamilyFormulas, Examples) {
    EXPECT_NEAR(ct::concurrence_family_phi(std::numbers::pi / 4), 1.0, 1e-15);
    EXPECT_NEAR(ct::concurrence_family_phi(0.0), 0.0, 1e-15);
    EXPECT_NEAR(ct::concurrence_family_phi(std::numbers::pi / 3), std::sqrt(3.0) / 2, 1e-15);
    EXPECT_NEAR(ct::concurrence_family_psi(ct::kWAlpha), 2.0 / std::sqrt(3.0), 1e-15);
    EXPECT_NEAR(ct::concurrence_family_psi(0.0), 0.0, 1e-15);
    EXPECT_NEAR(ct::concurrence_family_psi(std::numbers::pi / 2), 1.0, 1e-15);
}

TEST(FamilyFormulas, MatchPureConcurrence) {
    for (int i = 0; i < 50; ++i) {
        const double alpha = (std::numbers::pi / 2) * i / 49.0;
        for (int n : {1, 3}) {
            const auto phi = ct::qubit_state(ct::build_initial_state({ct::StateFamily::phi, alpha, n}));
            const auto psi = ct::qubit_state(ct::build_initial_state({ct::StateFamily::psi, alpha, n}));
            EXPECT_NEAR(ct::concurrence_pure(phi), ct::concurrence_family_phi(alpha), 1e-12);
            EXPECT_NEAR(ct::concurrence_pure(psi), ct::concurrence_family_psi(alpha), 1e-12);
        }
    }
    // alpha = pi/2 on psi is a Bell pair between qubits 1 and 3.
    const CVector bell13 = ct::qubit_state(ct::build_initial_state({ct::StateFamily::psi, std::numbers::pi / 2, 1}));
    EXPECT_NEAR(std::abs(bell13(0b001)), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(std::abs(bell13(0b100)), 1 / std::sqrt(2.0), 1e-15);
}

TEST(QubitState, RejectsOscillatorEntanglement) {
    ct::SectorVector v{1, CVector::Zero(4)};
    v.amplitudes(0) = v.amplitudes(1) = 1 / std::sqrt(2.0);
    EXPECT_THROW(ct::qubit_state(v), ct::InvalidInput);
}

TEST(ConcurrenceOperator, MatchesReducedMatrixRoute) {
    Rng rng(41);
    for (int qubits = 2; qubits <= 5; ++qubits)
        for (int draw = 0; draw < 25; ++draw) {
            const CVector psi = haar_state(rng, 1 << qubits);
            const double c = ct::concurrence_pure(psi);
            EXPECT_NEAR(ct::concurrence_operator_element(psi, psi, psi, psi).real(), c * c, 1e-10);
        }
}

TEST(ConcurrenceOperator, HermitianAndCopySymmetric) {
    Rng rng(43);
    for (int draw = 0; draw < 10; ++draw) {
        const CVector a = haar_state(rng, 8), b = haar_state(rng, 8), c = haar_state(rng, 8), d = haar_state(rng, 8);
        const Complex abcd = ct::concurrence_operator_element(a, b, c, d);
        EXPECT_LT(std::abs(abcd - std::conj(ct::concurrence_operator_element(c, d, a, b))), 1e-12);
        EXPECT_LT(std::abs(abcd - ct::concurrence_operator_element(b, a, d, c)), 1e-12);
    }
}

TEST(ConcurrenceOperator, PositiveOnTwoCopySpace) {
    // <Phi|A|Phi> >= 0 for Phi = sum_k a_k (x) b_k; A is a sum of projectors.
    Rng rng(47);
    for (int draw = 0; draw < 20; ++draw) {
        std::vector<CVector> a, b;
        for (int k = 0; k < 3; ++k) {
            a.push_back(ginibre(rng, 8, 1).col(0));
            b.push_back(ginibre(rng, 8, 1).col(0));
        }
        Complex total = 0.0;
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) total += ct::concurrence_operator_element(a[k], b[k], a[l], b[l]);
        EXPECT_GE(total.real(), -1e-9);
        EXPECT_LT(std::abs(total.imag()), 1e-10);
    }
}

TEST(ScalingProperty, AppendedProductQubit) {
    Rng rng(53);
    for (int draw = 0; draw < 20; ++draw) {
        const CVector pair = haar_state(rng, 4);
        const CVector single = haar_state(rng, 2);
        // Qubit 3 in the highest bit.
        const CVector three = kron(single, pair);
        EXPECT_NEAR(ct::concurrence_pure(three), ct::concurrence_pure(pair), 1e-12);
        EXPECT_NEAR(ct::concurrence_pure(pair), 2.0 * std::abs(pair(0) * pair(3) - pair(1) * pair(2)), 1e-12);
    }
}

TEST(Quasipure, Examples) {
    EXPECT_NEAR(ct::concurrence_quasipure(CMatrix(projector(w_state()))), 2.0 / std::sqrt(3.0), 1e-10);
    EXPECT_NEAR(ct::concurrence_quasipure(CMatrix(projector(basis_state(8, 5)))), 0.0, 1e-12);
    EXPECT_NEAR(ct::concurrence_quasipure(w_mixture()), 0.577350269189626, 1e-9);
    EXPECT_THROW(ct::concurrence_quasipure(CMatrix(CMatrix::Identity(8, 8))), ct::InvalidInput);
}

TEST(Quasipure, PureStateCoincidence) {
    Rng rng(59);
    for (int draw = 0; draw < 200; ++draw) {
        const CVector psi = haar_state(rng, 8);
        EXPECT_NEAR(ct::concurrence_quasipure(CMatrix(projector(psi))), ct::concurrence_pure(psi), 1e-8);
    }
}

TEST(Quasipure, LocalUnitaryInvariance) {
    Rng rng(61);
    for (int draw = 0; draw < 30; ++draw) {
        const CMatrix u = local_unitary(rng, 3);
        const CVector psi = haar_state(rng, 8);
        EXPECT_NEAR(ct::concurrence_pure(u * psi), ct::concurrence_pure(psi), 1e-8);
        const CMatrix rho = random_density(rng, 8, 1 + draw % 4);
        EXPECT_NEAR(ct::concurrence_quasipure(CMatrix(u * rho * u.adjoint())), ct::concurrence_quasipure(rho), 1e-8);
    }
}

TEST(Quasipure, TauIsSymmetricWithNonnegativeValue) {
    Rng rng(67);
    for (int draw = 0; draw < 30; ++draw) {
        auto s = ct::spectrum(random_density(rng, 8, 1 + draw % 4));
        ct::align_dominant_component(s);
        const CMatrix tau = ct::quasipure_tau(s);
        if (tau.size() == 0) continue;
        EXPECT_LT((tau - tau.transpose()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_GT(tau(0, 0).real(), 0.0);
        EXPECT_LT(std::abs(tau(0, 0).imag()), 1e-12);
    }
}

TEST(Quasipure, DegenerateWeightsGiveBasisIndependentValue) {
    // Equal weights: the eigensolver picks an arbitrary basis of the degenerate block.
    Rng rng(71);
    const CMatrix rho = w_mixture();
    const double reference = ct::concurrence_quasipure(rho);
    for (int draw = 0; draw < 5; ++draw) {
        const CMatrix u = local_unitary(rng, 3);
        EXPECT_NEAR(ct::concurrence_quasipure(CMatrix(u * rho * u.adjoint())), reference, 1e-8);
    }
}

TEST(Quasipure, ExactOnTwoQubits) {
    Rng rng(73);
    for (int draw = 0; draw < 50; ++draw) {
        const CMatrix rho = random_density(rng, 4, 1 + draw % 4);
        EXPECT_NEAR(ct::concurrence_quasipure(rho), wootters(rho), 1e-7);
    }
}

TEST(UpperBound, Examples) {
    const ct::UpperBoundOptions opt{2, 100, 0};
    EXPECT_NEAR(ct::concurrence_upper_bound(CMatrix(projector(w_state())), opt), 2.0 / std::sqrt(3.0), 1e-10);
    const CMatrix classical = 0.5 * (projector(basis_state(8, 0)) + projector(basis_state(8, 7)));
    EXPECT_NEAR(ct::concurrence_upper_bound(classical, opt), 0.0, 1e-6);
    const double upper = ct::concurrence_upper_bound(w_mixture());
    EXPECT_GE(upper, ct::concurrence_quasipure(w_mixture()) - 1e-6);
    EXPECT_NEAR(upper, 0.5773502691896252, 1e-6);
}

TEST(UpperBound, DeterministicForFixedSeed) {
    Rng rng(79);
    const CMatrix rho = random_density(rng, 8, 3);
    const ct::UpperBoundOptions opt{3, 50, 17};
    EXPECT_EQ(ct::concurrence_upper_bound(rho, opt), ct::concurrence_upper_bound(rho, opt));
}

TEST(UpperBound, RejectsEmptyBudget) {
    EXPECT_THROW(ct::concurrence_upper_bound(w_mixture(), {0, 10, 0}), ct::InvalidParameter);
    EXPECT_THROW(ct::concurrence_upper_bound(w_mixture(), {1, 0, 0}), ct::InvalidParameter);
}

TEST(UpperBound, AboveWoottersOnTwoQubits) {
    Rng rng(83);
    for (int draw = 0; draw < 20; ++draw) {
        const CMatrix rho = random_density(rng, 4, 2);
        EXPECT_GE(ct::concurrence_upper_bound(rho, {4, 200, 0}), wootters(rho) - 1e-6);
    }
}

TEST(UpperBound, Sandwich) {
    Rng rng(89);
    for (int draw = 0; draw < 10; ++draw) {
        const CMatrix rho = random_density(rng, 8, 1 + draw % 4);
        EXPECT_LE(ct::concurrence_quasipure(rho), ct::concurrence_upper_bound(rho, {2, 100, 0}) + 1e-6);
    }
}
