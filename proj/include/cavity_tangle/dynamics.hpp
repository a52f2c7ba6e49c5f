#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "cavity_tangle/model.hpp"

namespace cavity_tangle {

inline constexpr double kHermitianTolerance = 1e-10;

/// Spectral form of a sector Hamiltonian: H = V diag(energies) V^dagger.
struct Propagator {
    int n = 0;
    RVector energies;  // ascending
    CMatrix vectors;   // columns are eigenvectors
};

inline Propagator diagonalize(const CMatrix& h, int n = 0) {
    if (h.rows() != h.cols()) throw InvalidInput("diagonalize: matrix is not square");
    if (!h.allFinite()) throw InvalidInput("diagonalize: matrix has non-finite entries");
    if (max_hermitian_defect(h) > kHermitianTolerance) throw InvalidInput("diagonalize: matrix is not Hermitian");
    const CMatrix sym = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    if (solver.info() != Eigen::Success) throw InvalidInput("diagonalize: eigensolver did not converge");
    return {n, solver.eigenvalues(), solver.eigenvectors()};
}

inline Propagator diagonalize_sector(const ModelParams& params, int n) {
    return diagonalize(build_hamiltonian(params, n), n);
}

/// V exp(-i diag(E) t) V^dagger v0.
inline SectorVector evolve(const Propagator& p, const SectorVector& v0, double t) {
    if (v0.n != p.n || v0.amplitudes.size() != p.vectors.rows())
        throw InvalidInput("evolve: state and propagator belong to different sectors");
    CVector coeffs = p.vectors.adjoint() * v0.amplitudes;
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) coeffs(i) *= std::polar(1.0, -p.energies(i) * t);
    return {v0.n, p.vectors * coeffs};
}

/// Three-qubit density matrix in sector order (000,001,010,100,110,101,011,111).
struct QubitDensity {
    CMatrix matrix = CMatrix::Zero(kQubitDim, kQubitDim);

    /// Same operator with rows/columns indexed by the qubit label.
    CMatrix computational() const {
        CMatrix out(kQubitDim, kQubitDim);
        for (int r = 0; r < kQubitDim; ++r)
            for (int c = 0; c < kQubitDim; ++c) out(kSectorOrder[std::size_t(r)], kSectorOrder[std::size_t(c)]) = matrix(r, c);
        return out;
    }

    static QubitDensity from_computational(const CMatrix& m) {
        if (m.rows() != kQubitDim || m.cols() != kQubitDim) throw InvalidInput("qubit density must be 8x8");
        QubitDensity d;
        for (int r = 0; r < kQubitDim; ++r)
            for (int c = 0; c < kQubitDim; ++c) d.matrix(r, c) = m(kSectorOrder[std::size_t(r)], kSectorOrder[std::size_t(c)]);
        return d;
    }
};

/// Trace over the oscillator of a single-sector pure state. Two qubit labels
/// only share a photon number when they have the same excitation count, so
/// every other entry is exactly zero.
inline QubitDensity partial_trace_oscillator(const SectorVector& v) {
    const SectorBasis basis = build_sector_basis(v.n);
    if (v.amplitudes.size() != basis.size()) throw InvalidInput("partial trace: amplitude count does not match sector");
    QubitDensity rho;
    for (int a = 0; a < basis.size(); ++a) {
        for (int b = 0; b < basis.size(); ++b) {
            if (basis.states[std::size_t(a)].photons != basis.states[std::size_t(b)].photons) continue;
            rho.matrix(a, b) = v.amplitudes(a) * std::conj(v.amplitudes(b));
        }
    }
    return rho;
}

/// Same for a density matrix supported on one sector.
inline QubitDensity partial_trace_oscillator(const CMatrix& sector_rho, int n) {
    const SectorBasis basis = build_sector_basis(n);
    if (sector_rho.rows() != basis.size() || sector_rho.cols() != basis.size())
        throw InvalidInput("partial trace: density size does not match sector");
    QubitDensity rho;
    for (int a = 0; a < basis.size(); ++a)
        for (int b = 0; b < basis.size(); ++b)
            if (basis.states[std::size_t(a)].photons == basis.states[std::size_t(b)].photons) rho.matrix(a, b) = sector_rho(a, b);
    return rho;
}

/// tr(rho^2); rho is assumed Hermitian.
inline double purity(const QubitDensity& rho) { return rho.matrix.cwiseAbs2().sum(); }

/// Hermiticity, unit trace, and eigenvalue floor.
inline void validate_density(const CMatrix& rho, double tolerance = 1e-10, double eigen_floor = -1e-9) {
    if (rho.rows() != rho.cols() || rho.rows() == 0) throw InvalidInput("density matrix must be square and nonempty");
    if (!rho.allFinite()) throw InvalidInput("density matrix has non-finite entries");
    if (max_hermitian_defect(rho) > tolerance) throw InvalidInput("density matrix is not Hermitian");
    if (std::abs(rho.trace() - 1.0) > tolerance) throw InvalidInput("density matrix does not have unit trace");
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < eigen_floor) throw InvalidInput("density matrix has a negative eigenvalue");
}

}  // namespace cavity_tangle
