#pragma once

// Multipartite concurrence of qubit registers.
//
// Pure states are amplitude vectors of length 2^N indexed by the qubit label
// (qubit j in bit j-1). Subsets of qubits are bitmasks over the same bits.
// For a pure state
//   C(psi)^2 = 2^(2-N) * ((2^N - 2) - sum_S tr(rho_S^2))
// with S over the nonempty proper subsets. Equivalently C^2 = <psi psi|A|psi psi>
// where A = 2^(2-N) sum_S (1 - SWAP_S) acts on two copies.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cavity_tangle/dynamics.hpp"

namespace cavity_tangle {

inline constexpr int kMaxRegisterQubits = 6;
inline constexpr double kNormTolerance = 1e-10;
inline constexpr double kRankTolerance = 1e-12;

/// Number of qubits of a register of dimension `dim`; throws unless dim = 2^N, 1 <= N <= 6.
inline int register_qubits(Eigen::Index dim) {
    if (dim < 2 || !std::has_single_bit(static_cast<std::uint64_t>(dim)))
        throw InvalidInput("register dimension must be a power of two >= 2");
    const int n = std::countr_zero(static_cast<std::uint64_t>(dim));
    if (n > kMaxRegisterQubits) throw InvalidInput("register too large");
    return n;
}

/// Bitmask for a list of 1-based qubit indices.
inline unsigned subset_mask(std::initializer_list<int> qubits) {
    unsigned mask = 0;
    for (int q : qubits) {
        if (q < 1 || q > kMaxRegisterQubits) throw InvalidInput("qubit index out of range");
        mask |= 1u << (q - 1);
    }
    return mask;
}

namespace detail {

// Packs the bits of `index` selected by `mask` into the low bits.
constexpr unsigned gather_bits(unsigned index, unsigned mask) {
    unsigned out = 0, pos = 0;
    for (unsigned bit = 0; mask >> bit; ++bit) {
        if ((mask >> bit) & 1u) {
            out |= ((index >> bit) & 1u) << pos;
            ++pos;
        }
    }
    return out;
}

// tr(rho_S^2) for a possibly unnormalized vector. The vector is reshaped into
// M[s][e] (subset x complement) and the smaller side of M M^dagger is summed;
// both sides have the same purity.
inline double reduced_purity(std::span<const Complex> x, unsigned mask) {
    const auto dim = static_cast<unsigned>(x.size());
    const unsigned full = dim - 1;
    const unsigned small = std::popcount(mask) * 2 <= std::popcount(full) ? mask : (full & ~mask);
    const unsigned rest = full & ~small;
    const unsigned sub = 1u << std::popcount(small), env = dim / sub;
    std::array<Complex, 64> m;
    for (unsigned i = 0; i < dim; ++i) m[gather_bits(i, small) * env + gather_bits(i, rest)] = x[i];
    double sum = 0.0;
    for (unsigned a = 0; a < sub; ++a)
        for (unsigned b = a; b < sub; ++b) {
            Complex r = 0.0;
            for (unsigned e = 0; e < env; ++e) r += m[a * env + e] * std::conj(m[b * env + e]);
            sum += (a == b ? 1.0 : 2.0) * std::norm(r);
        }
    return sum;
}

// <x x|A|x x> for an unnormalized x; equals ||x||^4 C(x/||x||)^2.
inline double concurrence_squared_unnormalized(std::span<const Complex> x) {
    const auto dim = static_cast<unsigned>(x.size());
    const unsigned full = dim - 1;
    double norm2 = 0.0;
    for (const Complex& a : x) norm2 += std::norm(a);
    double total = 0.0;
    // S and its complement share a purity; visit each pair once.
    for (unsigned mask = 1; mask < (full & ~mask); ++mask) total += 2.0 * reduced_purity(x, mask);
    const double value = (double(dim) - 2.0) * norm2 * norm2 - total;
    return std::max(0.0, value * 4.0 / double(dim));
}

inline std::span<const Complex> as_span(const CVector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

}  // namespace detail

/// Purity of the reduced state on the qubits in `mask`.
inline double subset_purity(const CVector& state, unsigned mask) {
    const int n = register_qubits(state.size());
    const unsigned full = (1u << n) - 1;
    if (mask == 0 || (mask & ~full) != 0 || mask == full)
        throw InvalidInput("subset must be a nonempty proper subset of the register");
    return detail::reduced_purity(detail::as_span(state), mask);
}

inline double concurrence_pure(const CVector& state) {
    register_qubits(state.size());
    if (std::abs(state.norm() - 1.0) > kNormTolerance) throw InvalidInput("concurrence_pure: state is not normalized");
    return std::sqrt(detail::concurrence_squared_unnormalized(detail::as_span(state)));
}

/// <a b|SWAP_S|c d>, where SWAP_S exchanges the subset-S qubits of the two copies.
inline Complex swap_contraction(const CVector& a, const CVector& b, const CVector& c, const CVector& d, unsigned mask) {
    const auto dim = static_cast<unsigned>(a.size());
    Complex sum = 0.0;
    for (unsigned i = 0; i < dim; ++i) {
        if (a(i) == 0.0) continue;
        for (unsigned j = 0; j < dim; ++j) {
            const unsigned ip = (i & ~mask) | (j & mask);
            const unsigned jp = (j & ~mask) | (i & mask);
            sum += std::conj(a(i)) * std::conj(b(j)) * c(ip) * d(jp);
        }
    }
    return sum;
}

/// <a b|A|c d> by index-exchange contractions; the 4^N x 4^N operator is never formed.
inline Complex concurrence_operator_element(const CVector& a, const CVector& b, const CVector& c, const CVector& d) {
    const int n = register_qubits(a.size());
    if (b.size() != a.size() || c.size() != a.size() || d.size() != a.size())
        throw InvalidInput("concurrence operator: vectors differ in size");
    const unsigned dim = 1u << n;
    const Complex overlap = a.dot(c) * b.dot(d);  // Eigen's dot conjugates the left factor
    Complex sum = 0.0;
    for (unsigned mask = 1; mask + 1 < dim; ++mask) sum += overlap - swap_contraction(a, b, c, d, mask);
    return sum * (4.0 / double(dim));
}

inline double concurrence_family_phi(double alpha) { return std::sin(2.0 * alpha); }

inline double concurrence_family_psi(double alpha) {
    return std::sin(alpha) / std::numbers::sqrt2 * std::sqrt(5.0 + 3.0 * std::cos(2.0 * alpha));
}

/// Qubit part of a sector state supported on a single photon number, in
/// computational (label) order.
inline CVector qubit_state(const SectorVector& v) {
    const SectorBasis basis = build_sector_basis(v.n);
    if (v.amplitudes.size() != basis.size()) throw InvalidInput("qubit_state: amplitude count does not match sector");
    int photons = -1;
    CVector out = CVector::Zero(kQubitDim);
    for (int i = 0; i < basis.size(); ++i) {
        if (std::abs(v.amplitudes(i)) <= 1e-14) continue;
        const auto& s = basis.states[std::size_t(i)];
        if (photons >= 0 && s.photons != photons) throw InvalidInput("qubit_state: state is entangled with the oscillator");
        photons = s.photons;
        out(s.qubits) = v.amplitudes(i);
    }
    return out;
}

/// Eigen-decomposition of rho with weights descending; components below the
/// rank tolerance are dropped.
struct RhoSpectrum {
    RVector weights;
    CMatrix vectors;   // orthonormal columns
    CMatrix weighted;  // columns sqrt(weight_i) * vector_i

    int rank() const { return static_cast<int>(weights.size()); }
};

inline RhoSpectrum spectrum(const CMatrix& rho) {
    validate_density(rho);
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (rho + rho.adjoint()));
    const RVector& evals = solver.eigenvalues();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = evals.size() - 1; i >= 0; --i)
        if (evals(i) > kRankTolerance) keep.push_back(i);
    RhoSpectrum s;
    const auto r = static_cast<Eigen::Index>(keep.size());
    s.weights.resize(r);
    s.vectors.resize(rho.rows(), r);
    s.weighted.resize(rho.rows(), r);
    for (Eigen::Index k = 0; k < r; ++k) {
        s.weights(k) = evals(keep[std::size_t(k)]);
        s.vectors.col(k) = solver.eigenvectors().col(keep[std::size_t(k)]);
        s.weighted.col(k) = std::sqrt(s.weights(k)) * s.vectors.col(k);
    }
    return s;
}

inline constexpr double kDegeneracyTolerance = 1e-10;

/// When the largest weight is degenerate the dominant eigenvector is not
/// determined by rho. Rotates the degenerate block so that its first vector
/// maximizes <chi chi|A|chi chi> (shifted power iteration from every basis
/// vector, best result kept), which makes the quasi-pure value a function of
/// rho alone.
inline void align_dominant_component(RhoSpectrum& s) {
    int m = 1;
    while (m < s.rank() && s.weights(0) - s.weights(m) <= kDegeneracyTolerance) ++m;
    if (m == 1) return;
    const CMatrix basis = s.vectors.leftCols(m);
    const auto value = [&](const CVector& c) {
        const CVector v = basis * c;
        return concurrence_operator_element(v, v, v, v).real();
    };
    constexpr double shift = 8.0;  // exceeds the largest eigenvalue of A for N <= 6
    CVector best = CVector::Unit(m, 0);
    double best_value = value(best);
    for (int start = 0; start < m; ++start) {
        CVector c = CVector::Unit(m, start);
        for (int it = 0; it < 500; ++it) {
            const CVector v = basis * c;
            CVector grad(m);
            for (int i = 0; i < m; ++i) grad(i) = concurrence_operator_element(basis.col(i), v, v, v);
            CVector next = grad + shift * c;
            next.normalize();
            const bool done = (next - c).norm() < 1e-13;
            c = next;
            if (done) break;
        }
        if (const double f = value(c); f > best_value + 1e-14) {
            best_value = f;
            best = c;
        }
    }
    CMatrix frame(m, m + 1);
    frame << best, CMatrix::Identity(m, m);
    const CMatrix q = Eigen::HouseholderQR<CMatrix>(frame).householderQ() * CMatrix::Identity(m, m);
    s.vectors.leftCols(m) = basis * q;
    for (int k = 0; k < m; ++k) s.weighted.col(k) = std::sqrt(s.weights(k)) * s.vectors.col(k);
}

/// Symmetric matrix tau_jk = <chi_j chi_k|A|chi_1 chi_1> / sqrt(<chi_1 chi_1|A|chi_1 chi_1>)
/// of the quasi-pure approximation. Empty when the dominant component is separable.
inline CMatrix quasipure_tau(const RhoSpectrum& s) {
    const int r = s.rank();
    if (r == 0) return {};
    const CVector chi1 = s.weighted.col(0);
    const double a11 = concurrence_operator_element(chi1, chi1, chi1, chi1).real();
    if (a11 <= 1e-14) return {};
    const double scale = 1.0 / std::sqrt(a11);
    CMatrix tau(r, r);
    for (int j = 0; j < r; ++j)
        for (int k = j; k < r; ++k) {
            tau(j, k) = scale * concurrence_operator_element(s.weighted.col(j), s.weighted.col(k), chi1, chi1);
            tau(k, j) = tau(j, k);
        }
    return tau;
}

/// Lower bound on the convex-roof concurrence: max(0, l1 - sum_{i>1} l_i) with
/// l the singular values of tau. Exact for pure states. Takes rho in
/// computational order for any register size.
inline double concurrence_quasipure(const CMatrix& rho) {
    register_qubits(rho.rows());
    RhoSpectrum s = spectrum(rho);
    align_dominant_component(s);
    const CMatrix tau = quasipure_tau(s);
    if (tau.size() == 0) return 0.0;
    const RVector sv = Eigen::JacobiSVD<CMatrix>(tau).singularValues();
    return std::max(0.0, sv(0) - (sv.sum() - sv(0)));
}

inline double concurrence_quasipure(const QubitDensity& rho) { return concurrence_quasipure(rho.computational()); }

struct UpperBoundOptions {
    int restarts = 8;
    int iterations = 200;
    std::uint64_t seed = 0;
    int extra_columns = 2;  // decomposition size = rank + extra_columns
};

namespace detail {

// Average pure-state concurrence of the decomposition generated by the
// column-orthonormalized mixing array Z (K x r, stored as 2*K*r reals).
class DecompositionObjective {
public:
    explicit DecompositionObjective(const CMatrix& weighted, int size)
        : chi_(weighted), k_(size), r_(static_cast<int>(weighted.cols())), dim_(static_cast<int>(weighted.rows())) {}

    int parameters() const { return 2 * k_ * r_; }

    double operator()(std::span<const double> x) const {
        CMatrix u(k_, r_);
        for (int j = 0; j < r_; ++j)
            for (int i = 0; i < k_; ++i) u(i, j) = Complex(x[std::size_t(2 * (j * k_ + i))], x[std::size_t(2 * (j * k_ + i) + 1)]);
        // Modified Gram-Schmidt; the columns must stay independent.
        for (int j = 0; j < r_; ++j) {
            for (int p = 0; p < j; ++p) u.col(j) -= u.col(p).dot(u.col(j)) * u.col(p);
            const double nrm = u.col(j).norm();
            if (nrm < 1e-12) return std::numeric_limits<double>::infinity();
            u.col(j) /= nrm;
        }
        double total = 0.0;
        std::array<Complex, 64> psi{};
        for (int k = 0; k < k_; ++k) {
            for (int a = 0; a < dim_; ++a) {
                Complex acc = 0.0;
                for (int i = 0; i < r_; ++i) acc += u(k, i) * chi_(a, i);
                psi[std::size_t(a)] = acc;
            }
            total += std::sqrt(concurrence_squared_unnormalized({psi.data(), std::size_t(dim_)}));
        }
        return total;
    }

private:
    CMatrix chi_;
    int k_, r_, dim_;
};

}  // namespace detail

/// Upper bound on the convex-roof concurrence: the smallest average pure-state
/// concurrence found by random-restart gradient descent over decompositions
/// psi_k = sum_i U_ki chi_i. Restart 0 starts from the spectral decomposition.
/// Deterministic for fixed options.
inline double concurrence_upper_bound(const CMatrix& rho, const UpperBoundOptions& opt = {}) {
    if (opt.restarts <= 0 || opt.iterations <= 0) throw InvalidParameter("restarts and iterations must be positive");
    if (opt.extra_columns < 0) throw InvalidParameter("extra_columns must be nonnegative");
    register_qubits(rho.rows());
    const RhoSpectrum s = spectrum(rho);
    const int r = s.rank();
    const int k = r + opt.extra_columns;
    const detail::DecompositionObjective f(s.weighted, k);
    const auto np = static_cast<std::size_t>(f.parameters());

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal;
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> x(np), trial(np), grad(np);

    for (int restart = 0; restart < opt.restarts; ++restart) {
        if (restart == 0) {
            std::fill(x.begin(), x.end(), 0.0);
            for (int i = 0; i < r; ++i) x[std::size_t(2 * (i * k + i))] = 1.0;
        } else {
            for (double& v : x) v = normal(rng);
        }
        double fx = f(x);
        double step = 0.1;
        constexpr double h = 1e-6;
        for (int it = 0; it < opt.iterations && std::isfinite(fx); ++it) {
            double gnorm2 = 0.0;
            for (std::size_t p = 0; p < np; ++p) {
                const double saved = x[p];
                x[p] = saved + h;
                const double up = f(x);
                x[p] = saved - h;
                const double down = f(x);
                x[p] = saved;
                grad[p] = (std::isfinite(up) && std::isfinite(down)) ? (up - down) / (2 * h) : 0.0;
                gnorm2 += grad[p] * grad[p];
            }
            if (gnorm2 < 1e-20) break;
            bool accepted = false;
            while (step > 1e-12) {
                for (std::size_t p = 0; p < np; ++p) trial[p] = x[p] - step * grad[p];
                const double ft = f(trial);
                if (ft <= fx - 1e-4 * step * gnorm2) {
                    x.swap(trial);
                    fx = ft;
                    step *= 2.0;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if (!accepted) break;
        }
        best = std::min(best, fx);
    }
    return best;
}

inline double concurrence_upper_bound(const QubitDensity& rho, const UpperBoundOptions& opt = {}) {
    return concurrence_upper_bound(rho.computational(), opt);
}

}  // namespace cavity_tangle
