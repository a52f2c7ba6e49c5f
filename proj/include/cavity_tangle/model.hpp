#pragma once

// Three two-level atoms coupled to one cavity mode.
//
// Product states are labelled |m>|b> with m the photon number and b a 3-bit
// qubit label. The label is read as the printed string "b3 b2 b1": qubit j
// lives in bit (j-1), so "001" is qubit 1 excited. Within a fixed excitation
// sector the basis is ordered by excitation count of the qubits:
//   000, 001, 010, 100, 110, 101, 011, 111
// truncated to entries with a nonnegative photon number.

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "cavity_tangle/types.hpp"

namespace cavity_tangle {

inline constexpr int kQubits = 3;
inline constexpr int kQubitDim = 1 << kQubits;

/// Qubit labels in sector-basis order.
inline constexpr std::array<std::uint8_t, kQubitDim> kSectorOrder = {
    0b000, 0b001, 0b010, 0b100, 0b110, 0b101, 0b011, 0b111};

constexpr std::uint8_t qubit_mask(int qubit) { return static_cast<std::uint8_t>(1u << (qubit - 1)); }

/// How the pair sums over j != k are weighted.
///
///   ordered           dipole hop 4*kappa, Ising 2*J per unordered pair
///   unordered         dipole hop 2*kappa, Ising   J per unordered pair
///   dipole_unordered  dipole hop 2*kappa, Ising 2*J per unordered pair
enum class PairSumConvention { ordered, unordered, dipole_unordered };

inline double dipole_pair_weight(PairSumConvention c) {
    return c == PairSumConvention::ordered ? 4.0 : 2.0;
}

inline double ising_pair_weight(PairSumConvention c) {
    return c == PairSumConvention::unordered ? 1.0 : 2.0;
}

/// Index of the unordered pair {j,k} (1-based qubits) in the kappa/ising arrays:
/// {1,2} -> 0, {1,3} -> 1, {2,3} -> 2.
constexpr int pair_index(int j, int k) {
    if (j > k) std::swap(j, k);
    return j == 1 ? (k == 2 ? 0 : 1) : 2;
}

inline constexpr std::array<std::array<int, 2>, 3> kPairs = {{{1, 2}, {1, 3}, {2, 3}}};

struct ModelParams {
    std::array<double, 3> delta{};  // detunings, one per qubit
    std::array<double, 3> g{};      // cavity couplings, one per qubit
    std::array<double, 3> kappa{};  // dipole couplings, pairs {12, 13, 23}
    std::array<double, 3> ising{};  // Ising couplings, pairs {12, 13, 23}
    PairSumConvention pair_sum = PairSumConvention::dipole_unordered;

    void validate() const {
        auto check = [](const std::array<double, 3>& xs, const char* what) {
            for (double x : xs)
                if (!std::isfinite(x)) throw InvalidParameter(std::string("non-finite ") + what);
        };
        check(delta, "detuning");
        check(g, "cavity coupling");
        check(kappa, "dipole coupling");
        check(ising, "Ising coupling");
    }
};

inline ModelParams homogeneous_params(double kappa, double ising,
                                      PairSumConvention pair_sum = PairSumConvention::dipole_unordered) {
    if (!std::isfinite(kappa) || !std::isfinite(ising))
        throw InvalidParameter("homogeneous_params: non-finite coupling");
    ModelParams p;
    p.g = {1.0, 1.0, 1.0};
    p.kappa = {kappa, kappa, kappa};
    p.ising = {ising, ising, ising};
    p.pair_sum = pair_sum;
    return p;
}

/// Homogeneous model plus kappa*(s_-^(1) s_+^(2) + h.c.), folded into the
/// stored {1,2} dipole coefficient.
inline ModelParams quasi_homogeneous_params(double kappa, double ising,
                                            PairSumConvention pair_sum = PairSumConvention::dipole_unordered) {
    ModelParams p = homogeneous_params(kappa, ising, pair_sum);
    p.kappa[pair_index(1, 2)] = kappa * (1.0 + 1.0 / dipole_pair_weight(pair_sum));
    return p;
}

struct ExcitationSector {
    int n = 0;

    constexpr int dimension() const {
        if (n <= 0) return 1;
        if (n == 1) return 4;
        if (n == 2) return 7;
        return 8;
    }
};

struct BasisState {
    int photons = 0;
    std::uint8_t qubits = 0;

    friend bool operator==(const BasisState&, const BasisState&) = default;
};

/// Printed form of a qubit label, e.g. 0b001 -> "001".
inline std::string qubit_string(std::uint8_t label) {
    std::string s(kQubits, '0');
    for (int q = 1; q <= kQubits; ++q)
        if (label & qubit_mask(q)) s[static_cast<std::size_t>(kQubits - q)] = '1';
    return s;
}

struct SectorBasis {
    int n = 0;
    std::vector<BasisState> states;

    int size() const { return static_cast<int>(states.size()); }

    /// Position of a product state in the basis, or -1.
    int index_of(const BasisState& s) const {
        for (int i = 0; i < size(); ++i)
            if (states[static_cast<std::size_t>(i)] == s) return i;
        return -1;
    }
};

inline SectorBasis build_sector_basis(int n) {
    if (n < 0) throw InvalidParameter("excitation count must be nonnegative");
    SectorBasis basis{n, {}};
    for (std::uint8_t label : kSectorOrder) {
        const int photons = n - std::popcount(label);
        if (photons >= 0) basis.states.push_back({photons, label});
    }
    return basis;
}

struct SectorVector {
    int n = 0;
    CVector amplitudes;
};

namespace detail {

struct Transition {
    Complex amplitude;
    BasisState target;
};

// H|m,b> expanded on product states; the pure photon-number part of the
// oscillator is dropped (interaction picture).
inline std::vector<Transition> apply_hamiltonian(const ModelParams& p, const BasisState& s) {
    std::vector<Transition> out;
    const auto bit = [&](int q) { return (s.qubits & qubit_mask(q)) != 0; };

    double diag = 0.0;
    for (int q = 1; q <= kQubits; ++q) diag += 0.5 * p.delta[q - 1] * (bit(q) ? 1.0 : -1.0);

    const double wz = ising_pair_weight(p.pair_sum);
    for (const auto& [j, k] : kPairs) diag += wz * p.ising[pair_index(j, k)] * (bit(j) == bit(k) ? 1.0 : -1.0);
    out.push_back({diag, s});

    for (int q = 1; q <= kQubits; ++q) {
        const auto flipped = static_cast<std::uint8_t>(s.qubits ^ qubit_mask(q));
        if (!bit(q) && s.photons > 0)  // a sigma_+
            out.push_back({p.g[q - 1] * std::sqrt(double(s.photons)), {s.photons - 1, flipped}});
        if (bit(q))  // a^dagger sigma_-
            out.push_back({p.g[q - 1] * std::sqrt(double(s.photons + 1)), {s.photons + 1, flipped}});
    }

    const double wk = dipole_pair_weight(p.pair_sum);
    for (const auto& [j, k] : kPairs) {
        if (bit(j) == bit(k)) continue;
        const auto swapped = static_cast<std::uint8_t>(s.qubits ^ qubit_mask(j) ^ qubit_mask(k));
        out.push_back({wk * p.kappa[pair_index(j, k)], {s.photons, swapped}});
    }
    return out;
}

}  // namespace detail

/// Hamiltonian restricted to the n-excitation sector, in SectorBasis order.
inline CMatrix build_hamiltonian(const ModelParams& params, int n) {
    params.validate();
    const SectorBasis basis = build_sector_basis(n);
    const int d = basis.size();
    CMatrix h = CMatrix::Zero(d, d);
    for (int col = 0; col < d; ++col) {
        for (const auto& [amp, target] : detail::apply_hamiltonian(params, basis.states[std::size_t(col)])) {
            const int row = basis.index_of(target);
            if (row < 0) throw std::logic_error("Hamiltonian left the excitation sector");
            h(row, col) += amp;
        }
    }
    return h;
}

inline constexpr int kMaxFullPhotons = 255;

/// Product-space index of |m>|b> in the truncated full space.
constexpr int full_index(int photons, std::uint8_t qubits) { return photons * kQubitDim + qubits; }

/// Hamiltonian on (oscillator levels 0..n_max) x (3 qubits). Transitions that
/// would leave the truncated space are dropped.
inline CMatrix build_full_hamiltonian(const ModelParams& params, int n_max) {
    params.validate();
    if (n_max < 0) throw InvalidParameter("n_max must be nonnegative");
    if (n_max > kMaxFullPhotons)
        throw ResourceError("n_max exceeds the dense full-space cap of " + std::to_string(kMaxFullPhotons));
    const int dim = kQubitDim * (n_max + 1);
    CMatrix h = CMatrix::Zero(dim, dim);
    for (int m = 0; m <= n_max; ++m) {
        for (int b = 0; b < kQubitDim; ++b) {
            const BasisState s{m, static_cast<std::uint8_t>(b)};
            for (const auto& [amp, t] : detail::apply_hamiltonian(params, s)) {
                if (t.photons > n_max) continue;
                h(full_index(t.photons, t.qubits), full_index(m, s.qubits)) += amp;
            }
        }
    }
    return h;
}

inline CMatrix build_number_operator(int n_max) {
    if (n_max < 0) throw InvalidParameter("n_max must be nonnegative");
    if (n_max > kMaxFullPhotons) throw ResourceError("n_max exceeds the dense full-space cap");
    const int dim = kQubitDim * (n_max + 1);
    CMatrix op = CMatrix::Zero(dim, dim);
    for (int m = 0; m <= n_max; ++m)
        for (int b = 0; b < kQubitDim; ++b)
            op(full_index(m, std::uint8_t(b)), full_index(m, std::uint8_t(b))) = double(m + std::popcount(unsigned(b)));
    return op;
}

/// Sector block of a full-space operator, in SectorBasis order.
inline CMatrix extract_sector_block(const CMatrix& full, int n) {
    const SectorBasis basis = build_sector_basis(n);
    const int d = basis.size();
    CMatrix block(d, d);
    for (int r = 0; r < d; ++r) {
        const auto& sr = basis.states[std::size_t(r)];
        for (int c = 0; c < d; ++c) {
            const auto& sc = basis.states[std::size_t(c)];
            const int ir = full_index(sr.photons, sr.qubits), ic = full_index(sc.photons, sc.qubits);
            if (ir >= full.rows() || ic >= full.cols()) throw InvalidInput("sector lies outside the truncated space");
            block(r, c) = full(ir, ic);
        }
    }
    return block;
}

/// Cyclic shift of the printed qubit string, "i1 i2 i3" -> "i3 i1 i2".
constexpr std::uint8_t rotate_label(std::uint8_t label) {
    const unsigned first = (label >> 2) & 1u, second = (label >> 1) & 1u, third = label & 1u;
    return static_cast<std::uint8_t>((third << 2) | (first << 1) | second);
}

inline CMatrix build_rotation_operator(int n) {
    const SectorBasis basis = build_sector_basis(n);
    const int d = basis.size();
    CMatrix r = CMatrix::Zero(d, d);
    for (int c = 0; c < d; ++c) {
        const auto& s = basis.states[std::size_t(c)];
        const int row = basis.index_of({s.photons, rotate_label(s.qubits)});
        r(row, c) = 1.0;
    }
    return r;
}

/// Projectors onto the eigenspaces of the rotation with eigenvalue
/// exp(2 pi i k / 3), k = 0, 1, 2.
inline std::array<CMatrix, 3> build_symmetry_projectors(int n) {
    const CMatrix r = build_rotation_operator(n);
    const int d = static_cast<int>(r.rows());
    const std::array<CMatrix, 3> powers = {CMatrix::Identity(d, d), r, r * r};
    std::array<CMatrix, 3> proj;
    for (int k = 0; k < 3; ++k) {
        proj[std::size_t(k)] = CMatrix::Zero(d, d);
        for (int m = 0; m < 3; ++m) {
            const Complex phase = std::polar(1.0, -2.0 * std::numbers::pi * k * m / 3.0);
            proj[std::size_t(k)] += phase * powers[std::size_t(m)];
        }
        proj[std::size_t(k)] /= 3.0;
    }
    return proj;
}

enum class StateFamily { phi, psi };

/// alpha at which the psi family is the W state.
inline const double kWAlpha = std::atan(std::sqrt(2.0));

struct InitialStateSpec {
    StateFamily family = StateFamily::psi;
    double alpha = kWAlpha;
    int n = 1;
};

/// Product of the oscillator level n-1 with a one-excitation qubit state:
///   phi: sin(a)|001> + cos(a)|010>
///   psi: sin(a)/sqrt2 |001> + cos(a)|010> + sin(a)/sqrt2 |100>
inline SectorVector build_initial_state(const InitialStateSpec& spec) {
    if (spec.n < 1) throw InvalidParameter("initial states need at least one excitation");
    if (!std::isfinite(spec.alpha)) throw InvalidParameter("alpha must be finite");
    const SectorBasis basis = build_sector_basis(spec.n);
    SectorVector v{spec.n, CVector::Zero(basis.size())};
    const double s = std::sin(spec.alpha), c = std::cos(spec.alpha);
    // Positions 1..3 hold |n-1>|001>, |n-1>|010>, |n-1>|100>.
    if (spec.family == StateFamily::phi) {
        v.amplitudes(1) = s;
        v.amplitudes(2) = c;
    } else {
        v.amplitudes(1) = s / std::numbers::sqrt2;
        v.amplitudes(2) = c;
        v.amplitudes(3) = s / std::numbers::sqrt2;
    }
    return v;
}

}  // namespace cavity_tangle
