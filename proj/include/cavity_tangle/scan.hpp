#pragma once

// Concurrence-purity trajectories and (J, t) density scans.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

#include "cavity_tangle/entanglement.hpp"

namespace cavity_tangle {

struct TrajectoryPoint {
    double t = 0.0;
    double purity = 1.0;
    double concurrence = 0.0;
};

using Trajectory = std::vector<TrajectoryPoint>;

inline std::vector<double> uniform_grid(double lo, double hi, int steps) {
    if (steps < 2) throw InvalidParameter("grids need at least 2 points");
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo) throw InvalidParameter("grid bounds must be finite and ordered");
    std::vector<double> out(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i) out[std::size_t(i)] = lo + (hi - lo) * double(i) / double(steps - 1);
    return out;
}

/// Point (t, purity, quasi-pure concurrence) for the evolved state at each time.
/// When `with_concurrence` is false the concurrence column is left at 0.
inline Trajectory trajectory_on_grid(const ModelParams& params, const InitialStateSpec& spec,
                                     const std::vector<double>& times, bool with_concurrence = true) {
    const Propagator prop = diagonalize_sector(params, spec.n);
    const SectorVector v0 = build_initial_state(spec);
    Trajectory out;
    out.reserve(times.size());
    for (double t : times) {
        const QubitDensity rho = partial_trace_oscillator(evolve(prop, v0, t));
        out.push_back({t, purity(rho), with_concurrence ? concurrence_quasipure(rho) : 0.0});
    }
    return out;
}

inline Trajectory cp_trajectory(const ModelParams& params, const InitialStateSpec& spec, double t_max, int steps) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidParameter("t_max must be positive");
    return trajectory_on_grid(params, spec, uniform_grid(0.0, t_max, steps));
}

/// Non-interacting atoms started in the W state.
inline Trajectory red_curve(int n, double t_max, int steps) {
    return cp_trajectory(homogeneous_params(0.0, 0.0), {StateFamily::psi, kWAlpha, n}, t_max, steps);
}

enum class Bound { upper, lower };

struct EnvelopeReport {
    double max_excess = -std::numeric_limits<double>::infinity();
    std::size_t covered = 0;
    std::size_t not_covered = 0;
};

inline constexpr int kEnvelopeBins = 200;

/// Compares a trajectory with the envelope of a reference curve in the CP plane.
///
/// The reference purity range is split into equal bins holding the extreme
/// concurrence (max for an upper envelope, min for a lower one). The envelope
/// at P interpolates linearly between non-empty bin centres and never falls
/// inside the extremum of the bin containing P. The excess of a point is
/// C - envelope (upper) or envelope - C (lower); points outside the reference
/// purity range are counted as not covered.
inline EnvelopeReport envelope_check(const Trajectory& trajectory, const Trajectory& reference, Bound bound = Bound::upper,
                                     int bins = kEnvelopeBins) {
    if (trajectory.empty() || reference.empty()) throw InvalidInput("envelope_check: empty trajectory");
    if (bins < 1) throw InvalidParameter("envelope_check: need at least one bin");
    const bool upper = bound == Bound::upper;
    const auto better = [upper](double a, double b) { return upper ? a > b : a < b; };

    double lo = reference.front().purity, hi = lo;
    for (const auto& p : reference) {
        lo = std::min(lo, p.purity);
        hi = std::max(hi, p.purity);
    }
    const double width = (hi - lo) / bins;
    const auto bin_of = [&](double purity) {
        if (width <= 0.0) return 0;
        return std::clamp(static_cast<int>((purity - lo) / width), 0, bins - 1);
    };

    std::vector<std::optional<double>> extreme(static_cast<std::size_t>(bins));
    for (const auto& p : reference) {
        auto& e = extreme[std::size_t(bin_of(p.purity))];
        if (!e || better(p.concurrence, *e)) e = p.concurrence;
    }
    std::vector<double> centres, values;
    for (int b = 0; b < bins; ++b) {
        if (!extreme[std::size_t(b)]) continue;
        centres.push_back(lo + (b + 0.5) * width);
        values.push_back(*extreme[std::size_t(b)]);
    }

    const auto interpolate = [&](double purity) {
        if (purity <= centres.front()) return values.front();
        if (purity >= centres.back()) return values.back();
        const auto it = std::upper_bound(centres.begin(), centres.end(), purity);
        const auto i = static_cast<std::size_t>(it - centres.begin());
        const double f = (purity - centres[i - 1]) / (centres[i] - centres[i - 1]);
        return values[i - 1] + f * (values[i] - values[i - 1]);
    };

    constexpr double range_slack = 1e-12;
    EnvelopeReport report;
    for (const auto& p : trajectory) {
        if (p.purity < lo - range_slack || p.purity > hi + range_slack) {
            ++report.not_covered;
            continue;
        }
        ++report.covered;
        double env = interpolate(p.purity);
        if (const auto& own = extreme[std::size_t(bin_of(p.purity))]; own && better(*own, env)) env = *own;
        const double excess = upper ? p.concurrence - env : env - p.concurrence;
        report.max_excess = std::max(report.max_excess, excess);
    }
    return report;
}

enum class ModelKind { homogeneous, quasi_homogeneous };

inline ModelParams model_params(ModelKind model, double kappa, double ising,
                                PairSumConvention pair_sum = PairSumConvention::dipole_unordered) {
    return model == ModelKind::homogeneous ? homogeneous_params(kappa, ising, pair_sum)
                                           : quasi_homogeneous_params(kappa, ising, pair_sum);
}

struct ScanGrid {
    std::vector<double> j_values;
    std::vector<double> t_values;
    std::vector<double> purity;       // row-major, index j * t_values.size() + t
    std::vector<double> concurrence;  // same layout; empty when not computed

    std::size_t index(std::size_t j, std::size_t t) const { return j * t_values.size() + t; }
    bool has_concurrence() const { return !concurrence.empty(); }
};

struct ScanRequest {
    double kappa = 1.0;
    ModelKind model = ModelKind::homogeneous;
    double j_min = 0.0, j_max = 2.0;
    int j_steps = 201;
    double t_max = 20.0;
    int t_steps = 401;
    InitialStateSpec spec{StateFamily::phi, std::numbers::pi / 4, 2};
    bool with_concurrence = false;
    PairSumConvention pair_sum = PairSumConvention::dipole_unordered;
};

/// Fills the (J, t) grid column by column. Columns are independent; `threads`
/// only changes who computes them, never the result.
inline ScanGrid density_scan(const ScanRequest& req, unsigned threads = 1) {
    if (!(req.t_max > 0.0)) throw InvalidParameter("t_max must be positive");
    ScanGrid grid;
    grid.j_values = uniform_grid(req.j_min, req.j_max, req.j_steps);
    grid.t_values = uniform_grid(0.0, req.t_max, req.t_steps);
    const std::size_t nt = grid.t_values.size();
    grid.purity.assign(grid.j_values.size() * nt, 0.0);
    if (req.with_concurrence) grid.concurrence.assign(grid.purity.size(), 0.0);
    // Validate shared inputs once so worker threads never throw on them.
    build_initial_state(req.spec);
    model_params(req.model, req.kappa, req.j_min, req.pair_sum).validate();

    auto fill_column = [&](std::size_t j) {
        const Trajectory tr = trajectory_on_grid(model_params(req.model, req.kappa, grid.j_values[j], req.pair_sum), req.spec,
                                                 grid.t_values, req.with_concurrence);
        for (std::size_t t = 0; t < nt; ++t) {
            grid.purity[grid.index(j, t)] = tr[t].purity;
            if (req.with_concurrence) grid.concurrence[grid.index(j, t)] = tr[t].concurrence;
        }
    };

    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(grid.j_values.size())));
    if (threads == 1) {
        for (std::size_t j = 0; j < grid.j_values.size(); ++j) fill_column(j);
        return grid;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t j = next++; j < grid.j_values.size(); j = next++) fill_column(j);
        });
    pool.clear();
    return grid;
}

/// Per-J statistic locating the region where the purity dynamics deviate from
/// the large-J regime: Var_t[P(J, t) - B(t)], with B(t) the mean purity over
/// the top decile of J columns.
inline std::vector<double> critical_profile(const ScanGrid& grid) {
    const std::size_t nj = grid.j_values.size(), nt = grid.t_values.size();
    if (nj == 0 || nt == 0 || grid.purity.size() != nj * nt) throw InvalidInput("critical_profile: grid has no purity layer");
    const std::size_t top = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.1 * double(nj))));
    std::vector<double> baseline(nt, 0.0);
    for (std::size_t j = nj - top; j < nj; ++j)
        for (std::size_t t = 0; t < nt; ++t) baseline[t] += grid.purity[grid.index(j, t)] / double(top);

    std::vector<double> stat(nj);
    for (std::size_t j = 0; j < nj; ++j) {
        double mean = 0.0;
        for (std::size_t t = 0; t < nt; ++t) mean += grid.purity[grid.index(j, t)] - baseline[t];
        mean /= double(nt);
        double var = 0.0;
        for (std::size_t t = 0; t < nt; ++t) {
            const double d = grid.purity[grid.index(j, t)] - baseline[t] - mean;
            var += d * d;
        }
        stat[j] = var / double(nt);
    }
    return stat;
}

inline constexpr double kFeatureFloor = 1e-14;

inline std::size_t critical_index(const std::vector<double>& stat) {
    const auto it = std::max_element(stat.begin(), stat.end());
    if (it == stat.end() || *it <= kFeatureFloor) throw NoFeature("purity dynamics do not depend on J");
    return static_cast<std::size_t>(it - stat.begin());
}

/// J at which the purity dynamics deviate most from the large-J regime.
inline double critical_j(const ScanGrid& grid) { return grid.j_values[critical_index(critical_profile(grid))]; }

struct CriticalRegion {
    double j_low = 0.0;
    double j_high = 0.0;
    double width() const { return j_high - j_low; }
};

/// Contiguous J-interval around the critical J where the statistic stays at or
/// above half its peak.
inline CriticalRegion critical_region(const ScanGrid& grid) {
    const std::vector<double> stat = critical_profile(grid);
    const std::size_t peak = critical_index(stat);
    const double half = 0.5 * stat[peak];
    std::size_t lo = peak, hi = peak;
    while (lo > 0 && stat[lo - 1] >= half) --lo;
    while (hi + 1 < stat.size() && stat[hi + 1] >= half) ++hi;
    return {grid.j_values[lo], grid.j_values[hi]};
}

}  // namespace cavity_tangle
