#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "netroa/grid.hpp"
#include "netroa/netmodel.hpp"
#include "netroa/roa.hpp"

namespace netroa {

/**
 * @brief Brute-force integrator settings: classical fixed-step RK4 with a
 * convergence ball, a divergence radius, and a wall-clock-free time budget.
 */
struct OracleParams {
    double dt = 1e-3;
    double t_max = 50.0;
    double eps = 1e-3;
    double escape_radius = 100.0;

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("OracleParams: dt must be positive");
        if (!(t_max > dt)) throw std::invalid_argument("OracleParams: t_max must exceed dt");
        if (!(eps > 0.0)) throw std::invalid_argument("OracleParams: eps must be positive");
        if (!(escape_radius > 0.0))
            throw std::invalid_argument("OracleParams: escape_radius must be positive");
    }
};

enum class Verdict { converged, diverged, timeout };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::converged: return "converged";
        case Verdict::diverged: return "diverged";
        case Verdict::timeout: return "timeout";
    }
    return "?";
}

/**
 * @brief Recorded integration: states at every accepted step (t = k*dt),
 * the final verdict, and for converged runs the linearly interpolated time
 * at which the trajectory entered the eps-ball of its persistence run.
 */
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    Verdict verdict = Verdict::timeout;
    double entry_time = std::numeric_limits<double>::quiet_NaN();
};

namespace oracle_detail {

/// Flat polynomial evaluator: coefficient copy with a fixed upper bound so
/// the basin sweep's inner loop stays allocation-free and branch-cheap.
struct PolyEval {
    std::array<double, 16> c{};
    int n = 0;

    explicit PolyEval(const Polynomial& p) {
        const auto& src = p.coeffs();
        if (src.size() > c.size())
            throw std::invalid_argument("oracle: polynomial degree too high for fast path");
        n = static_cast<int>(src.size());
        for (int k = 0; k < n; ++k) c[static_cast<std::size_t>(k)] = src[static_cast<std::size_t>(k)];
    }

    double operator()(double x) const {
        double acc = 0.0;
        for (int k = n; k-- > 0;) acc = acc * x + c[static_cast<std::size_t>(k)];
        return acc;
    }
};

struct ReducedRun {
    Verdict verdict;
    double entry_time;
    long steps; ///< index of the step at which the run ended
};

/**
 * @brief Core reduced-system run without trajectory recording.
 *
 * Convergence: sup-norm distance to the target within eps at 10 consecutive
 * step indices (the initial state counts); the reported entry time is the
 * eps-crossing of that persistence run, linearly interpolated between the
 * bracketing steps. Divergence: Euclidean state norm beyond escape_radius.
 */
inline ReducedRun run_reduced(double a, double b, const PolyEval& f, const PolyEval& g,
                              double w, double ta, double tb, const OracleParams& p,
                              Trajectory* record = nullptr) {
    const double dt = p.dt;
    const long max_steps = static_cast<long>(std::ceil(p.t_max / dt));
    const double esc2 = p.escape_radius * p.escape_radius;

    int streak = 0;
    double entry = std::numeric_limits<double>::quiet_NaN();
    double prev_dist = std::numeric_limits<double>::infinity();

    for (long k = 0;; ++k) {
        const double t = static_cast<double>(k) * dt;
        if (record) {
            record->times.push_back(t);
            record->states.push_back({a, b});
        }
        const double dist = std::max(std::abs(a - ta), std::abs(b - tb));
        if (dist <= p.eps) {
            if (streak == 0)
                entry = (k == 0) ? 0.0
                                 : t - dt + dt * (prev_dist - p.eps) / (prev_dist - dist);
            ++streak;
            if (streak >= 10) return ReducedRun{Verdict::converged, entry, k};
        } else {
            streak = 0;
        }
        if (a * a + b * b > esc2) return ReducedRun{Verdict::diverged, entry, k};
        if (k >= max_steps) return ReducedRun{Verdict::timeout, entry, k};
        prev_dist = dist;

        const double k1a = f(a) + w * g(b - a), k1b = f(b);
        const double a2 = a + 0.5 * dt * k1a, b2 = b + 0.5 * dt * k1b;
        const double k2a = f(a2) + w * g(b2 - a2), k2b = f(b2);
        const double a3 = a + 0.5 * dt * k2a, b3 = b + 0.5 * dt * k2b;
        const double k3a = f(a3) + w * g(b3 - a3), k3b = f(b3);
        const double a4 = a + dt * k3a, b4 = b + dt * k3b;
        const double k4a = f(a4) + w * g(b4 - a4), k4b = f(b4);
        a += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        b += dt / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
        if (!std::isfinite(a) || !std::isfinite(b))
            return ReducedRun{Verdict::diverged, entry, k + 1};
    }
}

} // namespace oracle_detail

/// Reduced-system trajectory from a 2-state initial condition.
inline Trajectory integrate_reduced(std::array<double, 2> ic, const ReducedSystem& sys,
                                    const OracleParams& p,
                                    std::array<double, 2> target = {1.0, 1.0}) {
    p.validate();
    const oracle_detail::PolyEval f(sys.dyn.f), g(sys.dyn.g);
    Trajectory out;
    const oracle_detail::ReducedRun r = oracle_detail::run_reduced(
        ic[0], ic[1], f, g, sys.in_degree, target[0], target[1], p, &out);
    out.verdict = r.verdict;
    out.entry_time = r.entry_time;
    if (out.verdict != Verdict::converged)
        out.entry_time = std::numeric_limits<double>::quiet_NaN();
    return out;
}

/**
 * @brief Full-network trajectory with the same verdict rules, against the
 * uniform state (target_value, ..., target_value).
 */
inline Trajectory integrate_full(const std::vector<double>& ic, const Topology& t,
                                 const DynamicsSpec& dyn, const OracleParams& p,
                                 double target_value = 1.0) {
    p.validate();
    if (ic.size() != static_cast<std::size_t>(t.n))
        throw std::invalid_argument("integrate_full: initial state size mismatch");
    const double dt = p.dt;
    const long max_steps = static_cast<long>(std::ceil(p.t_max / dt));
    const double esc2 = p.escape_radius * p.escape_radius;
    const std::size_t n = ic.size();

    Trajectory out;
    std::vector<double> s = ic, tmp(n), k1(n), k2(n), k3(n), k4(n);
    int streak = 0;
    double prev_dist = std::numeric_limits<double>::infinity();

    for (long k = 0;; ++k) {
        const double time = static_cast<double>(k) * dt;
        out.times.push_back(time);
        out.states.push_back(s);

        double dist = 0.0, norm2 = 0.0;
        for (double x : s) {
            dist = std::max(dist, std::abs(x - target_value));
            norm2 += x * x;
        }
        if (dist <= p.eps) {
            if (streak == 0)
                out.entry_time = (k == 0) ? 0.0
                                          : time - dt + dt * (prev_dist - p.eps) /
                                                            (prev_dist - dist);
            ++streak;
            if (streak >= 10) {
                out.verdict = Verdict::converged;
                return out;
            }
        } else {
            streak = 0;
        }
        if (norm2 > esc2) {
            out.verdict = Verdict::diverged;
            out.entry_time = std::numeric_limits<double>::quiet_NaN();
            return out;
        }
        if (k >= max_steps) {
            out.verdict = Verdict::timeout;
            out.entry_time = std::numeric_limits<double>::quiet_NaN();
            return out;
        }
        prev_dist = dist;

        k1 = full_rhs(s, t, dyn);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * dt * k1[i];
        k2 = full_rhs(tmp, t, dyn);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * dt * k2[i];
        k3 = full_rhs(tmp, t, dyn);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + dt * k3[i];
        k4 = full_rhs(tmp, t, dyn);
        for (std::size_t i = 0; i < n; ++i)
            s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/**
 * @brief Interpolated eps-entry time of the reduced trajectory from ic to
 * the target (1,1); empty when the run diverges or times out. Default
 * integrator settings apart from the caller's eps.
 */
inline std::optional<double> convergence_time(std::array<double, 2> ic, const ReducedSystem& sys,
                                              double eps,
                                              std::array<double, 2> target = {1.0, 1.0}) {
    OracleParams p;
    p.eps = eps;
    p.validate();
    const oracle_detail::PolyEval f(sys.dyn.f), g(sys.dyn.g);
    const oracle_detail::ReducedRun r =
        oracle_detail::run_reduced(ic[0], ic[1], f, g, sys.in_degree, target[0], target[1], p);
    if (r.verdict != Verdict::converged) return std::nullopt;
    return r.entry_time;
}

/// Ground-truth basin sample plus the settings that produced it.
struct BasinMask {
    MaskGrid mask;
    OracleParams params;
    std::array<double, 2> target;
};

/**
 * @brief Integrate every interior lattice point and mark the ones that
 * converge to the target. The target must be a stable equilibrium and the
 * escape radius must clear the whole domain, otherwise the sweep could
 * declare divergence while still inside the window.
 */
inline BasinMask classify_basin(const Grid2D& g, const ReducedSystem& sys,
                                std::array<double, 2> target, const OracleParams& p) {
    p.validate();
    if (classify_equilibrium_2d(target[0], target[1], sys) != EquilibriumKind::stable_node)
        throw std::invalid_argument("classify_basin: target is not a stable equilibrium");
    const double far_x = std::max(std::abs(g.xmin), std::abs(g.xmax));
    const double far_y = std::max(std::abs(g.ymin), std::abs(g.ymax));
    if (!(p.escape_radius > std::hypot(far_x, far_y)))
        throw std::invalid_argument("classify_basin: escape_radius lies inside the domain");

    const oracle_detail::PolyEval f(sys.dyn.f), gg(sys.dyn.g);
    BasinMask out{MaskGrid(g), p, target};
    for (int i = 0; i < g.nx; ++i) {
        const double x = g.x(i + Grid2D::ghost);
        for (int j = 0; j < g.ny; ++j) {
            const oracle_detail::ReducedRun r = oracle_detail::run_reduced(
                x, g.y(j + Grid2D::ghost), f, gg, sys.in_degree, target[0], target[1], p);
            out.mask.at(i, j) = (r.verdict == Verdict::converged) ? 1 : 0;
        }
    }
    return out;
}

/**
 * @brief Level-set estimate vs. brute-force basin, with a contour-hugging
 * exclusion band for the conservativeness figure.
 */
struct ComparisonReport {
    double conservative_fraction; ///< basin hits among kept estimate points
    double jaccard;               ///< overlap of estimate and basin over all points
    std::size_t considered;       ///< estimate points outside the exclusion band
    std::vector<std::array<int, 2>> violations; ///< kept points missing from the basin
};

/**
 * @brief A point is "near the contour" when the (2d+1)^2 index window
 * around it contains both captured and free estimate points, i.e. the level
 * curve passes within d cells in the sup metric. Those points are excluded
 * from the conservativeness count; the Jaccard index uses every point.
 */
inline ComparisonReport compare(const RoaEstimate& roa, const BasinMask& basin,
                                int boundary_dilation = 2) {
    const MaskGrid& em = roa.mask;
    const MaskGrid& bm = basin.mask;
    if (!(em.grid == bm.grid)) throw std::invalid_argument("compare: grids differ");
    if (boundary_dilation < 0)
        throw std::invalid_argument("compare: boundary_dilation must be >= 0");
    const int nx = em.grid.nx, ny = em.grid.ny, d = boundary_dilation;

    ComparisonReport rep{1.0, 1.0, 0, {}};
    std::size_t kept_hits = 0, inter = 0, uni = 0;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            const bool in_est = em.at(i, j) != 0;
            const bool in_bas = bm.at(i, j) != 0;
            if (in_est && in_bas) ++inter;
            if (in_est || in_bas) ++uni;
            if (!in_est) continue;

            bool any_in = false, any_out = false;
            for (int di = std::max(0, i - d); di <= std::min(nx - 1, i + d); ++di)
                for (int dj = std::max(0, j - d); dj <= std::min(ny - 1, j + d); ++dj)
                    (em.at(di, dj) ? any_in : any_out) = true;
            const bool near_contour = any_in && any_out;
            if (near_contour) continue;

            ++rep.considered;
            if (in_bas)
                ++kept_hits;
            else
                rep.violations.push_back({i, j});
        }
    rep.conservative_fraction =
        rep.considered == 0 ? 1.0 : static_cast<double>(kept_hits) / rep.considered;
    rep.jaccard = uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
    return rep;
}

} // namespace netroa
