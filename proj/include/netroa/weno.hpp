#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "netroa/grid.hpp"

namespace netroa {

enum class Axis { x, y };

namespace weno_detail {

inline constexpr double kEps = 1e-6;
inline constexpr double kThirteenTwelfths = 13.0 / 12.0;
inline constexpr double kOpt0 = 0.1;
inline constexpr double kOpt1 = 0.6;
inline constexpr double kOpt2 = 0.3;

/// Smoothness indicators of the three 3-point candidate stencils.
inline void smoothness(double d1, double d2, double d3, double d4, double d5, double& b0,
                       double& b1, double& b2) {
    const double t01 = d1 - 2.0 * d2 + d3;
    const double t02 = d1 - 4.0 * d2 + 3.0 * d3;
    b0 = kThirteenTwelfths * t01 * t01 + 0.25 * t02 * t02;
    const double t11 = d2 - 2.0 * d3 + d4;
    const double t12 = d2 - d4;
    b1 = kThirteenTwelfths * t11 * t11 + 0.25 * t12 * t12;
    const double t21 = d3 - 2.0 * d4 + d5;
    const double t22 = 3.0 * d3 - 4.0 * d4 + d5;
    b2 = kThirteenTwelfths * t21 * t21 + 0.25 * t22 * t22;
}

/// Normalized nonlinear weights (sum to 1); exposed for consistency checks.
inline std::array<double, 3> weights(double d1, double d2, double d3, double d4, double d5) {
    double b0, b1, b2;
    smoothness(d1, d2, d3, d4, d5, b0, b1, b2);
    const double s0 = kEps + b0, s1 = kEps + b1, s2 = kEps + b2;
    const double a0 = kOpt0 / (s0 * s0);
    const double a1 = kOpt1 / (s1 * s1);
    const double a2 = kOpt2 / (s2 * s2);
    const double sum = a0 + a1 + a2;
    return {a0 / sum, a1 / sum, a2 / sum};
}

/**
 * @brief Fifth-order weighted reconstruction of a one-sided derivative from
 * five consecutive first-order divided differences (nearest-offset ordering).
 *
 * Single-division form: weighting each candidate by opt_s * prod_{t!=s}
 * (eps + beta_t)^2 and normalizing once is algebraically identical to the
 * usual alpha_s = opt_s/(eps+beta_s)^2 normalization.
 */
inline double kernel(double d1, double d2, double d3, double d4, double d5) {
    double b0, b1, b2;
    smoothness(d1, d2, d3, d4, d5, b0, b1, b2);
    const double s0 = kEps + b0, s1 = kEps + b1, s2 = kEps + b2;
    const double q0 = s0 * s0, q1 = s1 * s1, q2 = s2 * s2;
    const double w0 = kOpt0 * q1 * q2;
    const double w1 = kOpt1 * q0 * q2;
    const double w2 = kOpt2 * q0 * q1;
    const double c0 = (1.0 / 3.0) * d1 - (7.0 / 6.0) * d2 + (11.0 / 6.0) * d3;
    const double c1 = (-1.0 / 6.0) * d2 + (5.0 / 6.0) * d3 + (1.0 / 3.0) * d4;
    const double c2 = (1.0 / 3.0) * d3 + (5.0 / 6.0) * d4 - (1.0 / 6.0) * d5;
    return (w0 * c0 + w1 * c1 + w2 * c2) / (w0 + w1 + w2);
}

} // namespace weno_detail

/**
 * @brief Left- and right-biased derivatives of a field along one axis.
 *
 * Values are meaningful on the interior lattice only; the ghost margins of
 * the derivative fields are zero.
 */
struct DerivativePair {
    ScalarField dminus;
    ScalarField dplus;
    Axis axis;
};

/**
 * @brief Fifth-order one-sided upwind derivatives along the given axis.
 *
 * Requires a freshly extrapolated ghost margin. Per line: forward divided
 * differences D_k = (v_{k+1} - v_k)/h, then at each interior index i the
 * left-biased derivative blends {D_{i-3}..D_{i+1}} and the right-biased one
 * blends the mirrored window {D_{i+2}..D_{i-2}}.
 */
inline DerivativePair upwind_derivatives(const ScalarField& v, Axis axis) {
    if (!v.ghosts_filled())
        throw std::logic_error("upwind_derivatives: ghost cells not filled");
    const Grid2D& g = v.grid();
    DerivativePair out{ScalarField(g), ScalarField(g), axis};
    out.dminus.set_time(v.time());
    out.dplus.set_time(v.time());

    using weno_detail::kernel;
    if (axis == Axis::x) {
        const double inv_h = 1.0 / g.dx();
        std::vector<double> line(static_cast<std::size_t>(g.nx_tot()));
        std::vector<double> diff(static_cast<std::size_t>(g.nx_tot() - 1));
        for (int gj = v.jbegin(); gj < v.jend(); ++gj) {
            for (int gi = 0; gi < g.nx_tot(); ++gi) line[gi] = v.at(gi, gj);
            for (int k = 0; k + 1 < g.nx_tot(); ++k)
                diff[k] = (line[k + 1] - line[k]) * inv_h;
            for (int gi = v.ibegin(); gi < v.iend(); ++gi) {
                out.dminus.at(gi, gj) =
                    kernel(diff[gi - 3], diff[gi - 2], diff[gi - 1], diff[gi], diff[gi + 1]);
                out.dplus.at(gi, gj) =
                    kernel(diff[gi + 2], diff[gi + 1], diff[gi], diff[gi - 1], diff[gi - 2]);
            }
        }
    } else {
        const double inv_h = 1.0 / g.dy();
        std::vector<double> diff(static_cast<std::size_t>(g.ny_tot() - 1));
        for (int gi = v.ibegin(); gi < v.iend(); ++gi) {
            for (int k = 0; k + 1 < g.ny_tot(); ++k)
                diff[k] = (v.at(gi, k + 1) - v.at(gi, k)) * inv_h;
            for (int gj = v.jbegin(); gj < v.jend(); ++gj) {
                out.dminus.at(gi, gj) =
                    kernel(diff[gj - 3], diff[gj - 2], diff[gj - 1], diff[gj], diff[gj + 1]);
                out.dplus.at(gi, gj) =
                    kernel(diff[gj + 2], diff[gj + 1], diff[gj], diff[gj - 1], diff[gj - 2]);
            }
        }
    }
    return out;
}

} // namespace netroa
