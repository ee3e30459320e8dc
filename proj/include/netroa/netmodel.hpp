#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netroa/polynomial.hpp"

namespace netroa {

/**
 * @brief Weighted directed graph on n nodes.
 *
 * a[j][i] is the weight of the edge j -> i (sender-major). Weights are
 * non-negative and the diagonal is zero.
 */
struct Topology {
    int n = 0;
    std::vector<std::vector<double>> a;

    Topology(int n_, std::vector<std::vector<double>> a_) : n(n_), a(std::move(a_)) {
        if (n < 1) throw std::invalid_argument("Topology: n must be >= 1");
        if (a.size() != static_cast<std::size_t>(n))
            throw std::invalid_argument("Topology: adjacency matrix is not n x n");
        for (int j = 0; j < n; ++j) {
            if (a[j].size() != static_cast<std::size_t>(n))
                throw std::invalid_argument("Topology: adjacency matrix is not n x n");
            for (int i = 0; i < n; ++i) {
                const double w = a[j][i];
                if (!std::isfinite(w) || w < 0.0)
                    throw std::invalid_argument("Topology: weights must be finite and >= 0");
                if (i == j && w != 0.0)
                    throw std::invalid_argument("Topology: diagonal must be zero");
            }
        }
    }

    /// Every ordered pair connected with weight 1.
    static Topology complete(int n) {
        std::vector<std::vector<double>> a(n, std::vector<double>(n, 1.0));
        for (int i = 0; i < n; ++i) a[i][i] = 0.0;
        return Topology(n, std::move(a));
    }

    /// Nodes on a cycle, each linked to its k nearest neighbours on both sides, weight 1.
    static Topology ring(int n, int k) {
        if (n < 1) throw std::invalid_argument("Topology::ring: n must be >= 1");
        if (k < 1 || 2 * k >= n)
            throw std::invalid_argument("Topology::ring: need 1 <= k and 2k < n");
        std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
        for (int i = 0; i < n; ++i)
            for (int d = 1; d <= k; ++d) {
                a[(i + d) % n][i] = 1.0;
                a[((i - d) % n + n) % n][i] = 1.0;
            }
        return Topology(n, std::move(a));
    }

    /// Node 0 is the hub; every spoke is connected to it in both directions, weight 1.
    static Topology star(int n) {
        if (n < 2) throw std::invalid_argument("Topology::star: n must be >= 2");
        std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
        for (int i = 1; i < n; ++i) {
            a[0][i] = 1.0;
            a[i][0] = 1.0;
        }
        return Topology(n, std::move(a));
    }
};

/// w_i = sum_j a[j][i]: total incoming weight per node.
inline std::vector<double> weighted_in_degree(const Topology& t) {
    std::vector<double> w(static_cast<std::size_t>(t.n), 0.0);
    for (int j = 0; j < t.n; ++j)
        for (int i = 0; i < t.n; ++i) w[static_cast<std::size_t>(i)] += t.a[j][i];
    return w;
}

/**
 * @brief Node dynamics: self-term f and pairwise coupling g, both polynomial.
 *
 * Requirements: g(0) = 0 (no self-coupling through the difference), both
 * degrees >= 1, and f has at least one real root so equilibria exist.
 */
struct DynamicsSpec {
    Polynomial f;
    Polynomial g;

    DynamicsSpec(Polynomial f_, Polynomial g_) : f(std::move(f_)), g(std::move(g_)) {
        if (g(0.0) != 0.0)
            throw std::invalid_argument("DynamicsSpec: coupling must vanish at zero difference");
        if (f.degree() < 1 || g.degree() < 1)
            throw std::invalid_argument("DynamicsSpec: f and g must have degree >= 1");
        if (!has_real_root(f))
            throw std::invalid_argument("DynamicsSpec: f has no real root, no equilibrium exists");
    }

    /// f(l) = beta*(1 - l), g(x) = gamma*x.
    static DynamicsSpec linear(double beta, double gamma) {
        if (!(beta > 0.0)) throw std::invalid_argument("DynamicsSpec: beta must be positive");
        if (!(gamma > 0.0)) throw std::invalid_argument("DynamicsSpec: gamma must be positive");
        return DynamicsSpec(Polynomial({beta, -beta}), Polynomial({0.0, gamma}));
    }

    /// f(l) = l*(1 - l), g(x) = x^2 - 0.1*x.
    static DynamicsSpec nonlinear_quadratic() {
        return DynamicsSpec(Polynomial({0.0, 1.0, -1.0}), Polynomial({0.0, -0.1, 1.0}));
    }
};

/**
 * @brief Two-state compression of the network: one tracked node plus the
 * degree-weighted mean field, coupled through the tracked node's in-degree.
 */
struct ReducedSystem {
    double in_degree;
    DynamicsSpec dyn;

    ReducedSystem(double in_degree_, DynamicsSpec dyn_)
        : in_degree(in_degree_), dyn(std::move(dyn_)) {
        if (!std::isfinite(in_degree) || in_degree < 0.0)
            throw std::invalid_argument("ReducedSystem: in_degree must be finite and >= 0");
    }
};

/// dl_i/dt = f(l_i) + sum_j a[j][i] * g(l_j - l_i) for every node.
inline std::vector<double> full_rhs(const std::vector<double>& l, const Topology& t,
                                    const DynamicsSpec& dyn) {
    if (l.size() != static_cast<std::size_t>(t.n))
        throw std::invalid_argument("full_rhs: state size does not match topology");
    std::vector<double> out(l.size());
    for (int i = 0; i < t.n; ++i) {
        double acc = dyn.f(l[static_cast<std::size_t>(i)]);
        for (int j = 0; j < t.n; ++j)
            acc += t.a[j][i] * dyn.g(l[static_cast<std::size_t>(j)] - l[static_cast<std::size_t>(i)]);
        out[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

struct ReducedRate {
    double node;
    double mean;
};

/// d(node)/dt = f(node) + w*g(mean - node); d(mean)/dt = f(mean).
inline ReducedRate reduced_rhs(double node_load, double mean_load, const ReducedSystem& sys) {
    return ReducedRate{sys.dyn.f(node_load) + sys.in_degree * sys.dyn.g(mean_load - node_load),
                       sys.dyn.f(mean_load)};
}

/**
 * @brief Jacobian of the full linear-preset network at the uniform equilibrium:
 * J = -beta*I + gamma*(A^T - D) with D = diag(in-degree).
 */
inline std::vector<std::vector<double>> linear_jacobian(const Topology& t, double beta,
                                                        double gamma) {
    if (!(beta > 0.0)) throw std::invalid_argument("linear_jacobian: beta must be positive");
    if (!(gamma > 0.0)) throw std::invalid_argument("linear_jacobian: gamma must be positive");
    const std::vector<double> w = weighted_in_degree(t);
    std::vector<std::vector<double>> jac(static_cast<std::size_t>(t.n),
                                         std::vector<double>(static_cast<std::size_t>(t.n), 0.0));
    for (int i = 0; i < t.n; ++i)
        for (int j = 0; j < t.n; ++j) {
            if (i == j)
                jac[i][j] = -beta - gamma * w[static_cast<std::size_t>(i)];
            else
                jac[i][j] = gamma * t.a[j][i];
        }
    return jac;
}

struct GershgorinReport {
    bool certified;   ///< every disc lies strictly in the open left half-plane
    double margin;    ///< min over rows of -(center + radius); positive iff certified
};

/// Row-disc Gershgorin test for Hurwitz stability of a real square matrix.
inline GershgorinReport gershgorin_certify(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size();
    if (n == 0) throw std::invalid_argument("gershgorin_certify: empty matrix");
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (m[i].size() != n)
            throw std::invalid_argument("gershgorin_certify: matrix is not square");
        double radius = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) radius += std::abs(m[i][j]);
        margin = std::min(margin, -(m[i][i] + radius));
    }
    return GershgorinReport{margin > 0.0, margin};
}

enum class EquilibriumKind { stable_node, unstable_node, saddle, non_hyperbolic };

inline const char* to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::stable_node: return "stable-node";
        case EquilibriumKind::unstable_node: return "unstable-node";
        case EquilibriumKind::saddle: return "saddle";
        case EquilibriumKind::non_hyperbolic: return "non-hyperbolic";
    }
    return "?";
}

struct EquilibriumPoint {
    double node_load;
    double mean_load;
    EquilibriumKind kind;
};

/**
 * @brief Classify an equilibrium of the reduced system by the eigenvalue
 * signs of its 2x2 Jacobian.
 *
 * The Jacobian is upper triangular (the mean field does not feel the node),
 * so the eigenvalues are the diagonal entries whenever they are real; the
 * general trace/discriminant path is kept for clarity. |Re(lambda)| < 1e-9
 * counts as non-hyperbolic. Throws if the point is not an equilibrium to
 * 1e-8 residual.
 */
inline EquilibriumKind classify_equilibrium_2d(double node_load, double mean_load,
                                               const ReducedSystem& sys) {
    const ReducedRate r = reduced_rhs(node_load, mean_load, sys);
    if (std::abs(r.node) > 1e-8 || std::abs(r.mean) > 1e-8)
        throw std::invalid_argument("classify_equilibrium_2d: point is not an equilibrium");

    const Polynomial fp = sys.dyn.f.derivative();
    const Polynomial gp = sys.dyn.g.derivative();
    const double j11 = fp(node_load) - sys.in_degree * gp(mean_load - node_load);
    const double j22 = fp(mean_load);
    // j21 = 0, j12 = w*g'(mean-node); triangular => eigenvalues are j11, j22.
    const double tr = j11 + j22;
    const double det = j11 * j22;
    const double disc = tr * tr - 4.0 * det;
    double re1, re2;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        re1 = 0.5 * (tr + s);
        re2 = 0.5 * (tr - s);
    } else {
        re1 = re2 = 0.5 * tr;
    }
    constexpr double tol = 1e-9;
    if (std::abs(re1) < tol || std::abs(re2) < tol) return EquilibriumKind::non_hyperbolic;
    if (re1 < 0.0 && re2 < 0.0) return EquilibriumKind::stable_node;
    if (re1 > 0.0 && re2 > 0.0) return EquilibriumKind::unstable_node;
    return EquilibriumKind::saddle;
}

/**
 * @brief All equilibria of the reduced system with both coordinates in
 * [lo, hi], classified, sorted by (mean_load, node_load).
 *
 * Mean-field equilibria are the real roots of f; for each, node equilibria
 * solve f(x) + w*g(mean - x) = 0, which stays polynomial. Degrees above 6
 * are rejected (root isolation is tuned for the low-degree regime).
 */
inline std::vector<EquilibriumPoint> reduced_equilibria(const ReducedSystem& sys, double lo,
                                                        double hi) {
    if (!(hi > lo)) throw std::invalid_argument("reduced_equilibria: interval is empty");
    if (sys.dyn.f.degree() > 6 || sys.dyn.g.degree() > 6)
        throw std::invalid_argument("reduced_equilibria: polynomial degree above 6");

    std::vector<EquilibriumPoint> out;
    for (double mean : find_real_roots(sys.dyn.f, lo, hi)) {
        const Polynomial coupled = Polynomial::add_scaled(
            sys.dyn.f, sys.in_degree, sys.dyn.g.composed_with_shift_minus_x(mean));
        if (coupled.is_zero()) continue; // degenerate: every point solves it; skip
        for (double node : find_real_roots(coupled, lo, hi))
            out.push_back(EquilibriumPoint{node, mean, classify_equilibrium_2d(node, mean, sys)});
    }
    std::sort(out.begin(), out.end(), [](const EquilibriumPoint& p, const EquilibriumPoint& q) {
        if (p.mean_load != q.mean_load) return p.mean_load < q.mean_load;
        return p.node_load < q.node_load;
    });
    return out;
}

} // namespace netroa
