#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace netroa {

/**
 * @brief Dense univariate polynomial with real coefficients, ascending order.
 *
 * coeffs()[k] multiplies x^k. The zero polynomial is stored as {0}.
 * Evaluation uses Horner's rule, so the flop order is fixed and runs are
 * bit-reproducible.
 */
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}

    explicit Polynomial(std::vector<double> ascending_coeffs)
        : coeffs_(std::move(ascending_coeffs)) {
        if (coeffs_.empty())
            throw std::invalid_argument("Polynomial: coefficient list is empty");
        for (double c : coeffs_)
            if (!std::isfinite(c))
                throw std::invalid_argument("Polynomial: non-finite coefficient");
    }

    double operator()(double x) const {
        double acc = 0.0;
        for (std::size_t k = coeffs_.size(); k-- > 0;)
            acc = acc * x + coeffs_[k];
        return acc;
    }

    /// Degree of the highest non-zero coefficient; the zero polynomial has degree 0.
    int degree() const {
        for (std::size_t k = coeffs_.size(); k-- > 0;)
            if (coeffs_[k] != 0.0) return static_cast<int>(k);
        return 0;
    }

    bool is_zero() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(),
                           [](double c) { return c == 0.0; });
    }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return Polynomial(std::vector<double>{0.0});
        std::vector<double> d(coeffs_.size() - 1);
        for (std::size_t k = 1; k < coeffs_.size(); ++k)
            d[k - 1] = static_cast<double>(k) * coeffs_[k];
        return Polynomial(std::move(d));
    }

    const std::vector<double>& coeffs() const { return coeffs_; }

    /// p + scale * q, coefficient-wise.
    static Polynomial add_scaled(const Polynomial& p, double scale, const Polynomial& q) {
        std::vector<double> out(std::max(p.coeffs_.size(), q.coeffs_.size()), 0.0);
        for (std::size_t k = 0; k < p.coeffs_.size(); ++k) out[k] += p.coeffs_[k];
        for (std::size_t k = 0; k < q.coeffs_.size(); ++k) out[k] += scale * q.coeffs_[k];
        return Polynomial(std::move(out));
    }

    /**
     * @brief The polynomial x -> p(shift - x), expanded in powers of x.
     *
     * Used to turn a coupling term g(mean - node) into a polynomial in the
     * node variable when hunting equilibria.
     */
    Polynomial composed_with_shift_minus_x(double shift) const {
        const std::size_t n = coeffs_.size();
        std::vector<double> out(n, 0.0);
        std::vector<double> cur{1.0}; // coefficients of (shift - x)^k, k = 0 at first
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t m = 0; m < cur.size(); ++m) out[m] += coeffs_[k] * cur[m];
            if (k + 1 < n) {
                std::vector<double> next(cur.size() + 1, 0.0);
                for (std::size_t m = 0; m < cur.size(); ++m) {
                    next[m] += shift * cur[m];
                    next[m + 1] -= cur[m];
                }
                cur = std::move(next);
            }
        }
        return Polynomial(std::move(out));
    }

    /// 1 + max |c_k| / |c_n| over k < n: every real root lies in [-bound, bound].
    double cauchy_root_bound() const {
        const int n = degree();
        if (n == 0) return 1.0;
        const double lead = std::abs(coeffs_[static_cast<std::size_t>(n)]);
        double m = 0.0;
        for (int k = 0; k < n; ++k)
            m = std::max(m, std::abs(coeffs_[static_cast<std::size_t>(k)]));
        return 1.0 + m / lead;
    }

private:
    std::vector<double> coeffs_;
};

namespace roots_detail {

inline double bisect(const Polynomial& p, double a, double b, double fa) {
    // fa and p(b) have opposite signs on entry.
    for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = p(mid);
        if (fm == 0.0) return mid;
        if ((fa < 0.0) == (fm < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

inline void scan_sign_changes(const Polynomial& p, double lo, double hi,
                              std::vector<double>& out) {
    constexpr int kSteps = 10000;
    const double h = (hi - lo) / kSteps;
    double xprev = lo;
    double fprev = p(xprev);
    if (fprev == 0.0) out.push_back(xprev);
    for (int k = 1; k <= kSteps; ++k) {
        const double x = (k == kSteps) ? hi : lo + k * h;
        const double f = p(x);
        if (f == 0.0) {
            out.push_back(x);
        } else if ((fprev < 0.0) != (f < 0.0) && fprev != 0.0) {
            out.push_back(bisect(p, xprev, x, fprev));
        }
        xprev = x;
        fprev = f;
    }
}

} // namespace roots_detail

/**
 * @brief All real roots of p in [lo, hi], ascending, deduplicated to 1e-9.
 *
 * Sign-change scan at 1e4 subintervals plus bisection; even-multiplicity
 * roots (no sign change) are recovered by scanning the derivative's roots
 * and accepting those where |p| <= 1e-10.
 */
inline std::vector<double> find_real_roots(const Polynomial& p, double lo, double hi) {
    if (!(hi > lo))
        throw std::invalid_argument("find_real_roots: interval is empty");
    if (p.is_zero())
        throw std::invalid_argument("find_real_roots: zero polynomial has no isolated roots");

    std::vector<double> cand;
    roots_detail::scan_sign_changes(p, lo, hi, cand);

    if (p.degree() >= 2) {
        std::vector<double> crit;
        roots_detail::scan_sign_changes(p.derivative(), lo, hi, crit);
        for (double r : crit)
            if (std::abs(p(r)) <= 1e-10) cand.push_back(r);
    }

    std::sort(cand.begin(), cand.end());
    std::vector<double> out;
    for (double r : cand)
        if (out.empty() || r - out.back() > 1e-9) out.push_back(r);
    return out;
}

/// True when p has at least one real root (searched inside the Cauchy bound).
inline bool has_real_root(const Polynomial& p) {
    if (p.is_zero()) return true;
    if (p.degree() == 0) return false;
    const double b = p.cauchy_root_bound();
    return !find_real_roots(p, -b - 1.0, b + 1.0).empty();
}

} // namespace netroa
