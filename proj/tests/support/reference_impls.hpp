#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace mimic::testing {

/// Top-down recursive DTW, memoized so exhaustive sweeps stay tractable.
/// Evaluates the same recurrence cell-for-cell as the production DP, but
/// through an independent traversal.
inline double dtw_reference(std::span<const double> a, std::span<const double> b) {
    const std::size_t na = a.size(), nb = b.size();
    std::vector<double> memo(na * nb, -1.0);
    auto rec = [&](auto&& self, std::size_t i, std::size_t j) -> double {
        double& slot = memo[i * nb + j];
        if (slot >= 0.0) return slot;
        const double d = a[i] - b[j];
        const double cost = d * d;
        double best;
        if (i == 0 && j == 0) {
            best = 0.0;
        } else if (i == 0) {
            best = self(self, 0, j - 1);
        } else if (j == 0) {
            best = self(self, i - 1, 0);
        } else {
            best = std::min({self(self, i - 1, j), self(self, i, j - 1), self(self, i - 1, j - 1)});
        }
        slot = cost + best;
        return slot;
    };
    return rec(rec, na - 1, nb - 1);
}

/// Explicit enumeration of every monotone boundary-to-boundary path; only
/// usable for tiny inputs. This is the genuinely independent oracle: no
/// shared recurrence with the implementation.
inline double dtw_all_paths(std::span<const double> a, std::span<const double> b) {
    double best = std::numeric_limits<double>::infinity();
    auto walk = [&](auto&& self, std::size_t i, std::size_t j, double acc) -> void {
        const double d = a[i] - b[j];
        acc += d * d;
        if (i == a.size() - 1 && j == b.size() - 1) {
            best = std::min(best, acc);
            return;
        }
        if (i + 1 < a.size()) self(self, i + 1, j, acc);
        if (j + 1 < b.size()) self(self, i, j + 1, acc);
        if (i + 1 < a.size() && j + 1 < b.size()) self(self, i + 1, j + 1, acc);
    };
    walk(walk, 0, 0, 0.0);
    return best;
}

/// Quantile with linear interpolation between order statistics at rank
/// q * (n - 1); mirrors the stated convention independently of the library.
inline double quantile_reference(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(values.size() - 1, lo + 1);
    return values[lo] + (h - std::floor(h)) * (values[hi] - values[lo]);
}

/// Two-tailed Student-t p-value by adaptive Simpson quadrature of the t
/// density; numeric-integration oracle for the incomplete-beta route.
inline double student_t_p_by_quadrature(double t, std::size_t df) {
    const double nu = static_cast<double>(df);
    const double log_norm =
        std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) - 0.5 * std::log(nu * M_PI);
    auto pdf = [&](double x) {
        return std::exp(log_norm - (nu + 1.0) / 2.0 * std::log1p(x * x / nu));
    };

    auto simpson = [&](double lo, double hi) {
        const double mid = 0.5 * (lo + hi);
        return (hi - lo) / 6.0 * (pdf(lo) + 4.0 * pdf(mid) + pdf(hi));
    };
    auto integrate = [&](auto&& self, double lo, double hi, double whole, int depth) -> double {
        const double mid = 0.5 * (lo + hi);
        const double left = simpson(lo, mid);
        const double right = simpson(mid, hi);
        if (depth > 40 || std::fabs(left + right - whole) < 1e-12) {
            return left + right + (left + right - whole) / 15.0;
        }
        return self(self, lo, mid, left, depth + 1) + self(self, mid, hi, right, depth + 1);
    };

    const double upper = std::fabs(t);
    if (upper == 0.0) return 1.0;
    const double half = integrate(integrate, 0.0, upper, simpson(0.0, upper), 0);
    return std::clamp(2.0 * (0.5 - half), 0.0, 1.0);
}

}  // namespace mimic::testing
