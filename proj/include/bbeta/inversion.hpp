#pragma once

// Characteristic-function inversion to a tabulated CDF: F(x) = 1/2 -
// (1/pi) int_0^inf Im[e^{-iux} phi(u)] exp(-damping^2 u^2 / 2) / u du, with
// all grid points sharing one set of cached phi evaluations, followed by an
// isotonic (pool-adjacent-violators) repair of the tabulated values.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bbeta/errors.hpp"

namespace bbeta {

struct TabulatedCDF {
    std::vector<double> grid;  // strictly increasing
    std::vector<double> cdf;   // in [0,1], nondecreasing after repair
    double atom_at_zero = 0.0; // mass of log beta = 0; filled by samplers, not inversion
    double max_repair = 0.0;   // largest adjustment the monotonicity repair made
};

namespace detail {

// Positive half of the 32-point Gauss-Legendre rule on [-1, 1], computed once
// by Newton iteration on the Legendre recurrence.
inline const std::array<std::pair<double, double>, 16>& gl32_half() {
    static const auto half = [] {
        std::array<std::pair<double, double>, 16> out{};
        const int n = 32;
        for (int k = 0; k < 16; ++k) {
            double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (int j = 2; j <= n; ++j) {
                    const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            out[static_cast<std::size_t>(k)] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
        }
        return out;
    }();
    return half;
}

// Monotone nondecreasing least-squares fit (equal weights).  Returns the
// largest absolute adjustment.
inline double pool_adjacent_violators(std::vector<double>& y) {
    const std::size_t n = y.size();
    std::vector<double> level(n), weight(n);
    std::vector<std::size_t> count(n);
    std::size_t blocks = 0;
    for (std::size_t i = 0; i < n; ++i) {
        level[blocks] = y[i];
        weight[blocks] = 1.0;
        count[blocks] = 1;
        ++blocks;
        while (blocks > 1 && level[blocks - 2] > level[blocks - 1]) {
            const double w = weight[blocks - 2] + weight[blocks - 1];
            level[blocks - 2] =
                (level[blocks - 2] * weight[blocks - 2] + level[blocks - 1] * weight[blocks - 1]) / w;
            weight[blocks - 2] = w;
            count[blocks - 2] += count[blocks - 1];
            --blocks;
        }
    }
    double max_adjust = 0.0;
    std::size_t i = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t k = 0; k < count[b]; ++k, ++i) {
            max_adjust = std::max(max_adjust, std::abs(y[i] - level[b]));
            y[i] = level[b];
        }
    }
    return max_adjust;
}

}  // namespace detail

// Inverts a characteristic function to CDF values on the given grid.
// phi must satisfy phi(0) = 1 and phi(-u) = conj(phi(u)); damping > 0
// convolves the law with N(0, damping^2), which lattice laws need for the
// integrand to decay.  Throws convergence_error if the damped CF has not
// decayed within the panel budget and verification_error if the monotonicity
// repair exceeds 1e-4.
inline TabulatedCDF invert_cf_to_cdf(const std::function<std::complex<double>(double)>& phi,
                                     std::vector<double> grid, double damping = 0.0,
                                     double rel_tol = 1e-8) {
    if (grid.size() < 2) throw domain_error("invert_cf_to_cdf: need at least two grid points");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw domain_error("invert_cf_to_cdf: grid must be strictly increasing");
    if (!(damping >= 0)) throw domain_error("invert_cf_to_cdf: damping must be >= 0");

    // Location estimate and dominant oscillation frequency over the grid.
    const double xspan = std::max(std::abs(grid.front()), std::abs(grid.back()));
    const double h0 = 1e-3 / std::max(1.0, xspan);
    const double mu_hat = std::imag(phi(h0)) / h0;
    const double fmax =
        std::max({1.0, std::abs(grid.front() - mu_hat), std::abs(grid.back() - mu_hat)});

    const auto& gl = detail::gl32_half();
    struct Node {
        double u;
        std::complex<double> wpsi;  // weight * damped phi(u) / u
    };

    // One pass with a fixed panel width: caches nodes, then evaluates probe
    // CDF values used by the outer width-refinement loop.
    auto build = [&](double width, std::vector<Node>& nodes) -> bool {
        nodes.clear();
        const int max_panels = 20000;
        int quiet = 0;
        for (int p = 0; p < max_panels && quiet < 2; ++p) {
            const double a = p * width;
            const double c = a + 0.5 * width;
            const double r = 0.5 * width;
            double peak = 0.0;
            for (int side = 0; side < 2; ++side) {
                for (const auto& [xg, wg] : gl) {
                    const double u = side == 0 ? c - r * xg : c + r * xg;
                    std::complex<double> val = phi(u);
                    if (damping > 0) val *= std::exp(-0.5 * damping * damping * u * u);
                    peak = std::max(peak, std::abs(val));
                    nodes.push_back({u, (wg * r) * (val / u)});
                }
            }
            if (peak / std::max(a, width) <= rel_tol / 20.0)
                ++quiet;
            else
                quiet = 0;
        }
        return quiet >= 2;
    };

    auto eval_at = [&](const std::vector<Node>& nodes, double x) -> double {
        double s = 0.0;
        for (const Node& n : nodes)
            s += std::imag(std::polar(1.0, -n.u * x) * n.wpsi);
        return 0.5 - s / M_PI;
    };

    // Start at ~2.5 oscillation periods per 32-point panel and halve until the
    // probe values stabilize.
    double width = 2.0 * M_PI * 2.5 / fmax;
    std::vector<Node> nodes, finer;
    if (!build(width, nodes))
        throw convergence_error(
            "invert_cf_to_cdf: characteristic function did not decay within the truncation "
            "budget; increase damping");
    const std::array<double, 3> probes = {grid.front(), grid[grid.size() / 2], grid.back()};
    for (int halving = 0; halving < 4; ++halving) {
        if (!build(width / 2.0, finer))
            throw convergence_error(
                "invert_cf_to_cdf: characteristic function did not decay within the truncation "
                "budget; increase damping");
        double diff = 0.0;
        for (double x : probes) diff = std::max(diff, std::abs(eval_at(nodes, x) - eval_at(finer, x)));
        nodes.swap(finer);
        width /= 2.0;
        if (diff <= rel_tol) break;
    }

    TabulatedCDF out;
    out.grid = std::move(grid);
    out.cdf.resize(out.grid.size());
    for (std::size_t i = 0; i < out.grid.size(); ++i) out.cdf[i] = eval_at(nodes, out.grid[i]);

    out.max_repair = detail::pool_adjacent_violators(out.cdf);
    for (double& v : out.cdf) v = std::min(1.0, std::max(0.0, v));
    if (out.max_repair > 1e-4)
        throw verification_error("invert_cf_to_cdf: monotonicity repair " +
                                 std::to_string(out.max_repair) +
                                 " exceeds 1e-4; inversion is unreliable");
    return out;
}

// Inverse-CDF draw by linear interpolation; u in [0, 1).
inline double sample_from_cdf(const TabulatedCDF& tab, double u) {
    const auto& c = tab.cdf;
    const auto& g = tab.grid;
    if (u <= c.front()) return g.front();
    if (u >= c.back()) return g.back();
    const auto it = std::lower_bound(c.begin(), c.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - c.begin());
    const double dc = c[i] - c[i - 1];
    if (dc <= 0.0) return g[i - 1];
    return g[i - 1] + (u - c[i - 1]) * (g[i] - g[i - 1]) / dc;
}

}  // namespace bbeta
