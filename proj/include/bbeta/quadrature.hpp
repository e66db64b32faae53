#pragma once

// Deterministic adaptive quadrature on [0, inf) for integrands with a
// removable 0/0 structure at t -> 0: each panel uses a double-exponential
// (tanh-sinh) change of variable, panels past the split point grow
// geometrically, and an optional small-t series replaces the naive integrand
// where cancellation would eat the mantissa.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "bbeta/errors.hpp"

namespace bbeta {

template <class T = double>
struct QuadratureResult {
    T value{};
    double error_estimate = 0.0;   // >= 0
    std::int64_t evaluations = 0;  // >= 1 on success
};

// Integrand on (0, inf).  If small_t is set it is used for t <= 2^-6 *
// radius_hint, where the naive expression is assumed to cancel badly.
template <class T = double>
struct SemilineIntegrand {
    std::function<T(double)> eval;
    std::function<T(double)> small_t;  // optional
    double radius_hint = std::numeric_limits<double>::infinity();
};

namespace detail {

inline double abs_of(double v) { return std::abs(v); }
inline double abs_of(const std::complex<double>& v) { return std::abs(v); }

// tanh-sinh nodes on (-1, 1): x(u) = tanh(pi/2 sinh u).  Stored one-sided for
// positive u; em = 1 - x is kept separately so panel endpoints keep full
// relative accuracy.  Level l holds the nodes new at step h = 2^-l.
struct TsNode {
    double x;
    double em;
    double w;
};

struct TsTable {
    static constexpr int max_level = 10;
    static constexpr double u_max = 4.0;
    double w0;  // weight of the center node u = 0
    std::array<std::vector<TsNode>, max_level + 1> levels;
};

inline const TsTable& ts_table() {
    static const TsTable table = [] {
        TsTable t{};
        t.w0 = M_PI / 2.0;
        for (int level = 0; level <= TsTable::max_level; ++level) {
            const double h = std::ldexp(1.0, -level);
            const int stride = (level == 0) ? 1 : 2;
            const int start = (level == 0) ? 1 : 1;
            for (int k = start;; k += stride) {
                const double u = k * h;
                if (u > TsTable::u_max) break;
                const double s = M_PI_2 * std::sinh(u);
                const double ch = std::cosh(s);
                TsNode n;
                n.x = std::tanh(s);
                n.em = 1.0 / (std::exp(s) * ch);  // 1 - tanh(s), no cancellation
                n.w = M_PI_2 * std::cosh(u) / (ch * ch);
                t.levels[static_cast<std::size_t>(level)].push_back(n);
            }
        }
        return t;
    }();
    return table;
}

// One tanh-sinh panel on [a, b] refined until the level-to-level difference
// meets the tolerance.  Returns the last refinement difference as the error
// estimate; converged=false means the level budget ran out.
template <class T>
struct PanelResult {
    T value{};
    double err = 0.0;
    bool converged = false;
};

template <class T, class F>
PanelResult<T> ts_panel(F&& g, double a, double b, double rel_tol, double abs_floor,
                        std::int64_t& evaluations) {
    const TsTable& tab = ts_table();
    const double c = 0.5 * (a + b);
    const double r = 0.5 * (b - a);
    T raw = tab.w0 * g(c);
    ++evaluations;
    PanelResult<T> out;
    T prev{};
    for (int level = 0; level <= TsTable::max_level; ++level) {
        const double h = std::ldexp(1.0, -level);
        for (const TsNode& n : tab.levels[static_cast<std::size_t>(level)]) {
            const double hi = b - r * n.em;
            const double lo = a + r * n.em;
            raw += n.w * (g(hi) + g(lo));
            evaluations += 2;
        }
        const T cur = (h * r) * raw;
        if (level >= 2) {
            const double diff = abs_of(cur - prev);
            out.value = cur;
            out.err = diff;
            if (diff <= std::max(rel_tol * abs_of(cur), abs_floor)) {
                out.converged = true;
                return out;
            }
        }
        prev = cur;
    }
    out.value = prev;
    return out;
}

template <class T, class F>
QuadratureResult<T> panel_adaptive(F&& g, double a, double b, double rel_tol, double abs_floor,
                                   int depth = 0) {
    std::int64_t evals = 0;
    auto p = ts_panel<T>(g, a, b, rel_tol, abs_floor, evals);
    if (p.converged || depth >= 24) {
        return {p.value, p.err, evals};
    }
    const double m = 0.5 * (a + b);
    auto left = panel_adaptive<T>(g, a, m, rel_tol, 0.5 * abs_floor, depth + 1);
    auto right = panel_adaptive<T>(g, m, b, rel_tol, 0.5 * abs_floor, depth + 1);
    return {left.value + right.value, left.error_estimate + right.error_estimate,
            evals + left.evaluations + right.evaluations};
}

}  // namespace detail

// Integral over a finite interval [a, b]; utility used by the semiline driver
// and by windowed integrals over the real line.
template <class T = double, class F>
QuadratureResult<T> integrate_interval(F&& f, double a, double b, double rel_tol = 1e-10,
                                       double abs_floor = 1e-305) {
    if (!(b >= a)) throw domain_error("integrate_interval: requires b >= a");
    if (!(rel_tol > 0)) throw domain_error("integrate_interval: rel_tol must be > 0");
    auto g = [&](double t) -> T {
        T v = f(t);
        if (!std::isfinite(detail::abs_of(v)))
            throw domain_error("integrate_interval: integrand is not finite at t = " +
                               std::to_string(t));
        return v;
    };
    return detail::panel_adaptive<T>(g, a, b, rel_tol, abs_floor);
}

// Integral over [0, inf).  The split point separates the series-dominated
// small-t region from the decay region; past it panels double in width until
// three consecutive panels contribute below threshold.  Works for exponential
// and for algebraic (t^-2 or faster) tails.
template <class T = double>
QuadratureResult<T> integrate_semiline(const SemilineIntegrand<T>& f, double split = 1.0,
                                       double rel_tol = 1e-10) {
    if (!f.eval) throw domain_error("integrate_semiline: missing integrand");
    if (!(split > 0)) throw domain_error("integrate_semiline: split must be > 0");
    if (!(rel_tol > 0)) throw domain_error("integrate_semiline: rel_tol must be > 0");
    const double t_switch =
        f.small_t ? std::ldexp(1.0, -6) * f.radius_hint : 0.0;
    auto g = [&](double t) -> T {
        T v = (t <= t_switch) ? f.small_t(t) : f.eval(t);
        if (!std::isfinite(detail::abs_of(v)))
            throw domain_error("integrate_semiline: integrand is not finite at t = " +
                               std::to_string(t));
        return v;
    };

    QuadratureResult<T> total;
    auto head = detail::panel_adaptive<T>(g, 0.0, split, rel_tol, 1e-305);
    total.value = head.value;
    total.error_estimate = head.error_estimate;
    total.evaluations = head.evaluations;

    double lo = split;
    int quiet = 0;
    double last_mag = 0.0;
    for (int k = 0; k < 64 && quiet < 3; ++k) {
        const double floor_k =
            std::max(1e-305, rel_tol * detail::abs_of(total.value) / 64.0);
        auto p = detail::panel_adaptive<T>(g, lo, 2.0 * lo, rel_tol, floor_k);
        total.value += p.value;
        total.error_estimate += p.error_estimate;
        total.evaluations += p.evaluations;
        last_mag = detail::abs_of(p.value);
        if (last_mag <= rel_tol * std::max(detail::abs_of(total.value), 1e-300) / 8.0)
            ++quiet;
        else
            quiet = 0;
        lo *= 2.0;
    }
    if (quiet < 3)
        throw convergence_error("integrate_semiline: tail did not decay within the panel budget",
                                detail::abs_of(total.value), total.error_estimate + last_mag);
    total.error_estimate += 2.0 * last_mag;
    return total;
}

}  // namespace bbeta
