#pragma once

// Multiple gamma functions in the Ruijsenaars normalization: multiple
// Bernoulli polynomials, the Malmsten-type log Gamma_M integral for
// Re(w) > 0, the large-|w| expansion, the recursive extension
// Gamma_M(w|a) = Gamma_{M-1}(w|a-hat_i) Gamma_M(w+a_i|a), and the multiple
// sine function S_M(w|a) = Gamma_M(|a|-w|a)^{(-1)^M} / Gamma_M(w|a).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "bbeta/errors.hpp"
#include "bbeta/mathutil.hpp"
#include "bbeta/quadrature.hpp"
#include "bbeta/series.hpp"

namespace bbeta {

using complex = std::complex<double>;

struct MultiGammaParams {
    std::vector<double> a;

    MultiGammaParams() = default;
    explicit MultiGammaParams(std::vector<double> periods) : a(std::move(periods)) {
        for (double ai : a)
            if (!(ai > 0)) throw domain_error("MultiGammaParams: all periods must be > 0");
    }

    int order() const { return static_cast<int>(a.size()); }
    double max_a() const { return a.empty() ? 1.0 : *std::max_element(a.begin(), a.end()); }
    double prod_a() const {
        return std::accumulate(a.begin(), a.end(), 1.0, std::multiplies<double>());
    }
    double sum_a() const { return std::accumulate(a.begin(), a.end(), 0.0); }

    MultiGammaParams drop_axis(int i) const {
        MultiGammaParams out;
        out.a = a;
        out.a.erase(out.a.begin() + i);
        return out;
    }
};

namespace detail {

inline SeriesCoeffs<complex> to_complex(const SeriesCoeffs<double>& s) {
    SeriesCoeffs<complex> out;
    out.c.assign(s.c.begin(), s.c.end());
    out.radius_hint = s.radius_hint;
    return out;
}

// Taylor coefficients of f_M(t|a) e^{-xt} through the requested order, i.e.
// B_{M,m}(x|a) / m! for m = 0..order.
inline std::vector<complex> bernoulli_coeffs(const MultiGammaParams& p, complex x, int order) {
    std::vector<SeriesCoeffs<complex>> factors;
    factors.reserve(p.a.size() + 1);
    for (double ai : p.a) factors.push_back(to_complex(bernoulli_factor_series(ai, order)));
    if (x != complex{}) factors.push_back(exp_series(-x, order));
    return series_product(factors, order).c;
}

inline std::vector<double> bernoulli_coeffs(const MultiGammaParams& p, double x, int order) {
    std::vector<SeriesCoeffs<double>> factors;
    factors.reserve(p.a.size() + 1);
    for (double ai : p.a) factors.push_back(bernoulli_factor_series(ai, order));
    if (x != 0.0) factors.push_back(exp_series(-x, order));
    return series_product(factors, order).c;
}

// Internal switch: the integral stays the authoritative path well past every
// identity-test argument; only far arguments fall through to the expansion.
inline double asymptotic_auto_radius(const MultiGammaParams& p) {
    return 4000.0 * std::max(1.0, p.max_a());
}

}  // namespace detail

// B_{M,m}(x|a): m-th derivative at t=0 of f_M(t|a) e^{-xt}.  Degree m in x.
inline complex bernoulli_poly(const MultiGammaParams& params, int m, complex x,
                              int max_order = -1) {
    if (max_order < 0) max_order = 2 * params.order() + 4;
    if (m < 0 || m > max_order)
        throw domain_error("bernoulli_poly: order m out of range (cap " +
                           std::to_string(max_order) + ")");
    const auto coeffs = detail::bernoulli_coeffs(params, x, m);
    double fact = 1.0;
    for (int k = 2; k <= m; ++k) fact *= k;
    return coeffs[static_cast<std::size_t>(m)] * fact;
}

inline double bernoulli_poly(const MultiGammaParams& params, int m, double x,
                             int max_order = -1) {
    return bernoulli_poly(params, m, complex(x, 0.0), max_order).real();
}

// Large-|w| expansion: -B_{M,M}(w|a) log(w)/M! plus the harmonic-weighted
// polynomial; the k=M term of the sum carries an empty harmonic factor and
// contributes only through the log term.  Remainder is O(1/w) on
// |arg w| < pi.
inline complex log_multi_gamma_asymptotic(const MultiGammaParams& params, complex w,
                                          double switch_radius_mult = 20.0) {
    const int M = params.order();
    if (!(std::abs(std::arg(w)) < M_PI) || w == complex{})
        throw domain_error("log_multi_gamma_asymptotic: requires |arg w| < pi");
    if (std::abs(w) < switch_radius_mult * params.max_a())
        throw domain_error("log_multi_gamma_asymptotic: |w| is below the switch radius");
    const auto cw = detail::bernoulli_coeffs(params, w, M);
    complex value = -cw[static_cast<std::size_t>(M)] * std::log(w);
    const auto c0 = detail::bernoulli_coeffs(params, 0.0, M);
    complex mw_pow = 1.0;  // (-w)^{M-k} built downward from k=M
    double fact = 1.0;
    for (int k = M - 1; k >= 0; --k) {
        mw_pow *= -w;
        fact *= (M - k);
        value += c0[static_cast<std::size_t>(k)] * mw_pow * (harmonic(M - k) / fact);
    }
    return value;
}

// log Gamma_M(w|a) for Re(w) > 0 by the Malmsten-type integral; the small-t
// region runs on the Taylor side of the integrand where the naive form
// cancels.  M=0 is exactly -log w.
inline complex log_multi_gamma(const MultiGammaParams& params, complex w,
                               double rel_tol = 1e-10) {
    const int M = params.order();
    if (!(w.real() > 0)) throw domain_error("log_multi_gamma: requires Re(w) > 0");
    if (M == 0) return -std::log(w);
    if (std::abs(w) > detail::asymptotic_auto_radius(params))
        return log_multi_gamma_asymptotic(params, w);

    const int extra = 28;
    const auto c = detail::bernoulli_coeffs(params, w, M + extra);
    const auto& a = params.a;

    // Past the head panel the subtracted Taylor terms are moved out of the
    // integrand and integrated in closed form (each t^{k-M-1} gives 1/(M-k)
    // on [1,inf)), leaving a purely exponential numeric tail.
    SemilineIntegrand<complex> f;
    f.eval = [&a, &c, M, w](double t) -> complex {
        double fm = 1.0;
        for (double ai : a) fm *= t / (-std::expm1(-ai * t));
        complex top = std::exp(-w * t) * fm;
        double tk = 1.0;
        if (t <= 1.0) {
            for (int k = 0; k < M; ++k) {
                top -= c[static_cast<std::size_t>(k)] * tk;
                tk *= t;
            }
        } else {
            for (int k = 0; k < M; ++k) tk *= t;
        }
        top -= c[static_cast<std::size_t>(M)] * (tk * std::exp(-t));
        return top / (tk * t);
    };
    f.small_t = [&c, M, extra](double t) -> complex {
        complex acc{};
        for (int m = M + extra; m > M; --m)
            acc = acc * t + c[static_cast<std::size_t>(m)];
        return acc + c[static_cast<std::size_t>(M)] * one_minus_exp_over(t);
    };
    // Trust radius: nearest integrand pole 2 pi / max a, shrunk so |w| t stays
    // small enough for the truncated series.
    f.radius_hint = std::min(2.0 * M_PI / params.max_a(), 16.0 / std::max(1.0, std::abs(w)));
    complex tail_closed{};
    for (int k = 0; k < M; ++k) tail_closed += c[static_cast<std::size_t>(k)] / double(M - k);
    return integrate_semiline(f, 1.0, rel_tol).value - tail_closed;
}

// log Gamma_M(w|a) continued to Re(w) <= 0 through the functional equation on
// axis i; always applies at least one shift.  Throws pole_error if the
// recursion lands on the pole lattice.
inline complex extend_by_functional_eq(const MultiGammaParams& params, complex w, int axis);

namespace detail {

// Any-argument evaluator: direct integral once Re(w) is comfortably positive,
// otherwise recursive shifts along the widest axis.
inline complex log_multi_gamma_any(const MultiGammaParams& params, complex w) {
    const int M = params.order();
    if (M == 0) {
        if (std::abs(w) <= 1e-12) throw pole_error("log_multi_gamma: pole of Gamma_0", w);
        return -std::log(w);
    }
    if (w.real() > 0) return log_multi_gamma(params, w);
    int widest = 0;
    for (int i = 1; i < M; ++i)
        if (params.a[static_cast<std::size_t>(i)] > params.a[static_cast<std::size_t>(widest)])
            widest = i;
    return extend_by_functional_eq(params, w, widest);
}

}  // namespace detail

inline complex extend_by_functional_eq(const MultiGammaParams& params, complex w, int axis) {
    const int M = params.order();
    if (M == 0) return detail::log_multi_gamma_any(params, w);
    if (axis < 0 || axis >= M) throw domain_error("extend_by_functional_eq: bad axis");
    const double ai = params.a[static_cast<std::size_t>(axis)];
    const MultiGammaParams dropped = params.drop_axis(axis);
    // Gamma_M(w|a) = prod_k Gamma_{M-1}(w + k a_i | a-hat_i) * Gamma_M(w + K a_i | a)
    const double target = 0.5 * std::max(1.0, params.max_a());
    long shifts = 1 + std::max(0L, static_cast<long>(std::ceil((target - w.real()) / ai)));
    if (shifts > 200000)
        throw domain_error("extend_by_functional_eq: shift budget exceeded (Re(w) too negative)");
    complex acc{};
    for (long k = 0; k < shifts; ++k)
        acc += detail::log_multi_gamma_any(dropped, w + static_cast<double>(k) * ai);
    return acc + log_multi_gamma(params, w + static_cast<double>(shifts) * ai);
}

// S_M(w|a) = Gamma_M(|a|-w|a)^{(-1)^M} / Gamma_M(w|a).
inline complex log_multiple_sine(const MultiGammaParams& params, complex w) {
    const double sign = params.order() % 2 == 0 ? 1.0 : -1.0;
    const complex reflected = detail::log_multi_gamma_any(params, params.sum_a() - w);
    const complex direct = detail::log_multi_gamma_any(params, w);
    return sign * reflected - direct;
}

inline complex multiple_sine(const MultiGammaParams& params, complex w) {
    return std::exp(log_multiple_sine(params, w));
}

}  // namespace bbeta
