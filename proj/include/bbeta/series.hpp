#pragma once

// Truncated Taylor series around t = 0 with Cauchy-product arithmetic.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "bbeta/errors.hpp"

namespace bbeta {

// Coefficients c[0..K] of sum_k c[k] t^k.  radius_hint tells consumers up to
// where the truncated tail can be trusted; it is a hint, not a certificate.
template <class T = double>
struct SeriesCoeffs {
    std::vector<T> c;
    double radius_hint = std::numeric_limits<double>::infinity();

    int order() const { return static_cast<int>(c.size()) - 1; }

    T eval(double t) const {
        T acc{};
        for (std::size_t i = c.size(); i-- > 0;) acc = acc * t + c[i];
        return acc;
    }
};

// Cauchy product of all factors truncated at order K.  The empty product is
// the identity series (1, 0, ..., 0).  Associative and commutative up to
// rounding; radius_hint of the product is the minimum over the factors.
template <class T>
SeriesCoeffs<T> series_product(const std::vector<SeriesCoeffs<T>>& factors, int K) {
    if (K < 0) throw domain_error("series_product: truncation order must be >= 0");
    SeriesCoeffs<T> out;
    out.c.assign(static_cast<std::size_t>(K) + 1, T{});
    out.c[0] = T{1};
    for (const auto& f : factors) {
        if (f.c.empty()) throw domain_error("series_product: empty factor");
        out.radius_hint = std::min(out.radius_hint, f.radius_hint);
        std::vector<T> next(static_cast<std::size_t>(K) + 1, T{});
        const int fo = f.order();
        for (int i = 0; i <= K; ++i) {
            if (out.c[i] == T{}) continue;
            const int jmax = std::min(K - i, fo);
            for (int j = 0; j <= jmax; ++j) next[i + j] += out.c[i] * f.c[j];
        }
        out.c.swap(next);
    }
    return out;
}

// Series of t / (1 - e^{-a t}) about t = 0, truncated at order K.  Computed as
// the reciprocal of (1 - e^{-u})/u = sum_k (-u)^k/(k+1)! evaluated at u = a t;
// the constant term is 1/a and the convergence radius is 2*pi/a (nearest pole
// of the integrand factor on the imaginary t-axis).
inline SeriesCoeffs<double> bernoulli_factor_series(double a, int K) {
    if (!(a > 0)) throw domain_error("bernoulli_factor_series: period must be > 0");
    if (K < 0) throw domain_error("bernoulli_factor_series: order must be >= 0");
    const std::size_t n = static_cast<std::size_t>(K) + 1;
    std::vector<double> h(n), g(n);
    h[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k) h[k] = -h[k - 1] / static_cast<double>(k + 1);
    g[0] = 1.0;
    for (std::size_t m = 1; m < n; ++m) {
        double s = 0.0;
        for (std::size_t k = 1; k <= m; ++k) s += h[k] * g[m - k];
        g[m] = -s;
    }
    SeriesCoeffs<double> out;
    out.c.resize(n);
    double apow = 1.0 / a;  // a^{m-1}
    for (std::size_t m = 0; m < n; ++m) {
        out.c[m] = apow * g[m];
        apow *= a;
    }
    out.radius_hint = 2.0 * M_PI / a;
    return out;
}

// Series of e^{x t} truncated at order K (coefficients x^k / k!).
template <class T>
SeriesCoeffs<T> exp_series(T x, int K) {
    if (K < 0) throw domain_error("exp_series: order must be >= 0");
    SeriesCoeffs<T> out;
    out.c.resize(static_cast<std::size_t>(K) + 1);
    out.c[0] = T{1};
    for (int k = 1; k <= K; ++k) out.c[k] = out.c[k - 1] * x / static_cast<double>(k);
    return out;
}

}  // namespace bbeta
