#pragma once

// Barnes beta laws beta_{M,N}(a,b) on (0,1] / (0,1) / (0,inf): the
// alternating shift operator, the Mellin transform computed both from
// multiple gamma products and from the Levy-Khinchine exponent, atom mass,
// integer moments, infinite factorizations, exact samplers, and the
// Stieltjes determinacy test for the M = N+1 regime.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bbeta/errors.hpp"
#include "bbeta/inversion.hpp"
#include "bbeta/mathutil.hpp"
#include "bbeta/multigamma.hpp"
#include "bbeta/quadrature.hpp"
#include "bbeta/rng.hpp"

namespace bbeta {

enum class BetaRegime { SUB, CRITICAL, SUPER };

// Parameter set (a_1..a_M | b_0..b_N).  The activity regime is derived:
// M < N finite Levy mass (atom at 1), M = N infinite mass, M = N+1 adds the
// compensator drift and unbounded support.
struct BarnesBetaSpec {
    int M = 0;
    int N = 0;
    std::vector<double> a;
    std::vector<double> b;
    BetaRegime regime = BetaRegime::SUB;

    BarnesBetaSpec(std::vector<double> a_in, std::vector<double> b_in)
        : a(std::move(a_in)), b(std::move(b_in)) {
        if (b.empty()) throw domain_error("BarnesBetaSpec: b must contain b_0");
        M = static_cast<int>(a.size());
        N = static_cast<int>(b.size()) - 1;
        for (double v : a)
            if (!(v > 0)) throw domain_error("BarnesBetaSpec: a entries must be > 0");
        for (double v : b)
            if (!(v > 0)) throw domain_error("BarnesBetaSpec: b entries must be > 0");
        if (M > N + 1) throw domain_error("BarnesBetaSpec: requires M <= N+1");
        if (N > 20) throw domain_error("BarnesBetaSpec: N > 20 refused (2^N cost)");
        regime = M < N ? BetaRegime::SUB : (M == N ? BetaRegime::CRITICAL : BetaRegime::SUPER);
    }

    double b0() const { return b[0]; }
    double prod_a() const {
        double p = 1.0;
        for (double v : a) p *= v;
        return p;
    }
    double prod_b_tail() const {
        double p = 1.0;
        for (std::size_t j = 1; j < b.size(); ++j) p *= b[j];
        return p;
    }
    // Levy density value at t = 0+ times t^{M-N+1}; also the q log q
    // coefficient in the M = N+1 regime.
    double levy_scale() const { return prod_b_tail() / prod_a(); }
};

// Ratio law beta_{M,M-1}(a,b) / beta_{M,M-1}(a,bbar) where bbar differs from
// b only in the zeroth entry.
struct RatioSpec {
    BarnesBetaSpec base;
    double bbar0;

    RatioSpec(BarnesBetaSpec base_in, double bbar0_in) : base(std::move(base_in)), bbar0(bbar0_in) {
        if (base.regime != BetaRegime::SUPER)
            throw domain_error("RatioSpec: base must have regime SUPER (M = N+1)");
        if (!(bbar0 > 0)) throw domain_error("RatioSpec: bbar0 must be > 0");
    }

    // Denominator b_0 chosen so the ratio law reduces to multiple-sine
    // Mellin factors: bbar0 = |a| - sum_j b_j, required positive.
    static RatioSpec with_sine_b0(BarnesBetaSpec base_in) {
        double s = 0.0;
        for (double v : base_in.a) s += v;
        for (double v : base_in.b) s -= v;
        if (!(s > 0))
            throw domain_error("RatioSpec: sine choice needs sum(a) - sum(b) > 0, got " +
                               std::to_string(s));
        return RatioSpec(std::move(base_in), s);
    }

    BarnesBetaSpec bar_spec() const {
        std::vector<double> bb = base.b;
        bb[0] = bbar0;
        return BarnesBetaSpec(base.a, bb);
    }
};

// Alternating sum over subsets of (b_1..b_N), every term shifted by b_0:
// sum_{p} (-1)^p sum_{k_1<..<k_p} h(q + b_0 + b_{k_1} + .. + b_{k_p}).
template <class H>
std::complex<double> s_operator(H&& h, std::complex<double> q, const std::vector<double>& b) {
    if (b.empty()) throw domain_error("s_operator: b must contain b_0");
    const int N = static_cast<int>(b.size()) - 1;
    if (N > 20) throw domain_error("s_operator: N > 20 refused (2^N cost)");
    std::complex<double> total{0.0, 0.0};
    for (std::uint32_t mask = 0; mask < (1u << N); ++mask) {
        double shift = b[0];
        int bits = 0;
        for (int j = 0; j < N; ++j) {
            if (mask >> j & 1u) {
                shift += b[static_cast<std::size_t>(j) + 1];
                ++bits;
            }
        }
        const std::complex<double> term = h(q + shift);
        total += (bits & 1) ? -term : term;
    }
    return total;
}

namespace detail {

// e^{-b0 t} prod_j (1-e^{-b_j t})/t prod_i t/(1-e^{-a_i t}); positive on
// t > 0 with limit prod b_j / prod a_i at t = 0+.
inline double levy_w(const BarnesBetaSpec& s, double t) {
    double w = std::exp(-s.b[0] * t);
    for (std::size_t j = 1; j < s.b.size(); ++j) w *= -std::expm1(-s.b[j] * t) / t;
    for (double ai : s.a) w *= t / -std::expm1(-ai * t);
    return w;
}

inline std::complex<double> levy_w(const BarnesBetaSpec& s, std::complex<double> t) {
    std::complex<double> w = std::exp(-s.b[0] * t);
    for (std::size_t j = 1; j < s.b.size(); ++j) w *= -cexpm1(-s.b[j] * t) / t;
    for (double ai : s.a) w *= t / -cexpm1(-ai * t);
    return w;
}

// Levy density nu(t) = levy_w(t) * t^{N-M-1}.
template <class T>
T levy_nu(const BarnesBetaSpec& s, T t) {
    T v = levy_w(s, t);
    const int p = s.N - s.M - 1;
    for (int k = 0; k < p; ++k) v *= t;
    for (int k = 0; k < -p; ++k) v /= t;
    return v;
}

// Pointwise-stable exponent integrand.  M <= N: (e^{-qt}-1) nu(t).  M = N+1:
// (e^{-qt}-1+qt) w(t)/t^2 + q (c e^{-t} - w(t))/t, whose two pieces are the
// compensated jump part and the drift part of the same unsplit integrand.
inline std::complex<double> lk_integrand(const BarnesBetaSpec& s, std::complex<double> q,
                                         std::complex<double> t) {
    const std::complex<double> w = levy_w(s, t);
    if (s.regime == BetaRegime::SUPER) {
        const std::complex<double> jump = cexpm1m(-q * t) * w / (t * t);
        const std::complex<double> drift = q * (s.levy_scale() * std::exp(-t) - w) / t;
        return jump + drift;
    }
    std::complex<double> v = (cexpm1(-q * t) / t) * w;
    for (int k = 0; k < s.N - s.M; ++k) v *= t;
    return v;
}

inline std::complex<double> log_eta_gamma_route(const BarnesBetaSpec& spec,
                                                std::complex<double> q) {
    const MultiGammaParams pa(spec.a);
    auto h = [&pa](std::complex<double> w) { return log_multi_gamma_any(pa, w); };
    try {
        return s_operator(h, q, spec.b) - s_operator(h, std::complex<double>{0.0, 0.0}, spec.b);
    } catch (const pole_error& e) {
        throw pole_error(std::string("log_eta: multiple gamma pole among the shifted arguments "
                                     "q + b_0 + subset sum: ") +
                             e.what(),
                         e.location);
    }
}

}  // namespace detail

// log Mellin transform log E[beta^q] from alternating multiple gamma
// products; exactly 0 at q = 0.  The ray (-inf, -b_0] is outside the domain.
inline std::complex<double> log_eta(const BarnesBetaSpec& spec, std::complex<double> q) {
    if (q.imag() == 0.0 && q.real() <= -spec.b0())
        throw domain_error("log_eta: q lies on the forbidden ray (-inf, -b_0]");
    if (q == std::complex<double>{0.0, 0.0}) return {0.0, 0.0};
    return detail::log_eta_gamma_route(spec, q);
}

// Same quantity from the exponent integral; the agreement of the two routes
// is the module's central cross-check.  Requires Re(q) > -b_0.
inline std::complex<double> log_eta_lk(const BarnesBetaSpec& spec, std::complex<double> q,
                                       double rel_tol = 1e-9) {
    if (!(q.real() > -spec.b0()))
        throw domain_error("log_eta_lk: requires Re(q) > -b_0");
    if (q == std::complex<double>{0.0, 0.0}) return {0.0, 0.0};
    SemilineIntegrand<std::complex<double>> f;
    f.eval = [&spec, q](double t) {
        return detail::lk_integrand(spec, q, std::complex<double>{t, 0.0});
    };
    return integrate_semiline(f, 1.0, rel_tol).value;
}

// P[beta = 1] for M < N, computed as exp(-integral of the Levy density) and
// cross-checked against the gamma-product route exp(-(S_N log Gamma_M)(0)).
inline double atom_mass(const BarnesBetaSpec& spec) {
    if (spec.regime != BetaRegime::SUB)
        throw domain_error("atom_mass: defined only for M < N (finite Levy mass)");
    SemilineIntegrand<double> f;
    f.eval = [&spec](double t) { return detail::levy_nu(spec, t); };
    const double mass_integral = integrate_semiline(f, 1.0, 1e-10).value;

    const MultiGammaParams pa(spec.a);
    auto h = [&pa](std::complex<double> w) { return detail::log_multi_gamma_any(pa, w); };
    const double via_gamma = s_operator(h, {0.0, 0.0}, spec.b).real();
    if (!(std::abs(mass_integral - via_gamma) <= 1e-8 * std::max(1.0, std::abs(mass_integral))))
        throw verification_error(
            "atom_mass: Levy integral and gamma-product exponents disagree: " +
            std::to_string(mass_integral) + " vs " + std::to_string(via_gamma));
    return std::exp(-mass_integral);
}

// Integer moments E[beta^k] via reduced-order gamma sums along an axis with
// a_i = 1.  Negative orders require |k| < b_0.
inline double moment(const BarnesBetaSpec& spec, int k) {
    std::size_t axis = spec.a.size();
    for (std::size_t i = 0; i < spec.a.size(); ++i) {
        if (std::abs(spec.a[i] - 1.0) <= 1e-12) {
            axis = i;
            break;
        }
    }
    if (axis == spec.a.size())
        throw domain_error("moment: requires some a_i = 1");
    if (k == 0) return 1.0;

    std::vector<double> reduced_a;
    for (std::size_t i = 0; i < spec.a.size(); ++i)
        if (i != axis) reduced_a.push_back(spec.a[i]);
    const MultiGammaParams pr(reduced_a);
    auto h = [&pr](std::complex<double> w) { return detail::log_multi_gamma_any(pr, w); };

    std::complex<double> acc{0.0, 0.0};
    if (k > 0) {
        for (int l = 0; l < k; ++l)
            acc += s_operator(h, std::complex<double>{static_cast<double>(l), 0.0}, spec.b);
        return std::exp(-acc).real();
    }
    const int m = -k;
    if (!(m < spec.b0()))
        throw domain_error("moment: negative order requires |k| < b_0");
    for (int l = 0; l < m; ++l)
        acc += s_operator(h, std::complex<double>{-static_cast<double>(l + 1), 0.0}, spec.b);
    return std::exp(acc).real();
}

namespace detail {

// Frozen quadrature for phi(u) = exp(log_eta_lk(iu)) along the rotated ray
// t = e^{-i pi/4} s, on which e^{-iut} decays like e^{-us/sqrt2} instead of
// oscillating.  Nodes are shared across all u; per call the node sum is cut
// once the decaying factor times the coefficient tail is negligible.
struct CfCache {
    std::vector<double> s;                   // ray arclength, ascending
    std::vector<std::complex<double>> coef;  // jacobian * weight * kernel(ray node)
    std::vector<double> tail;                // tail[k] = sum_{j >= k} |coef_j|
    std::complex<double> sum0{0.0, 0.0};     // sum of coef
    std::vector<std::complex<double>> t0;    // suffix sums of coef
    std::vector<std::complex<double>> t1;    // suffix sums of coef * s
    double drift = 0.0;                      // linear exponent term (M = N+1)
    bool compensated = false;                // M = N+1 kernel e^z - 1 - z

    std::complex<double> log_phi(double u) const {
        if (u == 0.0) return {0.0, 0.0};
        if (u < 0.0) return std::conj(log_phi(-u));
        const double rate = u * M_SQRT1_2;
        std::complex<double> acc{0.0, 0.0};
        if (compensated) {
            // The kernel e^z - 1 - z must stay fused per node: coef alone is
            // w/t^2, non-integrable at 0, so split sums would cancel badly.
            std::size_t k = 0;
            for (; k < s.size(); ++k) {
                const double x = rate * s[k];
                if (x > 40.0) break;
                acc += coef[k] * cexpm1m({-x, -x});
            }
            // Past the decay horizon e^z is below 4e-18; the -1 - z parts sum
            // in closed form over the remaining nodes.
            if (k < s.size())
                acc += -t0[k] + std::complex<double>(rate, rate) * t1[k];
            return acc + std::complex<double>(0.0, u * drift);
        }
        for (std::size_t k = 0; k < s.size(); ++k) {
            const double x = rate * s[k];
            if (x > 40.0 && tail[k] * std::exp(-x) < 1e-17 * (1.0 + std::abs(acc))) break;
            const double damp = std::exp(-x);
            acc += coef[k] * std::complex<double>(damp * std::cos(x), -damp * std::sin(x));
        }
        acc -= sum0;
        return acc;
    }
};

// Adaptive reference for the same rotated integral; used to verify the
// frozen node set at probe frequencies.
inline std::complex<double> log_phi_adaptive(const BarnesBetaSpec& spec, double u, double drift,
                                             double split) {
    const std::complex<double> jac{M_SQRT1_2, -M_SQRT1_2};
    const std::complex<double> q{0.0, u};
    SemilineIntegrand<std::complex<double>> f;
    if (spec.regime == BetaRegime::SUPER) {
        // Jump part only; the drift constant is added analytically.
        f.eval = [&spec, q, jac](double sv) {
            const std::complex<double> t = jac * sv;
            return jac * (cexpm1m(-q * t) * levy_w(spec, t) / (t * t));
        };
    } else {
        f.eval = [&spec, q, jac](double sv) {
            return jac * lk_integrand(spec, q, jac * sv);
        };
    }
    std::complex<double> v = integrate_semiline(f, split, 1e-10).value;
    if (spec.regime == BetaRegime::SUPER) v += std::complex<double>{0.0, u * drift};
    return v;
}

inline CfCache build_cf_cache(const BarnesBetaSpec& spec, double u_max, double drift) {
    double rmax = spec.b[0];
    for (double v : spec.a) rmax = std::max(rmax, v);
    for (double v : spec.b) rmax = std::max(rmax, v);
    const double s_first = std::min(1.0 / (3.0 * u_max), 0.5 / rmax);
    const double s_cut = 88.0 / spec.b0();
    const std::complex<double> jac{M_SQRT1_2, -M_SQRT1_2};

    for (int level = 5; level <= 7; ++level) {
        CfCache cache;
        cache.drift = drift;
        cache.compensated = spec.regime == BetaRegime::SUPER;
        const double h = std::ldexp(1.0, -level);
        const TsTable& tab = ts_table();
        std::vector<std::pair<double, double>> raw;  // (s, weight)
        double lo = 0.0, hi = s_first;
        for (int panel = 0; panel < 80; ++panel) {
            const double c = 0.5 * (lo + hi);
            const double r = 0.5 * (hi - lo);
            raw.emplace_back(c, tab.w0 * h * r);
            for (int lv = 0; lv <= level; ++lv) {
                for (const TsNode& n : tab.levels[static_cast<std::size_t>(lv)]) {
                    raw.emplace_back(lo + r * n.em, n.w * h * r);
                    raw.emplace_back(hi - r * n.em, n.w * h * r);
                }
            }
            if (hi >= s_cut) break;
            lo = hi;
            hi = 2.0 * hi;
        }
        std::sort(raw.begin(), raw.end());

        cache.s.reserve(raw.size());
        cache.coef.reserve(raw.size());
        for (const auto& [sv, wv] : raw) {
            const std::complex<double> t = jac * sv;
            std::complex<double> cf;
            if (spec.regime == BetaRegime::SUPER)
                cf = jac * wv * (levy_w(spec, t) / (t * t));
            else
                cf = jac * wv * levy_nu(spec, t);
            cache.s.push_back(sv);
            cache.coef.push_back(cf);
            cache.sum0 += cf;
        }
        cache.tail.assign(cache.coef.size() + 1, 0.0);
        for (std::size_t k = cache.coef.size(); k-- > 0;)
            cache.tail[k] = cache.tail[k + 1] + std::abs(cache.coef[k]);
        cache.tail.pop_back();
        if (cache.compensated) {
            const std::size_t n = cache.coef.size();
            cache.t0.assign(n + 1, {0.0, 0.0});
            cache.t1.assign(n + 1, {0.0, 0.0});
            for (std::size_t k = n; k-- > 0;) {
                cache.t0[k] = cache.t0[k + 1] + cache.coef[k];
                cache.t1[k] = cache.t1[k + 1] + cache.coef[k] * cache.s[k];
            }
        }

        bool ok = true;
        for (double frac : {1.0, 0.31, 0.1, 0.031, 0.01, 0.001}) {
            const double u = u_max * frac;
            const std::complex<double> ref = log_phi_adaptive(spec, u, drift, s_first * 4.0);
            const std::complex<double> got = cache.log_phi(u);
            if (!(std::abs(got - ref) <= 5e-7 * std::max(1.0, std::abs(ref)))) {
                ok = false;
                break;
            }
        }
        if (ok) return cache;
    }
    throw convergence_error(
        "build_cf_cache: frozen quadrature failed verification against the adaptive integral");
}

// Exponent cumulants of log beta used to place the inversion grid.
inline void log_law_cumulants(const BarnesBetaSpec& spec, double& mean, double& variance) {
    SemilineIntegrand<double> f;
    if (spec.regime == BetaRegime::SUPER) {
        const double c = spec.levy_scale();
        f.eval = [&spec, c](double t) { return (c * std::exp(-t) - levy_w(spec, t)) / t; };
        mean = integrate_semiline(f, 1.0, 1e-9).value;
        f.eval = [&spec](double t) { return levy_w(spec, t); };
        variance = integrate_semiline(f, 1.0, 1e-9).value;
        return;
    }
    f.eval = [&spec](double t) { return levy_w(spec, t); };
    mean = -integrate_semiline(f, 1.0, 1e-9).value;
    f.eval = [&spec](double t) { return t * levy_w(spec, t); };
    variance = integrate_semiline(f, 1.0, 1e-9).value;
}

// Tabulated CDF of log beta for the CRITICAL and SUPER regimes.  CRITICAL
// needs Gaussian damping (the CF decays only algebraically); the chosen
// 4e-3 sigma convolution perturbs the law far below the test tolerances.
// The CRITICAL grid is clamped below 0 so draws stay inside (0,1).
inline TabulatedCDF tabulate_log_law(const BarnesBetaSpec& spec) {
    double mean = 0.0, variance = 0.0;
    log_law_cumulants(spec, mean, variance);
    const double sigma = std::sqrt(variance);

    double damping = 0.0, u_max = 0.0, span = 12.0;
    if (spec.regime == BetaRegime::CRITICAL) {
        damping = 4e-3 * sigma;
        u_max = 8.0 / damping;
    } else {
        u_max = (2.0 / (M_PI * spec.levy_scale())) * 40.0 + 30.0;
        span = 20.0;
    }
    double drift = 0.0;
    if (spec.regime == BetaRegime::SUPER) drift = mean;  // exact first cumulant
    const CfCache cache = build_cf_cache(spec, u_max, drift);

    double lo = mean - span * sigma;
    double hi = mean + span * sigma;
    if (spec.regime == BetaRegime::CRITICAL) hi = std::min(hi, -1e-12);
    const std::size_t npts = 4096;
    std::vector<double> grid(npts);
    for (std::size_t i = 0; i < npts; ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(npts - 1);

    auto phi = [cache](double u) { return std::exp(cache.log_phi(u)); };
    return invert_cf_to_cdf(phi, std::move(grid), damping, 1e-8);
}

// Compound Poisson path for M < N: jump density nu/Lambda sampled by
// rejection against Gamma(N-M, b_0), whose ratio prod_j (1-e^{-b_j t})/t *
// prod_i t/(1-e^{-a_i t}) is bounded and scanned once for its supremum.
struct SubSampler {
    double lambda;
    double ceiling;
    int shape;
    double rate;

    explicit SubSampler(const BarnesBetaSpec& spec) {
        lambda = -std::log(atom_mass(spec));
        shape = spec.N - spec.M;
        rate = spec.b0();
        double rmin = spec.b[0], rmax = spec.b[0];
        for (double v : spec.a) rmin = std::min(rmin, v), rmax = std::max(rmax, v);
        for (double v : spec.b) rmin = std::min(rmin, v), rmax = std::max(rmax, v);
        double best = 0.0;
        const int npts = 4096;
        const double tlo = std::log(1e-7 / rmax), thi = std::log(2e3 / rmin);
        for (int i = 0; i <= npts; ++i) {
            const double t = std::exp(tlo + (thi - tlo) * i / npts);
            best = std::max(best, ratio(spec, t));
        }
        best = std::max(best, spec.levy_scale());  // t -> 0 limit
        ceiling = 1.01 * best;
    }

    static double ratio(const BarnesBetaSpec& spec, double t) {
        double r = 1.0;
        for (std::size_t j = 1; j < spec.b.size(); ++j) r *= -std::expm1(-spec.b[j] * t) / t;
        for (double ai : spec.a) r *= t / -std::expm1(-ai * t);
        return r;
    }

    double draw_jump(const BarnesBetaSpec& spec, Rng& rng) const {
        for (int it = 0; it < 100000; ++it) {
            const double t = rng.gamma(static_cast<double>(shape)) / rate;
            const double r = ratio(spec, t);
            if (r > ceiling)
                throw verification_error("SubSampler: rejection ceiling undershoots the ratio");
            if (rng.uniform() * ceiling <= r) return t;
        }
        throw convergence_error("SubSampler: rejection loop did not accept");
    }
};

}  // namespace detail

// i.i.d. draws of beta_{M,N}(a,b).  SUB: exact compound Poisson with an atom
// at 1.  CRITICAL / SUPER: inverse-CDF from characteristic-function
// inversion of exp(log_eta(iu)).
inline std::vector<double> sample(const BarnesBetaSpec& spec, std::size_t n, std::uint64_t seed) {
    std::vector<double> out;
    if (n == 0) return out;
    out.reserve(n);
    Rng rng(seed);
    if (spec.regime == BetaRegime::SUB) {
        const detail::SubSampler sub(spec);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t jumps = rng.poisson(sub.lambda);
            if (jumps == 0) {
                out.push_back(1.0);
                continue;
            }
            double acc = 0.0;
            for (std::uint64_t j = 0; j < jumps; ++j) acc += sub.draw_jump(spec, rng);
            out.push_back(std::exp(-acc));
        }
        return out;
    }
    const TabulatedCDF tab = detail::tabulate_log_law(spec);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(std::exp(sample_from_cdf(tab, rng.uniform())));
    return out;
}

// Draws of the ratio beta_{M,M-1}(a,b) / beta_{M,M-1}(a,bbar) from two
// independent substreams.
inline std::vector<double> sample_ratio(const RatioSpec& rs, std::size_t n, std::uint64_t seed) {
    std::vector<double> out;
    if (n == 0) return out;
    const std::vector<double> num = sample(rs.base, n, mix_seed(seed, 0x726e756dULL));
    const std::vector<double> den = sample(rs.bar_spec(), n, mix_seed(seed, 0x7264656eULL));
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = num[i] / den[i];
    return out;
}

enum class FactorizationMode { shintani, barnes };

// Partial product of the two infinite factorizations of exp(log_eta(q)).
// shintani: product over shifts k a_M of order-(M-1) transforms.  barnes:
// alternating rational product over the lattice sum(n_i a_i) <= T min(a).
inline std::complex<double> factorization_partial_product(const BarnesBetaSpec& spec,
                                                          std::complex<double> q,
                                                          FactorizationMode mode, long T) {
    if (T < 1) throw domain_error("factorization_partial_product: T must be >= 1");
    if (q.imag() == 0.0 && q.real() <= -spec.b0())
        throw domain_error("factorization_partial_product: q lies on the forbidden ray");

    if (mode == FactorizationMode::shintani) {
        if (spec.M < 1)
            throw domain_error("factorization_partial_product: shintani mode needs M >= 1");
        std::vector<double> reduced_a(spec.a.begin(), spec.a.end() - 1);
        const double ai = spec.a.back();
        const MultiGammaParams pr(reduced_a);
        auto h = [&pr](std::complex<double> w) { return detail::log_multi_gamma_any(pr, w); };
        std::complex<double> log_total{0.0, 0.0};
        for (long k = 0; k <= T; ++k) {
            const std::complex<double> shift{static_cast<double>(k) * ai, 0.0};
            log_total += s_operator(h, q + shift, spec.b) - s_operator(h, shift, spec.b);
        }
        return std::exp(log_total);
    }

    // barnes mode: each lattice point contributes the order-0 transform with
    // b_0 shifted by Omega = sum n_i a_i.
    const double bound = static_cast<double>(T) * (spec.a.empty()
                                                       ? 0.0
                                                       : *std::min_element(spec.a.begin(),
                                                                           spec.a.end())) *
                             (1.0 + 1e-12) +
                         1e-12;
    auto h_log = [&q](std::complex<double> w, bool shifted) -> std::complex<double> {
        const std::complex<double> x = shifted ? w + q : w;
        if (std::abs(x) < 1e-300)
            throw pole_error("factorization_partial_product: factor vanishes", x);
        return std::log(x);
    };
    std::complex<double> log_total{0.0, 0.0};
    long points = 0;
    std::vector<long> n(static_cast<std::size_t>(spec.M), 0);
    std::function<void(std::size_t, double)> walk = [&](std::size_t dim, double omega) {
        if (dim == n.size()) {
            if (++points > 2000000)
                throw domain_error("factorization_partial_product: lattice budget exceeded");
            auto plain = [&](std::complex<double> w) { return h_log(w + omega, false); };
            auto moved = [&](std::complex<double> w) { return h_log(w + omega, true); };
            log_total += s_operator(plain, {0.0, 0.0}, spec.b) -
                         s_operator(moved, {0.0, 0.0}, spec.b);
            return;
        }
        for (long k = 0;; ++k) {
            const double next = omega + static_cast<double>(k) * spec.a[dim];
            if (next > bound) break;
            walk(dim + 1, next);
        }
    };
    walk(0, 0.0);
    return std::exp(log_total);
}

// Stieltjes moment determinacy for the M = N+1 regime: the moment problem
// has a unique solution iff prod_{j>=1} b_j <= 2 prod_i a_i.
inline bool stieltjes_determinate(const BarnesBetaSpec& spec) {
    if (spec.regime != BetaRegime::SUPER)
        throw domain_error("stieltjes_determinate: defined for regime SUPER only");
    return spec.prod_b_tail() <= 2.0 * spec.prod_a();
}

}  // namespace bbeta
