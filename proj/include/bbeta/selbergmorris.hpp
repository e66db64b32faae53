#pragma once

// Selberg and Morris integral probability laws on the double gamma lattice
// a = (1, tau): closed-form Mellin transforms, integer-moment products,
// factorizations into inverse Barnes beta and Frechet components, product
// samplers, involution/self-duality residuals, the critical tau -> 1 laws,
// and low-discrepancy oracles for the defining n-dimensional integrals.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "bbeta/barnesbeta.hpp"
#include "bbeta/errors.hpp"
#include "bbeta/mathutil.hpp"
#include "bbeta/multigamma.hpp"
#include "bbeta/rng.hpp"
#include "bbeta/sobol.hpp"

namespace bbeta {

enum class LawKind { selberg, morris };

struct SelbergParams {
    double tau;
    double lambda1;
    double lambda2;

    SelbergParams(double tau_in, double l1, double l2)
        : tau(tau_in), lambda1(l1), lambda2(l2) {
        if (!(tau > 1.0)) throw domain_error("SelbergParams: tau must exceed 1");
        if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0))
            throw domain_error("SelbergParams: weights must be nonnegative");
    }
};

// Inverse beta_{1,0}(a, b0): a Frechet factor, E[X^q] = a^{-q/a} Gamma((b0-q)/a) / Gamma(b0/a).
struct FrechetFactor {
    double a;
    double b0;
};

// Independent-factor description of a law on (0, infinity).  `constant`
// absorbs every deterministic scale, including the scale of the Frechet
// factor when the source formula attaches one.
struct DistributionComponents {
    double constant = 1.0;
    double lognormal_sigma2 = 0.0;
    std::vector<BarnesBetaSpec> inverse_bb_factors;
    std::vector<FrechetFactor> frechet_factors;
    // One extra independent inverse beta_{1,0}(1,1); multiplies the Mellin
    // transform by Gamma(1-q).  Used by the maximum laws downstream.
    bool extra_gamma_factor = false;
};

struct CriticalLaw {
    LawKind kind;
    double lambda1;
    double lambda2;
    DistributionComponents components;
};

namespace detail {

// Gamma_2 ratio stack shared by both laws, times tau^{q/tau}.  The 2*pi and
// 1/Gamma(1 - 1/tau) prefactors stay OUT of this core: the involution map
// sends tau -> 1/tau, where those prefactors hit Gamma poles that cancel
// exactly against the duality factor Gamma^{q}(1 - tau).
inline std::complex<double> log_mellin_core(LawKind kind, double tau, double l1, double l2,
                                            std::complex<double> q) {
    if (!(tau > 0.0)) throw domain_error("log_mellin_core: tau must be positive");
    if (!(q.real() < tau)) throw domain_error("log_mellin_core: requires Re(q) < tau");
    const MultiGammaParams pa({1.0, tau});
    auto lg = [&pa](std::complex<double> w) { return log_multi_gamma_any(pa, w); };
    std::complex<double> acc = q * (std::log(tau) / tau);
    if (kind == LawKind::selberg) {
        acc += lg(1.0 + tau * (1.0 + l1) - q) - lg({1.0 + tau * (1.0 + l1), 0.0});
        acc += lg(1.0 + tau * (1.0 + l2) - q) - lg({1.0 + tau * (1.0 + l2), 0.0});
        acc += lg(tau - q) - lg({tau, 0.0});
        acc += lg(2.0 + tau * (2.0 + l1 + l2) - q) - lg(2.0 + tau * (2.0 + l1 + l2) - 2.0 * q);
    } else {
        acc += lg(tau * (l1 + l2 + 1.0) + 1.0 - q) - lg({tau * (l1 + l2 + 1.0) + 1.0, 0.0});
        acc += lg(tau - q) - lg({tau, 0.0});
        acc += lg({tau * (1.0 + l1) + 1.0, 0.0}) - lg(tau * (1.0 + l1) + 1.0 - q);
        acc += lg({tau * (1.0 + l2) + 1.0, 0.0}) - lg(tau * (1.0 + l2) + 1.0 - q);
    }
    return acc;
}

inline std::complex<double> clog_gamma(std::complex<double> z) {
    static const MultiGammaParams unit({1.0});
    return log_multi_gamma_any(unit, z) + 0.5 * std::log(2.0 * M_PI);
}

}  // namespace detail

inline std::complex<double> selberg_mellin(const SelbergParams& p, std::complex<double> q) {
    if (!(q.real() < p.tau)) throw domain_error("selberg_mellin: requires Re(q) < tau");
    if (q == std::complex<double>{0.0, 0.0}) return {1.0, 0.0};
    const double pref = std::log(2.0 * M_PI) - std::lgamma(1.0 - 1.0 / p.tau);
    return std::exp(q * pref +
                    detail::log_mellin_core(LawKind::selberg, p.tau, p.lambda1, p.lambda2, q));
}

inline std::complex<double> morris_mellin(const SelbergParams& p, std::complex<double> q) {
    if (!(q.real() < p.tau)) throw domain_error("morris_mellin: requires Re(q) < tau");
    if (q == std::complex<double>{0.0, 0.0}) return {1.0, 0.0};
    const double pref = std::log(2.0 * M_PI) - std::lgamma(1.0 - 1.0 / p.tau);
    return std::exp(q * pref +
                    detail::log_mellin_core(LawKind::morris, p.tau, p.lambda1, p.lambda2, q));
}

// Finite product for the positive integer moments; cross-checked against the
// transform before returning.
inline double selberg_moment_formula(const SelbergParams& p, long l) {
    if (l < 0) throw domain_error("selberg_moment_formula: order must be nonnegative");
    if (!(static_cast<double>(l) < p.tau))
        throw domain_error("selberg_moment_formula: order must be below tau");
    if (l == 0) return 1.0;
    double logv = 0.0;
    for (long k = 0; k < l; ++k) {
        const double kd = static_cast<double>(k), ld = static_cast<double>(l);
        logv += std::lgamma(1.0 - (kd + 1.0) / p.tau) - std::lgamma(1.0 - 1.0 / p.tau);
        logv += std::lgamma(1.0 + p.lambda1 - kd / p.tau) +
                std::lgamma(1.0 + p.lambda2 - kd / p.tau);
        logv -= std::lgamma(2.0 + p.lambda1 + p.lambda2 - (ld + kd - 1.0) / p.tau);
    }
    const double v = std::exp(logv);
    const double m = selberg_mellin(p, {static_cast<double>(l), 0.0}).real();
    if (!(std::abs(v - m) <= 1e-9 * std::max(1.0, std::abs(v))))
        throw verification_error("selberg_moment_formula: product and transform disagree");
    return v;
}

// Negative integer moments of the circle law; cross-checked likewise.
inline double morris_negative_moment(const SelbergParams& p, long n) {
    if (n < 0) throw domain_error("morris_negative_moment: order must be nonnegative");
    if (n == 0) return 1.0;
    double logv = -static_cast<double>(n) * std::log(2.0 * M_PI);
    for (long j = 0; j < n; ++j) {
        const double jd = static_cast<double>(j);
        logv += std::lgamma(1.0 + p.lambda1 + (jd + 1.0) / p.tau) +
                std::lgamma(1.0 + p.lambda2 + (jd + 1.0) / p.tau) +
                std::lgamma(1.0 - 1.0 / p.tau);
        logv -= std::lgamma(1.0 + p.lambda1 + p.lambda2 + (jd + 1.0) / p.tau) +
                std::lgamma(1.0 + jd / p.tau);
    }
    const double v = std::exp(logv);
    const double m = morris_mellin(p, {-static_cast<double>(n), 0.0}).real();
    if (!(std::abs(v - m) <= 1e-9 * std::max(1.0, std::abs(v))))
        throw verification_error("morris_negative_moment: product and transform disagree");
    return v;
}

// Interval law factors.  The transform is symmetric in the two weights; the
// first factor's parameters are printed for the ordered pair and degenerate
// to the unit constant at equal weights, so it is emitted only when the
// ordered difference is positive.
inline DistributionComponents selberg_components(const SelbergParams& p) {
    const double tau = p.tau;
    double l1 = p.lambda1, l2 = p.lambda2;
    if (l1 > l2) std::swap(l1, l2);
    DistributionComponents dc;
    dc.constant = 2.0 * M_PI *
                  std::exp2(-(3.0 * (1.0 + tau) + 2.0 * tau * (l1 + l2)) / tau) /
                  std::tgamma(1.0 - 1.0 / tau) * std::pow(tau, 1.0 / tau);
    dc.lognormal_sigma2 = 4.0 * std::log(2.0) / tau;
    const std::vector<double> a{1.0, tau};
    if (l2 > l1)
        dc.inverse_bb_factors.push_back(BarnesBetaSpec(
            a, {1.0 + tau + tau * l1, tau * (l2 - l1) / 2.0, tau * (l2 - l1) / 2.0}));
    dc.inverse_bb_factors.push_back(
        BarnesBetaSpec(a, {1.0 + tau + tau * (l1 + l2) / 2.0, 0.5, tau / 2.0}));
    const double half = (1.0 + tau + tau * l1 + tau * l2) / 2.0;
    dc.inverse_bb_factors.push_back(BarnesBetaSpec(a, {1.0 + tau, half, half}));
    dc.frechet_factors.push_back({tau, tau});
    return dc;
}

inline DistributionComponents morris_components(const SelbergParams& p) {
    const double tau = p.tau;
    DistributionComponents dc;
    dc.constant = 2.0 * M_PI * std::pow(tau, 1.0 / tau) / std::tgamma(1.0 - 1.0 / tau);
    dc.inverse_bb_factors.push_back(BarnesBetaSpec(
        {1.0, tau}, {tau, 1.0 + tau * p.lambda1, 1.0 + tau * p.lambda2}));
    dc.frechet_factors.push_back({tau, tau * (p.lambda1 + p.lambda2 + 1.0) + 1.0});
    return dc;
}

// Mellin transform of the assembled factor product.
inline std::complex<double> components_mellin(const DistributionComponents& dc,
                                              std::complex<double> q) {
    std::complex<double> acc = q * std::log(dc.constant);
    acc += 0.5 * dc.lognormal_sigma2 * q * q;
    for (const BarnesBetaSpec& spec : dc.inverse_bb_factors) acc += log_eta(spec, -q);
    for (const FrechetFactor& f : dc.frechet_factors) {
        if (!(q.real() < f.b0)) throw domain_error("components_mellin: q beyond a Frechet strip");
        acc += log_eta(BarnesBetaSpec({f.a}, {f.b0}), -q);
    }
    if (dc.extra_gamma_factor) {
        if (!(q.real() < 1.0)) throw domain_error("components_mellin: q beyond the Gamma strip");
        acc += detail::clog_gamma(1.0 - q);
    }
    return std::exp(acc);
}

inline std::vector<double> sample_components(const DistributionComponents& dc, std::size_t n,
                                             std::uint64_t seed) {
    std::vector<double> out(n, dc.constant);
    if (n == 0) return out;
    if (dc.lognormal_sigma2 > 0.0) {
        Rng rng(mix_seed(seed, 0x6c6e6f726dULL));
        const double sigma = std::sqrt(dc.lognormal_sigma2);
        for (double& v : out) v *= std::exp(sigma * rng.normal());
    }
    std::uint64_t tag = 0;
    for (const BarnesBetaSpec& spec : dc.inverse_bb_factors) {
        const std::vector<double> d = sample(spec, n, mix_seed(seed, 0xbb00u + tag));
        for (std::size_t i = 0; i < n; ++i) out[i] /= d[i];
        ++tag;
    }
    for (const FrechetFactor& f : dc.frechet_factors) {
        Rng rng(mix_seed(seed, 0xf500u + tag));
        const double shape = f.b0 / f.a;
        for (double& v : out) v *= std::pow(f.a * rng.gamma(shape), -1.0 / f.a);
        ++tag;
    }
    if (dc.extra_gamma_factor) {
        Rng rng(mix_seed(seed, 0xe7u));
        for (double& v : out) v /= rng.gamma(1.0);
    }
    return out;
}

inline std::vector<double> sample_selberg(const SelbergParams& p, std::size_t n,
                                          std::uint64_t seed) {
    return sample_components(selberg_components(p), n, seed);
}

// F(q|beta): the transform at coupling beta times Gamma(1 - q/beta),
// assembled from the prefactor-free core so the beta <-> 1/beta image never
// evaluates Gamma at a nonpositive integer.
inline std::complex<double> structure_function(LawKind kind, double lambda1, double lambda2,
                                               std::complex<double> q, double beta) {
    if (!(beta > 0.0)) throw domain_error("structure_function: beta must be positive");
    const std::complex<double> qt = q / beta;
    return std::exp(detail::log_mellin_core(kind, 1.0 / (beta * beta), beta * lambda1,
                                            beta * lambda2, qt) +
                    detail::clog_gamma(1.0 - qt));
}

// F(q|beta) - F(q|1/beta): the self-duality residual.
inline std::complex<double> duality_F(LawKind kind, const SelbergParams& p,
                                      std::complex<double> q, double beta = 0.0) {
    if (beta == 0.0) beta = 1.0 / std::sqrt(p.tau);
    if (!(beta > 0.0)) throw domain_error("duality_F: beta must be positive");
    if (!(q.real() < std::min(beta, 1.0 / beta)))
        throw domain_error("duality_F: q outside the common Mellin strip");
    return structure_function(kind, p.lambda1, p.lambda2, q, beta) -
           structure_function(kind, p.lambda1, p.lambda2, q, 1.0 / beta);
}

// tau -> 1 limit law with the Gamma(1-1/tau)/(2*pi) prefactor absorbed.
inline CriticalLaw critical_law(LawKind kind, double lambda1, double lambda2) {
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0))
        throw domain_error("critical_law: weights must be nonnegative");
    CriticalLaw cl{kind, lambda1, lambda2, {}};
    if (kind == LawKind::morris) {
        if (lambda1 != lambda2)
            throw domain_error("critical_law: the circle law needs equal weights");
        const double alpha = lambda1;
        cl.components.constant = 1.0;
        cl.components.inverse_bb_factors.push_back(
            BarnesBetaSpec({1.0, 1.0}, {1.0, 1.0 + alpha, 1.0 + alpha}));
        cl.components.frechet_factors.push_back({1.0, 2.0 * alpha + 2.0});
        return cl;
    }
    double l1 = lambda1, l2 = lambda2;
    if (l1 > l2) std::swap(l1, l2);
    cl.components.constant = std::exp2(-(6.0 + 2.0 * (l1 + l2)));
    cl.components.lognormal_sigma2 = 4.0 * std::log(2.0);
    const std::vector<double> a{1.0, 1.0};
    if (l2 > l1)
        cl.components.inverse_bb_factors.push_back(
            BarnesBetaSpec(a, {2.0 + l1, (l2 - l1) / 2.0, (l2 - l1) / 2.0}));
    cl.components.inverse_bb_factors.push_back(
        BarnesBetaSpec(a, {2.0 + (l1 + l2) / 2.0, 0.5, 0.5}));
    cl.components.inverse_bb_factors.push_back(
        BarnesBetaSpec(a, {2.0, (2.0 + l1 + l2) / 2.0, (2.0 + l1 + l2) / 2.0}));
    cl.components.frechet_factors.push_back({1.0, 1.0});
    return cl;
}

// Low-discrepancy estimate of the interval integral over [0,1]^n.
inline std::pair<double, double> selberg_integral_qmc(int n, const SelbergParams& p,
                                                      std::uint64_t samples) {
    if (n < 1 || n > 4) throw domain_error("selberg_integral_qmc: dimension must be 1..4");
    if (n >= 2 && !(2.0 / p.tau < 1.0))
        throw domain_error("selberg_integral_qmc: interaction exponent not integrable");
    std::uint64_t budget = samples;
    if (p.tau < 1.5) budget *= 2;
    const double e = -2.0 / p.tau, l1 = p.lambda1, l2 = p.lambda2;
    auto f = [n, e, l1, l2](const double* x) {
        double v = 1.0;
        for (int i = 0; i < n; ++i) v *= std::pow(x[i], l1) * std::pow(1.0 - x[i], l2);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) v *= std::pow(std::abs(x[i] - x[j]), e);
        return v;
    };
    const QmcResult<double> r = qmc_integrate<double>(n, budget, 19, f, 16);
    return {r.estimate, r.std_error};
}

// Low-discrepancy estimate of the circle integral over [-pi,pi]^n, phase
// included; the exact value is real, so the imaginary part doubles as an
// error probe.
inline std::pair<std::complex<double>, double> morris_integral_qmc(int n, const SelbergParams& p,
                                                                   std::uint64_t samples) {
    if (n < 1 || n > 3) throw domain_error("morris_integral_qmc: dimension must be 1..3");
    if (n >= 2 && !(2.0 / p.tau < 1.0))
        throw domain_error("morris_integral_qmc: interaction exponent not integrable");
    std::uint64_t budget = samples;
    if (p.tau < 1.5) budget *= 2;
    const double e = -2.0 / p.tau;
    const double dl = (p.lambda1 - p.lambda2) / 2.0;
    const double ls = p.lambda1 + p.lambda2;
    const double vol = std::pow(2.0 * M_PI, n);
    auto f = [n, e, dl, ls, vol](const double* x) {
        double th[4];
        for (int i = 0; i < n; ++i) th[i] = (2.0 * x[i] - 1.0) * M_PI;
        double phase = 0.0, mag = vol;
        for (int i = 0; i < n; ++i) {
            phase += th[i] * dl;
            if (ls != 0.0) mag *= std::pow(std::abs(2.0 * std::cos(th[i] / 2.0)), ls);
        }
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                mag *= std::pow(std::abs(2.0 * std::sin((th[i] - th[j]) / 2.0)), e);
        return std::polar(mag, phase);
    };
    const QmcResult<std::complex<double>> r =
        qmc_integrate<std::complex<double>>(n, budget, 23, f, 16);
    return {r.estimate, r.std_error};
}

}  // namespace bbeta
