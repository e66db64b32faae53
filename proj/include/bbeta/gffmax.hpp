#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include <bbeta/errors.hpp>
#include <bbeta/mathutil.hpp>
#include <bbeta/quadrature.hpp>
#include <bbeta/rng.hpp>
#include <bbeta/selbergmorris.hpp>

namespace bbeta {

enum class GffDomain { interval, circle };

// Log-correlated Gaussian field on a grid of the unit interval or circle.
// Interval grid: x_i = i/N, i = 0..N.  Circle grid: psi_j = rotation + j*eps,
// j = -N/2..N/2-1, eps = 2*pi/N; the duplicate endpoint +pi is dropped so the
// covariance stays finite.  The interval diagonal constant is pinned to 1 by
// the near-diagonal interpolation branch at u = v; the circle keeps kappa
// explicit.  The circle matrix is positive semidefinite only for
// kappa >= log(2*pi); below that the constant mode goes negative and the
// repair step rejects the matrix.
struct GFFConfig {
    GffDomain domain = GffDomain::interval;
    int n = 64;
    double kappa = 1.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double alpha = 0.0;
    double beta = 1.0;
    double rotation = 0.0;
    std::uint64_t seed = 1;
};

struct MaxRunResult {
    std::vector<double> samples;
    std::array<double, 3> drift_fit{};
    std::vector<double> centered_samples;
    double kolmogorov_distance = 0.0;
    std::array<double, 3> moment_gaps{};
    std::vector<int> ladder;
    std::vector<double> mean_by_scale;
    std::vector<double> ks_by_scale;
    bool trend_pass = false;
    bool verdict_available = false;
};

namespace detail {

inline void validate_gff_config(const GFFConfig& c) {
    if (c.n < 8) throw domain_error("GFFConfig: grid size must be at least 8");
    if (!(c.kappa >= 0.0)) throw domain_error("GFFConfig: kappa must be nonnegative");
    if (!(c.lambda1 >= 0.0) || !(c.lambda2 >= 0.0) || !(c.alpha >= 0.0))
        throw domain_error("GFFConfig: potential weights must be nonnegative");
    if (!(c.beta >= 0.0)) throw domain_error("GFFConfig: beta must be nonnegative");
    if (c.domain == GffDomain::interval && c.rotation != 0.0)
        throw domain_error("GFFConfig: rotation applies to the circle only");
    if (c.domain == GffDomain::circle && c.n % 2 != 0)
        throw domain_error("GFFConfig: circle grid size must be even");
}

inline std::vector<double> gff_grid(const GFFConfig& c) {
    std::vector<double> g;
    if (c.domain == GffDomain::interval) {
        g.resize(c.n + 1);
        for (int i = 0; i <= c.n; ++i) g[i] = static_cast<double>(i) / c.n;
    } else {
        const double eps = 2.0 * std::numbers::pi / c.n;
        g.resize(c.n);
        for (int j = 0; j < c.n; ++j) g[j] = c.rotation + (j - c.n / 2) * eps;
    }
    return g;
}

// Additive log-potential at each grid point; -inf marks points excluded from
// the maximum (x_0 on the interval, and zeros of the weight when the
// corresponding exponent is positive).
inline std::vector<double> log_potential(const GFFConfig& c) {
    const auto g = gff_grid(c);
    const double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> pot(g.size(), 0.0);
    if (c.domain == GffDomain::interval) {
        pot[0] = ninf;
        for (std::size_t i = 1; i < g.size(); ++i) {
            double p = 0.0;
            if (c.lambda1 > 0.0) p += c.lambda1 * std::log(g[i]);
            if (c.lambda2 > 0.0) p += c.lambda2 * std::log(1.0 - g[i]);
            pot[i] = p;
        }
    } else {
        for (std::size_t j = 0; j < g.size(); ++j)
            if (c.alpha > 0.0) pot[j] = 2.0 * c.alpha * std::log(2.0 * std::fabs(std::cos(0.5 * g[j])));
    }
    return pot;
}

struct GffFactor {
    Eigen::MatrixXd cov;
    Eigen::MatrixXd sampler;
};

inline GffFactor gff_factor(const GFFConfig& c) {
    validate_gff_config(c);
    const auto g = gff_grid(c);
    const int m = static_cast<int>(g.size());
    Eigen::MatrixXd C(m, m);
    if (c.domain == GffDomain::interval) {
        const double eps = 1.0 / c.n;
        const double diag = 2.0 * (1.0 - std::log(eps));
        for (int i = 0; i < m; ++i) {
            C(i, i) = diag;
            for (int j = 0; j < i; ++j) {
                const double v = -2.0 * std::log(g[i] - g[j]);
                C(i, j) = v;
                C(j, i) = v;
            }
        }
    } else {
        const double eps = 2.0 * std::numbers::pi / c.n;
        const double diag = 2.0 * (c.kappa - std::log(eps));
        for (int i = 0; i < m; ++i) {
            C(i, i) = diag;
            for (int j = 0; j < i; ++j) {
                const double v = -2.0 * std::log(2.0 * std::fabs(std::sin(0.5 * (g[i] - g[j]))));
                C(i, j) = v;
                C(j, i) = v;
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    if (es.info() != Eigen::Success)
        throw verification_error("covariance_matrix: eigendecomposition failed");
    Eigen::VectorXd lam = es.eigenvalues();
    double clipped = 0.0;
    for (int i = 0; i < lam.size(); ++i)
        if (lam[i] < 0.0) {
            clipped -= lam[i];
            lam[i] = 0.0;
        }
    if (!(clipped <= 1e-6 * C.trace()))
        throw verification_error("covariance_matrix: clipped eigenvalue mass exceeds 1e-6 of trace");
    GffFactor out;
    out.sampler = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
    if (clipped == 0.0) {
        out.cov = std::move(C);
    } else {
        Eigen::MatrixXd R = out.sampler * out.sampler.transpose();
        out.cov = 0.5 * (R + R.transpose());
    }
    return out;
}

inline double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    if (n == 0) throw domain_error("median of empty sample");
    std::sort(v.begin(), v.end());
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline std::vector<double> median_centered(std::vector<double> v) {
    const double med = median_of(v);
    for (auto& x : v) x -= med;
    return v;
}

inline double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::fabs(i / na - j / nb));
    }
    return d;
}

// mean, variance, third central moment
inline std::array<double, 3> central_moments(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0;
    for (double x : v) {
        const double d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    return {mean, m2 / n, m3 / n};
}

// Z as a function of one field realization; weights are the potential factors.
inline double z_from_field(const GFFConfig& c, const std::vector<double>& weights,
                           const Eigen::VectorXd& field) {
    double z = 0.0;
    for (int i = 0; i < field.size(); ++i)
        z += weights[i] * std::exp(c.beta * field[i]);
    return z;
}

inline std::vector<double> z_weights(const GFFConfig& c) {
    const auto g = gff_grid(c);
    std::vector<double> w(g.size());
    if (c.domain == GffDomain::interval) {
        w[0] = 0.0;
        for (std::size_t i = 1; i < g.size(); ++i)
            w[i] = std::pow(g[i], c.beta * c.lambda1) * std::pow(1.0 - g[i], c.beta * c.lambda2);
    } else {
        for (std::size_t j = 0; j < g.size(); ++j)
            w[j] = std::pow(2.0 * std::fabs(std::cos(0.5 * g[j])), 2.0 * c.alpha * c.beta);
    }
    return w;
}

inline constexpr std::uint64_t kMaxStream = 0x56;
inline constexpr std::uint64_t kZStream = 0x5a;
inline constexpr std::uint64_t kConjStream = 0xc0;

}  // namespace detail

inline Eigen::MatrixXd covariance_matrix(const GFFConfig& config) {
    return detail::gff_factor(config).cov;
}

inline MaxRunResult sample_max(const GFFConfig& config, int n_runs) {
    if (n_runs < 0) throw domain_error("sample_max: run count must be nonnegative");
    const auto fac = detail::gff_factor(config);
    const auto pot = detail::log_potential(config);
    const int m = static_cast<int>(pot.size());
    const std::uint64_t base = mix_seed(config.seed, detail::kMaxStream);
    MaxRunResult out;
    out.samples.reserve(n_runs);
    Eigen::VectorXd z(m), v(m);
    for (int r = 0; r < n_runs; ++r) {
        Rng g(mix_seed(base, static_cast<std::uint64_t>(r)));
        for (int i = 0; i < m; ++i) z[i] = g.normal();
        v.noalias() = fac.sampler * z;
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i)
            if (pot[i] > -std::numeric_limits<double>::infinity())
                best = std::max(best, v[i] + pot[i]);
        out.samples.push_back(best);
    }
    if (n_runs > 0) out.centered_samples = detail::median_centered(out.samples);
    return out;
}

inline std::vector<double> exponential_functional_runs(const GFFConfig& config, int n_runs) {
    if (n_runs < 0) throw domain_error("exponential_functional: run count must be nonnegative");
    const auto fac = detail::gff_factor(config);
    const auto w = detail::z_weights(config);
    const int m = static_cast<int>(w.size());
    const std::uint64_t base = mix_seed(config.seed, detail::kZStream);
    std::vector<double> out;
    out.reserve(n_runs);
    Eigen::VectorXd z(m), v(m);
    for (int r = 0; r < n_runs; ++r) {
        Rng g(mix_seed(base, static_cast<std::uint64_t>(r)));
        for (int i = 0; i < m; ++i) z[i] = g.normal();
        v.noalias() = fac.sampler * z;
        out.push_back(detail::z_from_field(config, w, v));
    }
    return out;
}

inline double exponential_functional(const GFFConfig& config) {
    return exponential_functional_runs(config, 1)[0];
}

// |quadrature of the y-integral - X^{q/beta} Gamma(1 - q/beta)|.
inline double general_identity_check(double beta, std::complex<double> q, double X) {
    if (!(beta > 0.0)) throw domain_error("general_identity_check: beta must be positive");
    if (!(q.real() < 0.0)) throw domain_error("general_identity_check: needs Re q < 0");
    if (!(X > 0.0)) throw domain_error("general_identity_check: X must be positive");
    const double qr = q.real();
    // integrand peak sits at t = 1 - q/beta; cut where exp(-t) underflows and
    // where the right tail exp((q-beta) y) is below 1e-52 of the peak scale
    const double tstar = 1.0 - qr / beta;
    const double ystar = (std::log(X) - std::log(tstar)) / beta;
    double ylo = std::min((std::log(X) - std::log(700.0)) / beta, ystar - 5.0);
    double yhi = std::max((std::log(beta * X) + 120.0) / (beta - qr), ystar + 5.0);
    auto f = [&](double y) {
        const double t = X * std::exp(-beta * y);
        return std::exp(q * y - t) * (beta * t);
    };
    const std::complex<double> val =
        integrate_interval<std::complex<double>>(f, ylo, yhi, 1e-11).value;
    const std::complex<double> exact =
        std::exp((q / beta) * std::log(X) + detail::clog_gamma(1.0 - q / beta));
    return std::abs(val - exact);
}

inline MaxRunResult compare_to_conjecture(const GFFConfig& config, int n_runs) {
    detail::validate_gff_config(config);
    if (n_runs < 500)
        throw domain_error("compare_to_conjecture: fewer than 500 runs cannot support a verdict");
    if (config.n % 8 != 0 || config.n / 8 < 8)
        throw domain_error("compare_to_conjecture: grid size must be divisible by 8 with n/8 >= 8");

    const LawKind kind =
        (config.domain == GffDomain::interval) ? LawKind::selberg : LawKind::morris;
    CriticalLaw law = (kind == LawKind::selberg)
                          ? critical_law(kind, config.lambda1, config.lambda2)
                          : critical_law(kind, config.alpha, config.alpha);
    DistributionComponents dc = law.components;
    dc.extra_gamma_factor = true;
    const int n_conj = std::max(4 * n_runs, 4000);
    std::vector<double> conj =
        sample_components(dc, n_conj, mix_seed(config.seed, detail::kConjStream));
    for (auto& s : conj) s = std::log(s);
    conj = detail::median_centered(conj);

    MaxRunResult out;
    out.ladder = {config.n / 8, config.n / 4, config.n / 2, config.n};
    Eigen::MatrixXd X(4, 3);
    Eigen::VectorXd y(4);
    for (int k = 0; k < 4; ++k) {
        GFFConfig ck = config;
        ck.n = out.ladder[k];
        ck.seed = mix_seed(config.seed, 1000 + static_cast<std::uint64_t>(k));
        MaxRunResult mk = sample_max(ck, n_runs);
        double mean = 0.0;
        for (double s : mk.samples) mean += s;
        mean /= n_runs;
        out.mean_by_scale.push_back(mean);
        out.ks_by_scale.push_back(detail::ks_distance(mk.centered_samples, conj));
        X(k, 0) = std::log(static_cast<double>(ck.n));
        X(k, 1) = std::log(std::log(static_cast<double>(ck.n)));
        X(k, 2) = 1.0;
        y(k) = mean;
        if (k == 3) {
            const auto emp = detail::central_moments(mk.centered_samples);
            const auto ref = detail::central_moments(conj);
            for (int t = 0; t < 3; ++t) out.moment_gaps[t] = std::fabs(emp[t] - ref[t]);
            out.samples = std::move(mk.samples);
            out.centered_samples = std::move(mk.centered_samples);
        }
    }
    Eigen::Vector3d c = X.colPivHouseholderQr().solve(y);
    out.drift_fit = {c(0), c(1), c(2)};
    out.kolmogorov_distance = out.ks_by_scale.back();
    out.trend_pass = out.ks_by_scale.back() <= out.ks_by_scale.front();
    out.verdict_available = true;
    return out;
}

struct FreezingRow {
    double beta;
    std::complex<double> value;
    double dual_residual;
};

struct FreezingTable {
    std::vector<FreezingRow> rows;
    std::complex<double> frozen;
};

inline FreezingTable freezing_demo(LawKind kind, const std::vector<double>& beta_grid,
                                   std::complex<double> q, double lambda1, double lambda2) {
    if (beta_grid.empty()) throw domain_error("freezing_demo: empty beta grid");
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0))
        throw domain_error("freezing_demo: potential weights must be nonnegative");
    double bmin = 1.0;
    for (double b : beta_grid) {
        if (!(b > 0.0) || !(b <= 1.0))
            throw domain_error("freezing_demo: beta grid must lie in (0, 1]");
        bmin = std::min(bmin, b);
    }
    if (!(q.real() < bmin))
        throw domain_error("freezing_demo: q outside the common Mellin strip of the grid");
    FreezingTable out;
    out.rows.reserve(beta_grid.size());
    for (double b : beta_grid) {
        FreezingRow row;
        row.beta = b;
        row.value = structure_function(kind, lambda1, lambda2, q, b);
        row.dual_residual =
            std::abs(row.value - structure_function(kind, lambda1, lambda2, q, 1.0 / b));
        out.rows.push_back(row);
    }
    out.frozen = structure_function(kind, lambda1, lambda2, q, 1.0);
    return out;
}

}  // namespace bbeta
