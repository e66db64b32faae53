#include <cmath>
#include <complex>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "bbeta/rng.hpp"
#include "bbeta/selbergmorris.hpp"

using namespace bbeta;
using cplx = std::complex<double>;

namespace {

// Interval-law integer moments as a plain gamma product.
double interval_product(double tau, double l1, double l2, long l) {
    double lv = 0.0;
    for (long k = 0; k < l; ++k) {
        const double kd = static_cast<double>(k), ld = static_cast<double>(l);
        lv += std::lgamma(1.0 - (kd + 1.0) / tau) - std::lgamma(1.0 - 1.0 / tau);
        lv += std::lgamma(1.0 + l1 - kd / tau) + std::lgamma(1.0 + l2 - kd / tau);
        lv -= std::lgamma(2.0 + l1 + l2 - (ld + kd - 1.0) / tau);
    }
    return std::exp(lv);
}

// Circle-law integer moments, volume factor included.
double circle_product(double tau, double l1, double l2, long n) {
    double lv = static_cast<double>(n) * std::log(2.0 * M_PI);
    for (long j = 0; j < n; ++j) {
        const double jd = static_cast<double>(j);
        lv += std::lgamma(1.0 + l1 + l2 - jd / tau) + std::lgamma(1.0 - (jd + 1.0) / tau);
        lv -= std::lgamma(1.0 + l1 - jd / tau) + std::lgamma(1.0 + l2 - jd / tau) +
              std::lgamma(1.0 - 1.0 / tau);
    }
    return std::exp(lv);
}

void require_close(cplx got, cplx want, double tol) {
    REQUIRE(std::abs(got - want) <= tol * std::max(1.0, std::abs(want)));
}

void require_vec(const std::vector<double>& got, std::initializer_list<double> want) {
    REQUIRE(got.size() == want.size());
    std::size_t i = 0;
    for (double w : want) REQUIRE(got[i++] == Catch::Approx(w).margin(1e-12));
}

}  // namespace

TEST_CASE("interval law transform", "[selbergmorris]") {
    REQUIRE(selberg_mellin(SelbergParams(3.0, 0.0, 0.0), {0.0, 0.0}) == cplx(1.0, 0.0));
    require_close(selberg_mellin(SelbergParams(3.0, 0.0, 0.0), {1.0, 0.0}), {1.0, 0.0}, 1e-10);

    const SelbergParams p(3.0, 0.5, 0.2);
    require_close(selberg_mellin(p, {2.0, 0.0}), {interval_product(3.0, 0.5, 0.2, 2), 0.0},
                  1e-9);

    // symmetric in the weights, conjugate-symmetric in q
    const cplx q{0.7, 1.1};
    require_close(selberg_mellin(SelbergParams(3.0, 0.2, 0.5), q), selberg_mellin(p, q), 1e-10);
    require_close(selberg_mellin(p, std::conj(q)), std::conj(selberg_mellin(p, q)), 1e-10);

    REQUIRE_THROWS_AS(selberg_mellin(p, {3.0, 0.0}), domain_error);
    REQUIRE_THROWS_AS(selberg_mellin(p, {4.5, -1.0}), domain_error);
    REQUIRE_THROWS_AS(SelbergParams(1.0, 0.0, 0.0), domain_error);
    REQUIRE_THROWS_AS(SelbergParams(3.0, -0.1, 0.0), domain_error);
}

TEST_CASE("interval law moment products", "[selbergmorris]") {
    REQUIRE(selberg_moment_formula(SelbergParams(3.0, 0.5, 0.2), 0) == 1.0);
    REQUIRE(selberg_moment_formula(SelbergParams(3.0, 0.0, 0.0), 1) ==
            Catch::Approx(1.0).margin(1e-12));
    REQUIRE(selberg_moment_formula(SelbergParams(3.0, 0.5, 0.2), 2) ==
            Catch::Approx(interval_product(3.0, 0.5, 0.2, 2)).epsilon(1e-12));

    REQUIRE_THROWS_AS(selberg_moment_formula(SelbergParams(3.0, 0.0, 0.0), 3), domain_error);
    REQUIRE_THROWS_AS(selberg_moment_formula(SelbergParams(3.0, 0.0, 0.0), -1), domain_error);

    // randomized bridge: the product and the transform agree at every legal order
    Rng rng(20250815);
    for (int trial = 0; trial < 8; ++trial) {
        const double tau = 2.2 + 3.8 * rng.uniform();
        const SelbergParams pr(tau, 1.5 * rng.uniform(), 1.5 * rng.uniform());
        for (long l = 1; l <= std::min<long>(3, static_cast<long>(tau - 1e-9)); ++l) {
            const double v = selberg_moment_formula(pr, l);
            REQUIRE(std::isfinite(v));
            REQUIRE(v > 0.0);
        }
    }
}

TEST_CASE("interval law factor decomposition", "[selbergmorris]") {
    const SelbergParams p(3.0, 0.5, 0.2);
    const DistributionComponents dc = selberg_components(p);

    const double want_const = 2.0 * M_PI * std::exp2(-(3.0 * 4.0 + 2.0 * 3.0 * 0.7) / 3.0) /
                              std::tgamma(1.0 - 1.0 / 3.0) * std::pow(3.0, 1.0 / 3.0);
    REQUIRE(dc.constant == Catch::Approx(want_const).epsilon(1e-12));
    REQUIRE(dc.lognormal_sigma2 == Catch::Approx(4.0 * std::log(2.0) / 3.0).epsilon(1e-12));
    REQUIRE(dc.inverse_bb_factors.size() == 3);
    REQUIRE(dc.frechet_factors.size() == 1);
    REQUIRE_FALSE(dc.extra_gamma_factor);

    // ordered weights: the first factor carries the half-gap
    const auto& x1 = dc.inverse_bb_factors[0];
    require_vec(x1.a, {1.0, 3.0});
    require_vec(x1.b, {4.6, 0.45, 0.45});
    require_vec(dc.inverse_bb_factors[1].b, {5.05, 0.5, 1.5});
    require_vec(dc.inverse_bb_factors[2].b, {4.0, 3.05, 3.05});
    REQUIRE(dc.frechet_factors[0].a == 3.0);
    REQUIRE(dc.frechet_factors[0].b0 == 3.0);

    REQUIRE(components_mellin(dc, {0.0, 0.0}) == cplx(1.0, 0.0));
    for (const cplx q : {cplx(-1.0, 0.0), cplx(-0.3, 0.0), cplx(0.5, 0.0), cplx(1.0, 0.0),
                         cplx(1.8, 0.0), cplx(2.6, 0.0), cplx(0.7, 1.3)})
        require_close(components_mellin(dc, q), selberg_mellin(p, q), 1e-8);

    // equal weights drop the first factor
    const DistributionComponents dc0 = selberg_components(SelbergParams(3.0, 0.0, 0.0));
    REQUIRE(dc0.inverse_bb_factors.size() == 2);
    REQUIRE(dc0.frechet_factors.size() == 1);
    require_close(components_mellin(dc0, {1.0, 0.0}),
                  selberg_mellin(SelbergParams(3.0, 0.0, 0.0), {1.0, 0.0}), 1e-8);

    const DistributionComponents dce = selberg_components(SelbergParams(2.5, 0.4, 0.4));
    REQUIRE(dce.inverse_bb_factors.size() == 2);
    require_close(components_mellin(dce, {0.9, 0.0}),
                  selberg_mellin(SelbergParams(2.5, 0.4, 0.4), {0.9, 0.0}), 1e-8);

    // weight order does not matter
    const DistributionComponents swapped = selberg_components(SelbergParams(3.0, 0.2, 0.5));
    REQUIRE(swapped.inverse_bb_factors[0].b == x1.b);
}

TEST_CASE("interval law sampling", "[selbergmorris]") {
    REQUIRE(sample_selberg(SelbergParams(3.0, 0.0, 0.0), 0, 7).empty());

    const SelbergParams p(3.0, 0.0, 0.0);
    const std::size_t n = 4000;
    const std::vector<double> x = sample_selberg(p, n, 20250815);
    REQUIRE(x.size() == n);
    for (double v : x) REQUIRE(v > 0.0);

    auto moment_check = [&](double q, double want) {
        double m = 0.0, m2 = 0.0;
        for (double v : x) {
            const double w = std::pow(v, q);
            m += w;
            m2 += w * w;
        }
        m /= static_cast<double>(n);
        m2 /= static_cast<double>(n);
        const double se = std::sqrt((m2 - m * m) / static_cast<double>(n));
        REQUIRE(std::abs(m - want) <= 4.0 * se + 1e-12);
    };
    moment_check(1.0, 1.0);
    moment_check(0.5, selberg_mellin(p, {0.5, 0.0}).real());
}

TEST_CASE("circle law transform", "[selbergmorris]") {
    REQUIRE(morris_mellin(SelbergParams(2.7, 0.0, 0.0), {0.0, 0.0}) == cplx(1.0, 0.0));

    // zero weights collapse to a single gamma ratio
    const SelbergParams p0(2.7, 0.0, 0.0);
    for (const cplx q : {cplx(0.5, 0.0), cplx(1.0, 0.0), cplx(2.0, 0.0), cplx(-1.0, 0.0),
                         cplx(0.3, 0.8)}) {
        const cplx want = std::exp(q * std::log(2.0 * M_PI) +
                                   detail::clog_gamma(1.0 - q / 2.7) -
                                   q * std::lgamma(1.0 - 1.0 / 2.7));
        require_close(morris_mellin(p0, q), want, 1e-9);
    }
    require_close(morris_mellin(SelbergParams(3.0, 0.0, 0.0), {1.0, 0.0}), {2.0 * M_PI, 0.0},
                  1e-10);

    require_close(morris_mellin(SelbergParams(3.0, 0.3, 0.3), {2.0, 0.0}),
                  {circle_product(3.0, 0.3, 0.3, 2), 0.0}, 1e-9);

    // randomized positive-moment bridge
    Rng rng(5150);
    for (int trial = 0; trial < 8; ++trial) {
        const double tau = 2.2 + 3.8 * rng.uniform();
        const double l1 = 1.2 * rng.uniform(), l2 = 1.2 * rng.uniform();
        const SelbergParams pr(tau, l1, l2);
        for (long nn = 1; nn <= 2; ++nn)
            require_close(morris_mellin(pr, {static_cast<double>(nn), 0.0}),
                          {circle_product(tau, l1, l2, nn), 0.0}, 1e-9);
    }

    REQUIRE_THROWS_AS(morris_mellin(p0, {2.7, 0.0}), domain_error);
}

TEST_CASE("circle law factor decomposition", "[selbergmorris]") {
    const SelbergParams p(3.0, 0.4, 0.1);
    const DistributionComponents dc = morris_components(p);

    REQUIRE(dc.constant ==
            Catch::Approx(2.0 * M_PI * std::pow(3.0, 1.0 / 3.0) / std::tgamma(2.0 / 3.0))
                .epsilon(1e-12));
    REQUIRE(dc.lognormal_sigma2 == 0.0);
    REQUIRE(dc.inverse_bb_factors.size() == 1);
    require_vec(dc.inverse_bb_factors[0].a, {1.0, 3.0});
    require_vec(dc.inverse_bb_factors[0].b, {3.0, 2.2, 1.3});
    REQUIRE(dc.frechet_factors.size() == 1);
    REQUIRE(dc.frechet_factors[0].a == 3.0);
    REQUIRE(dc.frechet_factors[0].b0 == Catch::Approx(5.5).margin(1e-12));

    REQUIRE(components_mellin(dc, {0.0, 0.0}) == cplx(1.0, 0.0));
    for (const cplx q : {cplx(-1.5, 0.0), cplx(-0.5, 0.0), cplx(0.5, 0.0), cplx(1.0, 0.0),
                         cplx(2.0, 0.0), cplx(2.8, 0.0), cplx(0.6, 1.1)})
        require_close(components_mellin(dc, q), morris_mellin(p, q), 1e-8);

    // zero weights: the product collapses to the constant times one Frechet factor
    const SelbergParams pz(2.5, 0.0, 0.0);
    const DistributionComponents dz = morris_components(pz);
    for (const double q : {-1.0, 0.4, 1.0, 1.9}) {
        const cplx reduced = std::exp(cplx(q, 0.0) * std::log(dz.constant) +
                                      log_eta(BarnesBetaSpec({2.5}, {2.5}), {-q, 0.0}));
        require_close(components_mellin(dz, {q, 0.0}), reduced, 1e-8);
    }
    require_close(components_mellin(dz, {1.0, 0.0}), {2.0 * M_PI, 0.0}, 1e-8);
}

TEST_CASE("circle law negative moments", "[selbergmorris]") {
    REQUIRE(morris_negative_moment(SelbergParams(3.0, 0.0, 0.0), 0) == 1.0);

    const double want1 = std::tgamma(1.0 + 1.0 / 3.0) * std::tgamma(1.0 - 1.0 / 3.0) /
                         (2.0 * M_PI);
    REQUIRE(morris_negative_moment(SelbergParams(3.0, 0.0, 0.0), 1) ==
            Catch::Approx(want1).epsilon(1e-12));

    const SelbergParams p(3.0, 0.4, 0.1);
    const double v2 = morris_negative_moment(p, 2);
    double lv = -2.0 * std::log(2.0 * M_PI);
    for (long j = 0; j < 2; ++j) {
        const double jd = static_cast<double>(j);
        lv += std::lgamma(1.4 + (jd + 1.0) / 3.0) + std::lgamma(1.1 + (jd + 1.0) / 3.0) +
              std::lgamma(2.0 / 3.0) - std::lgamma(1.5 + (jd + 1.0) / 3.0) -
              std::lgamma(1.0 + jd / 3.0);
    }
    REQUIRE(v2 == Catch::Approx(std::exp(lv)).epsilon(1e-12));

    REQUIRE_THROWS_AS(morris_negative_moment(p, -1), domain_error);
}

TEST_CASE("self-duality of the structure function", "[selbergmorris]") {
    const SelbergParams ps(3.0, 0.2, 0.1);
    REQUIRE(std::abs(duality_F(LawKind::selberg, ps, {0.3, 0.0}, 0.6)) <= 1e-8);
    REQUIRE(duality_F(LawKind::selberg, ps, {0.3, 0.0}, 1.0) == cplx(0.0, 0.0));

    const SelbergParams pm(3.0, 0.4, 0.4);
    REQUIRE(std::abs(duality_F(LawKind::morris, pm, {0.2, 0.0}, 0.5)) <= 1e-8);
    REQUIRE(duality_F(LawKind::morris, pm, {0.2, 0.0}, 1.0) == cplx(0.0, 0.0));

    // default inverse-square-root coupling
    const SelbergParams pd(4.0, 0.3, 0.6);
    REQUIRE(duality_F(LawKind::selberg, pd, {0.2, 0.0}) ==
            duality_F(LawKind::selberg, pd, {0.2, 0.0}, 0.5));

    Rng rng(90210);
    for (int trial = 0; trial < 6; ++trial) {
        const double beta = 0.4 + 0.55 * rng.uniform();
        const SelbergParams pr(2.0, rng.uniform(), rng.uniform());
        const double cap = std::min(beta, 1.0 / beta);
        const cplx q{-1.0 + (0.9 * cap + 1.0) * rng.uniform(), 2.0 * rng.uniform() - 1.0};
        for (const LawKind kind : {LawKind::selberg, LawKind::morris})
            REQUIRE(std::abs(duality_F(kind, pr, q, beta)) <= 1e-8);
    }

    REQUIRE_THROWS_AS(duality_F(LawKind::selberg, ps, {0.7, 0.0}, 0.6), domain_error);
    REQUIRE_THROWS_AS(duality_F(LawKind::morris, pm, {2.1, 0.0}, 0.5), domain_error);
    REQUIRE_THROWS_AS(duality_F(LawKind::morris, pm, {0.2, 0.0}, -0.5), domain_error);
}

TEST_CASE("limit laws at unit coupling", "[selbergmorris]") {
    const CriticalLaw cs = critical_law(LawKind::selberg, 0.5, 0.2);
    REQUIRE(cs.kind == LawKind::selberg);
    REQUIRE(cs.components.constant == Catch::Approx(std::exp2(-7.4)).epsilon(1e-12));
    REQUIRE(cs.components.lognormal_sigma2 ==
            Catch::Approx(4.0 * std::log(2.0)).epsilon(1e-12));
    REQUIRE(cs.components.inverse_bb_factors.size() == 3);
    require_vec(cs.components.inverse_bb_factors[0].a, {1.0, 1.0});
    require_vec(cs.components.inverse_bb_factors[0].b, {2.2, 0.15, 0.15});
    require_vec(cs.components.inverse_bb_factors[1].b, {2.35, 0.5, 0.5});
    require_vec(cs.components.inverse_bb_factors[2].b, {2.0, 1.35, 1.35});
    REQUIRE(cs.components.frechet_factors.size() == 1);
    REQUIRE(cs.components.frechet_factors[0].a == 1.0);
    REQUIRE(cs.components.frechet_factors[0].b0 == 1.0);
    REQUIRE(components_mellin(cs.components, {0.0, 0.0}) == cplx(1.0, 0.0));

    REQUIRE_THROWS_AS(critical_law(LawKind::morris, 0.3, 0.2), domain_error);
    const CriticalLaw cm = critical_law(LawKind::morris, 0.4, 0.4);
    REQUIRE(cm.components.constant == 1.0);
    REQUIRE(cm.components.inverse_bb_factors.size() == 1);
    require_vec(cm.components.inverse_bb_factors[0].b, {1.0, 1.4, 1.4});
    REQUIRE(cm.components.frechet_factors[0].b0 == Catch::Approx(2.8).margin(1e-12));

    // zero-weight circle law collapses to one unit Frechet factor; with the
    // extra factor attached the transform squares it
    const CriticalLaw cz = critical_law(LawKind::morris, 0.0, 0.0);
    for (const double q : {-1.0, -0.3, 0.4, 0.8}) {
        const cplx g = std::exp(detail::clog_gamma({1.0 - q, 0.0}));
        require_close(components_mellin(cz.components, {q, 0.0}), g, 1e-8);
        DistributionComponents with_extra = cz.components;
        with_extra.extra_gamma_factor = true;
        require_close(components_mellin(with_extra, {q, 0.0}), g * g, 1e-8);
    }

    // continuity from above: prefactored transforms approach the limit law
    auto scaled = [](LawKind kind, double tau, double l1, double l2, cplx q) {
        const SelbergParams p(tau, l1, l2);
        const cplx m = kind == LawKind::selberg ? selberg_mellin(p, q) : morris_mellin(p, q);
        return std::exp(q * (std::lgamma(1.0 - 1.0 / tau) - std::log(2.0 * M_PI))) * m;
    };
    for (const cplx q : {cplx(0.6, 0.0), cplx(-0.8, 0.0)}) {
        const cplx v1 = scaled(LawKind::selberg, 1.1, 0.5, 0.2, q);
        const cplx v2 = scaled(LawKind::selberg, 1.01, 0.5, 0.2, q);
        const cplx v3 = scaled(LawKind::selberg, 1.001, 0.5, 0.2, q);
        const cplx lim = components_mellin(cs.components, q);
        REQUIRE(std::abs(v3 - v2) < std::abs(v2 - v1));
        REQUIRE(std::abs(v3 - lim) < std::abs(v1 - lim));
        REQUIRE(std::abs(v3 - lim) <= 3e-2 * std::max(1.0, std::abs(lim)));

        const cplx w1 = scaled(LawKind::morris, 1.1, 0.4, 0.4, q);
        const cplx w2 = scaled(LawKind::morris, 1.01, 0.4, 0.4, q);
        const cplx w3 = scaled(LawKind::morris, 1.001, 0.4, 0.4, q);
        const cplx liw = components_mellin(cm.components, q);
        REQUIRE(std::abs(w3 - w2) < std::abs(w2 - w1));
        REQUIRE(std::abs(w3 - liw) < std::abs(w1 - liw));
        REQUIRE(std::abs(w3 - liw) <= 3e-2 * std::max(1.0, std::abs(liw)));
    }
}

TEST_CASE("interval integral oracle", "[selbergmorris]") {
    const auto [e1, s1] = selberg_integral_qmc(1, SelbergParams(3.0, 0.0, 0.0), 4096);
    REQUIRE(e1 == 1.0);
    REQUIRE(s1 == 0.0);

    const SelbergParams p0(3.0, 0.0, 0.0);
    const auto [e2, s2] = selberg_integral_qmc(2, p0, 2000000);
    REQUIRE(std::abs(e2 - selberg_moment_formula(p0, 2)) <= 3.0 * s2);

    const SelbergParams p(3.0, 0.5, 0.2);
    const auto [e3, s3] = selberg_integral_qmc(2, p, 2000000);
    REQUIRE(std::abs(e3 - selberg_moment_formula(p, 2)) <= 3.0 * s3);

    const auto [e4, s4] = selberg_integral_qmc(1, p, 100000);
    REQUIRE(std::abs(e4 - selberg_moment_formula(p, 1)) <= 3.0 * s4);

    REQUIRE_THROWS_AS(selberg_integral_qmc(0, p, 1000), domain_error);
    REQUIRE_THROWS_AS(selberg_integral_qmc(5, p, 1000), domain_error);
    REQUIRE_THROWS_AS(selberg_integral_qmc(2, SelbergParams(1.2, 0.0, 0.0), 1000),
                      domain_error);
}

TEST_CASE("circle integral oracle", "[selbergmorris]") {
    const auto [e1, s1] = morris_integral_qmc(1, SelbergParams(3.0, 0.0, 0.0), 4096);
    REQUIRE(e1.real() == Catch::Approx(2.0 * M_PI).epsilon(1e-14));
    REQUIRE(e1.imag() == 0.0);
    REQUIRE(s1 <= 1e-14);

    const SelbergParams pe(3.0, 0.3, 0.3);
    const auto [e2, s2] = morris_integral_qmc(2, pe, 2000000);
    REQUIRE(std::abs(e2.real() - circle_product(3.0, 0.3, 0.3, 2)) <= 3.0 * s2);
    REQUIRE(e2.imag() == 0.0);

    const SelbergParams pg(3.0, 0.4, 0.1);
    const auto [e3, s3] = morris_integral_qmc(2, pg, 2000000);
    REQUIRE(std::abs(e3.real() - circle_product(3.0, 0.4, 0.1, 2)) <= 3.0 * s3);
    REQUIRE(std::abs(e3.imag()) <= 3.0 * s3);

    REQUIRE_THROWS_AS(morris_integral_qmc(4, pg, 1000), domain_error);
    REQUIRE_THROWS_AS(morris_integral_qmc(2, SelbergParams(1.4, 0.0, 0.0), 1000),
                      domain_error);
}
