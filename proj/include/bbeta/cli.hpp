#pragma once

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <bbeta/barnesbeta.hpp>
#include <bbeta/gffmax.hpp>
#include <bbeta/io.hpp>
#include <bbeta/multigamma.hpp>
#include <bbeta/selbergmorris.hpp>

namespace bbeta {

namespace cli_detail {

inline std::vector<double> parse_doubles(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = std::min(s.find(',', pos), s.size());
        const std::string tok = s.substr(pos, comma - pos);
        if (tok.empty()) throw domain_error("empty entry in numeric list '" + s + "'");
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw domain_error("cannot parse '" + tok + "' as a number");
        }
        if (used != tok.size()) throw domain_error("cannot parse '" + tok + "' as a number");
        out.push_back(v);
        pos = comma + 1;
        if (comma == s.size()) break;
    }
    return out;
}

// complex flags are `re` or `re,im`
inline std::complex<double> parse_complex(const std::string& s) {
    const auto parts = parse_doubles(s);
    if (parts.size() == 1) return {parts[0], 0.0};
    if (parts.size() == 2) return {parts[0], parts[1]};
    throw domain_error("complex value must be re or re,im, got '" + s + "'");
}

struct Common {
    std::uint64_t seed = 1;
    int threads = 1;
    std::string out;
    std::string thresholds_path;
};

struct ReportCtx {
    RunManifest manifest;
    Json params = Json::object();
    Json results = Json::object();
    Json verdicts = Json::array();
    bool any_fail = false;

    void add_verdict(const std::string& name, bool pass, Json detail) {
        detail["name"] = name;
        detail["pass"] = pass;
        verdicts.push_back(std::move(detail));
        if (!pass) any_fail = true;
    }
};

inline Json version_block() {
    Json v;
    v["artifact"] = "1.0.0";
    v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                 "." + std::to_string(EIGEN_MINOR_VERSION);
    v["cli11"] = CLI11_VERSION;
    v["json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                std::to_string(NLOHMANN_JSON_VERSION_PATCH);
    return v;
}

// Argument list with the output location stripped: artifacts carry the
// configuration that produced them, not where they were written, so the
// same configuration yields byte-identical files at any destination.
inline std::vector<std::string> canonical_args(const std::vector<std::string>& args) {
    std::vector<std::string> canon;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out") {
            ++i;
            continue;
        }
        if (i == 0) {
            const std::size_t slash = args[0].find_last_of('/');
            canon.push_back(slash == std::string::npos ? args[0] : args[0].substr(slash + 1));
        } else {
            canon.push_back(args[i]);
        }
    }
    return canon;
}

inline RunManifest make_manifest(const std::vector<std::string>& args, const Common& c) {
    const auto canon = canonical_args(args);
    RunManifest m;
    std::string hashed;
    for (std::size_t i = 0; i < canon.size(); ++i) {
        if (i) m.command.push_back(' ');
        m.command += canon[i];
        hashed += canon[i];
        hashed.push_back('\x1f');
    }
    m.config_hash = hex64(fnv1a64(hashed));
    m.seed = c.seed;
    m.threads = c.threads;
    m.versions = version_block();
    return m;
}

inline Json report_json(const std::string& cmd, ReportCtx& ctx) {
    ctx.manifest.verdict_summary =
        ctx.verdicts.empty() ? "NONE" : (ctx.any_fail ? "FAIL" : "PASS");
    Json r;
    r["command"] = cmd;
    r["manifest"] = manifest_json(ctx.manifest);
    r["params"] = ctx.params;
    r["results"] = ctx.results;
    r["verdicts"] = ctx.verdicts;
    return r;
}

inline int emit_report(const std::string& cmd, ReportCtx& ctx, const Common& c) {
    const std::string text = report_json(cmd, ctx).dump(2) + "\n";
    std::fputs(text.c_str(), stdout);
    if (!c.out.empty()) write_file(resolve_out_path(c.out), text);
    return ctx.any_fail ? 2 : 0;
}

inline int emit_samples(const std::string& cmd, ReportCtx& ctx, const Common& c,
                        const std::vector<double>& values) {
    ctx.manifest.verdict_summary = "NONE";
    const std::string csv = csv_with_manifest(ctx.manifest, values);
    if (c.out.empty()) {
        std::fputs(csv.c_str(), stdout);
    } else {
        const std::string path = resolve_out_path(c.out);
        write_file(path, csv);
        write_file(path + ".json", report_json(cmd, ctx).dump(2) + "\n");
    }
    return 0;
}

inline Json summary_stats(const std::vector<double>& v) {
    Json j;
    j["count"] = v.size();
    if (v.empty()) return j;
    double mean = 0.0, lo = v[0], hi = v[0];
    for (double x : v) {
        mean += x;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    j["mean"] = mean;
    j["sd"] = std::sqrt(var / static_cast<double>(v.size()));
    j["min"] = lo;
    j["max"] = hi;
    return j;
}

inline Json spec_json(const BarnesBetaSpec& s) {
    Json j;
    j["a"] = s.a;
    j["b"] = s.b;
    j["M"] = s.a.size();
    j["N"] = s.b.size() - 1;
    switch (s.regime) {
        case BetaRegime::SUB: j["regime"] = "SUB"; break;
        case BetaRegime::CRITICAL: j["regime"] = "CRITICAL"; break;
        case BetaRegime::SUPER: j["regime"] = "SUPER"; break;
    }
    return j;
}

inline BarnesBetaSpec spec_from(const std::string& a_str, const std::string& b_str, int M_flag,
                                int N_flag) {
    const auto a = a_str.empty() ? std::vector<double>{} : parse_doubles(a_str);
    const auto b = parse_doubles(b_str);
    if (M_flag >= 0 && static_cast<std::size_t>(M_flag) != a.size())
        throw domain_error("--M disagrees with the length of --a");
    if (N_flag >= 0 && static_cast<std::size_t>(N_flag) + 1 != b.size())
        throw domain_error("--N disagrees with the length of --b (needs N+1 entries)");
    return BarnesBetaSpec(a, b);
}

// Randomized spec spanning the three regimes, for verification sweeps.
inline BarnesBetaSpec random_spec(Rng& r) {
    const int regime = static_cast<int>(r.uniform() * 3.0);
    int M = 0, N = 0;
    if (regime == 0) {
        M = static_cast<int>(r.uniform() * 3.0);
        N = M + 1 + (r.uniform() < 0.3 ? 1 : 0);
    } else if (regime == 1) {
        M = 1 + static_cast<int>(r.uniform() * 3.0);
        N = M;
    } else {
        M = 1 + static_cast<int>(r.uniform() * 3.0);
        N = M - 1;
    }
    std::vector<double> a(M), b(N + 1);
    for (auto& x : a) x = 0.5 + 2.0 * r.uniform();
    for (auto& x : b) x = 0.7 + 2.3 * r.uniform();
    return BarnesBetaSpec(a, b);
}

inline Json law_json(const CriticalLaw& law) {
    Json j;
    j["kind"] = (law.kind == LawKind::selberg) ? "selberg" : "morris";
    j["lambda1"] = law.lambda1;
    j["lambda2"] = law.lambda2;
    j["constant"] = law.components.constant;
    j["lognormal_sigma2"] = law.components.lognormal_sigma2;
    Json factors = Json::array();
    for (const auto& f : law.components.inverse_bb_factors) {
        Json fj;
        fj["a"] = f.a;
        fj["b"] = f.b;
        factors.push_back(std::move(fj));
    }
    j["inverse_beta_factors"] = factors;
    Json fre = Json::array();
    for (const auto& f : law.components.frechet_factors) {
        Json fj;
        fj["a"] = f.a;
        fj["b0"] = f.b0;
        fre.push_back(std::move(fj));
    }
    j["frechet_factors"] = fre;
    j["extra_gamma_factor"] = law.components.extra_gamma_factor;
    return j;
}

inline GffDomain parse_domain(const std::string& s) {
    if (s == "interval") return GffDomain::interval;
    if (s == "circle") return GffDomain::circle;
    throw domain_error("--domain must be interval or circle");
}

inline Json gff_config_json(const GFFConfig& c) {
    Json j;
    j["domain"] = (c.domain == GffDomain::interval) ? "interval" : "circle";
    j["n"] = c.n;
    j["kappa"] = (c.domain == GffDomain::interval) ? 1.0 : c.kappa;
    j["lambda1"] = c.lambda1;
    j["lambda2"] = c.lambda2;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["rotation"] = c.rotation;
    j["seed"] = c.seed;
    return j;
}

}  // namespace cli_detail

inline int cli_dispatch(int argc, const char* const* argv) {
    using namespace cli_detail;
    std::vector<std::string> args(argv, argv + argc);

    CLI::App app{"Barnes beta laws, Selberg/Morris integral distributions, and log-correlated "
                 "field experiments"};
    app.require_subcommand(1);

    Common c;
    int rc = 0;
    auto add_common = [&](CLI::App* sc) {
        sc->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
        sc->add_option("--threads", c.threads, "worker thread count (recorded; evaluation is deterministic)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        sc->add_option("--out", c.out, "write the artifact to this path");
        sc->add_option("--thresholds", c.thresholds_path, "verdict thresholds JSON file");
    };
    auto manifest = [&]() { return make_manifest(args, c); };
    auto thresholds = [&]() { return Thresholds::load(c.thresholds_path); };

    // eval-gamma
    struct {
        std::string a, w;
        int M = -1;
        double rel_tol = 1e-10;
    } eg;
    {
        auto* sc = app.add_subcommand("eval-gamma", "log of the multiple gamma function");
        add_common(sc);
        sc->add_option("--a", eg.a, "periods, comma separated")->required();
        sc->add_option("--w", eg.w, "argument, re or re,im")->required();
        sc->add_option("--M", eg.M, "order (must match the period count)");
        sc->add_option("--rel-tol", eg.rel_tol, "integration tolerance")->capture_default_str();
        sc->callback([&] {
            ReportCtx ctx;
            ctx.manifest = manifest();
            const auto a = parse_doubles(eg.a);
            if (eg.M >= 0 && static_cast<std::size_t>(eg.M) != a.size())
                throw domain_error("--M disagrees with the length of --a");
            const auto w = parse_complex(eg.w);
            ctx.params["a"] = a;
            ctx.params["w"] = complex_json(w);
            ctx.params["rel_tol"] = eg.rel_tol;
            ctx.results["log_gamma"] =
                complex_json(log_multi_gamma(MultiGammaParams(a), w, eg.rel_tol));
            rc = emit_report("eval-gamma", ctx, c);
        });
    }

    // eval-eta
    struct {
        std::string a, b, q;
        int M = -1, N = -1;
    } ee;
    {
        auto* sc = app.add_subcommand("eval-eta", "log Mellin transform of a Barnes beta law");
        add_common(sc);
        sc->add_option("--a", ee.a, "numerator periods, comma separated");
        sc->add_option("--b", ee.b, "b parameters, comma separated (N+1 entries)")->required();
        sc->add_option("--q", ee.q, "transform argument, re or re,im")->required();
        sc->add_option("--M", ee.M, "check: number of a entries");
        sc->add_option("--N", ee.N, "check: number of b entries minus one");
        sc->callback([&] {
            ReportCtx ctx;
            ctx.manifest = manifest();
            const auto spec = spec_from(ee.a, ee.b, ee.M, ee.N);
            const auto q = parse_complex(ee.q);
            ctx.params["spec"] = spec_json(spec);
            ctx.params["q"] = complex_json(q);
            ctx.results["log_eta"] = complex_json(log_eta(spec, q));
            rc = emit_report("eval-eta", ctx, c);
        });
    }

    // atom
    struct {
        std::string a, b;
        int M = -1, N = -1;
    } at;
    {
        auto* sc = app.add_subcommand("atom", "probability mass at one (subcritical laws)");
        add_common(sc);
        sc->add_option("--a", at.a, "numerator periods");
        sc->add_option("--b", at.b, "b parameters")->required();
        sc->add_option("--M", at.M, "check: number of a entries");
        sc->add_option("--N", at.N, "check: number of b entries minus one");
        sc->callback([&] {
            ReportCtx ctx;
            ctx.manifest = manifest();
            const auto spec = spec_from(at.a, at.b, at.M, at.N);
            ctx.params["spec"] = spec_json(spec);
            ctx.results["atom_mass"] = atom_mass(spec);
            rc = emit_report("atom", ctx, c);
        });
    }

    // moments
    struct {
        std::string a, b;
        int M = -1, N = -1, k = 1;
    } mo;
    {
        auto* sc = app.add_subcommand("moments", "integer moment of a Barnes beta law");
        add_common(sc);
        sc->add_option("--a", mo.a, "numerator periods");
        sc->add_option("--b", mo.b, "b parameters")->required();
        sc->add_option("--k", mo.k, "moment order (negative for inverse moments)")->required();
        sc->add_option("--M", mo.M, "check: number of a entries");
        sc->add_option("--N", mo.N, "check: number of b entries minus one");
        sc->callback([&] {
            ReportCtx ctx;
            ctx.manifest = manifest();
            const auto spec = spec_from(mo.a, mo.b, mo.M, mo.N);
            ctx.params["spec"] = spec_json(spec);
            ctx.params["k"] = mo.k;
            ctx.results["moment"] = moment(spec, mo.k);
            ctx.results["order"] = mo.k;
            rc = emit_report("moments", ctx, c);
        });
    }

    // sample
    struct {
        std::string a, b;
        int M = -1, N = -1;
        std::uint64_t n = 1000;
    } sa;
    {
        auto* sc = app.add_subcommand("sample", "draws from a Barnes beta law (CSV)");
        add_common(sc);
        sc->add_option("--a", sa.a, "numerator periods");
        sc->add_option("--b", sa.b, "b parameters")->required();
        sc->add_option("--n", sa.n, "number of draws")->capture_default_str();
        sc->add_option("--M", sa.M, "check: number of a entries");
        sc->add_option("--N", sa.N, "check: number of b entries minus one");
        sc->callback([&] {
            ReportCtx ctx;
            ctx.manifest = manifest();
            const auto spec = spec_from(sa.a, sa.b, sa.M, sa.N);
            ctx.params["spec"] = spec_json(spec);
            ctx.params["n"] = sa.n;
            const auto values = sample(spec, sa.n, c.seed);
            ctx.results["summary"] = summary_stats(values);
            rc = emit_samples("sample", ctx, c, values);
        });
    }

    // sample-ratio
    struct {
        std::string a, b;
        int M = -1, N = -1;
        std::uint64_t n = 1000;
        double bbar0 = 0.0;
        bool sine = false;
    } sr;
    {
        auto* sc = app.add_subcommand("sample-ratio", "draws from a ratio of Barnes beta laws (CSV)");
        add_common(sc);
        sc->add_option("--a", sr.a, "numerator periods");
        sc->add_option("--b", sr.b, "b parameters")->required();
        sc->add_option("--n", sr.n, "number of draws")->capture_default_str();
        sc->add_option("--bbar0", sr.bbar0, "denominator b_0 (omit for the multiple-sine choice)");
        sc->add_option("--M", sr.M, "check: number of a entries");
        sc->add_option("--N", sr.N, "check: number of b entries minus one");
        sc->callback([&] {
            ReportCtx ctx;
            ctx.manifest = manifest();
            const auto spec = spec_from(sr.a, sr.b, sr.M, sr.N);
            const RatioSpec rs = (sr.bbar0 > 0.0) ? RatioSpec(spec, sr.bbar0)
                                                  : RatioSpec::with_sine_b0(spec);
            ctx.params["spec"] = spec_json(spec);
            ctx.params["bbar0"] = rs.bbar0;
            ctx.params["n"] = sr.n;
            const auto values = sample_ratio(rs, sr.n, c.seed);
            ctx.results["summary"] = summary_stats(values);
            rc = emit_samples("sample-ratio", ctx, c, values);
        });
    }

    // verify-lk
    struct {
        std::string a, b, q = "0.3,0.8";
        int cases = 50;
    } vl;
    {
        auto* sc = app.add_subcommand(
            "verify-lk", "transform against its exponential-integral representation");
        add_common(sc);
        sc->add_option("--a", vl.a, "fixed spec: numerator periods");
        sc->add_option("--b", vl.b, "fixed spec: b parameters");
        sc->add_option("--q", vl.q, "fixed spec: transform argument")->capture_default_str();
        sc->add_option("--cases", vl.cases, "randomized case count when no spec is given")
            ->capture_default_str();
        sc->callback([&] {
            ReportCtx ctx;
            ctx.manifest = manifest();
            const auto thr = thresholds();
            Json cases = Json::array();
            double worst = 0.0;
            if (!vl.b.empty()) {
                const auto spec = spec_from(vl.a, vl.b, -1, -1);
                const auto q = parse_complex(vl.q);
                const double resid = std::abs(log_eta(spec, q) - log_eta_lk(spec, q));
                Json cj;
                cj["spec"] = spec_json(spec);
                cj["q"] = complex_json(q);
                cj["residual"] = resid;
                cases.push_back(std::move(cj));
                worst = resid;
            } else {
                Rng r(mix_seed(c.seed, 0x1c));
                for (int i = 0; i < vl.cases; ++i) {
                    const auto spec = random_spec(r);
                    // Stay clear of Re q = -b_0: the jump integral's tail decays
                    // like exp(-(b_0 - |Re q|) t) and needs room to converge.
                    const double lo = -0.7 * spec.b0() + 0.05;
                    const std::complex<double> q(lo + r.uniform() * (2.0 - lo),
                                                 -2.0 + 4.0 * r.uniform());
                    const double resid = std::abs(log_eta(spec, q) - log_eta_lk(spec, q));
                    worst = std::max(worst, resid);
                    Json cj;
                    cj["spec"] = spec_json(spec);
                    cj["q"] = complex_json(q);
                    cj["residual"] = resid;
                    cases.push_back(std::move(cj));
                }
            }
            ctx.params["cases"] = cases.size();
            ctx.results["cases"] = cases;
            ctx.results["max_residual"] = worst;
            Json detail;
            detail["max_residual"] = worst;
            detail["threshold"] = thr.lk_consistency;
            ctx.add_verdict("levy_khinchine_consistency", worst <= thr.lk_consistency,
                            std::move(detail));
            rc = emit_report("verify-lk", ctx, c);
        });
    }

    // verify-selberg
    struct {
        double tau = 0.0, l1 = 0.0, l2 = 0.0, samples = 2e6;
        int n = 0;
    } vs;
    {
        auto* sc = app.add_subcommand("verify-selberg",
                                      "interval law moments against the closed product and QMC");
        add_common(sc);
        sc->add_option("--tau", vs.tau, "shape parameter, > 1")->required();
        sc->add_option("--l1", vs.l1, "first weight")->capture_default_str();
        sc->add_option("--l2", vs.l2, "second weight")->capture_default_str();
        sc->add_option("--n", vs.n, "integral dimension for the QMC cross-check (1..4)");
        sc->add_option("--samples", vs.samples, "low-discrepancy point budget")
            ->capture_default_str();
        sc->callback([&] {
            ReportCtx ctx;
            ctx.manifest = manifest();
            const auto thr = thresholds();
            const SelbergParams p(vs.tau, vs.l1, vs.l2);
            ctx.params["tau"] = vs.tau;
            ctx.params["lambda1"] = vs.l1;
            ctx.params["lambda2"] = vs.l2;
            Json checks = Json::array();
            for (long l = 1; l <= 2 && static_cast<double>(l) < vs.tau; ++l) {
                const double formula = selberg_moment_formula(p, l);
                const double transform = selberg_mellin(p, {static_cast<double>(l), 0.0}).real();
                const double gap = std::fabs(transform - formula);
                Json detail;
                detail["l"] = l;
                detail["formula_value"] = formula;
                detail["transform_value"] = transform;
                detail["gap"] = gap;
                detail["threshold"] = thr.selberg_formula;
                const bool pass = gap <= thr.selberg_formula * std::max(1.0, std::fabs(formula));
                checks.push_back(detail);
                ctx.add_verdict("moment_formula_dim" + std::to_string(l), pass, std::move(detail));
            }
            if (vs.n > 0) {
                const auto [est, se] =
                    selberg_integral_qmc(vs.n, p, static_cast<std::size_t>(vs.samples));
                const double formula = selberg_moment_formula(p, vs.n);
                Json detail;
                detail["n"] = vs.n;
                detail["quantity"] = "selberg_integral";
                detail["formula_value"] = formula;
                detail["oracle_value"] = est;
                detail["stderr"] = se;
                detail["gap_over_stderr"] = (se > 0.0) ? std::fabs(est - formula) / se : 0.0;
                // The roundoff floor covers constant integrands, whose replicate
                // spread collapses below summation error.
                const bool pass = std::fabs(est - formula) <=
                                  thr.qmc_stderr_multiple * se +
                                      1e-9 * std::max(1.0, std::fabs(formula));
                checks.push_back(detail);
                ctx.add_verdict("qmc_integral_dim" + std::to_string(vs.n), pass,
                                std::move(detail));
            }
            ctx.results["checks"] = checks;
            rc = emit_report("verify-selberg", ctx, c);
        });
    }

    // verify-morris
    struct {
        double tau = 0.0, l1 = 0.0, l2 = 0.0, samples = 2e6;
        int n = 0;
    } vm;
    {
        auto* sc = app.add_subcommand("verify-morris",
                                      "circle law moments against the closed product and QMC");
        add_common(sc);
        sc->add_option("--tau", vm.tau, "shape parameter, > 1")->required();
        sc->add_option("--l1", vm.l1, "first charge")->capture_default_str();
        sc->add_option("--l2", vm.l2, "second charge")->capture_default_str();
        sc->add_option("--n", vm.n, "integral dimension for the QMC cross-check (1..3)");
        sc->add_option("--samples", vm.samples, "low-discrepancy point budget")
            ->capture_default_str();
        sc->callback([&] {
            ReportCtx ctx;
            ctx.manifest = manifest();
            const auto thr = thresholds();
            const SelbergParams p(vm.tau, vm.l1, vm.l2);
            ctx.params["tau"] = vm.tau;
            ctx.params["lambda1"] = vm.l1;
            ctx.params["lambda2"] = vm.l2;
            Json checks = Json::array();
            if (vm.l1 == 0.0 && vm.l2 == 0.0) {
                double worst = 0.0;
                for (double qr : {-0.8, 0.3, 0.9, 1.6}) {
                    if (!(qr < vm.tau)) continue;
                    const std::complex<double> q(qr, 0.0);
                    const auto got = morris_mellin(p, q);
                    const auto want = std::exp(
                        q * std::log(2.0 * std::numbers::pi) + detail::clog_gamma(1.0 - q / vm.tau) -
                        q * std::lgamma(1.0 - 1.0 / vm.tau));
                    worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
                }
                Json detail;
                detail["quantity"] = "zero_charge_closed_form";
                detail["max_relative_gap"] = worst;
                detail["threshold"] = thr.morris_special;
                checks.push_back(detail);
                ctx.add_verdict("zero_charge_closed_form", worst <= thr.morris_special,
                                std::move(detail));
            }
            for (long nn = 1; nn <= 2; ++nn) {
                const double formula = morris_negative_moment(p, nn);
                const double transform =
                    morris_mellin(p, {-static_cast<double>(nn), 0.0}).real();
                const double gap = std::fabs(transform - formula);
                Json detail;
                detail["n"] = nn;
                detail["formula_value"] = formula;
                detail["transform_value"] = transform;
                detail["gap"] = gap;
                detail["threshold"] = thr.moment_bridge;
                const bool pass = gap <= thr.moment_bridge * std::max(1.0, std::fabs(formula));
                checks.push_back(detail);
                ctx.add_verdict("negative_moment_formula_dim" + std::to_string(nn), pass,
                                std::move(detail));
            }
            if (vm.n > 0) {
                const auto [est, se] =
                    morris_integral_qmc(vm.n, p, static_cast<std::size_t>(vm.samples));
                const double formula =
                    morris_mellin(p, {static_cast<double>(vm.n), 0.0}).real();
                Json detail;
                detail["n"] = vm.n;
                detail["quantity"] = "morris_integral";
                detail["formula_value"] = formula;
                detail["oracle_value"] = complex_json(est);
                detail["stderr"] = se;
                detail["gap_over_stderr"] = (se > 0.0) ? std::abs(est - formula) / se : 0.0;
                const bool pass = std::abs(est - formula) <=
                                  thr.qmc_stderr_multiple * se +
                                      1e-9 * std::max(1.0, std::abs(formula));
                checks.push_back(detail);
                ctx.add_verdict("qmc_integral_dim" + std::to_string(vm.n), pass,
                                std::move(detail));
            }
            ctx.results["checks"] = checks;
            rc = emit_report("verify-morris", ctx, c);
        });
    }

    // verify-duality
    struct {
        std::string kind = "selberg", q;
        double tau = 0.0, l1 = 0.0, l2 = 0.0, beta = 0.0;
        int cases = 0;
    } vd;
    {
        auto* sc = app.add_subcommand("verify-duality",
                                      "structure function invariance under coupling inversion");
        add_common(sc);
        sc->add_option("--kind", vd.kind, "selberg or morris")->capture_default_str();
        sc->add_option("--tau", vd.tau, "shape parameter (fixed-point mode)");
        sc->add_option("--l1", vd.l1, "first weight")->capture_default_str();
        sc->add_option("--l2", vd.l2, "second weight")->capture_default_str();
        sc->add_option("--q", vd.q, "transform argument, re or re,im");
        sc->add_option("--beta", vd.beta, "coupling (defaults to 1/sqrt(tau))");
        sc->add_option("--cases", vd.cases, "randomized sweep size (used when no --tau)");
        sc->callback([&] {
            ReportCtx ctx;
            ctx.manifest = manifest();
            const auto thr = thresholds();
            const LawKind kind = (vd.kind == "morris") ? LawKind::morris : LawKind::selberg;
            if (vd.kind != "selberg" && vd.kind != "morris")
                throw domain_error("--kind must be selberg or morris");
            ctx.params["kind"] = vd.kind;
            Json cases = Json::array();
            double worst = 0.0;
            if (vd.tau > 0.0) {
                const SelbergParams p(vd.tau, vd.l1, vd.l2);
                const std::complex<double> q = vd.q.empty() ? std::complex<double>(0.2, 0.0)
                                                            : parse_complex(vd.q);
                const double resid = std::abs(duality_F(kind, p, q, vd.beta));
                Json cj;
                cj["tau"] = vd.tau;
                cj["lambda1"] = vd.l1;
                cj["lambda2"] = vd.l2;
                cj["q"] = complex_json(q);
                cj["beta"] = (vd.beta > 0.0) ? vd.beta : 1.0 / std::sqrt(vd.tau);
                cj["residual"] = resid;
                cases.push_back(std::move(cj));
                worst = resid;
            } else {
                const int count = vd.cases > 0 ? vd.cases : 50;
                Rng r(mix_seed(c.seed, 0xd0a1));
                for (int i = 0; i < count; ++i) {
                    const double beta = 0.4 + 0.55 * r.uniform();
                    const double tau = 1.0 / (beta * beta);
                    const SelbergParams p(tau, 1.5 * r.uniform(), 1.5 * r.uniform());
                    const double cap = 0.9 * std::min(beta, 1.0 / beta);
                    const std::complex<double> q(-1.0 + r.uniform() * (cap + 1.0),
                                                 -2.0 + 4.0 * r.uniform());
                    const double resid = std::abs(duality_F(kind, p, q, beta));
                    worst = std::max(worst, resid);
                    Json cj;
                    cj["tau"] = tau;
                    cj["lambda1"] = p.lambda1;
                    cj["lambda2"] = p.lambda2;
                    cj["q"] = complex_json(q);
                    cj["beta"] = beta;
                    cj["residual"] = resid;
                    cases.push_back(std::move(cj));
                }
            }
            ctx.params["cases"] = cases.size();
            ctx.results["cases"] = cases;
            ctx.results["max_residual"] = worst;
            Json detail;
            detail["max_residual"] = worst;
            detail["threshold"] = thr.duality_residual;
            ctx.add_verdict("self_duality_residual", worst <= thr.duality_residual,
                            std::move(detail));
            rc = emit_report("verify-duality", ctx, c);
        });
    }

    // critical
    struct {
        std::string kind = "selberg", q;
        double l1 = 0.0, l2 = 0.0, alpha = -1.0;
    } cr;
    {
        auto* sc = app.add_subcommand("critical", "factor decomposition of the unit-coupling law");
        add_common(sc);
        sc->add_option("--kind", cr.kind, "selberg or morris")->capture_default_str();
        sc->add_option("--l1", cr.l1, "first weight")->capture_default_str();
        sc->add_option("--l2", cr.l2, "second weight")->capture_default_str();
        sc->add_option("--alpha", cr.alpha, "circle charge (sets both weights, morris)");
        sc->add_option("--q", cr.q, "also evaluate the law's transform here");
        sc->callback([&] {
            ReportCtx ctx;
            ctx.manifest = manifest();
            if (cr.kind != "selberg" && cr.kind != "morris")
                throw domain_error("--kind must be selberg or morris");
            const LawKind kind = (cr.kind == "morris") ? LawKind::morris : LawKind::selberg;
            double l1 = cr.l1, l2 = cr.l2;
            if (cr.alpha >= 0.0) l1 = l2 = cr.alpha;
            const CriticalLaw law = critical_law(kind, l1, l2);
            ctx.params["kind"] = cr.kind;
            ctx.params["lambda1"] = l1;
            ctx.params["lambda2"] = l2;
            ctx.results["law"] = law_json(law);
            if (!cr.q.empty()) {
                const auto q = parse_complex(cr.q);
                ctx.params["q"] = complex_json(q);
                ctx.results["mellin"] = complex_json(components_mellin(law.components, q));
            }
            rc = emit_report("critical", ctx, c);
        });
    }

    // gff-sim
    struct {
        std::string domain = "interval", observable = "max";
        int n = 64, runs = 1000;
        double kappa = 2.0, l1 = 0.0, l2 = 0.0, alpha = 0.0, beta = 1.0, rotation = 0.0;
    } gs;
    {
        auto* sc = app.add_subcommand("gff-sim",
                                      "sample the field maximum or exponential functional (CSV)");
        add_common(sc);
        sc->add_option("--domain", gs.domain, "interval or circle")->capture_default_str();
        sc->add_option("--grid", gs.n, "grid size")->capture_default_str();
        sc->add_option("--kappa", gs.kappa, "circle diagonal constant")->capture_default_str();
        sc->add_option("--l1", gs.l1, "interval weight at 0")->capture_default_str();
        sc->add_option("--l2", gs.l2, "interval weight at 1")->capture_default_str();
        sc->add_option("--alpha", gs.alpha, "circle charge")->capture_default_str();
        sc->add_option("--beta", gs.beta, "inverse temperature for the functional")
            ->capture_default_str();
        sc->add_option("--rotation", gs.rotation, "circle grid offset, radians")
            ->capture_default_str();
        sc->add_option("--runs", gs.runs, "number of realizations")->capture_default_str();
        sc->add_option("--observable", gs.observable, "max or z")->capture_default_str();
        sc->callback([&] {
            ReportCtx ctx;
            ctx.manifest = manifest();
            GFFConfig cfg;
            cfg.domain = parse_domain(gs.domain);
            cfg.n = gs.n;
            cfg.kappa = gs.kappa;
            cfg.lambda1 = gs.l1;
            cfg.lambda2 = gs.l2;
            cfg.alpha = gs.alpha;
            cfg.beta = gs.beta;
            cfg.rotation = gs.rotation;
            cfg.seed = c.seed;
            ctx.params["config"] = gff_config_json(cfg);
            ctx.params["observable"] = gs.observable;
            std::vector<double> values;
            if (gs.observable == "max")
                values = sample_max(cfg, gs.runs).samples;
            else if (gs.observable == "z")
                values = exponential_functional_runs(cfg, gs.runs);
            else
                throw domain_error("--observable must be max or z");
            ctx.results["summary"] = summary_stats(values);
            rc = emit_samples("gff-sim", ctx, c, values);
        });
    }

    // gff-compare
    struct {
        std::string domain = "interval", csv;
        int n = 512, runs = 1000;
        double kappa = 2.0, l1 = 0.0, l2 = 0.0, alpha = 0.0;
    } gc;
    {
        auto* sc = app.add_subcommand(
            "gff-compare", "recentered maximum law against the conjectured critical sum");
        add_common(sc);
        sc->add_option("--domain", gc.domain, "interval or circle")->capture_default_str();
        sc->add_option("--grid", gc.n, "largest ladder grid size")->capture_default_str();
        sc->add_option("--kappa", gc.kappa, "circle diagonal constant")->capture_default_str();
        sc->add_option("--l1", gc.l1, "interval weight at 0")->capture_default_str();
        sc->add_option("--l2", gc.l2, "interval weight at 1")->capture_default_str();
        sc->add_option("--alpha", gc.alpha, "circle charge")->capture_default_str();
        sc->add_option("--runs", gc.runs, "realizations per ladder scale")->capture_default_str();
        sc->add_option("--csv", gc.csv, "also dump raw maxima at the largest scale to this CSV");
        sc->callback([&] {
            ReportCtx ctx;
            ctx.manifest = manifest();
            const auto thr = thresholds();
            GFFConfig cfg;
            cfg.domain = parse_domain(gc.domain);
            cfg.n = gc.n;
            cfg.kappa = gc.kappa;
            cfg.lambda1 = gc.l1;
            cfg.lambda2 = gc.l2;
            cfg.alpha = gc.alpha;
            cfg.seed = c.seed;
            ctx.params["config"] = gff_config_json(cfg);
            ctx.params["runs"] = gc.runs;
            const auto r = compare_to_conjecture(cfg, gc.runs);
            Json drift;
            drift["c1"] = r.drift_fit[0];
            drift["c2"] = r.drift_fit[1];
            drift["c0"] = r.drift_fit[2];
            ctx.results["drift_fit"] = drift;
            ctx.results["ladder"] = r.ladder;
            ctx.results["mean_by_scale"] = r.mean_by_scale;
            ctx.results["ks_by_scale"] = r.ks_by_scale;
            ctx.results["kolmogorov_distance"] = r.kolmogorov_distance;
            ctx.results["moment_gaps"] = r.moment_gaps;
            Json d1;
            d1["c1"] = r.drift_fit[0];
            d1["band"] = Json::array({thr.drift_band_low, thr.drift_band_high});
            ctx.add_verdict("drift_coefficient_in_band",
                            r.drift_fit[0] >= thr.drift_band_low &&
                                r.drift_fit[0] <= thr.drift_band_high,
                            std::move(d1));
            Json d2;
            d2["ks_by_scale"] = r.ks_by_scale;
            ctx.add_verdict("ks_trend_non_increasing", r.trend_pass, std::move(d2));
            if (!gc.csv.empty()) {
                RunManifest mcsv = ctx.manifest;
                mcsv.verdict_summary = ctx.any_fail ? "FAIL" : "PASS";
                write_file(resolve_out_path(gc.csv), csv_with_manifest(mcsv, r.samples));
            }
            rc = emit_report("gff-compare", ctx, c);
        });
    }

    // freezing-demo
    struct {
        std::string kind = "selberg", grid = "0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0", q = "0.25";
        double l1 = 0.0, l2 = 0.0;
    } fd;
    {
        auto* sc = app.add_subcommand("freezing-demo",
                                      "structure function table across couplings");
        add_common(sc);
        sc->add_option("--kind", fd.kind, "selberg or morris")->capture_default_str();
        sc->add_option("--grid", fd.grid, "coupling grid in (0,1], comma separated")
            ->capture_default_str();
        sc->add_option("--q", fd.q, "transform argument, re or re,im")->capture_default_str();
        sc->add_option("--l1", fd.l1, "first weight")->capture_default_str();
        sc->add_option("--l2", fd.l2, "second weight")->capture_default_str();
        sc->callback([&] {
            ReportCtx ctx;
            ctx.manifest = manifest();
            const auto thr = thresholds();
            if (fd.kind != "selberg" && fd.kind != "morris")
                throw domain_error("--kind must be selberg or morris");
            const LawKind kind = (fd.kind == "morris") ? LawKind::morris : LawKind::selberg;
            const auto grid = parse_doubles(fd.grid);
            const auto q = parse_complex(fd.q);
            ctx.params["kind"] = fd.kind;
            ctx.params["grid"] = grid;
            ctx.params["q"] = complex_json(q);
            ctx.params["lambda1"] = fd.l1;
            ctx.params["lambda2"] = fd.l2;
            const auto table = freezing_demo(kind, grid, q, fd.l1, fd.l2);
            Json rows = Json::array();
            double worst = 0.0;
            for (const auto& row : table.rows) {
                Json rj;
                rj["beta"] = row.beta;
                rj["value"] = complex_json(row.value);
                rj["dual_residual"] = row.dual_residual;
                rows.push_back(std::move(rj));
                worst = std::max(worst,
                                 row.dual_residual / std::max(1.0, std::abs(row.value)));
            }
            ctx.results["rows"] = rows;
            ctx.results["frozen"] = complex_json(table.frozen);
            Json detail;
            detail["max_relative_residual"] = worst;
            detail["threshold"] = thr.freezing_residual;
            ctx.add_verdict("self_duality_residual", worst <= thr.freezing_residual,
                            std::move(detail));
            rc = emit_report("freezing-demo", ctx, c);
        });
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const verification_error& e) {
        std::fprintf(stderr, "verification failure: %s\n", e.what());
        return 2;
    } catch (const pole_error& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return 1;
    } catch (const domain_error& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return 1;
    } catch (const convergence_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::fprintf(stderr, "[bbeta] wall_ms=%.1f\n", ms);
    return rc;
}

}  // namespace bbeta
