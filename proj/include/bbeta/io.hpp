#pragma once

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <bbeta/errors.hpp>

namespace bbeta {

using Json = nlohmann::ordered_json;

// Static run descriptor embedded in every artifact.  Wall time is
// deliberately not a member: artifacts must be byte-identical across reruns
// with the same seed and thread count, so timing goes to stderr only.
struct RunManifest {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    int threads = 1;
    Json versions;
    std::string verdict_summary = "NONE";
};

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline Json manifest_json(const RunManifest& m) {
    Json j;
    j["command"] = m.command;
    j["config_hash"] = m.config_hash;
    j["seed"] = m.seed;
    j["threads"] = m.threads;
    j["versions"] = m.versions;
    j["verdict_summary"] = m.verdict_summary;
    return j;
}

// Shortest round-trip decimal form, deterministic across runs.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline Json complex_json(std::complex<double> z) {
    if (z.imag() == 0.0) return Json(z.real());
    Json j;
    j["re"] = z.real();
    j["im"] = z.imag();
    return j;
}

// Relative output paths honor the BBETA_OUT_DIR override.
inline std::string resolve_out_path(const std::string& out) {
    if (out.empty() || out.front() == '/') return out;
    const char* dir = std::getenv("BBETA_OUT_DIR");
    if (!dir || !*dir) return out;
    std::string d(dir);
    if (d.back() != '/') d.push_back('/');
    return d + out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw domain_error("cannot open output file: " + path);
    f << content;
    if (!f.good()) throw domain_error("failed writing output file: " + path);
}

inline std::string csv_with_manifest(const RunManifest& m, const std::vector<double>& values) {
    std::string out = "# manifest " + manifest_json(m).dump() + "\n";
    out += "index,value\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out += std::to_string(i) + "," + format_double(values[i]) + "\n";
    return out;
}

// Verdict thresholds; the shipped config/thresholds.json carries these same
// defaults and any file passed via --thresholds overrides them.
struct Thresholds {
    double lk_consistency = 1e-7;
    double selberg_formula = 1e-9;
    double morris_special = 1e-10;
    double moment_bridge = 1e-9;
    double duality_residual = 1e-8;
    double decomposition_fidelity = 1e-8;
    double qmc_stderr_multiple = 3.0;
    double identity_residual = 1e-8;
    double freezing_residual = 1e-8;
    double drift_band_low = 1.6;
    double drift_band_high = 2.4;

    static Thresholds from_json(const Json& j) {
        Thresholds t;
        auto get = [&j](const char* key, double& slot) {
            if (j.contains(key)) slot = j.at(key).get<double>();
        };
        get("lk_consistency", t.lk_consistency);
        get("selberg_formula", t.selberg_formula);
        get("morris_special", t.morris_special);
        get("moment_bridge", t.moment_bridge);
        get("duality_residual", t.duality_residual);
        get("decomposition_fidelity", t.decomposition_fidelity);
        get("qmc_stderr_multiple", t.qmc_stderr_multiple);
        get("identity_residual", t.identity_residual);
        get("freezing_residual", t.freezing_residual);
        if (j.contains("drift_band")) {
            t.drift_band_low = j.at("drift_band").at(0).get<double>();
            t.drift_band_high = j.at("drift_band").at(1).get<double>();
        }
        return t;
    }

    static Thresholds load(const std::string& path) {
        if (path.empty()) return Thresholds{};
        std::ifstream f(path);
        if (!f) throw domain_error("cannot read thresholds file: " + path);
        Json j = Json::parse(f, nullptr, true, true);
        return from_json(j);
    }

    Json to_json() const {
        Json j;
        j["lk_consistency"] = lk_consistency;
        j["selberg_formula"] = selberg_formula;
        j["morris_special"] = morris_special;
        j["moment_bridge"] = moment_bridge;
        j["duality_residual"] = duality_residual;
        j["decomposition_fidelity"] = decomposition_fidelity;
        j["qmc_stderr_multiple"] = qmc_stderr_multiple;
        j["identity_residual"] = identity_residual;
        j["freezing_residual"] = freezing_residual;
        j["drift_band"] = Json::array({drift_band_low, drift_band_high});
        return j;
    }
};

}  // namespace bbeta
