#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace bbeta {

// e^z - 1 with full relative accuracy for small |z|.
inline std::complex<double> cexpm1(std::complex<double> z) {
    const double x = z.real(), y = z.imag();
    const double emx = std::expm1(x);
    const double cy = std::cos(y), sy = std::sin(y);
    // e^x cos y - 1 = expm1(x) cos y + (cos y - 1), both terms O(|z|)
    const double re = emx * cy - 2.0 * std::sin(0.5 * y) * std::sin(0.5 * y);
    const double im = (emx + 1.0) * sy;
    return {re, im};
}

// e^z - 1 - z with full relative accuracy for small |z|.
inline std::complex<double> cexpm1m(std::complex<double> z) {
    if (std::abs(z.real()) + std::abs(z.imag()) < 0.5) {
        std::complex<double> acc{1.0, 0.0};
        for (int k = 14; k >= 3; --k) acc = 1.0 + acc * (z / static_cast<double>(k));
        return 0.5 * z * z * acc;
    }
    return cexpm1(z) - z;
}

// (1 - e^{-t}) / t, finite and accurate for all t >= 0.
inline double one_minus_exp_over(double t) {
    if (t == 0.0) return 1.0;
    return -std::expm1(-t) / t;
}

inline double harmonic(int n) {
    double s = 0.0;
    for (int l = 1; l <= n; ++l) s += 1.0 / l;
    return s;
}

// SplitMix64 step; also used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + (stream << 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

}  // namespace bbeta
