#pragma once

// Seeded random source with explicitly coded distributions so that a fixed
// seed reproduces byte-identical streams across platforms and thread counts.
// Substreams are derived from (seed, stream index), never from engine state.

#include <cmath>
#include <cstdint>
#include <random>

#include "bbeta/errors.hpp"
#include "bbeta/mathutil.hpp"

namespace bbeta {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : seed_(seed), eng_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // Independent substream; deterministic in (seed, stream).
    Rng derive(std::uint64_t stream) const { return Rng(mix_seed(seed_, stream)); }

    // Uniform in (0, 1), never exactly 0 or 1.
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1p-53;
    }

    double normal() {
        const double u1 = uniform(), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double exponential() { return -std::log(uniform()); }

    // Gamma(shape, 1) via Marsaglia-Tsang squeeze; boost for shape < 1.
    double gamma(double shape) {
        if (!(shape > 0)) throw domain_error("Rng::gamma: shape must be > 0");
        if (shape < 1.0) {
            const double u = uniform();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    std::uint64_t poisson(double lambda) {
        if (!(lambda >= 0)) throw domain_error("Rng::poisson: rate must be >= 0");
        std::uint64_t total = 0;
        // Split large rates so the product method never underflows.
        while (lambda > 30.0) {
            double half = lambda / 2.0;
            total += poisson(half);
            lambda -= half;
        }
        const double limit = std::exp(-lambda);
        double prod = uniform();
        while (prod > limit) {
            ++total;
            prod *= uniform();
        }
        return total;
    }

  private:
    std::uint64_t seed_;
    std::mt19937_64 eng_;
};

}  // namespace bbeta
