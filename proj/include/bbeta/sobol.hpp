#pragma once

// Deterministic low-discrepancy points: Sobol sequence (direction numbers for
// up to 10 dimensions) with an optional digital-shift scramble.  Replicated
// digital shifts give an unbiased spread from which a standard error is
// estimated; the scramble seed is recorded so verdicts are reproducible.

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "bbeta/errors.hpp"
#include "bbeta/mathutil.hpp"

namespace bbeta {

class SobolSequence {
  public:
    static constexpr int max_dimension = 10;

    SobolSequence(int dim, std::uint64_t scramble_seed) : dim_(dim) {
        if (dim < 1 || dim > max_dimension)
            throw domain_error("SobolSequence: dimension out of range");
        // degree s, polynomial a, initial m values per dimension (d >= 2)
        struct Row {
            int s;
            std::uint32_t a;
            std::array<std::uint32_t, 5> m;
        };
        static constexpr Row rows[9] = {
            {1, 0, {1, 0, 0, 0, 0}},   // d = 2
            {2, 1, {1, 3, 0, 0, 0}},   // d = 3
            {3, 1, {1, 3, 1, 0, 0}},   // d = 4
            {3, 2, {1, 1, 1, 0, 0}},   // d = 5
            {4, 1, {1, 1, 3, 3, 0}},   // d = 6
            {4, 4, {1, 3, 5, 13, 0}},  // d = 7
            {5, 2, {1, 1, 5, 5, 17}},  // d = 8
            {5, 4, {1, 1, 5, 5, 5}},   // d = 9
            {5, 7, {1, 1, 7, 11, 19}}, // d = 10
        };
        dirs_.resize(static_cast<std::size_t>(dim));
        for (int d = 0; d < dim; ++d) {
            auto& v = dirs_[static_cast<std::size_t>(d)];
            if (d == 0) {
                for (int k = 0; k < 32; ++k) v[static_cast<std::size_t>(k)] = 1u << (31 - k);
                continue;
            }
            const Row& row = rows[d - 1];
            for (int k = 0; k < row.s; ++k)
                v[static_cast<std::size_t>(k)] = row.m[static_cast<std::size_t>(k)] << (31 - k);
            for (int k = row.s; k < 32; ++k) {
                std::uint32_t val = v[static_cast<std::size_t>(k - row.s)] ^
                                    (v[static_cast<std::size_t>(k - row.s)] >> row.s);
                for (int i = 1; i < row.s; ++i)
                    if ((row.a >> (row.s - 1 - i)) & 1u) val ^= v[static_cast<std::size_t>(k - i)];
                v[static_cast<std::size_t>(k)] = val;
            }
        }
        shift_.resize(static_cast<std::size_t>(dim));
        std::uint64_t s = scramble_seed;
        for (int d = 0; d < dim; ++d)
            shift_[static_cast<std::size_t>(d)] = static_cast<std::uint32_t>(splitmix64(s) >> 32);
    }

    int dimension() const { return dim_; }

    // i-th point, components in (0, 1).
    void point(std::uint64_t i, double* out) const {
        const std::uint64_t gray = i ^ (i >> 1);
        for (int d = 0; d < dim_; ++d) {
            std::uint32_t acc = shift_[static_cast<std::size_t>(d)];
            std::uint64_t g = gray;
            int bit = 0;
            while (g) {
                if (g & 1u) acc ^= dirs_[static_cast<std::size_t>(d)][static_cast<std::size_t>(bit)];
                g >>= 1;
                ++bit;
            }
            out[d] = (static_cast<double>(acc) + 0.5) * 0x1p-32;
        }
    }

  private:
    int dim_;
    std::vector<std::array<std::uint32_t, 32>> dirs_;
    std::vector<std::uint32_t> shift_;
};

template <class T = double>
struct QmcResult {
    T estimate{};
    double std_error = 0.0;
    std::uint64_t points = 0;
    std::uint64_t scramble_seed = 0;
    int replicates = 0;
};

// Mean of f over [0,1)^dim estimated with `replicates` independently
// scrambled Sobol streams; std_error is the spread of the replicate means.
template <class T = double, class F>
QmcResult<T> qmc_integrate(int dim, std::uint64_t n_points, std::uint64_t scramble_seed, F&& f,
                           int replicates = 8) {
    if (replicates < 2) throw domain_error("qmc_integrate: need at least 2 replicates");
    if (n_points < static_cast<std::uint64_t>(replicates))
        throw domain_error("qmc_integrate: need at least one point per replicate");
    const std::uint64_t per = n_points / static_cast<std::uint64_t>(replicates);
    std::vector<T> means(static_cast<std::size_t>(replicates));
    std::vector<double> x(static_cast<std::size_t>(dim));
    for (int r = 0; r < replicates; ++r) {
        SobolSequence seq(dim, mix_seed(scramble_seed, static_cast<std::uint64_t>(r)));
        T acc{};
        for (std::uint64_t i = 0; i < per; ++i) {
            seq.point(i, x.data());
            acc += f(x.data());
        }
        means[static_cast<std::size_t>(r)] = acc / static_cast<double>(per);
    }
    QmcResult<T> out;
    out.points = per * static_cast<std::uint64_t>(replicates);
    out.scramble_seed = scramble_seed;
    out.replicates = replicates;
    T mean{};
    for (const T& m : means) mean += m;
    mean /= static_cast<double>(replicates);
    double var = 0.0;
    for (const T& m : means) {
        const double d = std::abs(m - mean);
        var += d * d;
    }
    var /= (replicates - 1.0);
    out.estimate = mean;
    out.std_error = std::sqrt(var / replicates);
    return out;
}

}  // namespace bbeta
