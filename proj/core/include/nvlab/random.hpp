#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>

#include "nvlab/model.hpp"

namespace nvlab {

/// Name of the generator stack. Written into output metadata so that CSV
/// goldens can be tied to the exact algorithm.
inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64 seeded by seed_seq(seed, path, stream); boost ziggurat normal; increments on 2^-40 lattice";

/// Brownian increments are rounded to multiples of this quantum. Any partial
/// sum of lattice values below 2^13 in magnitude is exact in binary64, so
/// coarsening is associative bit-for-bit.
inline constexpr double kIncrementQuantum = 0x1p-40;

/// Independent substreams drawn for one path.
enum class Stream : std::uint32_t {
    kBrownian = 0,
    kRademacher = 1,
    kAuxiliary = 2,
};

/// Per-path random source. Streams for distinct (seed, path, stream) triples
/// are seeded independently through std::seed_seq.
class PathRng {
public:
    PathRng(std::uint64_t master_seed, std::uint64_t path_index, Stream stream);

    double normal() { return normal_(engine_); }
    /// Uniform sign in {-1, +1}.
    int rademacher() { return (engine_() >> 63) != 0 ? 1 : -1; }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1p-53; }
    /// Gaussian with the given standard deviation, rounded to the increment lattice.
    double lattice_normal(double stddev);

private:
    boost::random::mt19937_64 engine_;
    boost::random::normal_distribution<double> normal_;
};

struct GridSpec {
    int N = 1;
    double T = 1.0;

    [[nodiscard]] double h() const { return T / N; }
    [[nodiscard]] double time(int k) const { return T * k / N; }
};

/// Brownian increments and Rademacher signs on a uniform grid of n_steps.
/// Row-major increments: dW[k * d + j].
struct PathBundle {
    int n_steps = 0;
    int d = 0;
    double T = 1.0;
    std::vector<double> dW;
    std::vector<std::int8_t> eta;

    [[nodiscard]] double h() const { return T / n_steps; }
    [[nodiscard]] std::span<const double> step(int k) const {
        return std::span<const double>(dW).subspan(static_cast<std::size_t>(k) * static_cast<std::size_t>(d),
                                                   static_cast<std::size_t>(d));
    }
    [[nodiscard]] double increment(int k, int j) const {
        return dW[static_cast<std::size_t>(k) * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)];
    }
    [[nodiscard]] BrownianIncrements view() const { return {h(), n_steps, d, dW}; }

    friend bool operator==(const PathBundle&, const PathBundle&) = default;
};

/// Draws the fine path for (master_seed, path_index). Deterministic; distinct
/// path indices give independent streams.
PathBundle make_bundle(std::uint64_t master_seed, std::uint64_t path_index, int n_fine, int d, double T);

/// Aggregates increments onto a grid of n_coarse steps. The coarse sign of a
/// block is the sign of its first fine step. Throws std::invalid_argument if
/// n_coarse does not divide the bundle's step count.
PathBundle coarsen(const PathBundle& bundle, int n_coarse);

}  // namespace nvlab
