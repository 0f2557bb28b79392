#include "nvlab/random.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace nvlab {

PathRng::PathRng(std::uint64_t master_seed, std::uint64_t path_index, Stream stream) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(master_seed),
        static_cast<std::uint32_t>(master_seed >> 32),
        static_cast<std::uint32_t>(path_index),
        static_cast<std::uint32_t>(path_index >> 32),
        static_cast<std::uint32_t>(stream),
    };
    engine_.seed(seq);
}

double PathRng::lattice_normal(double stddev) {
    return std::nearbyint(stddev * normal() / kIncrementQuantum) * kIncrementQuantum;
}

PathBundle make_bundle(std::uint64_t master_seed, std::uint64_t path_index, int n_fine, int d, double T) {
    if (n_fine < 1 || d < 1 || d > kMaxDim) {
        throw std::invalid_argument("make_bundle needs n_fine >= 1 and 1 <= d <= 16");
    }
    if (!(T > 0.0)) {
        throw std::invalid_argument("make_bundle needs a positive horizon");
    }
    PathBundle b;
    b.n_steps = n_fine;
    b.d = d;
    b.T = T;
    b.dW.resize(static_cast<std::size_t>(n_fine) * static_cast<std::size_t>(d));
    b.eta.resize(static_cast<std::size_t>(n_fine));

    const double stddev = std::sqrt(T / n_fine);
    PathRng gauss(master_seed, path_index, Stream::kBrownian);
    for (auto& w : b.dW) w = gauss.lattice_normal(stddev);
    PathRng signs(master_seed, path_index, Stream::kRademacher);
    for (auto& e : b.eta) e = static_cast<std::int8_t>(signs.rademacher());
    return b;
}

PathBundle coarsen(const PathBundle& bundle, int n_coarse) {
    if (n_coarse < 1 || bundle.n_steps % n_coarse != 0) {
        throw std::invalid_argument("coarse step count " + std::to_string(n_coarse) + " does not divide " +
                                    std::to_string(bundle.n_steps));
    }
    if (n_coarse == bundle.n_steps) return bundle;

    const int ratio = bundle.n_steps / n_coarse;
    const auto d = static_cast<std::size_t>(bundle.d);
    PathBundle out;
    out.n_steps = n_coarse;
    out.d = bundle.d;
    out.T = bundle.T;
    out.dW.assign(static_cast<std::size_t>(n_coarse) * d, 0.0);
    out.eta.resize(static_cast<std::size_t>(n_coarse));
    for (int k = 0; k < n_coarse; ++k) {
        const auto first = static_cast<std::size_t>(k) * static_cast<std::size_t>(ratio);
        out.eta[static_cast<std::size_t>(k)] = bundle.eta[first];
        double* dst = out.dW.data() + static_cast<std::size_t>(k) * d;
        for (int r = 0; r < ratio; ++r) {
            const double* src = bundle.dW.data() + (first + static_cast<std::size_t>(r)) * d;
            for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
        }
    }
    return out;
}

}  // namespace nvlab
