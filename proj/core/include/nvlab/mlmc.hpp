#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "nvlab/flows.hpp"
#include "nvlab/model.hpp"

namespace nvlab {

struct Payoff {
    std::string name;
    std::function<double(const State&)> f;

    double operator()(const State& x) const { return f(x); }
};

/// "coordK" (1-based), "identity" (= coord1), "norm2" (Euclidean norm) or
/// "call(K)" = max(x_1 - K, 0).
Payoff parse_payoff(std::string_view spec);

struct MlmcOptions {
    /// Steps on level 0; level l uses base_steps * 2^l.
    int base_steps = 1;
    /// First level entering the variance-decay fit.
    int beta_min_level = 2;
    int threads = 0;
    FlowSettings flows;
};

struct LevelStats {
    int level = 0;
    int N = 0;
    int paths = 0;
    double mean_diff = 0.0;
    double var_diff = 0.0;
    /// NV steps simulated on this level.
    double cost = 0.0;
};

struct MlmcReport {
    std::vector<LevelStats> levels;
    double estimate = 0.0;
    double std_error = 0.0;
    double total_cost = 0.0;
    /// -slope of log2(var_diff) against level; NaN when fewer than two usable levels.
    double beta_fit = 0.0;
    int beta_first_level = 0;
    int beta_last_level = 0;
};

/// f(X^{N_l}_T) - f(X^{N_{l-1}}_T) with both NV trajectories driven by one
/// bundle (the coarse one through coarsen); plain f(X^{N_0}_T) on level 0.
std::vector<double> level_difference_samples(const Problem& problem, const Payoff& payoff, int level, int paths,
                                             std::uint64_t master_seed, const MlmcOptions& options = {});

/// Telescoping estimator with a fixed number of paths on every level 0..l_max.
MlmcReport mlmc_estimate(const Problem& problem, const Payoff& payoff, int l_max, int paths_per_level,
                         std::uint64_t master_seed, const MlmcOptions& options = {});

}  // namespace nvlab
