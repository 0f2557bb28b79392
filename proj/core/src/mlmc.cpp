#include "nvlab/mlmc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nvlab/parallel.hpp"
#include "nvlab/random.hpp"
#include "nvlab/schemes.hpp"
#include "nvlab/stats.hpp"

namespace nvlab {

Payoff parse_payoff(std::string_view spec) {
    const std::string name(spec);
    if (name == "identity") return parse_payoff("coord1");
    if (name == "norm2") {
        return {name, [](const State& x) { return x.norm(); }};
    }
    if (name.rfind("coord", 0) == 0 && name.size() > 5) {
        int index = 0;
        try {
            std::size_t used = 0;
            index = std::stoi(name.substr(5), &used);
            if (used != name.size() - 5) index = 0;
        } catch (const std::exception&) {
            index = 0;
        }
        if (index < 1 || index > kMaxDim) throw std::invalid_argument("bad payoff coordinate in '" + name + "'");
        return {name, [index](const State& x) {
                    if (x.size() < index) throw std::invalid_argument("payoff coordinate exceeds state dimension");
                    return x(index - 1);
                }};
    }
    if (name.rfind("call(", 0) == 0 && name.back() == ')') {
        double strike = 0.0;
        try {
            strike = std::stod(name.substr(5, name.size() - 6));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad strike in payoff '" + name + "'");
        }
        return {name, [strike](const State& x) { return std::max(x(0) - strike, 0.0); }};
    }
    throw std::invalid_argument("unknown payoff '" + name + "'");
}

std::vector<double> level_difference_samples(const Problem& problem, const Payoff& payoff, int level, int paths,
                                             std::uint64_t master_seed, const MlmcOptions& options) {
    if (level < 0 || level > 24 || paths < 1 || options.base_steps < 1) {
        throw std::invalid_argument("level must be in [0, 24] with positive paths and base steps");
    }
    const int n_fine = options.base_steps << level;
    const GridSpec fine{n_fine, problem.T};
    const GridSpec coarse{n_fine / 2, problem.T};
    // Each level draws from its own block of path indices.
    const std::uint64_t offset = static_cast<std::uint64_t>(level) << 40;

    std::vector<double> out(static_cast<std::size_t>(paths));
    parallel_for(out.size(), options.threads, [&](std::size_t i) {
        const PathBundle bundle = make_bundle(master_seed, offset + i, n_fine, problem.d(), problem.T);
        const double pf = payoff(nv_trajectory(problem, bundle, fine, options.flows).states.back());
        if (level == 0) {
            out[i] = pf;
            return;
        }
        const double pc = payoff(nv_trajectory(problem, bundle, coarse, options.flows).states.back());
        out[i] = pf - pc;
    });
    return out;
}

MlmcReport mlmc_estimate(const Problem& problem, const Payoff& payoff, int l_max, int paths_per_level,
                         std::uint64_t master_seed, const MlmcOptions& options) {
    if (l_max < 1) throw std::invalid_argument("mlmc needs at least levels 0 and 1");
    if (paths_per_level < 2) throw std::invalid_argument("mlmc needs at least two paths per level");

    MlmcReport report;
    double variance_of_estimate = 0.0;
    for (int level = 0; level <= l_max; ++level) {
        const auto samples = level_difference_samples(problem, payoff, level, paths_per_level, master_seed, options);
        const SampleMoments mom = moments(samples);
        LevelStats stats;
        stats.level = level;
        stats.N = options.base_steps << level;
        stats.paths = paths_per_level;
        stats.mean_diff = mom.mean;
        stats.var_diff = std::max(0.0, mom.variance);
        stats.cost = static_cast<double>(paths_per_level) * (stats.N + (level == 0 ? 0 : stats.N / 2));
        report.estimate += stats.mean_diff;
        report.total_cost += stats.cost;
        variance_of_estimate += stats.var_diff / paths_per_level;
        report.levels.push_back(stats);
    }
    report.std_error = std::sqrt(variance_of_estimate);

    report.beta_first_level = std::max(1, std::min(options.beta_min_level, l_max - 1));
    report.beta_last_level = l_max;
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& s : report.levels) {
        if (s.level < report.beta_first_level || s.var_diff <= 0.0) continue;
        xs.push_back(s.level);
        ys.push_back(std::log2(s.var_diff));
    }
    report.beta_fit = xs.size() >= 2 ? -fit_line(xs, ys).slope : std::numeric_limits<double>::quiet_NaN();
    return report;
}

}  // namespace nvlab
