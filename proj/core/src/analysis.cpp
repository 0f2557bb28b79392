#include "nvlab/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "nvlab/parallel.hpp"
#include "nvlab/random.hpp"
#include "nvlab/stats.hpp"

namespace nvlab {

namespace {

void check_paths(int paths, const StudyOptions& options) {
    if (paths < 100) throw std::invalid_argument("error estimates need at least 100 paths");
    if (options.batches < 2 || options.batches > paths) {
        throw std::invalid_argument("batch count must be in [2, paths]");
    }
    if (options.p < 1) throw std::invalid_argument("moment order p must be >= 1");
}

double max_power_error(const Trajectory& a, const Trajectory& b, int p) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.states.size(); ++k) {
        worst = std::max(worst, (a.states[k] - b.states[k]).squaredNorm());
    }
    return p == 1 ? worst : std::pow(worst, p);
}

// Turns per-path values of max|e|^{2p} into the L^{2p} error and its standard error.
ErrorPoint summarize(const std::vector<double>& per_path, int N, double T, const StudyOptions& options) {
    const std::size_t paths = per_path.size();
    const auto batches = static_cast<std::size_t>(options.batches);
    std::vector<double> batch_means;
    batch_means.reserve(batches);
    double total = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
        const std::size_t lo = b * paths / batches;
        const std::size_t hi = (b + 1) * paths / batches;
        double sum = 0.0;
        for (std::size_t i = lo; i < hi; ++i) sum += per_path[i];
        total += sum;
        batch_means.push_back(sum / static_cast<double>(hi - lo));
    }
    const double mean = total / static_cast<double>(paths);
    const SampleMoments bm = moments(batch_means);
    const double se_mean = std::sqrt(bm.variance / static_cast<double>(batches));

    ErrorPoint point;
    point.N = N;
    point.h = T / N;
    point.p = options.p;
    const double order = 2.0 * options.p;
    point.err = std::pow(mean, 1.0 / order);
    point.std_error = mean > 0.0 ? se_mean * std::pow(mean, 1.0 / order - 1.0) / order : 0.0;
    return point;
}

}  // namespace

ErrorPoint strong_error(const Problem& problem, Scheme scheme, int N, int paths, std::uint64_t master_seed,
                        const StudyOptions& options) {
    check_paths(paths, options);
    if (N < 1) throw std::invalid_argument("N must be positive");
    if (options.refine_factor < 1) throw std::invalid_argument("refine factor must be positive");
    if (!problem.has_exact_solution() && options.refine_factor == 1) {
        throw std::invalid_argument("problem '" + problem.id + "' needs a refined reference (refine factor > 1)");
    }
    const GridSpec grid{N, problem.T};
    const int n_fine = N * options.refine_factor;
    std::vector<double> per_path(static_cast<std::size_t>(paths));
    std::vector<char> proxy(static_cast<std::size_t>(paths), 0);
    parallel_for(per_path.size(), options.threads, [&](std::size_t i) {
        const PathBundle bundle = make_bundle(master_seed, i, n_fine, problem.d(), problem.T);
        const Trajectory ref = exact_trajectory(problem, bundle, grid, options.flows);
        const Trajectory approx = simulate(problem, scheme, bundle, grid, options.flows);
        per_path[i] = max_power_error(ref, approx, options.p);
        proxy[i] = ref.reference_proxy ? 1 : 0;
    });
    ErrorPoint point = summarize(per_path, N, problem.T, options);
    point.reference_proxy = proxy.front() != 0;
    return point;
}

ErrorPoint scheme_distance(const Problem& problem, Scheme a, Scheme b, int N, int paths, std::uint64_t master_seed,
                           const StudyOptions& options) {
    check_paths(paths, options);
    if (N < 1) throw std::invalid_argument("N must be positive");
    const GridSpec grid{N, problem.T};
    std::vector<double> per_path(static_cast<std::size_t>(paths));
    parallel_for(per_path.size(), options.threads, [&](std::size_t i) {
        const PathBundle bundle = make_bundle(master_seed, i, N, problem.d(), problem.T);
        per_path[i] = max_power_error(simulate(problem, a, bundle, grid, options.flows),
                                      simulate(problem, b, bundle, grid, options.flows), options.p);
    });
    return summarize(per_path, N, problem.T, options);
}

RateFit fit_rate(const std::vector<ErrorPoint>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_rate needs at least three points");
    std::set<int> seen;
    for (const auto& pt : points) {
        if (!seen.insert(pt.N).second) throw std::invalid_argument("fit_rate needs distinct N");
    }
    RateFit fit;
    fit.points = points;
    std::vector<double> log_h;
    std::vector<double> log_err;
    for (const auto& pt : points) {
        if (pt.err <= 0.0) {
            fit.excluded.push_back(pt.N);
            continue;
        }
        log_h.push_back(std::log(pt.h));
        log_err.push_back(std::log(pt.err));
    }
    if (log_h.size() < 2) throw std::invalid_argument("fit_rate has fewer than two nonzero errors");
    const LineFit line = fit_line(log_h, log_err);
    fit.slope = line.slope;
    fit.intercept = line.intercept;
    fit.r_squared = line.r_squared;
    return fit;
}

std::vector<State> normalized_error_samples(const Problem& problem, int N, int paths, std::uint64_t master_seed,
                                            const StudyOptions& options) {
    if (N < 1 || paths < 1) throw std::invalid_argument("N and paths must be positive");
    if (!problem.has_exact_solution() && options.refine_factor <= 1) {
        throw std::invalid_argument("problem '" + problem.id + "' needs a refined reference (refine factor > 1)");
    }
    const GridSpec grid{N, problem.T};
    const int n_fine = N * options.refine_factor;
    const double scale = std::sqrt(static_cast<double>(N));
    std::vector<State> out(static_cast<std::size_t>(paths));
    parallel_for(out.size(), options.threads, [&](std::size_t i) {
        const PathBundle bundle = make_bundle(master_seed, i, n_fine, problem.d(), problem.T);
        const Trajectory ref = exact_trajectory(problem, bundle, grid, options.flows);
        const Trajectory nv = nv_trajectory(problem, bundle, grid, options.flows);
        out[i] = scale * (ref.states.back() - nv.states.back());
    });
    return out;
}

std::vector<State> simulate_limit_sde(const Problem& problem, int paths, int n_fine, std::uint64_t master_seed,
                                      const StudyOptions& options) {
    if (n_fine < 1 || paths < 1) throw std::invalid_argument("n_fine and paths must be positive");
    const auto& f = problem.fields;
    const int n = problem.n();
    const int d = problem.d();
    const BracketTable brackets(f);
    const double source_scale = std::sqrt(problem.T / 2.0);

    std::vector<State> out(static_cast<std::size_t>(paths));
    parallel_for(out.size(), options.threads, [&](std::size_t i) {
        const PathBundle bundle = make_bundle(master_seed, i, n_fine, d, problem.T);
        PathRng aux(master_seed, i, Stream::kAuxiliary);
        const double h = bundle.h();
        const double sqrt_h = std::sqrt(h);
        State x = problem.x0;
        State v = State::Zero(n);
        for (int k = 0; k < n_fine; ++k) {
            const auto dw = bundle.step(k);
            State dv = f.drift_jacobian(x) * v * h;
            for (std::size_t e = 0; e < brackets.size(); ++e) {
                dv += (source_scale * aux.normal() * sqrt_h) * brackets(e, x);
            }
            State dx = f.drift(x) * h;
            for (int j = 0; j < d; ++j) {
                const auto ju = static_cast<std::size_t>(j);
                dv += f.sigma_jacobian[ju](x) * v * dw[ju];
                dx += f.sigma[ju](x) * dw[ju];
            }
            x += dx;
            v += dv;
        }
        if (!v.allFinite()) throw std::runtime_error("limit equation produced a non-finite state");
        out[i] = v;
    });
    return out;
}

LimitLawReport compare_distributions(const std::vector<State>& scheme, const std::vector<State>& limit) {
    if (scheme.empty() || limit.empty()) throw std::invalid_argument("compare_distributions needs samples");
    const auto dim = scheme.front().size();
    auto same_dim = [dim](const State& s) { return s.size() == dim; };
    if (!std::all_of(scheme.begin(), scheme.end(), same_dim) || !std::all_of(limit.begin(), limit.end(), same_dim)) {
        throw std::invalid_argument("compare_distributions needs samples of one dimension");
    }

    auto mean_cov = [dim](const std::vector<State>& xs, State& mean, Matrix& cov) {
        mean = State::Zero(dim);
        for (const auto& x : xs) mean += x;
        mean /= static_cast<double>(xs.size());
        cov = Matrix::Zero(dim, dim);
        for (const auto& x : xs) {
            const State c = x - mean;
            cov.noalias() += c * c.transpose();
        }
        cov /= static_cast<double>(std::max<std::size_t>(xs.size(), 2) - 1);
        cov = 0.5 * (cov + cov.transpose()).eval();
    };

    LimitLawReport report;
    report.samples_scheme = scheme.size();
    report.samples_limit = limit.size();
    mean_cov(scheme, report.mean_scheme, report.cov_scheme);
    mean_cov(limit, report.mean_limit, report.cov_limit);

    std::vector<double> a(scheme.size());
    std::vector<double> b(limit.size());
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (std::size_t i = 0; i < scheme.size(); ++i) a[i] = scheme[i](c);
        for (std::size_t i = 0; i < limit.size(); ++i) b[i] = limit[i](c);
        const KsResult ks = ks_two_sample(a, b);
        report.ks_stat.push_back(ks.statistic);
        report.ks_pvalue.push_back(ks.p_value);
    }
    return report;
}

SourceTermEstimate source_term_variance(int N, int j, int m, double t, int paths, std::uint64_t master_seed,
                                        const SourceTermOptions& options) {
    if (m < 1 || m >= j || j > kMaxDim) throw std::invalid_argument("source term needs 1 <= m < j");
    if (N < 1 || paths < 2 || options.substeps < 1) {
        throw std::invalid_argument("source term needs N >= 1, paths >= 2, substeps >= 1");
    }
    if (!(t >= 0.0) || t > options.T) throw std::invalid_argument("source term time must lie in [0, T]");

    const int S = options.substeps;
    const int n_fine = N * S;
    const double fine_h = options.T / n_fine;
    // Fine steps that end at or before t.
    const int active = std::min(n_fine, static_cast<int>(std::floor(t / fine_h + 1e-9)));
    const double scale = std::sqrt(static_cast<double>(N));
    const auto jj = static_cast<std::size_t>(j - 1);
    const auto mm = static_cast<std::size_t>(m - 1);

    std::vector<double> samples(static_cast<std::size_t>(paths));
    parallel_for(samples.size(), options.threads, [&](std::size_t i) {
        const PathBundle bundle = make_bundle(master_seed, i, n_fine, j, options.T);
        double y = 0.0;
        double since_j = 0.0;
        double since_m = 0.0;
        double psi1 = 0.0;
        double psi2 = 0.0;
        for (int k = 0; k < active; ++k) {
            if (k % S == 0) {
                since_j = 0.0;
                since_m = 0.0;
                const double eta = bundle.eta[static_cast<std::size_t>(k)];
                psi1 = 0.5 * (eta - 1.0);
                psi2 = 0.5 * (eta + 1.0);
            }
            const auto dw = bundle.step(k);
            y += psi1 * since_m * dw[jj] + psi2 * since_j * dw[mm];
            since_j += dw[jj];
            since_m += dw[mm];
        }
        samples[i] = scale * y;
    });

    const SampleMoments mom = moments(samples);
    SourceTermEstimate est;
    est.N = N;
    est.j = j;
    est.m = m;
    est.t = t;
    est.var_est = mom.variance;
    est.std_error = mom.variance_std_error;
    const double h = options.T / N;
    const double full = std::floor(t / h + 1e-9);
    const double rest = std::max(0.0, t - full * h);
    est.theory = N * (full * h * h / 2.0 + rest * rest / 2.0);
    return est;
}

}  // namespace nvlab
