#pragma once

#include <cstdint>
#include <vector>

#include "nvlab/flows.hpp"
#include "nvlab/model.hpp"
#include "nvlab/schemes.hpp"

namespace nvlab {

struct StudyOptions {
    /// Moment order: errors are E[max_k |X - Y|^{2p}]^{1/(2p)}.
    int p = 1;
    /// Reference resolution is refine_factor * N.
    int refine_factor = 64;
    int batches = 20;
    int threads = 0;
    FlowSettings flows;
};

struct ErrorPoint {
    int N = 0;
    double h = 0.0;
    double err = 0.0;
    double std_error = 0.0;
    int p = 1;
    bool reference_proxy = false;
};

/// Couples `scheme` at N steps with the reference (closed form, or NV at
/// refine_factor * N when the problem has none) on shared paths and returns
/// the L^{2p} norm of the max-over-grid error. The standard error comes from
/// `batches` contiguous path batches and the delta method.
ErrorPoint strong_error(const Problem& problem, Scheme scheme, int N, int paths, std::uint64_t master_seed,
                        const StudyOptions& options = {});

/// Same estimator between two schemes driven by the same increments at N steps.
ErrorPoint scheme_distance(const Problem& problem, Scheme a, Scheme b, int N, int paths, std::uint64_t master_seed,
                           const StudyOptions& options = {});

struct RateFit {
    std::vector<ErrorPoint> points;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    /// N of points dropped because their error was exactly zero.
    std::vector<int> excluded;
};

/// OLS of log(err) on log(h). Throws std::invalid_argument with fewer than
/// three points, repeated N, or fewer than two usable (nonzero) points.
RateFit fit_rate(const std::vector<ErrorPoint>& points);

/// Terminal samples of sqrt(N) (X_T - X^NV_T), with X the reference of strong_error.
std::vector<State> normalized_error_samples(const Problem& problem, int N, int paths, std::uint64_t master_seed,
                                            const StudyOptions& options = {});

/// Euler discretization on n_fine steps of the pair (X, V) with
///   dV = sqrt(T/2) sum_{m<j} [s^j, s^m](X) dB^{jm} + db(X) V dt + sum_j ds^j(X) V dW^j,
/// V_0 = 0, B an independent d(d-1)/2-dimensional Brownian motion.
/// Returns terminal samples of V.
std::vector<State> simulate_limit_sde(const Problem& problem, int paths, int n_fine, std::uint64_t master_seed,
                                      const StudyOptions& options = {});

struct LimitLawReport {
    int N = 0;
    std::size_t samples_scheme = 0;
    std::size_t samples_limit = 0;
    State mean_scheme;
    State mean_limit;
    Matrix cov_scheme;
    Matrix cov_limit;
    std::vector<double> ks_stat;
    std::vector<double> ks_pvalue;
};

/// Means, unbiased covariances and per-coordinate two-sample KS tests.
LimitLawReport compare_distributions(const std::vector<State>& scheme, const std::vector<State>& limit);

struct SourceTermOptions {
    double T = 1.0;
    /// Sub-steps per coarse step for the within-step stochastic integrals.
    int substeps = 64;
    int threads = 0;
};

struct SourceTermEstimate {
    int N = 0;
    int j = 0;
    int m = 0;
    double t = 0.0;
    double var_est = 0.0;
    double std_error = 0.0;
    /// N * int_0^t (s - floor_grid(s)) ds, which equals T t / 2 on grid points.
    double theory = 0.0;
};

/// Sample variance of
///   Y_t = sqrt(N) (int_0^t psi1 dW^m(s) dW^j_s + int_0^t psi2 dW^j(s) dW^m_s),
/// psi1 = (eta - 1)/2, psi2 = (eta + 1)/2, with dW(s) the increment since the
/// last grid point and eta the step's Rademacher sign.
SourceTermEstimate source_term_variance(int N, int j, int m, double t, int paths, std::uint64_t master_seed,
                                        const SourceTermOptions& options = {});

}  // namespace nvlab
