#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nvlab/parallel.hpp"
#include "nvlab/random.hpp"
#include "nvlab/stats.hpp"

namespace nvlab {
namespace {

TEST(FitLine, ExactLine) {
    const std::vector<double> x{0, 1, 2, 3};
    const std::vector<double> y{1, 3, 5, 7};
    const LineFit fit = fit_line(x, y);
    EXPECT_DOUBLE_EQ(fit.slope, 2.0);
    EXPECT_DOUBLE_EQ(fit.intercept, 1.0);
    EXPECT_DOUBLE_EQ(fit.r_squared, 1.0);
    const std::vector<double> flat{2, 2, 2};
    EXPECT_THROW(fit_line(flat, flat), std::invalid_argument);
}

TEST(Moments, SmallSample) {
    const std::vector<double> v{1, 2, 3, 4};
    const SampleMoments m = moments(v);
    EXPECT_EQ(m.count, 4u);
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_DOUBLE_EQ(m.variance, 5.0 / 3.0);
    EXPECT_GT(m.variance_std_error, 0.0);
}

TEST(Kolmogorov, KnownQuantiles) {
    EXPECT_NEAR(kolmogorov_survival(1.3581), 0.05, 1e-4);
    EXPECT_NEAR(kolmogorov_survival(1.6276), 0.01, 1e-4);
    EXPECT_NEAR(kolmogorov_survival(1.2238), 0.10, 1e-4);
    EXPECT_EQ(kolmogorov_survival(0.0), 1.0);
    // Both evaluation branches agree where they meet.
    EXPECT_NEAR(kolmogorov_survival(1.18 - 1e-12), kolmogorov_survival(1.18 + 1e-12), 1e-10);
}

TEST(KsTwoSample, HandComputedStatistic) {
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{2.5, 4, 5, 6};
    // After 3: F_a = 1, F_b = 1/4.
    EXPECT_DOUBLE_EQ(ks_two_sample(a, b).statistic, 0.75);
    const std::vector<double> tied{1, 2, 3};
    EXPECT_EQ(ks_two_sample(a, tied).statistic, 0.0);
    EXPECT_EQ(ks_two_sample(a, tied).p_value, 1.0);
}

TEST(KsTwoSample, SeparatedSamplesAreRejected) {
    PathRng rng(1, 0, Stream::kAuxiliary);
    std::vector<double> a(2000);
    std::vector<double> b(2000);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal() + 0.3;
    EXPECT_LT(ks_two_sample(a, b).p_value, 1e-6);
}

// Independent normal samples of size 10^4, one replicate per seed.
std::vector<double> null_pvalues(int seeds) {
    std::vector<double> p(static_cast<std::size_t>(seeds));
    for (int s = 0; s < seeds; ++s) {
        PathRng rng(static_cast<std::uint64_t>(s), 0, Stream::kAuxiliary);
        std::vector<double> a(10000);
        std::vector<double> b(10000);
        for (auto& x : a) x = rng.normal();
        for (auto& x : b) x = rng.normal();
        p[static_cast<std::size_t>(s)] = ks_two_sample(a, b).p_value;
    }
    return p;
}

TEST(KsCalibration, NullPValuesRarelyBelowOnePercent) {
    const auto p = null_pvalues(100);
    const auto passing = std::count_if(p.begin(), p.end(), [](double v) { return v > 0.01; });
    EXPECT_GE(passing, 95);
}

TEST(SlowKsCalibration, NullPValuesAreUniform) {
    const auto p = null_pvalues(200);
    // Binomial(200, q) counts, 4 standard deviations of slack.
    for (double q : {0.1, 0.5, 0.9}) {
        const auto below = static_cast<double>(std::count_if(p.begin(), p.end(), [q](double v) { return v <= q; }));
        EXPECT_NEAR(below / 200.0, q, 4.0 * std::sqrt(q * (1.0 - q) / 200.0)) << q;
    }
    EXPECT_GE(std::count_if(p.begin(), p.end(), [](double v) { return v > 0.01; }), 190);
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
    parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(ParallelFor, RethrowsSmallestFailingIndex) {
    for (int threads : {1, 3}) {
        try {
            parallel_for(100, threads, [](std::size_t i) {
                if (i == 17 || i == 60) throw std::runtime_error(std::to_string(i));
            });
            FAIL();
        } catch (const std::runtime_error& e) {
            EXPECT_STREQ(e.what(), "17");
        }
    }
}

TEST(ParallelFor, ResolveThreads) {
    EXPECT_EQ(resolve_threads(3), 3);
    EXPECT_GE(resolve_threads(0), 1);
}

}  // namespace
}  // namespace nvlab
