#include <gtest/gtest.h>

#include <cmath>

#include "nvlab/flows.hpp"
#include "nvlab/random.hpp"

namespace nvlab {
namespace {

State vec(std::initializer_list<double> values) {
    State x(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) x(i++) = v;
    return x;
}

TEST(Flow, ConstantField) {
    const auto& p = find_problem("heisenberg");
    const State y = flow(p, FlowRequest{1, 0.7, vec({0.0, 0.0})});
    EXPECT_DOUBLE_EQ(y(0), 0.7);
    EXPECT_DOUBLE_EQ(y(1), 0.0);
}

TEST(Flow, NilpotentLinearField) {
    const auto& p = find_problem("heisenberg");
    const State y = flow(p, 2, -0.3, vec({1.5, 2.0}));
    EXPECT_DOUBLE_EQ(y(0), 1.5);
    EXPECT_DOUBLE_EQ(y(1), 2.0 - 0.3 * 1.5);
    // Same through the Runge-Kutta fallback.
    const State z = rk4_flow(p, 2, -0.3, vec({1.5, 2.0}));
    EXPECT_NEAR((y - z).norm(), 0.0, 1e-15);
}

TEST(Flow, GbmDriftIsScalarExponential) {
    const auto& p = find_problem("gbm1d");
    const double h = 0.01;
    EXPECT_DOUBLE_EQ(flow(p, 0, h / 2, vec({1.0}))(0), std::exp((0.1 - 0.125) * h / 2));
}

TEST(Flow, TimeZeroIsIdentity) {
    for (const auto& p : catalog()) {
        for (int field = 0; field <= p.d(); ++field) {
            EXPECT_EQ(flow(p, field, 0.0, p.x0), p.x0);
            EXPECT_EQ(rk4_flow(p, field, 0.0, p.x0), p.x0);
        }
    }
}

TEST(Flow, RejectsBadIndexAndDimension) {
    const auto& p = find_problem("heisenberg");
    EXPECT_THROW(flow(p, 3, 0.1, p.x0), std::invalid_argument);
    EXPECT_THROW(flow(p, -1, 0.1, p.x0), std::invalid_argument);
    EXPECT_THROW(flow(p, 1, 0.1, vec({1.0})), std::invalid_argument);
}

TEST(Flow, ExplosionCarriesTheRequest) {
    Problem p = find_problem("gbm1d");
    p.fields.sigma[0] = [](const State& x) -> State { return 1e200 * x; };
    p.fields.exact_flow.clear();
    try {
        (void)flow(p, 1, 0.5, vec({1.0}));
        FAIL() << "expected ExplosionError";
    } catch (const ExplosionError& e) {
        EXPECT_EQ(e.request().field_index, 1);
        EXPECT_EQ(e.request().t, 0.5);
        EXPECT_EQ(e.request().x0, vec({1.0}));
    }
}

TEST(Flow, SubstepRuleFollowsSettings) {
    // x' = x (gbm noise field with s = 0.5 scaled): RK4 error shrinks with more substeps.
    const auto& p = find_problem("gbm1d");
    const double exact = std::exp(0.5 * 2.0);
    const double coarse = rk4_flow(p, 1, 2.0, vec({1.0}), FlowSettings{1.0, 1})(0);
    const double fine = rk4_flow(p, 1, 2.0, vec({1.0}), FlowSettings{0.05, 4})(0);
    EXPECT_GT(std::abs(coarse - exact), 1e3 * std::abs(fine - exact));
}

TEST(FlowSelfcheck, HeisenbergIsExactUpToRounding) {
    EXPECT_LE(flow_selfcheck(find_problem("heisenberg"), 200), 1e-13);
}

TEST(FlowSelfcheck, GbmDriftWithinDefaults) {
    const auto rows = flow_selfcheck_table(find_problem("gbm1d"), 200);
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(rows[0].field_index, 0);
    EXPECT_LE(rows[0].max_deviation, 1e-10);
}

TEST(FlowSelfcheck, CatalogClosedFormsAgreeWithRungeKutta) {
    for (const auto& p : catalog()) {
        const auto rows = flow_selfcheck_table(p, 100);
        EXPECT_EQ(rows.size(), static_cast<std::size_t>(p.d() + 1)) << p.id;
        // Far below the smallest Monte Carlo error the studies resolve.
        for (const auto& row : rows) EXPECT_LE(row.max_deviation, 1e-7) << p.id << " field " << row.field_index;
    }
}

class ExactFlowGroup : public ::testing::TestWithParam<std::string> {};

TEST_P(ExactFlowGroup, SemigroupAndReversibility) {
    const auto& p = find_problem(GetParam());
    PathRng rng(99, 0, Stream::kAuxiliary);
    for (int trial = 0; trial < 50; ++trial) {
        State x = p.x0;
        for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += 0.5 * rng.normal();
        const double t1 = rng.uniform() - 0.5;
        const double t2 = rng.uniform() - 0.5;
        for (int field = 0; field <= p.d(); ++field) {
            const State joint = flow(p, field, t1 + t2, x);
            const State split = flow(p, field, t2, flow(p, field, t1, x));
            EXPECT_LE((joint - split).norm(), 1e-12) << p.id << " field " << field;
            EXPECT_LE((flow(p, field, -t1, flow(p, field, t1, x)) - x).norm(), 1e-12) << p.id << " field " << field;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Catalog, ExactFlowGroup,
                         ::testing::Values("gbm1d", "heisenberg", "diag-comm", "linear-nc"));

}  // namespace
}  // namespace nvlab
