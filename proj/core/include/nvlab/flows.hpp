#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nvlab/model.hpp"

namespace nvlab {

/// Runge-Kutta fallback settings: M = max(substeps_min, ceil(|t| / delta_max)).
struct FlowSettings {
    double delta_max = 0.05;
    int substeps_min = 4;
};

/// Flow of field `field_index` (0 = Stratonovich drift, j = sigma^j) for time
/// t starting at x0. Negative t integrates backwards.
struct FlowRequest {
    int field_index = 0;
    double t = 0.0;
    State x0;
};

/// Raised when a flow leaves the finite doubles.
class ExplosionError : public std::runtime_error {
public:
    explicit ExplosionError(FlowRequest request);
    [[nodiscard]] const FlowRequest& request() const { return request_; }

private:
    FlowRequest request_;
};

/// exp(tV) x0. Uses the registered closed form when present, classical RK4
/// otherwise. t == 0 returns x0 unchanged.
State flow(const Problem& problem, const FlowRequest& req, const FlowSettings& settings = {});
State flow(const Problem& problem, int field_index, double t, const State& x0, const FlowSettings& settings = {});

/// Always integrates with RK4, ignoring registered closed forms.
State rk4_flow(const Problem& problem, int field_index, double t, const State& x0, const FlowSettings& settings = {});

struct FlowCheckRow {
    int field_index = 0;
    int trials = 0;
    double max_deviation = 0.0;
};

/// Compares the RK4 fallback with every registered closed-form flow at random
/// (t, x0), t uniform in [-0.5, 0.5] and x0 a Gaussian perturbation of the
/// problem's starting point. One row per field with a closed form.
std::vector<FlowCheckRow> flow_selfcheck_table(const Problem& problem, int trials, std::uint64_t seed = 7,
                                               const FlowSettings& settings = {});

/// Largest deviation over all rows of flow_selfcheck_table.
double flow_selfcheck(const Problem& problem, int trials, std::uint64_t seed = 7, const FlowSettings& settings = {});

}  // namespace nvlab
