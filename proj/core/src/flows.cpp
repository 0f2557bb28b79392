#include "nvlab/flows.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nvlab/random.hpp"

namespace nvlab {

namespace {

std::string describe(const FlowRequest& req) {
    return "flow of field " + std::to_string(req.field_index) + " over t=" + std::to_string(req.t) +
           " produced a non-finite state";
}

void check_index(const Problem& problem, int field_index) {
    if (field_index < 0 || field_index > problem.d()) {
        throw std::invalid_argument("field index " + std::to_string(field_index) + " out of range [0, " +
                                    std::to_string(problem.d()) + "]");
    }
}

State eval_field(const Problem& problem, int field_index, const State& x) {
    if (field_index == 0) return stratonovich_drift(problem.fields, x);
    return problem.fields.sigma[static_cast<std::size_t>(field_index - 1)](x);
}

State checked(int field_index, double t, const State& x0, State result) {
    if (!result.allFinite()) {
        throw ExplosionError(FlowRequest{field_index, t, x0});
    }
    return result;
}

}  // namespace

ExplosionError::ExplosionError(FlowRequest request)
    : std::runtime_error(describe(request)), request_(std::move(request)) {}

State rk4_flow(const Problem& problem, int field_index, double t, const State& x0, const FlowSettings& settings) {
    check_index(problem, field_index);
    if (t == 0.0) return x0;
    const int substeps =
        std::max(settings.substeps_min, static_cast<int>(std::ceil(std::abs(t) / settings.delta_max)));
    const double dt = t / substeps;
    State x = x0;
    for (int i = 0; i < substeps; ++i) {
        const State k1 = eval_field(problem, field_index, x);
        const State k2 = eval_field(problem, field_index, x + 0.5 * dt * k1);
        const State k3 = eval_field(problem, field_index, x + 0.5 * dt * k2);
        const State k4 = eval_field(problem, field_index, x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return checked(field_index, t, x0, std::move(x));
}

State flow(const Problem& problem, int field_index, double t, const State& x0, const FlowSettings& settings) {
    check_index(problem, field_index);
    if (x0.size() != problem.n()) {
        throw std::invalid_argument("flow start has dimension " + std::to_string(x0.size()) + ", expected " +
                                    std::to_string(problem.n()));
    }
    if (t == 0.0) return x0;
    if (problem.fields.has_exact_flow(field_index)) {
        return checked(field_index, t, x0, problem.fields.exact_flow[static_cast<std::size_t>(field_index)](t, x0));
    }
    return rk4_flow(problem, field_index, t, x0, settings);
}

State flow(const Problem& problem, const FlowRequest& req, const FlowSettings& settings) {
    return flow(problem, req.field_index, req.t, req.x0, settings);
}

std::vector<FlowCheckRow> flow_selfcheck_table(const Problem& problem, int trials, std::uint64_t seed,
                                               const FlowSettings& settings) {
    std::vector<FlowCheckRow> rows;
    for (int field = 0; field <= problem.d(); ++field) {
        if (!problem.fields.has_exact_flow(field)) continue;
        PathRng rng(seed, static_cast<std::uint64_t>(field), Stream::kAuxiliary);
        FlowCheckRow row{field, trials, 0.0};
        for (int trial = 0; trial < trials; ++trial) {
            const double t = rng.uniform() - 0.5;
            State x0 = problem.x0;
            for (Eigen::Index i = 0; i < x0.size(); ++i) x0(i) += 0.5 * rng.normal();
            const State exact = problem.fields.exact_flow[static_cast<std::size_t>(field)](t, x0);
            const State approx = rk4_flow(problem, field, t, x0, settings);
            row.max_deviation = std::max(row.max_deviation, (exact - approx).norm());
        }
        rows.push_back(row);
    }
    return rows;
}

double flow_selfcheck(const Problem& problem, int trials, std::uint64_t seed, const FlowSettings& settings) {
    double worst = 0.0;
    for (const auto& row : flow_selfcheck_table(problem, trials, seed, settings)) {
        worst = std::max(worst, row.max_deviation);
    }
    return worst;
}

}  // namespace nvlab
