#include "nvlab/schemes.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace nvlab {

Scheme parse_scheme(std::string_view name) {
    if (name == "nv") return Scheme::kNinomiyaVictoir;
    if (name == "discrete-nv") return Scheme::kDiscreteNV;
    if (name == "euler") return Scheme::kEuler;
    if (name == "exact") return Scheme::kExact;
    throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
}

std::string_view scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::kNinomiyaVictoir:
            return "nv";
        case Scheme::kDiscreteNV:
            return "discrete-nv";
        case Scheme::kEuler:
            return "euler";
        case Scheme::kExact:
            return "exact";
    }
    return "unknown";
}

namespace {

void check_inputs(const Problem& problem, const State& x, const StepInputs& in) {
    if (in.dW.size() != static_cast<std::size_t>(problem.d())) {
        throw std::invalid_argument("step needs " + std::to_string(problem.d()) + " Brownian increments, got " +
                                    std::to_string(in.dW.size()));
    }
    if (x.size() != problem.n()) {
        throw std::invalid_argument("state has dimension " + std::to_string(x.size()) + ", expected " +
                                    std::to_string(problem.n()));
    }
}

void check_grid(const PathBundle& bundle, const GridSpec& grid) {
    if (grid.N < 1 || bundle.n_steps % grid.N != 0) {
        throw std::invalid_argument("grid with " + std::to_string(grid.N) + " steps does not divide bundle with " +
                                    std::to_string(bundle.n_steps) + " steps");
    }
    if (grid.T != bundle.T) {
        throw std::invalid_argument("grid and bundle horizons differ");
    }
}

template <class StepFn>
Trajectory iterate(const Problem& problem, const PathBundle& bundle, const GridSpec& grid, StepFn&& step) {
    check_grid(bundle, grid);
    const PathBundle coarse = coarsen(bundle, grid.N);
    Trajectory traj;
    traj.grid = grid;
    traj.states.reserve(static_cast<std::size_t>(grid.N) + 1);
    traj.states.push_back(problem.x0);
    const double h = grid.h();
    for (int k = 0; k < grid.N; ++k) {
        const StepInputs in{h, coarse.step(k), coarse.eta[static_cast<std::size_t>(k)]};
        traj.states.push_back(step(traj.states.back(), in));
    }
    return traj;
}

}  // namespace

State nv_step(const Problem& problem, const State& x, const StepInputs& in, const FlowSettings& flows) {
    check_inputs(problem, x, in);
    const int d = problem.d();
    State y = flow(problem, 0, 0.5 * in.h, x, flows);
    if (in.eta >= 0) {
        for (int j = 1; j <= d; ++j) y = flow(problem, j, in.dW[static_cast<std::size_t>(j - 1)], y, flows);
    } else {
        for (int j = d; j >= 1; --j) y = flow(problem, j, in.dW[static_cast<std::size_t>(j - 1)], y, flows);
    }
    return flow(problem, 0, 0.5 * in.h, y, flows);
}

State discrete_nv_step(const Problem& problem, const State& x, const StepInputs& in) {
    check_inputs(problem, x, in);
    const auto& f = problem.fields;
    const int d = problem.d();

    std::array<State, kMaxDim> sigma;
    for (int j = 0; j < d; ++j) sigma[static_cast<std::size_t>(j)] = f.sigma[static_cast<std::size_t>(j)](x);

    State y = x + f.drift(x) * in.h;
    for (int j = 0; j < d; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        const double dwj = in.dW[ju];
        const Matrix jac = f.sigma_jacobian[ju](x);
        y += sigma[ju] * dwj;
        y += 0.5 * (jac * sigma[ju]) * (dwj * dwj - in.h);
        // Ordered pairs with eta*m < eta*j; the diagonal is covered above.
        for (int m = 0; m < d; ++m) {
            if (in.eta * m >= in.eta * j) continue;
            const auto mu = static_cast<std::size_t>(m);
            y += (jac * sigma[mu]) * (in.dW[mu] * dwj);
        }
    }
    return y;
}

State euler_step(const Problem& problem, const State& x, const StepInputs& in) {
    check_inputs(problem, x, in);
    State y = x + problem.fields.drift(x) * in.h;
    for (int j = 0; j < problem.d(); ++j) {
        y += problem.fields.sigma[static_cast<std::size_t>(j)](x) * in.dW[static_cast<std::size_t>(j)];
    }
    return y;
}

Trajectory nv_trajectory(const Problem& problem, const PathBundle& bundle, const GridSpec& grid,
                         const FlowSettings& flows) {
    return iterate(problem, bundle, grid,
                   [&](const State& x, const StepInputs& in) { return nv_step(problem, x, in, flows); });
}

Trajectory discrete_nv_trajectory(const Problem& problem, const PathBundle& bundle, const GridSpec& grid) {
    return iterate(problem, bundle, grid,
                   [&](const State& x, const StepInputs& in) { return discrete_nv_step(problem, x, in); });
}

Trajectory euler_trajectory(const Problem& problem, const PathBundle& bundle, const GridSpec& grid) {
    return iterate(problem, bundle, grid,
                   [&](const State& x, const StepInputs& in) { return euler_step(problem, x, in); });
}

Trajectory exact_trajectory(const Problem& problem, const PathBundle& bundle, const GridSpec& grid,
                            const FlowSettings& flows) {
    check_grid(bundle, grid);
    const int stride = bundle.n_steps / grid.N;
    Trajectory traj;
    traj.grid = grid;
    traj.states.assign(static_cast<std::size_t>(grid.N) + 1, problem.x0);

    if (problem.has_exact_solution()) {
        problem.exact_solution(problem.x0, bundle.view(), stride, traj.states);
        return traj;
    }
    if (stride == 1) {
        throw std::invalid_argument("problem '" + problem.id +
                                    "' has no closed-form solution and the bundle is not finer than the grid");
    }
    // Reference proxy: NV on the fine grid, sampled at the coarse grid points.
    traj.reference_proxy = true;
    const double h = bundle.h();
    State x = problem.x0;
    for (int k = 0; k < bundle.n_steps; ++k) {
        x = nv_step(problem, x, StepInputs{h, bundle.step(k), bundle.eta[static_cast<std::size_t>(k)]}, flows);
        if ((k + 1) % stride == 0) traj.states[static_cast<std::size_t>((k + 1) / stride)] = x;
    }
    return traj;
}

Trajectory simulate(const Problem& problem, Scheme scheme, const PathBundle& bundle, const GridSpec& grid,
                    const FlowSettings& flows) {
    switch (scheme) {
        case Scheme::kNinomiyaVictoir:
            return nv_trajectory(problem, bundle, grid, flows);
        case Scheme::kDiscreteNV:
            return discrete_nv_trajectory(problem, bundle, grid);
        case Scheme::kEuler:
            return euler_trajectory(problem, bundle, grid);
        case Scheme::kExact:
            return exact_trajectory(problem, bundle, grid, flows);
    }
    throw std::invalid_argument("unhandled scheme");
}

}  // namespace nvlab
