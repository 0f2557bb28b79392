#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "nvlab/flows.hpp"
#include "nvlab/model.hpp"
#include "nvlab/random.hpp"

namespace nvlab {

enum class Scheme {
    kNinomiyaVictoir,
    kDiscreteNV,
    kEuler,
    kExact,
};

/// Accepts "nv", "discrete-nv", "euler", "exact".
Scheme parse_scheme(std::string_view name);
std::string_view scheme_name(Scheme scheme);

struct StepInputs {
    double h = 0.0;
    std::span<const double> dW;
    int eta = 1;
};

struct Trajectory {
    GridSpec grid;
    std::vector<State> states;  // states[k] at t_k, k = 0..N
    /// True when the states come from a refined numerical scheme rather than a closed form.
    bool reference_proxy = false;
};

/// One Ninomiya-Victoir step. The operator product
///   exp(h/2 s0) exp(dW^d s^d) ... exp(dW^1 s^1) exp(h/2 s0)
/// acts right to left, so for eta = +1 the drift half-step runs first, then
/// sigma^1, ..., sigma^d, then the second drift half-step; eta = -1 visits the
/// Brownian fields in reverse order. On the Heisenberg problem from x = 0,
/// eta = +1 yields (dW1, dW1 dW2) and eta = -1 yields (dW1, 0).
State nv_step(const Problem& problem, const State& x, const StepInputs& in, const FlowSettings& flows = {});

/// Adapted surrogate of the NV step: Milstein terms plus cross terms
/// d sigma^j sigma^m dW^m dW^j over ordered pairs with eta*m < eta*j.
State discrete_nv_step(const Problem& problem, const State& x, const StepInputs& in);

State euler_step(const Problem& problem, const State& x, const StepInputs& in);

/// Iterate the one-step maps over `bundle` coarsened onto `grid`.
Trajectory nv_trajectory(const Problem& problem, const PathBundle& bundle, const GridSpec& grid,
                         const FlowSettings& flows = {});
Trajectory discrete_nv_trajectory(const Problem& problem, const PathBundle& bundle, const GridSpec& grid);
Trajectory euler_trajectory(const Problem& problem, const PathBundle& bundle, const GridSpec& grid);

/// Closed form on the bundle's own resolution when the problem has one;
/// otherwise NV at the bundle's resolution, flagged as a proxy. Throws
/// std::invalid_argument when neither is available (no closed form and the
/// bundle is no finer than the grid).
Trajectory exact_trajectory(const Problem& problem, const PathBundle& bundle, const GridSpec& grid,
                            const FlowSettings& flows = {});

Trajectory simulate(const Problem& problem, Scheme scheme, const PathBundle& bundle, const GridSpec& grid,
                    const FlowSettings& flows = {});

}  // namespace nvlab
