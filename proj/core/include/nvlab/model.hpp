#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace nvlab {

/// Upper bound on state and Brownian dimension. States live on the stack.
inline constexpr int kMaxDim = 16;

using State = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

using Field = std::function<State(const State&)>;
using JacobianField = std::function<Matrix(const State&)>;

/// Closed-form flow map (t, x0) -> exp(tV) x0 of a vector field V.
using ExactFlow = std::function<State(double, const State&)>;

/// Coefficients of dX = b(X) dt + sum_j sigma^j(X) dW^j together with their
/// Jacobians. Jacobian entry (i, k) is the derivative of component i with
/// respect to x_k.
///
/// exact_flow has d + 1 slots: slot 0 is the Stratonovich drift, slot j the
/// j-th Brownian field. Empty slots fall back to Runge-Kutta integration.
struct VectorFieldSet {
    int n = 0;
    int d = 0;
    Field drift;
    JacobianField drift_jacobian;
    std::vector<Field> sigma;
    std::vector<JacobianField> sigma_jacobian;
    std::vector<ExactFlow> exact_flow;

    /// Throws std::invalid_argument when sizes are inconsistent or out of range.
    void validate() const;
    [[nodiscard]] bool has_exact_flow(int field_index) const;
};

/// Read-only view of Brownian increments on a uniform grid, row-major
/// (steps x d).
struct BrownianIncrements {
    double dt = 0.0;
    int steps = 0;
    int d = 0;
    std::span<const double> values;

    [[nodiscard]] std::span<const double> step(int k) const {
        return values.subspan(static_cast<std::size_t>(k) * static_cast<std::size_t>(d),
                              static_cast<std::size_t>(d));
    }
};

/// Closed-form solution evaluated along a discretely observed Brownian path.
/// Writes the state at every `stride`-th grid point of `path`
/// (steps / stride + 1 entries, the first being x0). Stochastic integrals are
/// taken as Ito sums on the path's grid.
using ExactSolution =
    std::function<void(const State& x0, const BrownianIncrements& path, int stride, std::span<State> out)>;

struct Problem {
    std::string id;
    std::string description;
    VectorFieldSet fields;
    State x0;
    double T = 1.0;
    bool commutative = false;
    ExactSolution exact_solution;

    [[nodiscard]] int n() const { return fields.n; }
    [[nodiscard]] int d() const { return fields.d; }
    [[nodiscard]] bool has_exact_solution() const { return static_cast<bool>(exact_solution); }
};

/// sigma^0 = b - 1/2 sum_j (d sigma^j) sigma^j.
State stratonovich_drift(const VectorFieldSet& fields, const State& x);

/// [sigma^j, sigma^m](x) = d sigma^m(x) sigma^j(x) - d sigma^j(x) sigma^m(x)
/// with 1-based indices and 1 <= m < j <= d.
State lie_bracket(const VectorFieldSet& fields, int j, int m, const State& x);

/// All brackets [sigma^j, sigma^m] with m < j, in lexicographic (j, m) order.
/// The order matches the components of the auxiliary Brownian motion used by
/// the limit equation.
class BracketTable {
public:
    explicit BracketTable(const VectorFieldSet& fields);

    [[nodiscard]] std::size_t size() const { return pairs_.size(); }
    [[nodiscard]] std::span<const std::pair<int, int>> pairs() const { return pairs_; }
    [[nodiscard]] State operator()(std::size_t entry, const State& x) const;
    [[nodiscard]] State at(int j, int m, const State& x) const;

private:
    VectorFieldSet fields_;
    std::vector<std::pair<int, int>> pairs_;
};

/// The built-in test problems: gbm1d, heisenberg, diag-comm, linear-nc.
const std::vector<Problem>& catalog();

/// Throws std::invalid_argument for unknown ids.
const Problem& find_problem(std::string_view id);

}  // namespace nvlab
