#include <cmath>
#include <stdexcept>
#include <string>

#include "nvlab/model.hpp"

namespace nvlab {

namespace {

using Mat2 = Eigen::Matrix2d;

State make_state(std::initializer_list<double> values) {
    State x(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) x(i++) = v;
    return x;
}

Matrix as_matrix(const Mat2& a) {
    Matrix m(2, 2);
    m = a;
    return m;
}

Matrix zeros(int n) { return Matrix::Zero(n, n); }

// exp(tM) for a real 2x2 matrix. With tau = tr(M)/2 and N = M - tau I we have
// N^2 = (tau^2 - det M) I, so the exponential reduces to scalar functions.
Mat2 expm2(const Mat2& m, double t) {
    const double tau = 0.5 * m.trace();
    const Mat2 nil = m - tau * Mat2::Identity();
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double disc = tau * tau - det;
    double c = 1.0;
    double s = t;  // sinh(delta t) / delta
    if (disc > 0.0) {
        const double delta = std::sqrt(disc);
        const double z = delta * t;
        c = std::cosh(z);
        s = std::abs(z) < 1e-8 ? t * (1.0 + z * z / 6.0) : std::sinh(z) / delta;
    } else if (disc < 0.0) {
        const double omega = std::sqrt(-disc);
        const double z = omega * t;
        c = std::cos(z);
        s = std::abs(z) < 1e-8 ? t * (1.0 - z * z / 6.0) : std::sin(z) / omega;
    }
    return std::exp(tau * t) * (c * Mat2::Identity() + s * nil);
}

ExactFlow linear_flow(const Mat2& m) {
    return [m](double t, const State& x) -> State {
        State out = expm2(m, t) * x.head<2>();
        return out;
    };
}

Problem gbm1d() {
    static constexpr double mu = 0.1;
    static constexpr double s = 0.5;
    static constexpr double strat = mu - 0.5 * s * s;

    Problem p;
    p.id = "gbm1d";
    p.description = "geometric Brownian motion dX = mu X dt + s X dW, mu=0.1, s=0.5";
    p.x0 = make_state({1.0});
    p.T = 1.0;
    p.commutative = true;

    auto& f = p.fields;
    f.n = 1;
    f.d = 1;
    f.drift = [](const State& x) -> State { return mu * x; };
    f.drift_jacobian = [](const State&) -> Matrix { return Matrix::Constant(1, 1, mu); };
    f.sigma = {[](const State& x) -> State { return s * x; }};
    f.sigma_jacobian = {[](const State&) -> Matrix { return Matrix::Constant(1, 1, s); }};
    f.exact_flow = {
        [](double t, const State& x) -> State { return x * std::exp(strat * t); },
        [](double t, const State& x) -> State { return x * std::exp(s * t); },
    };

    p.exact_solution = [](const State& x0, const BrownianIncrements& path, int stride, std::span<State> out) {
        double w = 0.0;
        out[0] = x0;
        for (int k = 0; k < path.steps; ++k) {
            w += path.step(k)[0];
            if ((k + 1) % stride == 0) {
                const double t = path.dt * (k + 1);
                out[static_cast<std::size_t>((k + 1) / stride)] = x0 * std::exp(strat * t + s * w);
            }
        }
    };
    return p;
}

// sigma^1 = (1, 0), sigma^2 = (0, x1): X1 = W^1, X2 = int W^1 dW^2.
Problem heisenberg() {
    Problem p;
    p.id = "heisenberg";
    p.description = "Heisenberg group: sigma1=(1,0), sigma2=(0,x1), b=0";
    p.x0 = make_state({0.0, 0.0});
    p.T = 1.0;
    p.commutative = false;

    auto& f = p.fields;
    f.n = 2;
    f.d = 2;
    f.drift = [](const State&) -> State { return State::Zero(2); };
    f.drift_jacobian = [](const State&) -> Matrix { return zeros(2); };
    f.sigma = {
        [](const State&) -> State { return make_state({1.0, 0.0}); },
        [](const State& x) -> State { return make_state({0.0, x(0)}); },
    };
    f.sigma_jacobian = {
        [](const State&) -> Matrix { return zeros(2); },
        [](const State&) -> Matrix {
            Matrix m = zeros(2);
            m(1, 0) = 1.0;
            return m;
        },
    };
    f.exact_flow = {
        [](double, const State& x) -> State { return x; },
        [](double t, const State& x) -> State { return make_state({x(0) + t, x(1)}); },
        [](double t, const State& x) -> State { return make_state({x(0), x(1) + t * x(0)}); },
    };

    p.exact_solution = [](const State& x0, const BrownianIncrements& path, int stride, std::span<State> out) {
        double x1 = x0(0);
        double x2 = x0(1);
        out[0] = x0;
        for (int k = 0; k < path.steps; ++k) {
            const auto dw = path.step(k);
            x2 += x1 * dw[1];
            x1 += dw[0];
            if ((k + 1) % stride == 0) out[static_cast<std::size_t>((k + 1) / stride)] = make_state({x1, x2});
        }
    };
    return p;
}

// Diagonal linear noise with an affine, coupled drift. The Brownian fields
// commute with each other but not with the drift, so splitting is not exact.
Problem diag_comm() {
    static constexpr double s1 = 0.5;
    static constexpr double s2 = 0.4;
    static constexpr double lambda1 = 1.0;
    static constexpr double lambda2 = 0.5;
    static constexpr double coupling = 0.3;
    static constexpr double a1 = 0.5;
    static constexpr double a2 = 0.2;
    // Stratonovich drift: (a1 - alpha1 x1 + coupling x2, a2 - alpha2 x2).
    static constexpr double alpha1 = lambda1 + 0.5 * s1 * s1;
    static constexpr double alpha2 = lambda2 + 0.5 * s2 * s2;
    static constexpr double theta2 = a2 / alpha2;

    Problem p;
    p.id = "diag-comm";
    p.description = "commuting diagonal noise (0.5 x1, 0.4 x2) with affine coupled drift";
    p.x0 = make_state({1.0, 1.0});
    p.T = 1.0;
    p.commutative = true;

    auto& f = p.fields;
    f.n = 2;
    f.d = 2;
    f.drift = [](const State& x) -> State {
        return make_state({a1 - lambda1 * x(0) + coupling * x(1), a2 - lambda2 * x(1)});
    };
    f.drift_jacobian = [](const State&) -> Matrix {
        Matrix m(2, 2);
        m << -lambda1, coupling, 0.0, -lambda2;
        return m;
    };
    f.sigma = {
        [](const State& x) -> State { return make_state({s1 * x(0), 0.0}); },
        [](const State& x) -> State { return make_state({0.0, s2 * x(1)}); },
    };
    f.sigma_jacobian = {
        [](const State&) -> Matrix {
            Matrix m = zeros(2);
            m(0, 0) = s1;
            return m;
        },
        [](const State&) -> Matrix {
            Matrix m = zeros(2);
            m(1, 1) = s2;
            return m;
        },
    };
    f.exact_flow = {
        [](double t, const State& x) -> State {
            // The splitting scheme always asks for the same half step, so the
            // exponentials of the last t are kept per thread.
            struct Coefficients {
                double t = 0.0;
                double e1 = 1.0;
                double e2 = 1.0;
                double g1 = 0.0;
            };
            thread_local Coefficients c;
            if (t == 0.0) return x;
            if (t != c.t) {
                c.t = t;
                c.e1 = std::exp(-alpha1 * t);
                c.e2 = std::exp(-alpha2 * t);
                // -expm1 keeps (1 - e^{-alpha t}) / alpha accurate for tiny t.
                c.g1 = -std::expm1(-alpha1 * t) / alpha1;
            }
            const double dev2 = x(1) - theta2;
            const double y2 = theta2 + dev2 * c.e2;
            const double y1 =
                c.e1 * x(0) + (a1 + coupling * theta2) * c.g1 + coupling * dev2 * (c.e2 - c.e1) / (alpha1 - alpha2);
            return make_state({y1, y2});
        },
        [](double t, const State& x) -> State { return make_state({x(0) * std::exp(s1 * t), x(1)}); },
        [](double t, const State& x) -> State { return make_state({x(0), x(1) * std::exp(s2 * t)}); },
    };
    return p;
}

// sigma^j(x) = A_j x with [A_1, A_2] != 0 and linear drift.
Problem linear_nc() {
    Mat2 a1;
    a1 << 0.4, 0.0, 0.0, -0.4;
    Mat2 a2;
    a2 << 0.0, 0.3, 0.3, 0.0;
    Mat2 b;
    b << -0.2, 0.1, 0.0, -0.1;
    const Mat2 strat = b - 0.5 * (a1 * a1 + a2 * a2);

    Problem p;
    p.id = "linear-nc";
    p.description = "linear non-commuting noise A1=0.4 diag(1,-1), A2=0.3 [[0,1],[1,0]]";
    p.x0 = make_state({1.0, 0.5});
    p.T = 1.0;
    p.commutative = false;

    auto& f = p.fields;
    f.n = 2;
    f.d = 2;
    f.drift = [b](const State& x) -> State { return b * x.head<2>(); };
    f.drift_jacobian = [b](const State&) -> Matrix { return as_matrix(b); };
    f.sigma = {
        [a1](const State& x) -> State { return a1 * x.head<2>(); },
        [a2](const State& x) -> State { return a2 * x.head<2>(); },
    };
    f.sigma_jacobian = {
        [a1](const State&) -> Matrix { return as_matrix(a1); },
        [a2](const State&) -> Matrix { return as_matrix(a2); },
    };
    f.exact_flow = {linear_flow(strat), linear_flow(a1), linear_flow(a2)};
    return p;
}

std::vector<Problem> build_catalog() {
    std::vector<Problem> problems{gbm1d(), heisenberg(), diag_comm(), linear_nc()};
    for (const auto& p : problems) p.fields.validate();
    return problems;
}

}  // namespace

const std::vector<Problem>& catalog() {
    static const std::vector<Problem> problems = build_catalog();
    return problems;
}

const Problem& find_problem(std::string_view id) {
    for (const auto& p : catalog()) {
        if (p.id == id) return p;
    }
    throw std::invalid_argument("unknown problem id '" + std::string(id) + "'");
}

}  // namespace nvlab
