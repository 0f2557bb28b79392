#include "nvlab/model.hpp"

#include <stdexcept>
#include <string>

namespace nvlab {

void VectorFieldSet::validate() const {
    if (n < 1 || n > kMaxDim) {
        throw std::invalid_argument("state dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    }
    if (d < 1 || d > kMaxDim) {
        throw std::invalid_argument("Brownian dimension must be in [1, " + std::to_string(kMaxDim) + "]");
    }
    if (!drift || !drift_jacobian) {
        throw std::invalid_argument("drift and its Jacobian are required");
    }
    if (sigma.size() != static_cast<std::size_t>(d) || sigma_jacobian.size() != static_cast<std::size_t>(d)) {
        throw std::invalid_argument("expected one Brownian field and Jacobian per Brownian dimension");
    }
    if (!exact_flow.empty() && exact_flow.size() != static_cast<std::size_t>(d + 1)) {
        throw std::invalid_argument("exact_flow must be empty or hold d + 1 slots");
    }
}

bool VectorFieldSet::has_exact_flow(int field_index) const {
    return field_index >= 0 && static_cast<std::size_t>(field_index) < exact_flow.size() &&
           static_cast<bool>(exact_flow[static_cast<std::size_t>(field_index)]);
}

namespace {

void check_state(const VectorFieldSet& fields, const State& x) {
    if (x.size() != fields.n) {
        throw std::invalid_argument("state has dimension " + std::to_string(x.size()) + ", expected " +
                                    std::to_string(fields.n));
    }
}

}  // namespace

State stratonovich_drift(const VectorFieldSet& fields, const State& x) {
    check_state(fields, x);
    State out = fields.drift(x);
    for (int j = 0; j < fields.d; ++j) {
        const auto& sigma = fields.sigma[static_cast<std::size_t>(j)];
        const auto& jac = fields.sigma_jacobian[static_cast<std::size_t>(j)];
        out.noalias() -= 0.5 * (jac(x) * sigma(x));
    }
    return out;
}

State lie_bracket(const VectorFieldSet& fields, int j, int m, const State& x) {
    if (m < 1 || j > fields.d || m >= j) {
        throw std::invalid_argument("lie_bracket needs 1 <= m < j <= d, got j=" + std::to_string(j) +
                                    " m=" + std::to_string(m));
    }
    check_state(fields, x);
    const auto jj = static_cast<std::size_t>(j - 1);
    const auto mm = static_cast<std::size_t>(m - 1);
    State out = fields.sigma_jacobian[mm](x) * fields.sigma[jj](x);
    out.noalias() -= fields.sigma_jacobian[jj](x) * fields.sigma[mm](x);
    return out;
}

BracketTable::BracketTable(const VectorFieldSet& fields) : fields_(fields) {
    for (int j = 2; j <= fields.d; ++j) {
        for (int m = 1; m < j; ++m) {
            pairs_.emplace_back(j, m);
        }
    }
}

State BracketTable::operator()(std::size_t entry, const State& x) const {
    const auto [j, m] = pairs_.at(entry);
    return lie_bracket(fields_, j, m, x);
}

State BracketTable::at(int j, int m, const State& x) const { return lie_bracket(fields_, j, m, x); }

}  // namespace nvlab
