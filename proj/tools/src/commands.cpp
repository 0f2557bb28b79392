#include "nvlab_cli/commands.hpp"

#include <cmath>
#include <iomanip>
#include <stdexcept>

#include "nvlab/analysis.hpp"
#include "nvlab/mlmc.hpp"
#include "nvlab/random.hpp"
#include "nvlab/schemes.hpp"
#include "nvlab_cli/output.hpp"

namespace nvlab::cli {

namespace {

using nlohmann::ordered_json;

// Keeps the limit-equation draws independent of the scheme's Brownian paths.
constexpr std::uint64_t kLimitSeedMix = 0x9e3779b97f4a7c15ULL;

const Problem& lookup_problem(const std::string& id) {
    try {
        return find_problem(id);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

void require(bool condition, const std::string& message) {
    if (!condition) throw UsageError(message);
}

StudyOptions study_options(const RunConfig& c) {
    StudyOptions o;
    o.p = c.p;
    o.refine_factor = c.refine;
    o.batches = c.batches;
    o.threads = c.threads;
    o.flows = c.flows;
    return o;
}

void check_flows(const RunConfig& c) {
    require(c.flows.delta_max > 0.0 && std::isfinite(c.flows.delta_max), "flows.delta_max must be positive");
    require(c.flows.substeps_min >= 1, "flows.substeps_min must be >= 1");
}

std::string d2s(double v) { return format_double(v); }

ordered_json state_json(const State& x) {
    ordered_json a = ordered_json::array();
    for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(x(i));
    return a;
}

ordered_json matrix_json(const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

void cmd_problems(const RunConfig& config, std::ostream& log) {
    RunConfig c = config;
    c.format = OutputFormat::kBoth;
    const OutputSink sink(c);
    sink.preflight({"problems"});
    Table table{{"id", "n", "d", "T", "x0", "commutative", "exact_solution"}, {}};
    ordered_json list = ordered_json::array();
    for (const auto& p : catalog()) {
        std::string x0;
        for (Eigen::Index i = 0; i < p.x0.size(); ++i) x0 += (i ? " " : "") + d2s(p.x0(i));
        table.rows.push_back({p.id, std::to_string(p.n()), std::to_string(p.d()), d2s(p.T), x0,
                              p.commutative ? "true" : "false", p.has_exact_solution() ? "true" : "false"});
        list.push_back({{"id", p.id},
                        {"n", p.n()},
                        {"d", p.d()},
                        {"T", p.T},
                        {"x0", state_json(p.x0)},
                        {"commutative_flag", p.commutative},
                        {"exact_solution", p.has_exact_solution()},
                        {"description", p.description}});
        log << std::left << std::setw(12) << p.id << " n=" << p.n() << " d=" << p.d()
            << (p.commutative ? "  commutative" : "  non-commutative") << '\n';
    }
    sink.write("problems", table, {{"problems", list}});
}

void cmd_flow_check(const RunConfig& c, std::ostream& log) {
    const Problem& problem = lookup_problem(c.problem);
    check_flows(c);
    require(c.trials >= 1, "trials must be >= 1");
    const OutputSink sink(c);
    sink.preflight({"flow_check"});
    const auto rows = flow_selfcheck_table(problem, c.trials, c.seed, c.flows);
    Table table{{"problem", "field", "trials", "max_deviation"}, {}};
    ordered_json list = ordered_json::array();
    double worst = 0.0;
    for (const auto& r : rows) {
        table.rows.push_back({problem.id, std::to_string(r.field_index), std::to_string(r.trials), d2s(r.max_deviation)});
        list.push_back({{"field", r.field_index}, {"trials", r.trials}, {"max_deviation", r.max_deviation}});
        worst = std::max(worst, r.max_deviation);
        log << "field " << r.field_index << "  max deviation " << r.max_deviation << '\n';
    }
    if (rows.empty()) log << problem.id << " registers no closed-form flows\n";
    log << "overall max deviation " << worst << '\n';
    sink.write("flow_check", table, {{"problem", problem.id}, {"max_deviation", worst}, {"fields", list}});
}

void cmd_convergence(const RunConfig& c, std::ostream& log) {
    const Problem& problem = lookup_problem(c.problem);
    Scheme scheme{};
    try {
        scheme = parse_scheme(c.scheme);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    check_flows(c);
    require(c.paths >= 100, "convergence needs --paths >= 100");
    require(c.nladder.size() >= 3, "convergence needs at least three ladder entries");
    for (int n : c.nladder) require(n >= 1, "ladder entries must be positive");
    require(c.p >= 1, "p must be >= 1");
    require(c.refine >= 1, "refine must be >= 1");
    require(c.batches >= 2 && c.batches <= c.paths, "batches must lie in [2, paths]");
    require(problem.has_exact_solution() || c.refine > 1, problem.id + " has no closed form; use --refine > 1");

    const OutputSink sink(c);
    sink.preflight({"rate"});
    const StudyOptions options = study_options(c);
    std::vector<ErrorPoint> points;
    for (int n : c.nladder) {
        points.push_back(strong_error(problem, scheme, n, c.paths, c.seed, options));
        log << "N=" << n << "  err=" << points.back().err << "  stderr=" << points.back().std_error << '\n';
    }
    RateFit fit;
    try {
        fit = fit_rate(points);
    } catch (const std::invalid_argument& e) {
        throw NumericalError(std::string("rate fit failed: ") + e.what());
    }
    log << "slope=" << fit.slope << "  r_squared=" << fit.r_squared << '\n';

    Table table{{"problem", "scheme", "N", "h", "err", "stderr", "p"}, {}};
    ordered_json pts = ordered_json::array();
    for (const auto& pt : points) {
        table.rows.push_back({problem.id, std::string(scheme_name(scheme)), std::to_string(pt.N), d2s(pt.h), d2s(pt.err),
                              d2s(pt.std_error), std::to_string(pt.p)});
        pts.push_back({{"N", pt.N}, {"h", pt.h}, {"err", pt.err}, {"stderr", pt.std_error}, {"p", pt.p}});
    }
    sink.write("rate", table,
               {{"problem", problem.id},
                {"scheme", std::string(scheme_name(scheme))},
                {"reference_proxy", points.front().reference_proxy},
                {"slope", fit.slope},
                {"intercept", fit.intercept},
                {"r_squared", fit.r_squared},
                {"excluded_N", fit.excluded},
                {"points", pts}});
}

void cmd_limit_law(const RunConfig& c, std::ostream& log) {
    const Problem& problem = lookup_problem(c.problem);
    check_flows(c);
    require(c.source_N.size() == 1, "limit-law takes a single --N");
    require(c.N >= 1 && c.nfine >= 1, "N and nfine must be positive");
    require(c.paths >= 2, "limit-law needs --paths >= 2");
    require(problem.has_exact_solution() || c.refine > 1, problem.id + " has no closed form; use --refine > 1");

    const OutputSink sink(c);
    sink.preflight({"limit_law"});
    const StudyOptions options = study_options(c);
    const auto scheme = normalized_error_samples(problem, c.N, c.paths, c.seed, options);
    const auto limit = simulate_limit_sde(problem, c.paths, c.nfine, c.seed ^ kLimitSeedMix, options);
    const LimitLawReport r = compare_distributions(scheme, limit);

    Table table{{"problem", "N", "coord", "mean_scheme", "mean_limit", "var_scheme", "var_limit", "ks_stat", "ks_pvalue"},
                {}};
    for (Eigen::Index i = 0; i < r.mean_scheme.size(); ++i) {
        const auto iu = static_cast<std::size_t>(i);
        table.rows.push_back({problem.id, std::to_string(c.N), std::to_string(i + 1), d2s(r.mean_scheme(i)),
                              d2s(r.mean_limit(i)), d2s(r.cov_scheme(i, i)), d2s(r.cov_limit(i, i)),
                              d2s(r.ks_stat[iu]), d2s(r.ks_pvalue[iu])});
        log << "coord " << i + 1 << "  var_scheme=" << r.cov_scheme(i, i) << "  var_limit=" << r.cov_limit(i, i)
            << "  ks_p=" << r.ks_pvalue[iu] << '\n';
    }
    sink.write("limit_law", table,
               {{"problem", problem.id},
                {"N", c.N},
                {"samples_scheme", r.samples_scheme},
                {"samples_limit", r.samples_limit},
                {"mean_scheme", state_json(r.mean_scheme)},
                {"mean_limit", state_json(r.mean_limit)},
                {"cov_scheme", matrix_json(r.cov_scheme)},
                {"cov_limit", matrix_json(r.cov_limit)},
                {"ks_stat", r.ks_stat},
                {"ks_pvalue", r.ks_pvalue}});
}

void cmd_source_term(const RunConfig& c, std::ostream& log) {
    require(c.m >= 1 && c.m < c.j && c.j <= kMaxDim, "source-term needs 1 <= m < j <= 16");
    require(c.T > 0.0 && c.t >= 0.0 && c.t <= c.T, "source-term needs 0 <= t <= T");
    require(c.paths >= 2 && c.substeps >= 1, "source-term needs paths >= 2 and substeps >= 1");
    for (int n : c.source_N) require(n >= 1, "N must be positive");

    const OutputSink sink(c);
    sink.preflight({"source_term"});
    SourceTermOptions options;
    options.T = c.T;
    options.substeps = c.substeps;
    options.threads = c.threads;
    Table table{{"N", "j", "m", "t", "var_est", "stderr", "theory"}, {}};
    ordered_json rows = ordered_json::array();
    for (int n : c.source_N) {
        const SourceTermEstimate e = source_term_variance(n, c.j, c.m, c.t, c.paths, c.seed, options);
        table.rows.push_back({std::to_string(e.N), std::to_string(e.j), std::to_string(e.m), d2s(e.t), d2s(e.var_est),
                              d2s(e.std_error), d2s(e.theory)});
        rows.push_back({{"N", e.N}, {"j", e.j}, {"m", e.m}, {"t", e.t}, {"var_est", e.var_est},
                        {"stderr", e.std_error}, {"theory", e.theory}});
        log << "N=" << e.N << "  var_est=" << e.var_est << "  stderr=" << e.std_error << "  theory=" << e.theory
            << '\n';
    }
    sink.write("source_term", table, {{"estimates", rows}});
}

void cmd_mlmc(const RunConfig& c, std::ostream& log) {
    const Problem& problem = lookup_problem(c.problem);
    Payoff payoff;
    try {
        payoff = parse_payoff(c.payoff);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    check_flows(c);
    require(c.levels >= 1 && c.levels <= 24, "levels must lie in [1, 24]");
    require(c.paths_per_level >= 2, "paths-per-level must be >= 2");
    require(c.base_steps >= 1, "base-steps must be >= 1");

    const OutputSink sink(c);
    sink.preflight({"mlmc"});
    MlmcOptions options;
    options.base_steps = c.base_steps;
    options.beta_min_level = c.beta_min_level;
    options.threads = c.threads;
    options.flows = c.flows;
    const MlmcReport r = mlmc_estimate(problem, payoff, c.levels, c.paths_per_level, c.seed, options);

    Table table{{"level", "N", "mean_diff", "var_diff", "cost"}, {}};
    ordered_json levels = ordered_json::array();
    for (const auto& s : r.levels) {
        table.rows.push_back(
            {std::to_string(s.level), std::to_string(s.N), d2s(s.mean_diff), d2s(s.var_diff), d2s(s.cost)});
        levels.push_back({{"level", s.level}, {"N", s.N}, {"paths", s.paths}, {"mean_diff", s.mean_diff},
                          {"var_diff", s.var_diff}, {"cost", s.cost}});
        log << "level " << s.level << "  N=" << s.N << "  mean=" << s.mean_diff << "  var=" << s.var_diff << '\n';
    }
    log << "estimate=" << r.estimate << "  stderr=" << r.std_error << "  beta=" << r.beta_fit << '\n';
    ordered_json beta = std::isnan(r.beta_fit) ? ordered_json(nullptr) : ordered_json(r.beta_fit);
    sink.write("mlmc", table,
               {{"problem", problem.id},
                {"payoff", payoff.name},
                {"estimate", r.estimate},
                {"stderr", r.std_error},
                {"total_cost", r.total_cost},
                {"beta_fit", beta},
                {"beta_levels", {r.beta_first_level, r.beta_last_level}},
                {"levels", levels}});
}

void run_command(const RunConfig& config, std::ostream& log) {
    const std::string& cmd = config.command;
    if (cmd == "problems") return cmd_problems(config, log);
    if (cmd == "flow-check") return cmd_flow_check(config, log);
    if (cmd == "convergence") return cmd_convergence(config, log);
    if (cmd == "limit-law") return cmd_limit_law(config, log);
    if (cmd == "source-term") return cmd_source_term(config, log);
    if (cmd == "mlmc") return cmd_mlmc(config, log);
    throw UsageError("unknown command '" + cmd + "'");
}

}  // namespace nvlab::cli
