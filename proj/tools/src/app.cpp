#include <string>
#include <string_view>

#include <CLI11.hpp>

#include "nvlab/flows.hpp"
#include "nvlab_cli/commands.hpp"

namespace nvlab::cli {

namespace {

// The config file supplies defaults, so it is located before flag parsing.
std::string find_config_path(int argc, const char* const* argv) {
    std::string path;
    for (int i = 1; i < argc; ++i) {
        const std::string_view arg = argv[i];
        if (arg == "--config" && i + 1 < argc) {
            path = argv[i + 1];
        } else if (arg.rfind("--config=", 0) == 0) {
            path = std::string(arg.substr(9));
        }
    }
    return path;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig config;
    try {
        const std::string config_path = find_config_path(argc, argv);
        if (!config_path.empty()) apply_config(config, read_config_file(config_path));

        CLI::App app{"Ninomiya-Victoir simulation laboratory", "nvlab"};
        app.require_subcommand(1);
        app.fallthrough();
        std::string config_flag;
        std::string out_dir = config.out.string();
        std::string format = format_name(config.format);

        app.add_option("--config", config_flag, "key=value defaults file; flags override it");
        app.add_option("--seed", config.seed, "master seed")->capture_default_str();
        app.add_option("--threads", config.threads, "worker threads, 0 = one per core")->capture_default_str();
        app.add_option("--out", out_dir, "output directory")->capture_default_str();
        app.add_option("--format", format, "csv, json or both")->capture_default_str();
        app.add_flag("--force", config.force, "overwrite outputs of a different configuration");
        app.add_option("--problem", config.problem, "catalog problem id")->capture_default_str();
        app.add_option("--scheme", config.scheme, "nv, discrete-nv, euler or exact")->capture_default_str();
        app.add_option("--paths", config.paths, "Monte Carlo paths")->capture_default_str();
        app.add_option("--nladder", config.nladder, "comma-separated step counts")->delimiter(',');
        app.add_option("--p", config.p, "moment order of the strong error")->capture_default_str();
        app.add_option("--refine", config.refine, "reference refinement factor")->capture_default_str();
        app.add_option("--batches", config.batches, "batches for the standard error")->capture_default_str();
        app.add_option("--delta-max", config.flows.delta_max, "largest RK4 substep")->capture_default_str();
        app.add_option("--substeps-min", config.flows.substeps_min, "fewest RK4 substeps")->capture_default_str();
        auto* n_opt = app.add_option("--N", config.source_N, "step count(s)")->delimiter(',');
        app.add_option("--nfine", config.nfine, "fine steps of the limit equation")->capture_default_str();
        app.add_option("--j", config.j, "first Brownian index")->capture_default_str();
        app.add_option("--m", config.m, "second Brownian index, m < j")->capture_default_str();
        app.add_option("--t", config.t, "evaluation time")->capture_default_str();
        app.add_option("--T", config.T, "source-term horizon")->capture_default_str();
        app.add_option("--substeps", config.substeps, "sub-steps per step")->capture_default_str();
        app.add_option("--payoff", config.payoff, "coordK, identity, norm2 or call(K)")->capture_default_str();
        app.add_option("--levels", config.levels, "finest MLMC level")->capture_default_str();
        app.add_option("--paths-per-level", config.paths_per_level, "paths per MLMC level")->capture_default_str();
        app.add_option("--base-steps", config.base_steps, "steps on MLMC level 0")->capture_default_str();
        app.add_option("--beta-min-level", config.beta_min_level, "first level of the beta fit")->capture_default_str();
        app.add_option("--trials", config.trials, "flow self-check samples")->capture_default_str();

        const std::pair<const char*, const char*> commands[] = {
            {"problems", "list catalog problems"},
            {"flow-check", "compare closed-form flows with the RK4 fallback"},
            {"convergence", "strong error over a step ladder and fitted rate"},
            {"limit-law", "normalized error against the limit equation"},
            {"source-term", "variance of the bracket source term"},
            {"mlmc", "multilevel estimator and level variance decay"},
        };
        for (const auto& [name, help] : commands) {
            app.add_subcommand(name, help)->callback([&config, name = name] { config.command = name; });
        }

        try {
            app.parse(argc, argv);
        } catch (const CLI::CallForHelp&) {
            out << app.help();
            return 0;
        } catch (const CLI::CallForAllHelp&) {
            out << app.help("", CLI::AppFormatMode::All);
            return 0;
        } catch (const CLI::ParseError& e) {
            err << "nvlab: " << e.what() << '\n';
            return 1;
        }
        config.out = out_dir;
        config.format = parse_format(format);
        if (n_opt->count() > 0 || !config.source_N.empty()) config.N = config.source_N.front();
        run_command(config, out);
        return 0;
    } catch (const UsageError& e) {
        err << "nvlab: " << e.what() << '\n';
        return 1;
    } catch (const IoError& e) {
        err << "nvlab: " << e.what() << '\n';
        return 3;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "nvlab: " << e.what() << '\n';
        return 3;
    } catch (const NumericalError& e) {
        err << "nvlab: numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const ExplosionError& e) {
        err << "nvlab: numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "nvlab: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "nvlab: numerical failure: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace nvlab::cli
