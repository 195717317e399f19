// Command-line front end: sigexec {expsig|solve|backtest|reproduce} [options]

#include <iostream>
#include <optional>
#include <string>

#include <omp.h>

#include <CLI11.hpp>

#include "sigexec/error.hpp"
#include "sigexec/experiment.hpp"

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    int threads = 0;
    bool normalize = true;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool config_required) {
    auto* opt = cmd->add_option("--config", f.config, "experiment configuration (JSON)");
    if (config_required) opt->required()->check(CLI::ExistingFile);
    cmd->add_option("--seed", f.seed, "master seed (overrides the config)");
    cmd->add_option("--out", f.out, "output directory")->capture_default_str();
    cmd->add_option("--threads", f.threads, "worker cap, 0 = OpenMP default")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--normalize,!--no-normalize", f.normalize, "divide window prices by their first price")
        ->capture_default_str();
}

sigexec::ExperimentConfig resolve(sigexec::ExperimentConfig cfg, const CommonFlags& f) {
    if (f.seed) cfg.seed = *f.seed;
    if (cfg.data) cfg.data->normalize = f.normalize;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Signature-based optimal execution: expected signatures, solver and backtests"};
    app.require_subcommand(1);

    CommonFlags flags;
    std::string expsig_file;
    std::string strategy_file;
    std::string preset_name;

    auto* expsig = app.add_subcommand("expsig", "estimate the expected signature and per-level norms");
    add_common(expsig, flags, true);

    auto* solve = app.add_subcommand("solve", "maximise the expected cost over signature speeds");
    add_common(solve, flags, true);
    solve->add_option("--expsig", expsig_file, "precomputed expected signature (from `expsig`)")
        ->check(CLI::ExistingFile);

    auto* backtest = app.add_subcommand("backtest", "replay a strategy on the test paths");
    add_common(backtest, flags, true);
    backtest->add_option("--strategy", strategy_file, "strategy JSON (from `solve`)")
        ->required()
        ->check(CLI::ExistingFile);

    auto* reproduce = app.add_subcommand("reproduce", "run a preset experiment end to end");
    add_common(reproduce, flags, false);
    reproduce->add_option("preset", preset_name, "bm | signal | orderflow | fbm");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (flags.threads > 0) omp_set_num_threads(flags.threads);

        if (*reproduce) {
            if (preset_name.empty() == flags.config.empty()) {
                throw sigexec::InputError("reproduce: give exactly one of a preset name or --config");
            }
            const auto cfg = resolve(preset_name.empty() ? sigexec::ExperimentConfig::from_file(flags.config)
                                                         : sigexec::preset(preset_name),
                                     flags);
            const sigexec::Json summary = sigexec::cmd_reproduce(cfg, flags.out);
            std::cout << summary.at("runs").dump(2) << '\n';
            return 0;
        }

        const auto cfg = resolve(sigexec::ExperimentConfig::from_file(flags.config), flags);
        if (*expsig) {
            sigexec::cmd_expsig(cfg, flags.out);
        } else if (*solve) {
            std::optional<std::filesystem::path> es;
            if (!expsig_file.empty()) es = expsig_file;
            sigexec::cmd_solve(cfg, flags.out, es);
        } else if (*backtest) {
            sigexec::cmd_backtest(cfg, flags.out, strategy_file);
        }
        std::cout << "wrote " << flags.out << '\n';
        return 0;
    } catch (const sigexec::InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << " (extreme eigenvalue " << e.extreme_eigenvalue() << ")\n";
        return 2;
    } catch (const sigexec::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
