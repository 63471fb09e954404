#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "qlab/experiments.hpp"
#include "qlab/numeric.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qlab: exact-formula laboratory for q-deformed exclusion processes"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format;
    std::uint64_t seed = 0;
    bool have_seed = false;

    std::vector<CLI::App*> subs;
    for (const char* kind : {"simulate", "moment", "duality-check", "det-scan", "invert",
                             "tw-convergence", "polymer", "identity-suite"}) {
        CLI::App* sub = app.add_subcommand(kind);
        sub->add_option("--config", config_path, "JSON experiment config");
        sub->add_option("--seed", seed, "override config seed")->each([&](const std::string&) {
            have_seed = true;
        });
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--format", format, "csv | json | plot");
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    using qlab::cli::ExitCode;
    try {
        qlab::cli::ExperimentConfig cfg;
        if (!config_path.empty()) {
            cfg = qlab::cli::parse_config(config_path);
        } else {
            cfg.kind = app.get_subcommands().front()->get_name();
            cfg = qlab::cli::parse_config_text("{\"kind\": \"" + cfg.kind + "\"}");
        }
        cfg.kind = app.get_subcommands().front()->get_name();
        if (have_seed) cfg.seed = seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!format.empty()) cfg.format = format;
        if (const char* workers = std::getenv("QLAB_WORKERS"); workers != nullptr)
            (void)workers;  // modules run their reductions in fixed order regardless

        qlab::cli::Report report = qlab::cli::run_experiment(cfg);
        std::cout << report.summary << "\n";
        if (!report.tolerance_ok) return static_cast<int>(ExitCode::ToleranceFailure);
        return static_cast<int>(ExitCode::Ok);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::ConfigError);
    } catch (const qlab::NonConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return static_cast<int>(ExitCode::NumericalFailure);
    } catch (const qlab::ContourInfeasibleError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return static_cast<int>(ExitCode::NumericalFailure);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::NumericalFailure);
    }
}
