#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "altproj/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Alternating projections between semialgebraic convex sets and subspaces: simulate, predict rates, verify"};
    app.require_subcommand(1);

    std::vector<std::string> configs;
    altproj::CliOptions opt;
    std::string out = "out";
    double tol_exponent = 0.0, tol_product = 0.0;

    const std::vector<std::pair<std::string, std::string>> commands{
        {"simulate", "run alternating projections and write the trace CSV"},
        {"predict", "predict the convergence rate"},
        {"verify", "predict, simulate, fit and compare against tolerance bands"},
        {"classify", "label plane points by the stratum receiving their projection"},
        {"partition", "trace the partition boundaries and label a grid"},
        {"oracle", "run the one-dimensional recursion oracle"},
    };
    std::vector<CLI::Option*> te_opts, tp_opts;
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", configs, "scenario YAML file (repeat for a batch)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory")->capture_default_str();
        te_opts.push_back(sub->add_option("--tol-exponent", tol_exponent, "exponent band (default 0.02)")
                              ->check(CLI::PositiveNumber));
        tp_opts.push_back(sub->add_option("--tol-product", tol_product, "limit product band (default 0.05)")
                              ->check(CLI::PositiveNumber));
        sub->add_option("--jobs", opt.jobs, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(altproj::ExitCode::ConfigError);
    }

    opt.out_dir = out;
    for (auto* o : te_opts) {
        if (o->count() > 0) opt.tol_exponent = tol_exponent;
    }
    for (auto* o : tp_opts) {
        if (o->count() > 0) opt.tol_product = tol_product;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    return static_cast<int>(altproj::run_command(command, configs, opt, std::cout));
}
