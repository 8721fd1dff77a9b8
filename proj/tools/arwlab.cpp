#include "arwlab/error.hpp"
#include "arwlab/experiments.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <optional>
#include <string>

namespace {

constexpr int exit_config_invalid = 2;
constexpr int exit_verify_failed = 3;

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"arwlab: activated random walk and layer percolation experiments"};
    std::string name;
    std::optional<double> lambda, rho, delta;
    std::optional<std::string> n_list, particles, config_path, out, event;
    std::optional<long> replicas, block;
    std::optional<std::uint64_t> seed, budget, cell_budget;
    std::optional<unsigned> jobs;
    app.add_option("campaign", name,
                   "dd | ps | cycle | rho-star | verify-correspondence | verify-abelian | box-coverage | "
                   "bad-event | branching-laws")
        ->required();
    app.add_option("--lambda", lambda, "sleep rate lambda > 0");
    auto* n_opt = app.add_option("--n", n_list, "size list, comma separated");
    auto* p_opt = app.add_option("--particles", particles, "point-source particle counts, comma separated");
    n_opt->excludes(p_opt);
    app.add_option("--rho", rho, "density for cycle, box-coverage and bad-event");
    app.add_option("--delta", delta, "box-coverage slack");
    app.add_option("--event", event, "bad-event kind: cell | box");
    app.add_option("--block", block, "greedy block length k");
    app.add_option("--replicas", replicas, "replica count");
    app.add_option("--seed", seed, "master seed (default: ARWLAB_SEED, else 0)");
    app.add_option("--jobs", jobs, "worker threads (default: all cores)");
    app.add_option("--budget", budget, "instruction budget per replica");
    app.add_option("--cell-budget", cell_budget, "cell budget for infection sets");
    app.add_option("--out", out, "CSV output path; the summary goes to PATH.json");
    app.add_option("--config", config_path, "key = value config file with [campaign] sections");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_config_invalid;
    }

    try {
        arwlab::experiment_config cfg;
        cfg.which = arwlab::parse_campaign(name);
        cfg.master_seed = arwlab::seed_from_environment();
        if (config_path)
            arwlab::apply_config_file(cfg, *config_path);
        if (lambda)
            cfg.lambda = *lambda;
        if (n_list)
            arwlab::apply_setting(cfg, "n", *n_list);
        if (particles)
            arwlab::apply_setting(cfg, "particles", *particles);
        if (rho)
            cfg.rho = *rho;
        if (delta)
            cfg.delta = *delta;
        if (event)
            arwlab::apply_setting(cfg, "event", *event);
        if (block)
            cfg.block = *block;
        if (replicas)
            cfg.replicas = *replicas;
        if (seed)
            cfg.master_seed = *seed;
        if (jobs)
            cfg.jobs = *jobs;
        if (budget)
            cfg.instruction_budget = *budget;
        if (cell_budget)
            cfg.cell_budget = *cell_budget;
        if (out)
            cfg.out = *out;

        arwlab::experiment_report report = arwlab::run_experiment(cfg);
        arwlab::write_report(report, cfg.out);
        std::cout << report.summary.dump(2) << "\n";
        fmt::print("pass={} fail={}\n", report.passed, report.failed);
        if (arwlab::is_verify_campaign(cfg.which) && report.failed > 0)
            return exit_verify_failed;
        return 0;
    } catch (const arwlab::config_invalid& e) {
        fmt::print(stderr, "config invalid: {}\n", e.what());
        return exit_config_invalid;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
