#include "arwlab/error.hpp"
#include "arwlab/experiments.hpp"
#include "arwlab/verify.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace arwlab;

namespace {

std::filesystem::path scratch_dir()
{
    auto dir = std::filesystem::temp_directory_path() / "arwlab_test_experiments";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args)
{
    const char* cli = std::getenv("ARWLAB_CLI");
    REQUIRE(cli != nullptr);
    std::string cmd = std::string(cli) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

density_estimate estimate_of(double point, double se)
{
    density_estimate e;
    e.point = point;
    e.std_error = se;
    return e;
}

} // namespace

TEST_CASE("campaign names", "[experiments]")
{
    for (auto c : {campaign::dd, campaign::ps, campaign::cycle, campaign::rho_star, campaign::verify_correspondence,
                   campaign::verify_abelian, campaign::box_coverage, campaign::bad_event, campaign::branching_laws})
        CHECK(parse_campaign(campaign_name(c)) == c);
    CHECK(campaign_name(campaign::rho_star) == "rho-star");
    CHECK_THROWS_AS(parse_campaign("nope"), config_invalid);
    CHECK(is_verify_campaign(campaign::verify_abelian));
    CHECK_FALSE(is_verify_campaign(campaign::dd));
}

TEST_CASE("config validation", "[experiments]")
{
    experiment_config cfg;
    cfg.replicas = 0;
    CHECK_THROWS_AS(validate(resolved(cfg)), config_invalid);
    cfg.replicas = 3;
    cfg.lambda = -1.0;
    CHECK_THROWS_AS(validate(resolved(cfg)), config_invalid);
    cfg.lambda = 1.0;
    CHECK_NOTHROW(validate(resolved(cfg)));
    CHECK_THROWS_AS(apply_setting(cfg, "colour", "blue"), config_invalid);
    CHECK_THROWS_AS(apply_setting(cfg, "event", "line"), config_invalid);
    apply_setting(cfg, "event", "box");
    CHECK(cfg.event == bad_event_kind::box);
    experiment_config d = resolved(experiment_config{});
    CHECK(d.sizes == default_sizes(campaign::dd));
    CHECK(d.replicas == default_replicas(campaign::dd));
}

TEST_CASE("config file and overrides", "[experiments]")
{
    auto path = scratch_dir() / "run.ini";
    {
        std::ofstream f(path);
        f << "lambda = 0.5\nseed = 7\nreplicas = 4\n\n[dd]\nn = 50,60\nreplicas = 9\n\n[ps]\nparticles = 30\n";
    }
    experiment_config cfg;
    apply_config_file(cfg, path.string());
    CHECK(cfg.lambda == 0.5);
    CHECK(cfg.master_seed == 7);
    CHECK(cfg.sizes == std::vector<long>{50, 60});
    CHECK(cfg.replicas == 9);
    experiment_config ps;
    ps.which = campaign::ps;
    apply_config_file(ps, path.string());
    CHECK(ps.sizes == std::vector<long>{30});
    CHECK(ps.replicas == 4);
    CHECK_THROWS_AS(apply_config_file(cfg, (scratch_dir() / "missing.ini").string()), config_invalid);

    ::setenv("ARWLAB_SEED", "123", 1);
    CHECK(seed_from_environment() == 123);
    ::setenv("ARWLAB_SEED", "abc", 1);
    CHECK(seed_from_environment() == 0);
    ::unsetenv("ARWLAB_SEED");
    CHECK(seed_from_environment() == 0);
}

TEST_CASE("reports are reproducible", "[experiments]")
{
    experiment_config cfg;
    cfg.which = campaign::dd;
    cfg.sizes = {30, 40};
    cfg.replicas = 8;
    cfg.master_seed = 11;
    auto a = run_experiment(cfg), b = run_experiment(cfg);
    CHECK(format_csv(a.rows) == format_csv(b.rows));
    CHECK(format_csv(a.rows).rfind(csv_header, 0) == 0);
    CHECK(a.rows.size() == 16);
    auto dir = scratch_dir();
    write_report(a, (dir / "a.csv").string());
    write_report(b, (dir / "b.csv").string());
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.csv.json") == slurp(dir / "b.csv.json"));
    auto summary = nlohmann::json::parse(slurp(dir / "a.csv.json"));
    for (const char* key : {"campaign", "params", "point", "stderr", "replicas", "pass_fail_counts"})
        CHECK(summary.contains(key));

    // completion order does not matter
    cfg.jobs = 1;
    auto one = run_experiment(cfg);
    cfg.jobs = 2;
    auto two = run_experiment(cfg);
    CHECK(format_csv(one.rows) == format_csv(two.rows));
    CHECK(one.summary["point"] == two.summary["point"]);
    CHECK(one.summary["stderr"] == two.summary["stderr"]);

    cfg.master_seed = 12;
    CHECK(format_csv(run_experiment(cfg).rows) != format_csv(a.rows));
}

TEST_CASE("errored replicas leave blank measurements", "[experiments]")
{
    experiment_config cfg;
    cfg.which = campaign::dd;
    cfg.sizes = {200};
    cfg.replicas = 3;
    cfg.instruction_budget = 5;
    auto r = run_experiment(cfg);
    REQUIRE(r.rows.size() == 3);
    for (const auto& row : r.rows) {
        CHECK_FALSE(row.error.empty());
        CHECK_FALSE(row.sleepers.has_value());
    }
    CHECK(r.failed == 3);
    std::string csv = format_csv(r.rows);
    CHECK(csv.find(",,,,,,") != std::string::npos);
}

TEST_CASE("verify campaign", "[experiments]")
{
    experiment_config cfg;
    cfg.which = campaign::verify_abelian;
    auto r = run_experiment(cfg);
    CHECK(r.passed == 1000);
    CHECK(r.failed == 0);
    CHECK(r.summary["pass_fail_counts"]["pass"] == 1000);
}

TEST_CASE("greedy estimate precision", "[experiments][statistical]")
{
    experiment_config cfg;
    cfg.which = campaign::rho_star;
    cfg.sizes = {4096};
    cfg.replicas = 64;
    cfg.block = 32;
    auto r = run_experiment(cfg);
    INFO(r.summary.dump());
    CHECK(r.summary["stderr"].get<double>() <= 0.01);
    CHECK(r.summary["point"].get<double>() > 0.8);
}

TEST_CASE("density comparison logic", "[experiments]")
{
    pairwise_check near = compare_pair("a", estimate_of(0.90, 0.01), "b", estimate_of(0.85, 0.01), 0.02);
    CHECK(near.difference == Catch::Approx(0.05));
    CHECK(near.combined_std_error == Catch::Approx(std::sqrt(2e-4)));
    CHECK(near.within);
    pairwise_check far = compare_pair("a", estimate_of(0.90, 0.01), "b", estimate_of(0.80, 0.01), 0.02);
    CHECK_FALSE(far.within);
}

TEST_CASE("density bounds at reduced scale", "[experiments][statistical]")
{
    comparison_params p;
    p.dd_n = 400;
    p.dd_replicas = 32;
    p.ps_particles = 200;
    p.ps_replicas = 16;
    p.horizon = 512;
    p.lp_replicas = 16;
    p.block = 8;
    p.seed = 5;
    p.lambda = 0.25;
    density_comparison low = compare_densities(p);
    for (const auto* e : {&low.dd, &low.ps, &low.lp}) {
        INFO(e->method << " " << e->point);
        CHECK(e->point >= rho_lower_bound(0.25) - 3.0 * e->std_error);
    }
    p.lambda = 0.5;
    density_comparison mid = compare_densities(p);
    for (const auto* e : {&mid.dd, &mid.ps, &mid.lp}) {
        INFO(e->method << " " << e->point);
        CHECK(e->point <= rho_upper_bound(0.5) + 3.0 * e->std_error);
    }
}

TEST_CASE("command line exit codes", "[experiments]")
{
    auto out = (scratch_dir() / "cli.csv").string();
    CHECK(run_cli("verify-abelian --replicas 20 --seed 3") == 0);
    CHECK(run_cli("dd --n 20 --replicas 3 --out " + out) == 0);
    CHECK(std::filesystem::exists(out + ".json"));
    CHECK(run_cli("dd --lambda -1") == 2);
    CHECK(run_cli("nonsense") == 2);
    CHECK(run_cli("dd --n 10 --particles 10") == 2);
    CHECK(run_cli("dd --replicas 0") == 2);
    CHECK(run_cli("bad-event --event line") == 2);
}
