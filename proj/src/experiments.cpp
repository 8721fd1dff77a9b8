#include "arwlab/experiments.hpp"
#include "arwlab/branching.hpp"
#include "arwlab/engine.hpp"
#include "arwlab/error.hpp"
#include "arwlab/parallel.hpp"
#include "arwlab/random.hpp"
#include "arwlab/verify.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>

namespace arwlab {

namespace {

const std::map<std::string, campaign>& campaign_table()
{
    static const std::map<std::string, campaign> table{
        {"dd", campaign::dd},
        {"ps", campaign::ps},
        {"cycle", campaign::cycle},
        {"rho-star", campaign::rho_star},
        {"verify-correspondence", campaign::verify_correspondence},
        {"verify-abelian", campaign::verify_abelian},
        {"box-coverage", campaign::box_coverage},
        {"bad-event", campaign::bad_event},
        {"branching-laws", campaign::branching_laws},
    };
    return table;
}

template <class T>
T parse_number(const std::string& key, const std::string& text)
{
    T value{};
    std::string t = boost::algorithm::trim_copy(text);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw config_invalid("bad value for " + key + ": '" + text + "'");
    return value;
}

// Integers also accept scientific notation such as 1e9.
template <class T>
T parse_count(const std::string& key, const std::string& text)
{
    std::string t = boost::algorithm::trim_copy(text);
    if (t.find_first_of("eE.") == std::string::npos)
        return parse_number<T>(key, t);
    double d = parse_number<double>(key, t);
    if (!(d >= static_cast<double>(std::numeric_limits<T>::min())) ||
        !(d <= static_cast<double>(std::numeric_limits<T>::max())) || d != std::floor(d))
        throw config_invalid("bad integer for " + key + ": '" + text + "'");
    return static_cast<T>(d);
}

std::vector<long> parse_list(const std::string& key, const std::string& text)
{
    std::vector<std::string> parts;
    boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
    std::vector<long> out;
    for (const auto& p : parts)
        out.push_back(parse_count<long>(key, p));
    return out;
}

std::string opt(const std::optional<long>& v)
{
    return v ? std::to_string(*v) : std::string();
}

std::string opt(const std::optional<std::uint64_t>& v)
{
    return v ? std::to_string(*v) : std::string();
}

nlohmann::ordered_json number_or_null(double x)
{
    return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json estimate_json(const density_estimate& e)
{
    return {{"point", e.point}, {"stderr", e.std_error}, {"replicas", e.replicas}, {"method", e.method}};
}

long count_errors(const std::vector<replica_row>& rows)
{
    return static_cast<long>(std::count_if(rows.begin(), rows.end(), [](const replica_row& r) { return !r.error.empty(); }));
}

replica_row make_row(std::string model, double lambda, long size, std::uint64_t seed, long replica)
{
    replica_row r;
    r.model = std::move(model);
    r.lambda = lambda;
    r.size = size;
    r.seed = seed;
    r.replica = replica;
    return r;
}

void append(std::vector<replica_row>& to, const std::vector<replica_row>& from)
{
    to.insert(to.end(), from.begin(), from.end());
}

} // namespace

campaign parse_campaign(const std::string& name)
{
    auto it = campaign_table().find(name);
    if (it == campaign_table().end())
        throw config_invalid("unknown campaign '" + name + "'");
    return it->second;
}

std::string campaign_name(campaign c)
{
    for (const auto& [name, value] : campaign_table())
        if (value == c)
            return name;
    return "?";
}

bool is_verify_campaign(campaign c)
{
    return c == campaign::verify_correspondence || c == campaign::verify_abelian || c == campaign::branching_laws;
}

std::vector<long> default_sizes(campaign c)
{
    switch (c) {
    case campaign::dd: return {2000};
    case campaign::ps: return {4000};
    case campaign::cycle: return {128, 256, 512};
    case campaign::rho_star: return {4096};
    case campaign::verify_correspondence: return {6};
    case campaign::verify_abelian: return {12};
    case campaign::box_coverage: return {120};
    case campaign::bad_event: return {40, 80, 120, 160};
    case campaign::branching_laws: return {9};
    }
    return {};
}

long default_replicas(campaign c)
{
    switch (c) {
    case campaign::dd: return 200;
    case campaign::ps: return 200;
    case campaign::cycle: return 200;
    case campaign::rho_star: return 64;
    case campaign::verify_correspondence: return 500;
    case campaign::verify_abelian: return 1000;
    case campaign::box_coverage: return 200;
    case campaign::bad_event: return 20000;
    case campaign::branching_laws: return 100000;
    }
    return 1;
}

experiment_config resolved(experiment_config cfg)
{
    if (cfg.sizes.empty())
        cfg.sizes = default_sizes(cfg.which);
    if (!cfg.replicas)
        cfg.replicas = default_replicas(cfg.which);
    return cfg;
}

void validate(const experiment_config& cfg)
{
    if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda))
        throw config_invalid("lambda must be positive");
    if (cfg.replicas && *cfg.replicas < 1)
        throw config_invalid("replicas must be at least 1");
    for (long n : cfg.sizes)
        if (n < 1)
            throw config_invalid("sizes must be positive");
    if (cfg.block < 1)
        throw config_invalid("block must be positive");
    if (cfg.instruction_budget && *cfg.instruction_budget == 0)
        throw config_invalid("budget must be positive");
    if (cfg.cell_budget == 0)
        throw config_invalid("cell budget must be positive");
    switch (cfg.which) {
    case campaign::cycle:
        if (!(cfg.rho > 0.0 && cfg.rho < 1.0))
            throw config_invalid("cycle density must lie in (0,1)");
        break;
    case campaign::rho_star:
        for (long n : cfg.sizes)
            if (n % cfg.block != 0)
                throw config_invalid("horizon must be a multiple of the block");
        break;
    case campaign::box_coverage:
        if (!(cfg.rho > 0.0) || !(cfg.delta > 0.0) || cfg.rho * (1.0 + cfg.delta) > 1.0)
            throw config_invalid("box coverage needs rho > 0, delta > 0 and rho (1 + delta) <= 1");
        for (long n : cfg.sizes)
            if (n % 2 != 0)
                throw config_invalid("box coverage needs even n");
        break;
    case campaign::bad_event:
        if (!(cfg.rho > 0.0))
            throw config_invalid("bad-event density must be positive");
        break;
    case campaign::verify_correspondence:
    case campaign::verify_abelian:
        if (!cfg.sizes.empty() && cfg.sizes.front() > 20)
            throw config_invalid("verification instances are capped at size 20");
        break;
    default:
        break;
    }
}

std::uint64_t seed_from_environment()
{
    const char* env = std::getenv("ARWLAB_SEED");
    if (!env || !*env)
        return 0;
    try {
        return parse_number<std::uint64_t>("ARWLAB_SEED", env);
    } catch (const config_invalid&) {
        return 0;
    }
}

void apply_setting(experiment_config& cfg, const std::string& key, const std::string& value)
{
    if (key == "lambda")
        cfg.lambda = parse_number<double>(key, value);
    else if (key == "n" || key == "particles" || key == "sizes")
        cfg.sizes = parse_list(key, value);
    else if (key == "replicas")
        cfg.replicas = parse_count<long>(key, value);
    else if (key == "seed")
        cfg.master_seed = parse_count<std::uint64_t>(key, value);
    else if (key == "jobs")
        cfg.jobs = parse_count<unsigned>(key, value);
    else if (key == "budget")
        cfg.instruction_budget = parse_count<std::uint64_t>(key, value);
    else if (key == "cell_budget")
        cfg.cell_budget = parse_count<std::uint64_t>(key, value);
    else if (key == "rho")
        cfg.rho = parse_number<double>(key, value);
    else if (key == "delta")
        cfg.delta = parse_number<double>(key, value);
    else if (key == "block")
        cfg.block = parse_count<long>(key, value);
    else if (key == "event") {
        std::string v = boost::algorithm::trim_copy(value);
        if (v == "cell")
            cfg.event = bad_event_kind::cell;
        else if (v == "box")
            cfg.event = bad_event_kind::box;
        else
            throw config_invalid("event must be cell or box");
    } else if (key == "out")
        cfg.out = boost::algorithm::trim_copy(value);
    else
        throw config_invalid("unknown config key '" + key + "'");
}

void apply_config_file(experiment_config& cfg, const std::string& path)
{
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(path, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw config_invalid(std::string("config file: ") + e.what());
    }
    const std::string section = campaign_name(cfg.which);
    for (const auto& [key, node] : tree)
        if (node.empty())
            apply_setting(cfg, key, node.data());
    if (auto sec = tree.get_child_optional(section))
        for (const auto& [key, node] : *sec)
            apply_setting(cfg, key, node.data());
}

std::string format_csv(const std::vector<replica_row>& rows)
{
    std::string out = std::string(csv_header) + "\n";
    for (const auto& r : rows) {
        const bool ok = r.error.empty();
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", r.model, r.lambda, r.size, r.seed, r.replica,
                           ok ? opt(r.sleepers) : "", ok ? opt(r.tau) : "", ok ? opt(r.emitted_left) : "",
                           ok ? opt(r.emitted_right) : "", ok ? opt(r.span_lo) : "", ok ? opt(r.span_hi) : "");
    }
    return out;
}

density_samples dd_density(double lambda, long n, long replicas, std::uint64_t seed, unsigned jobs,
                           std::optional<std::uint64_t> budget)
{
    density_samples out;
    auto rows = run_replicas(replicas, jobs, [&](long i) {
        replica_row row = make_row("dd", lambda, n, derive_seed(seed, static_cast<std::uint64_t>(i)), i);
        try {
            auto r = driven_dissipative_sample(n, lambda, row.seed, budget.value_or(default_instruction_budget));
            row.sleepers = r.sleepers;
            row.tau = r.tau;
            row.emitted_left = r.emitted_left;
            row.emitted_right = r.emitted_right;
            row.span_lo = r.visited_lo;
            row.span_hi = r.visited_hi;
        } catch (const error& e) {
            row.error = e.what();
        }
        return row;
    });
    for (const auto& r : rows)
        if (r.error.empty())
            out.values.push_back(static_cast<double>(*r.sleepers) / static_cast<double>(n + 1));
    out.rows = std::move(rows);
    out.estimate = estimate_mean(out.values, "driven-dissipative sleepers/(n+1)", seed);
    return out;
}

density_samples ps_density(double lambda, long particles, long replicas, std::uint64_t seed, unsigned jobs,
                           std::optional<std::uint64_t> budget)
{
    density_samples out;
    auto rows = run_replicas(replicas, jobs, [&](long i) {
        replica_row row = make_row("ps", lambda, particles, derive_seed(seed, static_cast<std::uint64_t>(i)), i);
        try {
            auto r = point_source(particles, lambda, row.seed, budget.value_or(UINT64_MAX));
            row.sleepers = r.result.sleepers;
            row.tau = r.result.tau;
            row.emitted_left = r.result.emitted_left;
            row.emitted_right = r.result.emitted_right;
            row.span_lo = r.sleepers_lo;
            row.span_hi = r.sleepers_hi;
        } catch (const error& e) {
            row.error = e.what();
        }
        return row;
    });
    for (const auto& r : rows)
        if (r.error.empty())
            out.values.push_back(static_cast<double>(particles) / static_cast<double>(*r.span_hi - *r.span_lo + 1));
    out.rows = std::move(rows);
    out.estimate = estimate_mean(out.values, "point-source N/L_N", seed);
    return out;
}

density_samples greedy_density(double lambda, long block, long horizon, long replicas, std::uint64_t seed,
                               unsigned jobs)
{
    if (horizon % block != 0)
        throw config_invalid("horizon must be a multiple of the block");
    density_samples out;
    auto rows = run_replicas(replicas, jobs, [&](long i) {
        replica_row row = make_row("rho-star", lambda, horizon, derive_seed(seed, static_cast<std::uint64_t>(i)), i);
        try {
            greedy_endpoint e = sample_greedy_endpoint(lambda, block, horizon, row.seed);
            row.sleepers = e.s;
            row.span_lo = 0;
            row.span_hi = e.r;
        } catch (const error& e) {
            row.error = e.what();
        }
        return row;
    });
    for (const auto& r : rows)
        if (r.error.empty())
            out.values.push_back(static_cast<double>(*r.sleepers) / static_cast<double>(horizon));
    out.rows = std::move(rows);
    out.estimate = estimate_mean(out.values, "greedy k=" + std::to_string(block), seed);
    return out;
}

cycle_samples cycle_taus(double lambda, long n, double rho, long replicas, std::uint64_t seed, std::uint64_t budget,
                         unsigned jobs)
{
    cycle_samples out;
    out.rows = run_replicas(replicas, jobs, [&](long i) {
        replica_row row = make_row("cycle", lambda, n, derive_seed(seed, static_cast<std::uint64_t>(i)), i);
        try {
            row.tau = cycle_fixed_energy(n, rho, lambda, row.seed, budget);
        } catch (const error& e) {
            row.error = e.what();
        }
        return row;
    });
    for (const auto& r : out.rows) {
        if (r.error.empty()) {
            out.taus.push_back(static_cast<double>(*r.tau));
        } else {
            out.taus.push_back(std::numeric_limits<double>::infinity());
            ++out.over_budget;
        }
    }
    out.median_tau = median(out.taus);
    out.median_std_error = std::isfinite(out.median_tau)
                               ? jackknife_std_error(out.taus, [](const std::vector<double>& x) { return median(x); })
                               : std::numeric_limits<double>::infinity();
    if (!std::isfinite(out.median_std_error))
        out.median_std_error = std::numeric_limits<double>::infinity();
    return out;
}

linear_fit_result cycle_scaling_fit(const std::vector<long>& sizes, const std::vector<double>& medians)
{
    std::vector<double> x, y;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const double n = static_cast<double>(sizes[i]);
        x.push_back(std::log(n * std::log(n) * std::log(n)));
        y.push_back(std::log(medians[i]));
    }
    return linear_fit(x, y);
}

linear_fit_result cycle_growth_fit(const std::vector<long>& sizes, const std::vector<double>& medians)
{
    std::vector<double> x, y;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        x.push_back(static_cast<double>(sizes[i]));
        y.push_back(std::log(medians[i]));
    }
    return linear_fit(x, y);
}

double bad_event_log_slope(const std::vector<long>& sizes, const std::vector<probability_estimate>& estimates)
{
    std::vector<double> x, y;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        x.push_back(static_cast<double>(sizes[i]));
        y.push_back(std::log((static_cast<double>(estimates[i].hits) + 0.5) /
                             (static_cast<double>(estimates[i].replicas) + 1.0)));
    }
    return linear_fit(x, y).slope;
}

pairwise_check compare_pair(const std::string& first, const density_estimate& a, const std::string& second,
                            const density_estimate& b, double allowance)
{
    pairwise_check c{first, second};
    c.difference = a.point - b.point;
    c.combined_std_error = std::hypot(a.std_error, b.std_error);
    c.z = c.combined_std_error > 0.0 ? c.difference / c.combined_std_error
                                     : (c.difference == 0.0 ? 0.0 : std::copysign(INFINITY, c.difference));
    c.within = std::fabs(c.difference) <= allowance + 3.0 * c.combined_std_error;
    return c;
}

density_comparison compare_densities(const comparison_params& p)
{
    density_comparison out;
    out.dd = dd_density(p.lambda, p.dd_n, p.dd_replicas, hash_key(p.seed, 0xddULL), p.jobs).estimate;
    out.ps = ps_density(p.lambda, p.ps_particles, p.ps_replicas, hash_key(p.seed, 0x95ULL), p.jobs).estimate;
    out.lp = greedy_density(p.lambda, p.block, p.horizon, p.lp_replicas, hash_key(p.seed, 0x1bULL), p.jobs).estimate;
    out.pairs.push_back(compare_pair("dd", out.dd, "ps", out.ps, p.allowance));
    out.pairs.push_back(compare_pair("dd", out.dd, "lp", out.lp, p.allowance));
    out.pairs.push_back(compare_pair("ps", out.ps, "lp", out.lp, p.allowance));
    out.agree = std::all_of(out.pairs.begin(), out.pairs.end(), [](const pairwise_check& c) { return c.within; });
    return out;
}

namespace {

nlohmann::ordered_json params_json(const experiment_config& cfg)
{
    nlohmann::ordered_json j;
    j["lambda"] = cfg.lambda;
    j["sizes"] = cfg.sizes;
    j["replicas"] = *cfg.replicas;
    j["seed"] = cfg.master_seed;
    if (cfg.instruction_budget)
        j["budget"] = *cfg.instruction_budget;
    j["cell_budget"] = cfg.cell_budget;
    switch (cfg.which) {
    case campaign::cycle:
        j["rho"] = cfg.rho;
        break;
    case campaign::rho_star:
        j["block"] = cfg.block;
        break;
    case campaign::box_coverage:
        j["rho"] = cfg.rho;
        j["delta"] = cfg.delta;
        break;
    case campaign::bad_event:
        j["rho"] = cfg.rho;
        j["event"] = cfg.event == bad_event_kind::cell ? "cell" : "box";
        break;
    default:
        break;
    }
    return j;
}

void finish_density(experiment_report& rep, const std::vector<density_samples>& per_size,
                    const std::vector<long>& sizes)
{
    nlohmann::ordered_json by_size = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < per_size.size(); ++i) {
        const auto& s = per_size[i];
        append(rep.rows, s.rows);
        long errors = count_errors(s.rows);
        rep.failed += errors;
        rep.passed += static_cast<long>(s.rows.size()) - errors;
        nlohmann::ordered_json e = estimate_json(s.estimate);
        e["size"] = sizes[i];
        e["errors"] = errors;
        by_size.push_back(e);
    }
    rep.summary["point"] = per_size.front().estimate.point;
    rep.summary["stderr"] = per_size.front().estimate.std_error;
    rep.summary["by_size"] = by_size;
}

template <class Check>
void run_checks(experiment_report& rep, const experiment_config& cfg, Check&& check)
{
    const long n = *cfg.replicas;
    auto results = run_replicas(n, cfg.jobs, [&](long i) {
        std::uint64_t seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(i));
        check_result r = check(seed);
        replica_row row = make_row(campaign_name(cfg.which), cfg.lambda, cfg.sizes.front(), seed, i);
        if (!r.passed)
            row.error = r.name + ": " + r.detail;
        return row;
    });
    nlohmann::ordered_json failures = nlohmann::ordered_json::array();
    for (const auto& row : results) {
        if (row.error.empty()) {
            ++rep.passed;
        } else {
            ++rep.failed;
            if (failures.size() < 20)
                failures.push_back({{"replica", row.replica}, {"seed", row.seed}, {"detail", row.error}});
        }
    }
    rep.rows = std::move(results);
    rep.summary["point"] = static_cast<double>(rep.passed) / static_cast<double>(n);
    rep.summary["stderr"] = 0.0;
    rep.summary["failures"] = failures;
}

} // namespace

experiment_report run_experiment(const experiment_config& input)
{
    experiment_config cfg = resolved(input);
    validate(cfg);
    const long reps = *cfg.replicas;
    experiment_report rep;
    rep.summary["campaign"] = campaign_name(cfg.which);
    rep.summary["params"] = params_json(cfg);

    switch (cfg.which) {
    case campaign::dd:
    case campaign::ps:
    case campaign::rho_star: {
        std::vector<density_samples> per_size;
        for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
            const long n = cfg.sizes[i];
            const std::uint64_t seed = hash_key(cfg.master_seed, static_cast<std::uint64_t>(n));
            if (cfg.which == campaign::dd)
                per_size.push_back(dd_density(cfg.lambda, n, reps, seed, cfg.jobs, cfg.instruction_budget));
            else if (cfg.which == campaign::ps)
                per_size.push_back(ps_density(cfg.lambda, n, reps, seed, cfg.jobs, cfg.instruction_budget));
            else
                per_size.push_back(greedy_density(cfg.lambda, cfg.block, n, reps, seed, cfg.jobs));
        }
        finish_density(rep, per_size, cfg.sizes);
        break;
    }
    case campaign::cycle: {
        const std::uint64_t budget = cfg.instruction_budget.value_or(default_instruction_budget);
        nlohmann::ordered_json by_size = nlohmann::ordered_json::array();
        std::vector<double> medians;
        for (long n : cfg.sizes) {
            auto c = cycle_taus(cfg.lambda, n, cfg.rho, reps,
                                hash_key(cfg.master_seed, static_cast<std::uint64_t>(n)), budget, cfg.jobs);
            append(rep.rows, c.rows);
            rep.failed += c.over_budget;
            rep.passed += reps - c.over_budget;
            medians.push_back(c.median_tau);
            by_size.push_back({{"size", n},
                               {"median_tau", number_or_null(c.median_tau)},
                               {"stderr", number_or_null(c.median_std_error)},
                               {"over_budget", c.over_budget}});
        }
        rep.summary["point"] = number_or_null(medians.front());
        rep.summary["stderr"] = by_size.front()["stderr"];
        rep.summary["by_size"] = by_size;
        bool finite = std::all_of(medians.begin(), medians.end(), [](double m) { return std::isfinite(m); });
        if (finite && cfg.sizes.size() >= 2) {
            auto s = cycle_scaling_fit(cfg.sizes, medians);
            auto g = cycle_growth_fit(cfg.sizes, medians);
            rep.summary["fit_n_log2n_slope"] = s.slope;
            rep.summary["fit_linear_log_slope"] = g.slope;
            rep.summary["fit_linear_log_r2"] = g.r_squared;
        }
        break;
    }
    case campaign::box_coverage:
    case campaign::bad_event: {
        nlohmann::ordered_json by_size = nlohmann::ordered_json::array();
        std::vector<probability_estimate> est;
        for (long n : cfg.sizes) {
            const std::uint64_t seed = hash_key(cfg.master_seed, static_cast<std::uint64_t>(n));
            probability_estimate e =
                cfg.which == campaign::box_coverage
                    ? box_coverage(n, cfg.rho, cfg.delta, reps, seed, cfg.lambda, cfg.jobs, cfg.cell_budget)
                    : bad_event_prob(cfg.event, cfg.rho, n, reps, seed, cfg.lambda, cfg.jobs, cfg.cell_budget);
            est.push_back(e);
            // coverage counts covered boxes as passes; bad events count hits as failures
            const long good = cfg.which == campaign::box_coverage ? e.hits : e.replicas - e.hits;
            rep.passed += good;
            rep.failed += e.replicas - good;
            by_size.push_back({{"size", n}, {"p", e.p}, {"stderr", e.std_error}, {"hits", e.hits}, {"replicas", e.replicas}});
        }
        rep.summary["point"] = est.front().p;
        rep.summary["stderr"] = est.front().std_error;
        rep.summary["by_size"] = by_size;
        if (cfg.which == campaign::bad_event && cfg.sizes.size() >= 2)
            rep.summary["log_slope"] = bad_event_log_slope(cfg.sizes, est);
        break;
    }
    case campaign::verify_correspondence: {
        const long max_n = cfg.sizes.front();
        run_checks(rep, cfg, [&](std::uint64_t seed) {
            return verify_correspondence_instance(random_class_instance(seed, max_n));
        });
        break;
    }
    case campaign::verify_abelian: {
        const long max_n = cfg.sizes.front();
        run_checks(rep, cfg, [&](std::uint64_t seed) { return verify_abelian_instance(seed, max_n); });
        break;
    }
    case campaign::branching_laws: {
        std::vector<check_result> checks = gw_law_checks(reps, cfg.master_seed);
        for (long i = 0; i < 20; ++i)
            checks.push_back(janson_instance(hash_key(cfg.master_seed, 0x1a2cULL, static_cast<std::uint64_t>(i)),
                                             std::max(1000L, reps / 5)));
        nlohmann::ordered_json list = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < checks.size(); ++i) {
            const auto& c = checks[i];
            (c.passed ? rep.passed : rep.failed) += 1;
            list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
            replica_row row = make_row("branching-laws", cfg.lambda, cfg.sizes.front(), cfg.master_seed, static_cast<long>(i));
            if (!c.passed)
                row.error = c.name;
            rep.rows.push_back(row);
        }
        rep.summary["point"] = static_cast<double>(rep.passed) / static_cast<double>(checks.size());
        rep.summary["stderr"] = 0.0;
        rep.summary["checks"] = list;
        break;
    }
    }
    rep.summary["replicas"] = reps;
    rep.summary["pass_fail_counts"] = {{"pass", rep.passed}, {"fail", rep.failed}};
    return rep;
}

void write_report(const experiment_report& report, const std::string& out)
{
    if (out.empty())
        return;
    std::ofstream csv(out, std::ios::binary);
    if (!csv)
        throw config_invalid("cannot open output '" + out + "'");
    csv << format_csv(report.rows);
    std::ofstream json(out + ".json", std::ios::binary);
    if (!json)
        throw config_invalid("cannot open output '" + out + ".json'");
    json << report.summary.dump(2) << "\n";
}

} // namespace arwlab
