#ifndef ARWLAB_EXPERIMENTS_HPP
#define ARWLAB_EXPERIMENTS_HPP

#include "arwlab/layer.hpp"
#include "arwlab/lp_estimators.hpp"
#include "arwlab/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace arwlab {

enum class campaign {
    dd,
    ps,
    cycle,
    rho_star,
    verify_correspondence,
    verify_abelian,
    box_coverage,
    bad_event,
    branching_laws
};

campaign parse_campaign(const std::string& name); // config_invalid on unknown names
std::string campaign_name(campaign c);
// Campaigns whose failures are hard assertion failures.
bool is_verify_campaign(campaign c);

struct experiment_config {
    campaign which = campaign::dd;
    double lambda = 1.0;
    std::vector<long> sizes;       // empty: campaign default
    std::optional<long> replicas;  // unset: campaign default
    std::uint64_t master_seed = 0;
    std::optional<std::uint64_t> instruction_budget;
    std::uint64_t cell_budget = default_cell_budget;
    double rho = 0.5;
    double delta = 0.05;
    long block = 32;
    bad_event_kind event = bad_event_kind::cell;
    unsigned jobs = 0; // 0: all cores
    std::string out;   // CSV path; the summary goes to out + ".json"
};

std::vector<long> default_sizes(campaign c);
long default_replicas(campaign c);
// Fills the campaign defaults for sizes and replicas.
experiment_config resolved(experiment_config cfg);
// Throws config_invalid.
void validate(const experiment_config& cfg);

// ARWLAB_SEED when set and numeric, else 0.
std::uint64_t seed_from_environment();
// Applies `key = value` lines of an INI-style file: top-level keys first, then the section
// named after the campaign. Keys: lambda, n, particles, replicas, seed, jobs, budget,
// cell_budget, rho, delta, block, event, out.
void apply_config_file(experiment_config& cfg, const std::string& path);
void apply_setting(experiment_config& cfg, const std::string& key, const std::string& value);

// One CSV row; optional fields print empty, as do all measurements of an errored replica.
struct replica_row {
    std::string model;
    double lambda = 1.0;
    long size = 0;
    std::uint64_t seed = 0;
    long replica = 0;
    std::optional<long> sleepers;
    std::optional<std::uint64_t> tau;
    std::optional<std::uint64_t> emitted_left, emitted_right;
    std::optional<long> span_lo, span_hi;
    std::string error;
};

inline constexpr const char* csv_header =
    "model,lambda,n_or_N,seed,replica,sleepers,tau,emitted_left,emitted_right,span_lo,span_hi";
std::string format_csv(const std::vector<replica_row>& rows);

struct experiment_report {
    std::vector<replica_row> rows;
    nlohmann::ordered_json summary;
    long passed = 0;
    long failed = 0;
};

experiment_report run_experiment(const experiment_config& cfg);
// Writes the CSV to cfg.out and the summary to cfg.out + ".json"; no-op when out is empty.
void write_report(const experiment_report& report, const std::string& out);

// Density samples: sleepers/(n+1) for driven-dissipative, N/L_N for point-source.
struct density_samples {
    std::vector<replica_row> rows;
    std::vector<double> values; // successful replicas only
    density_estimate estimate;
};
density_samples dd_density(double lambda, long n, long replicas, std::uint64_t seed, unsigned jobs = 0,
                           std::optional<std::uint64_t> budget = std::nullopt);
density_samples ps_density(double lambda, long particles, long replicas, std::uint64_t seed, unsigned jobs = 0,
                           std::optional<std::uint64_t> budget = std::nullopt);
// Greedy layer-percolation rates s_n / n.
density_samples greedy_density(double lambda, long block, long horizon, long replicas, std::uint64_t seed,
                               unsigned jobs = 0);

// Median tau per replica set; replicas over budget count as +infinity.
struct cycle_samples {
    std::vector<replica_row> rows;
    std::vector<double> taus; // +inf for budget overruns
    double median_tau = 0.0;
    double median_std_error = 0.0;
    long over_budget = 0;
};
cycle_samples cycle_taus(double lambda, long n, double rho, long replicas, std::uint64_t seed,
                         std::uint64_t budget, unsigned jobs = 0);

// log median tau against log(n log^2 n), and log median tau against n.
linear_fit_result cycle_scaling_fit(const std::vector<long>& sizes, const std::vector<double>& medians);
linear_fit_result cycle_growth_fit(const std::vector<long>& sizes, const std::vector<double>& medians);

// Slope of log((hits + 1/2) / (replicas + 1)) against n.
double bad_event_log_slope(const std::vector<long>& sizes, const std::vector<probability_estimate>& estimates);

struct comparison_params {
    double lambda = 1.0;
    long dd_n = 2000;
    long dd_replicas = 200;
    long ps_particles = 4000;
    long ps_replicas = 200;
    long block = 32;
    long horizon = 4096;
    long lp_replicas = 64;
    std::uint64_t seed = 0;
    unsigned jobs = 0;
    double allowance = 0.02;
};

struct pairwise_check {
    std::string first, second;
    double difference = 0.0;
    double combined_std_error = 0.0;
    double z = 0.0;
    bool within = false; // |difference| <= allowance + 3 combined stderr
};

struct density_comparison {
    density_estimate dd, ps, lp;
    std::vector<pairwise_check> pairs;
    bool agree = false;
};

pairwise_check compare_pair(const std::string& first, const density_estimate& a, const std::string& second,
                            const density_estimate& b, double allowance);
density_comparison compare_densities(const comparison_params& params);

} // namespace arwlab

#endif
