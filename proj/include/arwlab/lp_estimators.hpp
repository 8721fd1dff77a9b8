#ifndef ARWLAB_LP_ESTIMATORS_HPP
#define ARWLAB_LP_ESTIMATORS_HPP

#include "arwlab/layer.hpp"
#include "arwlab/stats.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace arwlab {

struct greedy_endpoint {
    long s = 0; // row s_n
    long r = 0; // column u_n
};

// End of the k-greedy path from (0,0) after n steps in a fresh instance.
greedy_endpoint sample_greedy_endpoint(double lambda, long block, long n, std::uint64_t seed);

struct rho_star_estimate {
    density_estimate greedy;                  // mean s_n / n over replicas
    std::optional<density_estimate> full_set; // mean X_k / k, for small k
    double mean_column_ratio = 0.0;           // mean u_n / (n^2 / 2)
    std::vector<double> rates;                // per-replica s_n / n
    std::vector<double> column_ratios;        // per-replica u_n / (n^2 / 2)
};

inline constexpr long full_set_block_limit = 64;

rho_star_estimate estimate_rho_star(double lambda, long block, long n, long replicas, std::uint64_t seed,
                                    unsigned jobs = 0);

// X_n, the highest row of the step-n set from (0,0), for each replica.
std::vector<long> sample_max_rows(double lambda, long n, long replicas, std::uint64_t seed, unsigned jobs = 0,
                                  std::uint64_t cell_budget = default_cell_budget);

density_estimate full_set_rate(double lambda, long k, long replicas, std::uint64_t seed, unsigned jobs = 0);

enum class bad_event_kind { cell, box };

struct probability_estimate {
    double p = 0.0;
    double std_error = 0.0;
    long hits = 0;
    long replicas = 0;
};

probability_estimate bad_event_prob(bad_event_kind kind, double rho, long n, long replicas, std::uint64_t seed,
                                    double lambda = 1.0, unsigned jobs = 0,
                                    std::uint64_t cell_budget = default_cell_budget);

struct box_bounds {
    long col_lo = 0, col_hi = -1, row_lo = 0, row_hi = -1;
    bool empty() const { return col_lo > col_hi || row_lo > row_hi; }
};
box_bounds coverage_box(long n, double rho, double delta);
bool covers_box(const infection_set& set, const box_bounds& box);

probability_estimate box_coverage(long n, double rho, double delta, long replicas, std::uint64_t seed,
                                  double lambda = 1.0, unsigned jobs = 0,
                                  std::uint64_t cell_budget = default_cell_budget);

} // namespace arwlab

#endif
