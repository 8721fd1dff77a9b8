#ifndef ARWLAB_VERIFY_HPP
#define ARWLAB_VERIFY_HPP

#include "arwlab/correspondence.hpp"
#include "arwlab/layer.hpp"
#include "arwlab/stats.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace arwlab {

struct check_result {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct class_instance {
    stack_source src;
    odometer_class_key key;
};

// Seeded stacks with lambda drawn from {1/2, 1, 2}, n in [1, max_n], sigma(v) in {0,1,2},
// u0 in [0,6] and f0 in [-2,3].
class_instance random_class_instance(std::uint64_t seed, long max_n = 6);

// Canonical enumeration vs infection paths: phi is a bijection, chi inverts it, counts agree.
check_result verify_correspondence_instance(const class_instance& inst);
// Sweep and random-site toppling give identical results on a random interval instance.
check_result verify_abelian_instance(std::uint64_t seed, long max_n = 12, int max_count = 3);
// The true odometer on [1,n-1] lies below every weakly stable odometer and leaves the most sleepers.
check_result verify_least_action_instance(std::uint64_t seed, long max_n = 6);

// Every non-extreme cell has a member neighbour as the connectivity properties require.
bool forward_connected(const infection_set& set, long base_row);
bool backward_connected(const infection_set& set, long top_row);
bool sets_intersect(const infection_set& a, const infection_set& b);

struct crossing_outcome {
    bool detected = false;
    bool intersect = false;
};
// Forward set from (r,t) and a backward set from a cell in row t' >= t, both at one step.
crossing_outcome crossing_instance(std::uint64_t seed);

check_result verify_connectivity_instance(std::uint64_t seed, long max_n = 60);
check_result verify_shift_instance(std::uint64_t seed, long n = 20);
// Counts the steps where Z_i >= 0 and the identity was compared.
check_result verify_reverse_instance(std::uint64_t seed, long max_m = 12, long* compared = nullptr);

// Theta output law on seeded stacks: R ~ Geo(1/2), B ~ Bernoulli(lambda/(1+lambda)),
// and no correlation between steps.
std::vector<check_result> theta_distribution_checks(long samples, std::uint64_t seed, double lambda,
                                                    double alpha = 1e-3);

// Exact geometric laws of the critical process with X_0 = 1.
std::vector<check_result> gw_law_checks(long runs, std::uint64_t seed, double alpha = 1e-3);
// Janson bounds against empirical tails of sums of 1 + Geo(p_i).
check_result janson_instance(std::uint64_t seed, long samples);

// Root of 2 lambda0^rho (e/(1-rho))^(1-rho) = 1 with lambda0 = lambda/(1+lambda); 1 when none.
double rho_upper_bound(double lambda);
// lambda / (1/2 + lambda)
double rho_lower_bound(double lambda);

} // namespace arwlab

#endif
