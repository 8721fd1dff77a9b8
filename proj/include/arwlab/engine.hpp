#ifndef ARWLAB_ENGINE_HPP
#define ARWLAB_ENGINE_HPP

#include "arwlab/instructions.hpp"
#include "arwlab/odometer.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace arwlab {

inline constexpr std::uint64_t default_instruction_budget = 1'000'000'000ULL;

enum class toppling_policy { fifo, chase, sweep, random_site };

// Interval [a,b] with sinks at a-1 and b+1, or the cycle Z/nZ on sites 0..n-1.
struct region {
    enum class kind { interval, cycle } shape = kind::interval;
    long a = 0;
    long b = 0;
    static region interval(long a, long b) { return {kind::interval, a, b}; }
    static region cycle(long n) { return {kind::cycle, 0, n - 1}; }
    long size() const { return b - a + 1; }
};

struct stabilization_result {
    extended_odometer odometer;
    configuration final_config;
    std::uint64_t emitted_left = 0;
    std::uint64_t emitted_right = 0;
    std::uint64_t tau = 0;
    long sleepers = 0;
    long visited_lo = 0;
    long visited_hi = 0;
};

// Stabilize sigma on the region. `start` continues stacks from a previous odometer and
// `sigma` may then carry sleepers; the public contract uses neither.
stabilization_result stabilize(const configuration& sigma, const region& where, const stack_source& src,
                               toppling_policy policy = toppling_policy::fifo,
                               std::uint64_t budget = default_instruction_budget,
                               std::uint64_t policy_seed = 0,
                               const extended_odometer* start = nullptr);

stabilization_result driven_dissipative_sample(long n, double lambda, std::uint64_t seed,
                                               std::uint64_t budget = default_instruction_budget);

struct insertion_rule {
    bool uniform = true;
    long site = 0;
    static insertion_rule uniform_site() { return {true, 0}; }
    static insertion_rule fixed(long v) { return {false, v}; }
};

std::vector<configuration> driven_dissipative_chain(long n, double lambda, std::uint64_t seed, long steps,
                                                    insertion_rule insertion,
                                                    std::uint64_t budget = default_instruction_budget);

struct point_source_result {
    long visited_lo = 0;
    long visited_hi = 0;
    long sleepers_lo = 0;
    long sleepers_hi = 0;
    long length = 0;
    stabilization_result result;
};

point_source_result point_source(long particles, double lambda, std::uint64_t seed,
                                 std::uint64_t budget = UINT64_MAX);

// Returns tau; throws budget_exceeded when the budget runs out.
std::uint64_t cycle_fixed_energy(long n, double rho, double lambda, std::uint64_t seed,
                                 std::uint64_t budget);

} // namespace arwlab

#endif
