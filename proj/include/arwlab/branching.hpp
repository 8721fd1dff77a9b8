#ifndef ARWLAB_BRANCHING_HPP
#define ARWLAB_BRANCHING_HPP

#include <cstdint>
#include <vector>

namespace arwlab {

// Per-step migration e_1, e_2, ...; steps past the list repeat `tail`.
class migration_schedule {
public:
    migration_schedule() = default;
    explicit migration_schedule(std::vector<long> e, long tail = 0);
    static migration_schedule constant(long m) { return migration_schedule({}, m); }

    long e(long j) const; // j >= 1
    long e_max() const { return m_max; }
    // x0 + e_1 + ... + e_j
    long mean(long x0, long j) const;

private:
    std::vector<long> m_e;
    long m_tail = 0;
    long m_max = 0;
};

struct gw_trajectory {
    long x0 = 0;
    std::vector<long> x; // x[0] = x0
};

// X_{j+1} = sgn(X_j) * (L_1 + ... + L_|X_j|) + e_{j+1} with L_i ~ Geo(1/2).
gw_trajectory signed_gw_simulate(long x0, const migration_schedule& schedule, long steps, std::uint64_t seed);

enum class gw_variant { no_migration, unit_immigration };

// Law of X_j from X_0 = 1: zero with probability 1 - survival, else 1 + Geo(p).
struct gw_law {
    double survival = 1.0;
    double p = 1.0;
    double pmf(long k) const;
    double mean() const { return survival / p; }
};
gw_law gw_exact_law(long j, gw_variant variant);

// C exp(-c t^2 / (j (j e_max + |x0| + t))).
double tail_envelope(long j, long e_max, long x0, double t, double c, double big_c);

struct envelope_fit {
    double c = 0.0;
    double big_c = 0.0;
};
// Largest c (times `safety`) such that the envelope with constant big_c dominates the
// empirical two-sided tails of `deviations` (samples of X_j - mu_j) on the grid `ts`.
envelope_fit calibrate_envelope(const std::vector<double>& deviations, long j, long e_max, long x0,
                                const std::vector<double>& ts, double big_c = 2.0, double safety = 0.5);
// max(P[D >= t], P[D <= -t]) for the sample D.
double two_sided_tail(const std::vector<double>& deviations, double t);

// exp(-p* t^2 / (2 (nu + t))), bounding P[X - nu >= t] when E X <= nu and
// P[X - nu <= -t] when E X >= nu, for X a sum of independent 1 + Geo(p_i).
double janson_bound(double p_star, double nu, double t);
// One draw of sum_i (1 + Geo(p_i)).
long sample_geometric_sum(const std::vector<double>& p, std::uint64_t seed);

} // namespace arwlab

#endif
