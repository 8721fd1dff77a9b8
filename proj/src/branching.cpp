#include "arwlab/branching.hpp"
#include "arwlab/error.hpp"
#include "arwlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace arwlab {

migration_schedule::migration_schedule(std::vector<long> e, long tail)
    : m_e(std::move(e)), m_tail(tail), m_max(std::labs(tail))
{
    for (long x : m_e)
        m_max = std::max(m_max, std::labs(x));
}

long migration_schedule::e(long j) const
{
    if (j < 1)
        throw config_invalid("migration steps start at 1");
    if (j <= static_cast<long>(m_e.size()))
        return m_e[static_cast<std::size_t>(j - 1)];
    return m_tail;
}

long migration_schedule::mean(long x0, long j) const
{
    long mu = x0;
    for (long i = 1; i <= j; ++i)
        mu += e(i);
    return mu;
}

gw_trajectory signed_gw_simulate(long x0, const migration_schedule& schedule, long steps, std::uint64_t seed)
{
    if (steps < 0)
        throw config_invalid("steps must be nonnegative");
    counter_rng rng(hash_key(seed, 0x6a11ULL));
    gw_trajectory t;
    t.x0 = x0;
    t.x.reserve(static_cast<std::size_t>(steps + 1));
    t.x.push_back(x0);
    long cur = x0;
    for (long j = 1; j <= steps; ++j) {
        long children = negative_binomial_half(std::labs(cur), rng);
        cur = (cur < 0 ? -children : children) + schedule.e(j);
        t.x.push_back(cur);
    }
    return t;
}

double gw_law::pmf(long k) const
{
    if (k < 0)
        return 0.0;
    if (k == 0)
        return 1.0 - survival;
    return survival * p * std::pow(1.0 - p, static_cast<double>(k - 1));
}

gw_law gw_exact_law(long j, gw_variant variant)
{
    if (j < 0)
        throw config_invalid("generation must be nonnegative");
    const double p = 1.0 / static_cast<double>(j + 1);
    if (variant == gw_variant::no_migration)
        return {p, p};
    return {1.0, p};
}

double tail_envelope(long j, long e_max, long x0, double t, double c, double big_c)
{
    if (t < 0.0 || e_max < 1)
        throw config_invalid("envelope needs t >= 0 and e_max >= 1");
    if (t == 0.0)
        return big_c;
    if (j <= 0)
        return 0.0; // X_0 is deterministic
    const double jj = static_cast<double>(j);
    return big_c *
           std::exp(-c * t * t / (jj * (jj * static_cast<double>(e_max) + std::fabs(static_cast<double>(x0)) + t)));
}

double two_sided_tail(const std::vector<double>& deviations, double t)
{
    if (deviations.empty())
        return 0.0;
    long up = 0, down = 0;
    for (double d : deviations) {
        up += d >= t ? 1 : 0;
        down += d <= -t ? 1 : 0;
    }
    return static_cast<double>(std::max(up, down)) / static_cast<double>(deviations.size());
}

envelope_fit calibrate_envelope(const std::vector<double>& deviations, long j, long e_max, long x0,
                                const std::vector<double>& ts, double big_c, double safety)
{
    if (j < 1 || e_max < 1 || !(big_c > 1.0))
        throw config_invalid("calibration needs j >= 1, e_max >= 1 and C > 1");
    const double jj = static_cast<double>(j);
    double c = std::numeric_limits<double>::infinity();
    for (double t : ts) {
        if (t <= 0.0)
            continue;
        double tail = two_sided_tail(deviations, t);
        if (tail <= 0.0)
            continue;
        double scale = t * t / (jj * (jj * static_cast<double>(e_max) + std::fabs(static_cast<double>(x0)) + t));
        c = std::min(c, std::log(big_c / tail) / scale);
    }
    if (!std::isfinite(c))
        c = 1.0;
    return {safety * c, big_c};
}

double janson_bound(double p_star, double nu, double t)
{
    if (!(p_star > 0.0) || !(nu > 0.0) || t < 0.0)
        throw config_invalid("Janson bound needs p* > 0, nu > 0, t >= 0");
    return std::exp(-p_star * t * t / (2.0 * (nu + t)));
}

long sample_geometric_sum(const std::vector<double>& p, std::uint64_t seed)
{
    counter_rng rng(hash_key(seed, 0x1a550ULL));
    long total = 0;
    for (double pi : p)
        total += 1 + geometric(pi, rng.uniform());
    return total;
}

} // namespace arwlab
