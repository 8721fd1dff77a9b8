#include "arwlab/lp_estimators.hpp"
#include "arwlab/error.hpp"
#include "arwlab/parallel.hpp"
#include "arwlab/random.hpp"

#include <cmath>

namespace arwlab {

greedy_endpoint sample_greedy_endpoint(double lambda, long block, long n, std::uint64_t seed)
{
    // Each step is anchored at the lowest diagonal in use, which keeps the work
    // independent of how far right the path has drifted.
    realization lp = realization::anchored(seed, lambda);
    infection_path path = greedy_path({0, 0}, block, 0, n, lp);
    return {path.cells.back().s, path.cells.back().r};
}

rho_star_estimate estimate_rho_star(double lambda, long block, long n, long replicas, std::uint64_t seed,
                                    unsigned jobs)
{
    if (block < 1 || n < block || n % block != 0)
        throw config_invalid("horizon must be a positive multiple of the block length");
    if (replicas < 1 || !(lambda > 0.0))
        throw config_invalid("need replicas >= 1 and lambda > 0");
    auto ends = run_replicas(replicas, jobs, [&](long i) {
        return sample_greedy_endpoint(lambda, block, n, derive_seed(seed, static_cast<std::uint64_t>(i)));
    });
    rho_star_estimate est;
    const double nn = static_cast<double>(n);
    for (const auto& e : ends) {
        est.rates.push_back(static_cast<double>(e.s) / nn);
        est.column_ratios.push_back(static_cast<double>(e.r) / (nn * nn / 2.0));
    }
    est.greedy = estimate_mean(est.rates, "greedy", seed);
    est.mean_column_ratio = mean(est.column_ratios);
    if (block <= full_set_block_limit)
        est.full_set = full_set_rate(lambda, block, replicas, hash_key(seed, 0xf0115e7ULL), jobs);
    return est;
}

std::vector<long> sample_max_rows(double lambda, long n, long replicas, std::uint64_t seed, unsigned jobs,
                                  std::uint64_t cell_budget)
{
    return run_replicas(replicas, jobs, [&](long i) {
        realization lp = realization::sampled(derive_seed(seed, static_cast<std::uint64_t>(i)), lambda);
        return infection_set_after({0, 0}, 0, n, lp, cell_budget).max_row();
    });
}

density_estimate full_set_rate(double lambda, long k, long replicas, std::uint64_t seed, unsigned jobs)
{
    auto rows = sample_max_rows(lambda, k, replicas, seed, jobs);
    std::vector<double> rates;
    for (long x : rows)
        rates.push_back(static_cast<double>(x) / static_cast<double>(k));
    return estimate_mean(rates, "full-set", seed);
}

namespace {

probability_estimate frequency(const std::vector<char>& hits)
{
    probability_estimate e;
    e.replicas = static_cast<long>(hits.size());
    for (char h : hits)
        e.hits += h ? 1 : 0;
    e.p = e.replicas ? static_cast<double>(e.hits) / static_cast<double>(e.replicas) : 0.0;
    e.std_error = proportion_std_error(e.p, e.replicas);
    return e;
}

} // namespace

namespace {

// Whether `cur` (a set at step k0) infects some cell in row >= target within n more steps.
// Rows never decrease, so rows that cannot climb to the target in the remaining steps are
// dropped, and the run stops as soon as the target is out of reach.
bool reaches_row(infection_set cur, long k0, long n, long target, const realization& lp,
                 std::uint64_t cell_budget)
{
    for (long k = 0;; ++k) {
        if (cur.empty() || cur.max_row() + (n - k) < target)
            return false;
        if (cur.max_row() >= target)
            return true;
        long keep = target - (n - k);
        if (keep > cur.min_row()) {
            std::vector<std::vector<column_range>> rows;
            for (long s = keep; s <= cur.max_row(); ++s)
                rows.push_back(cur.row(s));
            cur = infection_set::from_rows(cur.step(), keep, std::move(rows));
        }
        cur = advance(cur, lp.step(k0 + k + 1), cell_budget);
    }
}

} // namespace

probability_estimate bad_event_prob(bad_event_kind kind, double rho, long n, long replicas, std::uint64_t seed,
                                    double lambda, unsigned jobs, std::uint64_t cell_budget)
{
    if (!(rho > 0.0) || n < 1 || replicas < 1)
        throw config_invalid("bad-event estimate needs rho > 0, n >= 1, replicas >= 1");
    const double rise = rho * static_cast<double>(n);
    if (rise > static_cast<double>(n)) {
        // rows rise at most one per step
        return {0.0, 0.0, 0, replicas};
    }
    const long climb = static_cast<long>(std::ceil(rise));
    auto hits = run_replicas(replicas, jobs, [&](long i) -> char {
        realization lp = realization::sampled(derive_seed(seed, static_cast<std::uint64_t>(i)), lambda);
        if (kind == bad_event_kind::cell)
            return reaches_row(infection_set(0, {0, 0}), 0, n, climb, lp, cell_budget) ? 1 : 0;
        // any cell of the n^2 x n box anchored at (0,0)
        for (long s = 0; s < n; ++s) {
            std::vector<std::vector<column_range>> rows{{column_range{0, n * n - 1}}};
            if (reaches_row(infection_set::from_rows(0, s, std::move(rows)), 0, n, s + climb, lp, cell_budget))
                return 1;
        }
        return 0;
    });
    return frequency(hits);
}

box_bounds coverage_box(long n, double rho, double delta)
{
    const double nn = static_cast<double>(n);
    box_bounds b;
    b.col_lo = static_cast<long>(std::ceil(rho / 2.0 * (1.0 - delta) * nn * nn));
    b.col_hi = static_cast<long>(std::floor(rho / 2.0 * (1.0 + delta) * nn * nn));
    b.row_lo = static_cast<long>(std::ceil(rho * (1.0 - delta) * nn));
    b.row_hi = static_cast<long>(std::floor(rho * (1.0 + delta) * nn));
    return b;
}

bool covers_box(const infection_set& set, const box_bounds& box)
{
    for (long s = box.row_lo; s <= box.row_hi; ++s) {
        bool whole = false;
        for (const auto& run : set.row(s))
            if (run.lo <= box.col_lo && run.hi >= box.col_hi)
                whole = true;
        if (!whole)
            return false;
    }
    return true;
}

probability_estimate box_coverage(long n, double rho, double delta, long replicas, std::uint64_t seed,
                                  double lambda, unsigned jobs, std::uint64_t cell_budget)
{
    if (n < 2 || n % 2 != 0 || !(rho > 0.0) || delta < 0.0 || rho * (1.0 + delta) > 1.0)
        throw config_invalid("box coverage needs even n, rho > 0, delta >= 0 and rho(1+delta) <= 1");
    const box_bounds box = coverage_box(n, rho, delta);
    auto hits = run_replicas(replicas, jobs, [&](long i) -> char {
        realization lp = realization::sampled(derive_seed(seed, static_cast<std::uint64_t>(i)), lambda);
        return covers_box(infection_set_after({0, 0}, 0, n, lp, cell_budget), box) ? 1 : 0;
    });
    return frequency(hits);
}

} // namespace arwlab
