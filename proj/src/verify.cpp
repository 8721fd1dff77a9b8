#include "arwlab/verify.hpp"
#include "arwlab/branching.hpp"
#include "arwlab/engine.hpp"
#include "arwlab/error.hpp"
#include "arwlab/random.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace arwlab {

namespace {

check_result fail(check_result r, const std::string& why)
{
    r.passed = false;
    r.detail = why;
    return r;
}

double pick_lambda(counter_rng& rng)
{
    static const double choices[] = {0.5, 1.0, 2.0};
    return choices[rng.below(3)];
}

std::vector<lp_cell> sorted_cells(const infection_set& s)
{
    std::vector<lp_cell> c = s.cells();
    std::sort(c.begin(), c.end());
    return c;
}

} // namespace

class_instance random_class_instance(std::uint64_t seed, long max_n)
{
    counter_rng rng(hash_key(seed, 0xc1a55ULL));
    double lambda = pick_lambda(rng);
    long n = 1 + rng.below(max_n);
    std::vector<int> states;
    for (long v = 0; v <= n; ++v)
        states.push_back(static_cast<int>(rng.below(3)));
    odometer_class_key key{configuration(0, states), rng.below(7), -2 + rng.below(6), n};
    return {stack_source::seeded(hash_key(seed, 0x57ac4ULL), lambda), key};
}

check_result verify_correspondence_instance(const class_instance& inst)
{
    check_result r{"correspondence", true, ""};
    const auto& src = inst.src;
    const auto& key = inst.key;
    try {
        enumeration_options canon;
        canon.policy = sleep_run_policy::canonical;
        auto odos = enumerate_stable_odometers(src, key, enumeration_mode::stable, {}, canon);
        auto every = enumerate_stable_odometers(src, key);
        realization lp = theta(src, key);
        auto paths = enumerate_infection_paths(lp, key.n);
        if (count_infection_paths(lp, key.n) != paths.size())
            return fail(r, "path count disagrees with path enumeration");
        if (odos.size() != paths.size())
            return fail(r, "canonical odometers " + std::to_string(odos.size()) + " vs paths " +
                               std::to_string(paths.size()));
        std::set<std::vector<lp_cell>> images;
        for (const auto& u : odos)
            images.insert(phi(u, src, key).cells);
        if (images.size() != odos.size())
            return fail(r, "phi is not injective on canonical odometers");
        for (const auto& u : every)
            if (!images.count(phi(u, src, key).cells))
                return fail(r, "phi image of a sleep-run mate is missing");
        for (const auto& p : paths) {
            if (!images.count(p.cells))
                return fail(r, "infection path outside the image of phi");
            extended_odometer u = chi(p, src, key);
            if (!std::binary_search(odos.begin(), odos.end(), u))
                return fail(r, "chi left the canonical class");
        }
        r.detail = std::to_string(odos.size()) + " odometers";
    } catch (const error& e) {
        return fail(r, e.what());
    }
    return r;
}

check_result verify_abelian_instance(std::uint64_t seed, long max_n, int max_count)
{
    check_result r{"abelian", true, ""};
    counter_rng rng(hash_key(seed, 0xabe1ULL));
    double lambda = pick_lambda(rng);
    long n = 1 + rng.below(max_n);
    std::vector<int> states;
    for (long v = 0; v <= n; ++v)
        states.push_back(static_cast<int>(rng.below(max_count + 1)));
    configuration sigma(0, states);
    stack_source src = stack_source::seeded(hash_key(seed, 0x5eedULL), lambda);
    region where = region::interval(0, n);
    auto a = stabilize(sigma, where, src, toppling_policy::sweep);
    auto b = stabilize(sigma, where, src, toppling_policy::random_site, default_instruction_budget,
                       hash_key(seed, 0x7a4dULL));
    if (!(a.odometer == b.odometer))
        return fail(r, "odometers differ");
    if (!(a.final_config == b.final_config))
        return fail(r, "final configurations differ");
    if (a.emitted_left != b.emitted_left || a.emitted_right != b.emitted_right || a.tau != b.tau)
        return fail(r, "emission or instruction counts differ");
    return r;
}

check_result verify_least_action_instance(std::uint64_t seed, long max_n)
{
    check_result r{"least-action", true, ""};
    counter_rng rng(hash_key(seed, 0x1ea5ULL));
    double lambda = pick_lambda(rng);
    long n = 2 + rng.below(std::max(1L, max_n - 1));
    std::vector<int> states(static_cast<std::size_t>(n + 1), 0);
    long mass = 0;
    for (long v = 1; v < n; ++v) {
        states[static_cast<std::size_t>(v)] = static_cast<int>(rng.below(3));
        mass += states[static_cast<std::size_t>(v)];
    }
    configuration sigma(0, states);
    stack_source src = stack_source::seeded(hash_key(seed, 0x5eedULL), lambda);
    try {
        auto truth = stabilize(sigma, region::interval(1, n - 1), src);
        std::vector<long> tv{0};
        for (long v = 1; v < n; ++v)
            tv.push_back(truth.odometer(v));
        tv.push_back(0);
        extended_odometer true_u(0, tv);

        // odometers on [1,n-1]: u(0) = u(n) = 0, so f0 = -lt(u,1) lies in [-mass, 0]
        odometer_class_key key{sigma, 0, 0, n};
        weak_caps caps{0, 0, -mass, 0};
        enumeration_options opts;
        opts.last_value = 0;
        auto all = enumerate_stable_odometers(src, key, enumeration_mode::weak, caps, opts);
        long seen = 0;
        bool found_truth = false;
        for (const auto& u : all) {
            ++seen;
            if (!stability_check(u, sigma, src, 1, n - 1, stability_mode::weak))
                return fail(r, "enumerated odometer is not weakly stable");
            found_truth = found_truth || u == true_u;
            for (long v = 1; v < n; ++v)
                if (true_u(v) > u(v))
                    return fail(r, "true odometer exceeds a weakly stable odometer at site " + std::to_string(v));
            long left = mass - src.signed_lr_counts(1, u(1)).lefts - src.signed_lr_counts(n - 1, u(n - 1)).rights;
            if (left > truth.sleepers)
                return fail(r, "a weakly stable odometer leaves more particles than the truth");
        }
        if (!found_truth)
            return fail(r, "true odometer missing from the weak enumeration");
        r.detail = std::to_string(seen) + " weakly stable odometers";
    } catch (const error& e) {
        return fail(r, e.what());
    }
    return r;
}

bool forward_connected(const infection_set& set, long base_row)
{
    if (set.empty())
        return true;
    for (long s = set.min_row(); s <= set.max_row(); ++s) {
        const auto& runs = set.row(s);
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (s == base_row && i == 0)
                continue; // leftmost cell of the base row
            // interior cells of a run have their left neighbour
            if (!set.contains(runs[i].lo, s - 1))
                return false;
        }
    }
    return true;
}

bool backward_connected(const infection_set& set, long top_row)
{
    if (set.empty())
        return true;
    for (long s = set.min_row(); s <= set.max_row(); ++s) {
        const auto& runs = set.row(s);
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if ((s == top_row && i == 0) || runs[i].lo == 0)
                continue;
            if (!set.contains(runs[i].lo - 1, s + 1))
                return false;
        }
    }
    return true;
}

bool sets_intersect(const infection_set& a, const infection_set& b)
{
    if (a.empty() || b.empty())
        return false;
    long lo = std::max(a.min_row(), b.min_row()), hi = std::min(a.max_row(), b.max_row());
    for (long s = lo; s <= hi; ++s) {
        const auto& x = a.row(s);
        const auto& y = b.row(s);
        std::size_t i = 0, j = 0;
        while (i < x.size() && j < y.size()) {
            if (x[i].hi < y[j].lo)
                ++i;
            else if (y[j].hi < x[i].lo)
                ++j;
            else
                return true;
        }
    }
    return false;
}

crossing_outcome crossing_instance(std::uint64_t seed)
{
    counter_rng rng(hash_key(seed, 0xc2055ULL));
    realization lp = realization::sampled(hash_key(seed, 0x1ULL), pick_lambda(rng));
    const long t = rng.below(3), r0 = rng.below(4);
    const long n = 3 + rng.below(10), back = 1 + rng.below(6);
    infection_set fwd = infection_set_after({r0, t}, 0, n, lp);
    // target: a cell reachable from another start, in a row at or above t
    lp_cell other{rng.below(4), t + rng.below(3)};
    auto cand = infection_set_after(other, 0, n + back, lp).cells();
    if (cand.empty())
        return {};
    lp_cell target = cand[static_cast<std::size_t>(rng.below(static_cast<long>(cand.size())))];
    infection_set bwd = backward_infection_set(target, n + back, back, lp);
    const long tp = target.s;
    if (fwd.row(t).empty() || fwd.row(tp).empty() || bwd.row(tp).empty() || bwd.row(t).empty())
        return {};
    const long x1 = fwd.leftmost(t), y1 = fwd.rightmost(tp);
    const long x2 = bwd.leftmost(tp), y2 = bwd.rightmost(t);
    crossing_outcome out;
    out.detected = x1 <= y2 && x2 <= y1;
    if (out.detected)
        out.intersect = sets_intersect(fwd, bwd);
    return out;
}

check_result verify_connectivity_instance(std::uint64_t seed, long max_n)
{
    check_result r{"connectivity", true, ""};
    counter_rng rng(hash_key(seed, 0xc0aaULL));
    realization lp = realization::sampled(hash_key(seed, 0x2ULL), pick_lambda(rng));
    lp_cell start{rng.below(5), rng.below(5)};
    const long n = 1 + rng.below(max_n);
    infection_set fwd = infection_set_after(start, 0, n, lp);
    if (!forward_connected(fwd, start.s))
        return fail(r, "forward set fails the south/west test");
    auto cells = fwd.cells();
    lp_cell target = cells[static_cast<std::size_t>(rng.below(static_cast<long>(cells.size())))];
    const long back = 1 + rng.below(n);
    infection_set bwd = backward_infection_set(target, n, back, lp);
    if (!backward_connected(bwd, target.s))
        return fail(r, "backward set fails the west/northwest test");
    return r;
}

check_result verify_shift_instance(std::uint64_t seed, long n)
{
    check_result r{"shift-coupling", true, ""};
    counter_rng rng(hash_key(seed, 0x5b1fULL));
    realization base = realization::sampled(hash_key(seed, 0x3ULL), pick_lambda(rng));
    lp_cell start{rng.below(7), rng.below(5)};
    shift_coupled sc = shift_coupling(start, base, n, hash_key(seed, 0x4ULL));
    auto coupled = infection_sets(start, 0, n, sc.coupled);
    auto plain = infection_sets({0, 0}, 0, n, base);
    for (long i = 0; i <= n; ++i) {
        std::vector<lp_cell> moved;
        for (const auto& c : plain[static_cast<std::size_t>(i)].cells())
            moved.push_back({c.r + sc.r[static_cast<std::size_t>(i)], c.s + start.s});
        std::sort(moved.begin(), moved.end());
        if (moved != sorted_cells(coupled[static_cast<std::size_t>(i)]))
            return fail(r, "shifted set differs at step " + std::to_string(i));
    }
    return r;
}

check_result verify_reverse_instance(std::uint64_t seed, long max_m, long* compared)
{
    check_result r{"reverse-coupling", true, ""};
    counter_rng rng(hash_key(seed, 0x4e7eULL));
    realization base = realization::sampled(hash_key(seed, 0x5ULL), pick_lambda(rng));
    const long u = rng.below(13), t = rng.below(6), m = 1 + rng.below(max_m);
    reverse_coupled rc = reverse_coupling(u, t, m, base, hash_key(seed, 0x6ULL));
    auto fwd = infection_sets({0, 0}, 0, m, base);
    auto bwd = backward_infection_sets({u, t}, m, m, rc.coupled);
    long used = 0;
    for (long i = 0; i <= m; ++i) {
        const long z = rc.z[static_cast<std::size_t>(i)];
        if (z < 0)
            break;
        std::vector<lp_cell> mapped;
        for (const auto& c : fwd[static_cast<std::size_t>(i)].cells())
            if (c.s <= t)
                mapped.push_back({z + c.r + c.s, t - c.s});
        std::sort(mapped.begin(), mapped.end());
        ++used;
        if (mapped != sorted_cells(bwd[static_cast<std::size_t>(i)]))
            return fail(r, "reversed set differs at step " + std::to_string(i));
    }
    if (compared)
        *compared = used;
    return r;
}

namespace {

double correlation(const std::vector<double>& x, const std::vector<double>& y)
{
    double mx = mean(x), my = mean(y), sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
}

check_result p_value_check(const std::string& name, const test_result& t, double alpha)
{
    std::ostringstream os;
    os << "statistic=" << t.statistic << " dof=" << t.dof << " p=" << t.p_value;
    return {name, t.p_value >= alpha, os.str()};
}

check_result correlation_check(const std::string& name, const std::vector<double>& x,
                               const std::vector<double>& y)
{
    double c = correlation(x, y);
    double limit = 3.0 / std::sqrt(static_cast<double>(x.size()));
    std::ostringstream os;
    os << "corr=" << c << " limit=" << limit << " pairs=" << x.size();
    return {name, std::fabs(c) <= limit, os.str()};
}

} // namespace

std::vector<check_result> theta_distribution_checks(long samples, std::uint64_t seed, double lambda,
                                                    double alpha)
{
    constexpr long diagonals = 25;
    std::vector<long> hist;
    long ones = 0, bits = 0, taken = 0;
    std::vector<double> r1, r2, b1, b2, ra, rb;
    for (std::uint64_t inst = 0; taken < samples; ++inst) {
        counter_rng rng(hash_key(seed, 0x7e7aULL, inst));
        std::vector<int> states;
        for (int v = 0; v <= 2; ++v)
            states.push_back(static_cast<int>(rng.below(3)));
        odometer_class_key key{configuration(0, states), rng.below(7), -2 + rng.below(6), 2};
        stack_source src = stack_source::seeded(derive_seed(seed, inst), lambda);
        realization lp = theta(src, key);
        for (long j = 0; j < diagonals && taken < samples; ++j) {
            for (long v = 1; v <= 2; ++v) {
                const step_primitives& p = lp.step(v);
                long w = p.width(j);
                if (static_cast<long>(hist.size()) <= w)
                    hist.resize(static_cast<std::size_t>(w + 1), 0);
                ++hist[static_cast<std::size_t>(w)];
                for (long i = 0; i <= w; ++i) {
                    ones += p.marker(j, i) ? 1 : 0;
                    ++bits;
                }
                ++taken;
            }
            r1.push_back(static_cast<double>(lp.step(1).width(j)));
            r2.push_back(static_cast<double>(lp.step(2).width(j)));
            b1.push_back(lp.step(1).marker(j, 0) ? 1.0 : 0.0);
            b2.push_back(lp.step(2).marker(j, 0) ? 1.0 : 0.0);
            if (j + 1 < diagonals) {
                ra.push_back(static_cast<double>(lp.step(1).width(j)));
                rb.push_back(static_cast<double>(lp.step(1).width(j + 1)));
            }
        }
    }
    std::vector<double> geo;
    for (std::size_t k = 0; k < hist.size(); ++k)
        geo.push_back(std::ldexp(1.0, -static_cast<int>(k) - 1));
    const double p = lambda / (1.0 + lambda);
    std::vector<check_result> out;
    out.push_back(p_value_check("widths ~ Geo(1/2)", chi_square_test(hist, geo), alpha));
    out.push_back(
        p_value_check("markers ~ Bernoulli(lambda/(1+lambda))", chi_square_test({bits - ones, ones}, {1.0 - p, p}), alpha));
    out.push_back(correlation_check("width correlation across steps", r1, r2));
    out.push_back(correlation_check("marker correlation across steps", b1, b2));
    out.push_back(correlation_check("width correlation across diagonals", ra, rb));
    return out;
}

namespace {

// Chi-square of samples of a law on {0,1,...} with the given pmf.
test_result law_test(const std::vector<long>& values, const gw_law& law, bool conditional)
{
    std::vector<long> counts;
    for (long x : values) {
        if (conditional && x <= 0)
            continue;
        if (x < 0)
            throw error("negative value in a nonnegative law");
        if (static_cast<long>(counts.size()) <= x)
            counts.resize(static_cast<std::size_t>(x + 1), 0);
        ++counts[static_cast<std::size_t>(x)];
    }
    std::vector<long> obs;
    std::vector<double> probs;
    for (std::size_t k = conditional ? 1 : 0; k < counts.size(); ++k) {
        obs.push_back(counts[k]);
        probs.push_back(conditional ? law.pmf(static_cast<long>(k)) / law.survival : law.pmf(static_cast<long>(k)));
    }
    return chi_square_test(obs, probs);
}

} // namespace

std::vector<check_result> gw_law_checks(long runs, std::uint64_t seed, double alpha)
{
    constexpr long horizon = 9;
    std::vector<std::vector<long>> plain(horizon + 1), immig(horizon + 1);
    for (long i = 0; i < runs; ++i) {
        auto a = signed_gw_simulate(1, migration_schedule::constant(0), horizon, derive_seed(seed, 2 * i));
        auto b = signed_gw_simulate(1, migration_schedule::constant(1), horizon, derive_seed(seed, 2 * i + 1));
        for (long j = 0; j <= horizon; ++j) {
            plain[static_cast<std::size_t>(j)].push_back(a.x[static_cast<std::size_t>(j)]);
            immig[static_cast<std::size_t>(j)].push_back(b.x[static_cast<std::size_t>(j)]);
        }
    }
    std::vector<check_result> out;
    for (long j : {1L, 4L, 9L}) {
        gw_law law = gw_exact_law(j, gw_variant::no_migration);
        long alive = 0;
        for (long x : plain[static_cast<std::size_t>(j)])
            alive += x > 0 ? 1 : 0;
        double phat = static_cast<double>(alive) / static_cast<double>(runs);
        double se = proportion_std_error(law.survival, runs);
        std::ostringstream os;
        os << "survival=" << phat << " exact=" << law.survival << " se=" << se;
        out.push_back({"survival at j=" + std::to_string(j), std::fabs(phat - law.survival) <= 3.0 * se, os.str()});
        out.push_back(p_value_check("no-migration law at j=" + std::to_string(j),
                                    law_test(plain[static_cast<std::size_t>(j)], law, false), alpha));
        out.push_back(p_value_check("conditional law 1+Geo(1/(j+1)) at j=" + std::to_string(j),
                                    law_test(plain[static_cast<std::size_t>(j)], law, true), alpha));
    }
    for (long j : {1L, 5L, 9L}) {
        gw_law law = gw_exact_law(j, gw_variant::unit_immigration);
        out.push_back(p_value_check("unit-immigration law at j=" + std::to_string(j),
                                    law_test(immig[static_cast<std::size_t>(j)], law, false), alpha));
    }
    return out;
}

check_result janson_instance(std::uint64_t seed, long samples)
{
    counter_rng rng(hash_key(seed, 0x1a2aULL));
    const long terms = 1 + rng.below(20);
    std::vector<double> p;
    double ex = 0.0;
    for (long i = 0; i < terms; ++i) {
        p.push_back(0.05 + 0.9 * rng.uniform());
        ex += 1.0 / p.back();
    }
    const double p_star = *std::min_element(p.begin(), p.end());
    const double nu_up = ex * (1.0 + 0.5 * rng.uniform());
    const double nu_lo = std::max(1e-9, ex * (1.0 - 0.5 * rng.uniform()));
    std::vector<long> x;
    for (long i = 0; i < samples; ++i)
        x.push_back(sample_geometric_sum(p, derive_seed(hash_key(seed, 0x1a2bULL), static_cast<std::uint64_t>(i))));
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(samples);
    check_result r{"Janson bound", true, ""};
    const long top = x.back();
    long worst_t = -1;
    double worst_ratio = 0.0;
    for (long t = 0; t <= top; ++t) {
        const double td = static_cast<double>(t);
        // P[X - nu_up >= t]
        auto up_it = std::lower_bound(x.begin(), x.end(), static_cast<long>(std::ceil(nu_up + td)));
        double up = static_cast<double>(x.end() - up_it) / n;
        // P[X - nu_lo <= -t]
        auto lo_it = std::upper_bound(x.begin(), x.end(), static_cast<long>(std::floor(nu_lo - td)));
        double lo = static_cast<double>(lo_it - x.begin()) / n;
        double bu = janson_bound(p_star, nu_up, td), bl = janson_bound(p_star, nu_lo, td);
        double ratio = std::max(up / bu, lo / bl);
        if (ratio > worst_ratio) {
            worst_ratio = ratio;
            worst_t = t;
        }
    }
    std::ostringstream os;
    os << "terms=" << terms << " p*=" << p_star << " worst empirical/bound=" << worst_ratio << " at t=" << worst_t;
    r.detail = os.str();
    r.passed = worst_ratio <= 1.0;
    return r;
}

double rho_upper_bound(double lambda)
{
    if (!(lambda > 0.0))
        throw config_invalid("lambda must be positive");
    const double l0 = lambda / (1.0 + lambda);
    auto g = [l0](double rho) {
        double tail = rho < 1.0 ? (1.0 - rho) * (1.0 - std::log1p(-rho)) : 0.0;
        return std::log(2.0) + rho * std::log(l0) + tail;
    };
    if (g(1.0) >= 0.0)
        return 1.0;
    boost::math::tools::eps_tolerance<double> tol(50);
    auto [a, b] = boost::math::tools::bisect(g, 0.0, 1.0, tol);
    return 0.5 * (a + b);
}

double rho_lower_bound(double lambda)
{
    return lambda / (0.5 + lambda);
}

} // namespace arwlab
