#include "arwlab/engine.hpp"
#include "arwlab/error.hpp"
#include "arwlab/random.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <deque>

namespace arwlab {

namespace {

constexpr long no_site = LONG_MIN;

// One lattice site. Boundary cells flank the active range: they absorb (interval),
// wrap (cycle) or trigger growth (unbounded).
struct site_cell {
    long odo = 0;
    std::uint64_t key = 0;
    int cnt = 0;
    int asleep = 0; // 0 or 1, so that the site is unstable iff cnt > asleep
    int queued = 0;
};

class lattice_machine {
public:
    lattice_machine(const stack_source& src, const region& where, bool unbounded, std::uint64_t budget)
        : m_src(src), m_cyclic(where.shape == region::kind::cycle), m_unbounded(unbounded),
          m_budget(budget), m_sleep_thr(src.is_seeded() ? src.sleep_threshold() : 0),
          m_left_thr(src.is_seeded() ? src.left_threshold() : 0)
    {
        allocate(where.a, where.b);
        visited_lo = where.a;
        visited_hi = where.a;
    }

    void set_span_cap(long cap) { m_span_cap = cap; }

    void load(const configuration& sigma, const extended_odometer* start)
    {
        if (!sigma.empty_support()) {
            bool any = false;
            for (long v = sigma.first(); v <= sigma.last(); ++v) {
                int s = sigma.state(v);
                if (s == 0)
                    continue;
                if (m_unbounded)
                    ensure(v);
                if (v < m_lo || v > m_hi)
                    throw config_invalid("configuration extends beyond the region");
                site_cell& c = at(v);
                c.cnt = s == sleeping_state ? 1 : s;
                c.asleep = s == sleeping_state;
                if (!any)
                    visited_lo = visited_hi = v, any = true;
                visited_lo = std::min(visited_lo, v);
                visited_hi = std::max(visited_hi, v);
            }
        }
        if (start) {
            for (long v = start->first(); v <= start->last(); ++v) {
                long value = (*start)(v);
                if (value == 0)
                    continue;
                if (m_unbounded)
                    ensure(v);
                if (v < m_lo || v > m_hi || value < 0)
                    throw config_invalid("starting odometer must be nonnegative on the region");
                at(v).odo = value;
            }
        }
    }

    site_cell& at(long v) { return m_cells[static_cast<std::size_t>(v - m_lo + 1)]; }
    const site_cell& at(long v) const { return m_cells[static_cast<std::size_t>(v - m_lo + 1)]; }
    bool unstable(long v) const
    {
        const site_cell& c = at(v);
        return c.cnt >= 2 || (c.cnt == 1 && !c.asleep);
    }

    instruction next_instruction(long v, site_cell& c)
    {
        if (tau >= m_budget)
            throw budget_exceeded(tau);
        ++tau;
        long k = ++c.odo;
        if (m_src.is_seeded()) {
            std::uint64_t w = stack_source::hash_word(c.key, k);
            return w < m_sleep_thr ? instruction::sleep : (w < m_left_thr ? instruction::left : instruction::right);
        }
        return m_src.at(v, k);
    }

    // Moves a particle from v towards w; returns the receiving in-range site or no_site.
    long deliver(long w)
    {
        if (w < m_lo || w > m_hi) {
            if (m_cyclic) {
                w = w < m_lo ? m_hi : m_lo;
            } else if (m_unbounded) {
                ensure(w);
            } else {
                ++(w < m_lo ? emitted_left : emitted_right);
                return no_site;
            }
        }
        site_cell& d = at(w);
        ++d.cnt;
        d.asleep = 0;
        if (w < visited_lo)
            visited_lo = w;
        if (w > visited_hi)
            visited_hi = w;
        return w;
    }

    // Executes one instruction at v. Returns the receiving site or no_site.
    long topple(long v)
    {
        site_cell& c = at(v);
        instruction in = next_instruction(v, c);
        if (in == instruction::sleep) {
            if (c.cnt == 1)
                c.asleep = 1;
            return no_site;
        }
        --c.cnt;
        return deliver(in == instruction::left ? v - 1 : v + 1);
    }

    // Depth-first order: follow the particle that just moved while its previous site is
    // stable; other unstable sites wait on a stack.
    void run_chase()
    {
        std::vector<long> stack;
        for (long v = m_lo; v <= m_hi; ++v)
            if (unstable(v)) {
                at(v).queued = 1;
                stack.push_back(v);
            }
        if (m_src.is_seeded())
            chase_seeded(stack);
        else
            chase_generic(stack);
    }

    void run_fifo()
    {
        std::deque<long> queue;
        for (long v = m_lo; v <= m_hi; ++v)
            if (unstable(v)) {
                at(v).queued = 1;
                queue.push_back(v);
            }
        while (!queue.empty()) {
            long v = queue.front();
            queue.pop_front();
            at(v).queued = 0;
            while (unstable(v)) {
                long w = topple(v);
                if (w != no_site && w != v && !at(w).queued && unstable(w)) {
                    at(w).queued = 1;
                    queue.push_back(w);
                }
            }
        }
    }

    void run_sweep()
    {
        bool changed = true;
        while (changed) {
            changed = false;
            for (long v = m_lo; v <= m_hi; ++v) {
                if (unstable(v)) {
                    topple(v);
                    changed = true;
                }
            }
        }
    }

    void run_random(std::uint64_t seed)
    {
        counter_rng rng(seed);
        std::vector<long> pool;
        std::vector<long> where(static_cast<std::size_t>(m_hi - m_lo + 1), -1);
        auto slot = [&](long v) -> long& { return where[static_cast<std::size_t>(v - m_lo)]; };
        auto refresh = [&](long v) {
            bool u = unstable(v);
            if (u && slot(v) < 0) {
                slot(v) = static_cast<long>(pool.size());
                pool.push_back(v);
            } else if (!u && slot(v) >= 0) {
                long back = pool.back();
                pool[static_cast<std::size_t>(slot(v))] = back;
                slot(back) = slot(v);
                pool.pop_back();
                slot(v) = -1;
            }
        };
        for (long v = m_lo; v <= m_hi; ++v)
            refresh(v);
        while (!pool.empty()) {
            long v = pool[static_cast<std::size_t>(rng.below(static_cast<long>(pool.size())))];
            long w = topple(v);
            refresh(v);
            if (w != no_site)
                refresh(w);
        }
    }

    stabilization_result result() const
    {
        stabilization_result r;
        r.tau = tau;
        r.emitted_left = emitted_left;
        r.emitted_right = emitted_right;
        r.visited_lo = visited_lo;
        r.visited_hi = visited_hi;
        std::vector<long> odo;
        std::vector<int> states;
        for (long v = m_lo; v <= m_hi; ++v) {
            const site_cell& c = at(v);
            odo.push_back(c.odo);
            states.push_back(c.asleep ? sleeping_state : c.cnt);
            r.sleepers += c.asleep;
        }
        r.odometer = extended_odometer(m_lo, std::move(odo));
        r.final_config = configuration(m_lo, std::move(states));
        return r;
    }

    std::uint64_t tau = 0;
    std::uint64_t emitted_left = 0;
    std::uint64_t emitted_right = 0;
    long visited_lo = 0;
    long visited_hi = 0;

private:
    void chase_generic(std::vector<long>& stack)
    {
        while (!stack.empty()) {
            long v = stack.back();
            stack.pop_back();
            at(v).queued = 0;
            while (unstable(v)) {
                long w = topple(v);
                if (w == no_site || w == v || !unstable(w))
                    continue;
                if (unstable(v)) {
                    if (!at(w).queued) {
                        at(w).queued = 1;
                        stack.push_back(w);
                    }
                } else {
                    v = w;
                }
            }
        }
    }

    // Hot loop for seeded stacks. Boundary cells of an interval collect emitted particles.
    void chase_seeded(std::vector<long>& stack)
    {
        site_cell* base = m_cells.data() + 1 - m_lo; // base[v] is site v
        long lo = m_lo, hi = m_hi;
        const bool sinks = !m_cyclic && !m_unbounded;
        const std::uint64_t sleep_thr = m_sleep_thr, left_thr = m_left_thr;
        std::uint64_t t = tau;
        const std::uint64_t budget = m_budget;
        while (!stack.empty()) {
            long v = stack.back();
            stack.pop_back();
            site_cell* c = base + v;
            c->queued = 0;
            if (c->cnt <= c->asleep)
                continue;
            for (;;) {
                if (t >= budget) [[unlikely]] {
                    tau = t;
                    throw budget_exceeded(t);
                }
                ++t;
                std::uint64_t w = stack_source::hash_word(c->key, ++c->odo);
                if (w < sleep_thr) {
                    if (c->cnt == 1) {
                        c->asleep = 1;
                        break;
                    }
                    continue;
                }
                long target = v + (w < left_thr ? -1 : 1);
                --c->cnt;
                if (target < lo || target > hi) [[unlikely]] {
                    if (sinks) {
                        ++base[target].cnt;
                        if (c->cnt == 0)
                            break;
                        continue;
                    }
                    if (m_cyclic) {
                        target = target < lo ? hi : lo;
                    } else {
                        tau = t;
                        ensure(target);
                        base = m_cells.data() + 1 - m_lo;
                        lo = m_lo;
                        hi = m_hi;
                        c = base + v;
                    }
                }
                site_cell* d = base + target;
                ++d->cnt;
                d->asleep = 0;
                if (c->cnt == 0) {
                    v = target;
                    c = d;
                    continue;
                }
                if (!d->queued && target != v) {
                    d->queued = 1;
                    stack.push_back(target);
                }
            }
        }
        tau = t;
        if (sinks) {
            emitted_left += static_cast<std::uint64_t>(base[lo - 1].cnt);
            emitted_right += static_cast<std::uint64_t>(base[hi + 1].cnt);
            base[lo - 1].cnt = 0;
            base[hi + 1].cnt = 0;
        }
        long vlo = visited_lo, vhi = visited_hi;
        for (long v = lo; v <= hi; ++v)
            if (base[v].odo > 0 || base[v].cnt > 0) {
                vlo = std::min(vlo, v);
                vhi = std::max(vhi, v);
            }
        if (emitted_left)
            vlo = std::min(vlo, lo - 1);
        if (emitted_right)
            vhi = std::max(vhi, hi + 1);
        visited_lo = vlo;
        visited_hi = vhi;
    }

    void allocate(long lo, long hi)
    {
        m_lo = lo;
        m_hi = hi;
        m_cells.assign(static_cast<std::size_t>(hi - lo + 3), site_cell{});
        for (long v = lo - 1; v <= hi + 1; ++v)
            at(v).key = m_src.site_key(v);
    }

    void ensure(long v)
    {
        if (v >= m_lo && v <= m_hi)
            return;
        long width = m_hi - m_lo + 1;
        long new_lo = m_lo, new_hi = m_hi;
        if (v < m_lo)
            new_lo = std::min(v, m_lo - width);
        else
            new_hi = std::max(v, m_hi + width);
        if (m_span_cap > 0 && new_hi - new_lo + 1 > m_span_cap) {
            new_lo = std::max(new_lo, std::min(v, m_lo));
            new_hi = std::min(new_hi, std::max(v, m_hi));
            if (new_hi - new_lo + 1 > m_span_cap)
                throw budget_exceeded(tau);
        }
        std::vector<site_cell> fresh(static_cast<std::size_t>(new_hi - new_lo + 3));
        std::copy(m_cells.begin() + 1, m_cells.end() - 1, fresh.begin() + 1 + (m_lo - new_lo));
        long old_lo = m_lo, old_hi = m_hi;
        m_cells.swap(fresh);
        m_lo = new_lo;
        m_hi = new_hi;
        for (long u = new_lo - 1; u < old_lo; ++u)
            at(u).key = m_src.site_key(u);
        for (long u = old_hi + 1; u <= new_hi + 1; ++u)
            at(u).key = m_src.site_key(u);
    }

    const stack_source& m_src;
    bool m_cyclic;
    bool m_unbounded;
    std::uint64_t m_budget;
    std::uint64_t m_sleep_thr;
    std::uint64_t m_left_thr;
    long m_span_cap = 0;
    long m_lo = 0;
    long m_hi = -1;
    std::vector<site_cell> m_cells;
};

} // namespace

stabilization_result stabilize(const configuration& sigma, const region& where, const stack_source& src,
                               toppling_policy policy, std::uint64_t budget, std::uint64_t policy_seed,
                               const extended_odometer* start)
{
    if (where.size() < 1)
        throw config_invalid("empty region");
    if (!start && sigma.has_sleepers())
        throw config_invalid("initial configuration must not contain sleeping particles");
    lattice_machine machine(src, where, false, budget);
    machine.load(sigma, start);
    switch (policy) {
    case toppling_policy::fifo: machine.run_fifo(); break;
    case toppling_policy::chase: machine.run_chase(); break;
    case toppling_policy::sweep: machine.run_sweep(); break;
    case toppling_policy::random_site: machine.run_random(policy_seed); break;
    }
    stabilization_result r = machine.result();
    return r;
}

stabilization_result driven_dissipative_sample(long n, double lambda, std::uint64_t seed, std::uint64_t budget)
{
    if (n < 0)
        throw config_invalid("driven-dissipative size must be nonnegative");
    stack_source src = stack_source::seeded(seed, lambda);
    return stabilize(configuration::uniform(0, n, 1), region::interval(0, n), src, toppling_policy::chase,
                     budget);
}

std::vector<configuration> driven_dissipative_chain(long n, double lambda, std::uint64_t seed, long steps,
                                                    insertion_rule insertion, std::uint64_t budget)
{
    if (steps < 1)
        throw config_invalid("chain needs at least one step");
    if (!insertion.uniform && (insertion.site < 0 || insertion.site > n))
        throw config_invalid("insertion site outside the interval");
    stack_source src = stack_source::seeded(seed, lambda);
    counter_rng rng(hash_key(seed, 0xc4a1ULL));
    configuration state = configuration::uniform(0, n, 0);
    extended_odometer odo(0, std::vector<long>(static_cast<std::size_t>(n + 1), 0));
    std::vector<configuration> out;
    out.reserve(static_cast<std::size_t>(steps));
    for (long t = 0; t < steps; ++t) {
        long v = insertion.uniform ? rng.below(n + 1) : insertion.site;
        int s = state.state(v);
        state.set(v, s == sleeping_state ? 2 : s + 1);
        stabilization_result r =
            stabilize(state, region::interval(0, n), src, toppling_policy::fifo, budget, 0, &odo);
        odo = r.odometer;
        state = r.final_config;
        out.push_back(state);
    }
    return out;
}

point_source_result point_source(long particles, double lambda, std::uint64_t seed, std::uint64_t budget)
{
    if (particles < 1)
        throw config_invalid("point source needs at least one particle");
    stack_source src = stack_source::seeded(seed, lambda);
    long half = std::max(16L, particles);
    lattice_machine machine(src, region::interval(-half, half), true, budget);
    machine.set_span_cap(64 * particles);
    configuration sigma(0, std::vector<int>{static_cast<int>(std::min<long>(particles, INT32_MAX))});
    machine.load(sigma, nullptr);
    machine.run_chase();
    point_source_result ps;
    ps.result = machine.result();
    ps.visited_lo = ps.result.visited_lo;
    ps.visited_hi = ps.result.visited_hi;
    const configuration& fin = ps.result.final_config;
    ps.sleepers_lo = LONG_MAX;
    ps.sleepers_hi = LONG_MIN;
    for (long v = fin.first(); v <= fin.last(); ++v) {
        if (fin.sleeping(v)) {
            ps.sleepers_lo = std::min(ps.sleepers_lo, v);
            ps.sleepers_hi = std::max(ps.sleepers_hi, v);
        }
    }
    ps.length = ps.sleepers_hi - ps.sleepers_lo + 1;
    return ps;
}

std::uint64_t cycle_fixed_energy(long n, double rho, double lambda, std::uint64_t seed, std::uint64_t budget)
{
    if (n < 2)
        throw config_invalid("cycle needs n >= 2");
    if (!(rho > 0.0 && rho < 1.0))
        throw config_invalid("cycle density must lie in (0,1)");
    long particles = static_cast<long>(std::floor(rho * static_cast<double>(n)));
    if (particles == 0)
        return 0;
    counter_rng rng(hash_key(seed, 0xc7c1eULL));
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    for (long p = 0; p < particles; ++p)
        ++counts[static_cast<std::size_t>(rng.below(n))];
    stack_source src = stack_source::seeded(seed, lambda);
    return stabilize(configuration(0, counts), region::cycle(n), src, toppling_policy::fifo, budget).tau;
}

} // namespace arwlab
