#include "arwlab/correspondence.hpp"
#include "arwlab/error.hpp"

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <map>
#include <sstream>

namespace arwlab {

namespace {

void check_key(const odometer_class_key& key)
{
    if (key.n < 1)
        throw config_invalid("odometer class needs n >= 1");
    for (long v = 0; v <= key.n; ++v)
        if (key.sigma.sleeping(v))
            throw config_invalid("odometer class needs a configuration without sleepers");
}

long rights_at(const stack_source& src, long v, long u)
{
    return src.signed_lr_counts(v, u).rights;
}

long lefts_at(const stack_source& src, long v, long u)
{
    return src.signed_lr_counts(v, u).lefts;
}

} // namespace

// ---- reduced instructions ----

struct reduced_instructions::state {
    bool listed = false;
    // listed form
    std::vector<instruction> a;
    std::vector<bool> b;
    // stack form
    std::shared_ptr<const stack_source> src;
    long site = 0;
    std::vector<long> index; // index[i-1] = stack index of a_i
    std::vector<long> lefts; // lefts[i-1] = lefts among a_1..a_i

    void extend(long count)
    {
        while (static_cast<long>(index.size()) < count) {
            long k = index.back() + 1;
            while (src->at(site, k) == instruction::sleep)
                ++k;
            index.push_back(k);
            lefts.push_back(lefts.back() + (src->at(site, k) == instruction::left ? 1 : 0));
        }
    }
};

reduced_instructions reduced_instructions::from_stack(const stack_source& src, long site, long start)
{
    if (src.at(site, start) != instruction::left)
        throw config_invalid("reduced instructions must start at a left");
    reduced_instructions r;
    r.m = std::make_shared<state>();
    r.m->src = std::make_shared<const stack_source>(src);
    r.m->site = site;
    r.m->index.push_back(start);
    r.m->lefts.push_back(1);
    return r;
}

reduced_instructions reduced_instructions::listed(std::vector<instruction> a, std::vector<bool> b)
{
    if (a.size() != b.size())
        throw config_invalid("reduced instructions need one marker per entry");
    if (!a.empty() && a.front() != instruction::left)
        throw config_invalid("reduced instructions start with a left");
    for (instruction x : a)
        if (x == instruction::sleep)
            throw config_invalid("reduced instructions contain no sleeps");
    reduced_instructions r;
    r.m = std::make_shared<state>();
    r.m->listed = true;
    r.m->a = std::move(a);
    r.m->b = std::move(b);
    return r;
}

instruction reduced_instructions::a(long i) const
{
    if (i < 1)
        throw config_invalid("reduced positions start at 1");
    if (m->listed) {
        if (i > static_cast<long>(m->a.size()))
            throw fixture_out_of_window(0, i);
        return m->a[static_cast<std::size_t>(i - 1)];
    }
    m->extend(i);
    return m->src->at(m->site, m->index[static_cast<std::size_t>(i - 1)]);
}

bool reduced_instructions::b(long i) const
{
    if (i < 1)
        throw config_invalid("reduced positions start at 1");
    if (m->listed) {
        if (i > static_cast<long>(m->b.size()))
            throw fixture_out_of_window(0, i);
        return m->b[static_cast<std::size_t>(i - 1)];
    }
    // a sleep between a_i and a_{i+1} must sit right after a_i
    m->extend(i);
    return m->src->at(m->site, m->index[static_cast<std::size_t>(i - 1)] + 1) == instruction::sleep;
}

long reduced_instructions::source_index(long i) const
{
    if (m->listed)
        throw config_invalid("listed reduced instructions have no stack indices");
    if (i < 1)
        throw config_invalid("reduced positions start at 1");
    m->extend(i);
    return m->index[static_cast<std::size_t>(i - 1)];
}

long reduced_instructions::length() const
{
    return m->listed ? static_cast<long>(m->a.size()) : LONG_MAX;
}

long reduced_instructions::lefts_through(long i) const
{
    if (i < 1)
        return 0;
    if (m->listed) {
        long c = 0;
        for (long k = 1; k <= i; ++k)
            c += a(k) == instruction::left ? 1 : 0;
        return c;
    }
    m->extend(i);
    return m->lefts[static_cast<std::size_t>(i - 1)];
}

reduced_instructions reduced_from_arw(const stack_source& src, const odometer_class_key& key, long v)
{
    check_key(key);
    if (v < 1 || v > key.n)
        throw config_invalid("reduced instructions are defined for sites 1..n");
    extended_odometer m = minimal_odometer(src, key.sigma, key.u0, key.f0, key.n);
    return reduced_instructions::from_stack(src, v, m(v));
}

step_primitives to_primitives(const reduced_instructions& red)
{
    return step_primitives::from_reduced([red](long i) { return red.a(i); }, [red](long i) { return red.b(i); });
}

reduced_instructions to_reduced(const step_primitives& prim, long length)
{
    std::vector<instruction> a;
    std::vector<bool> b;
    for (long i = 1; i <= length; ++i) {
        auto [x, bit] = prim.reduced_at(i);
        a.push_back(x);
        b.push_back(bit);
    }
    return reduced_instructions::listed(std::move(a), std::move(b));
}

// ---- theta ----

namespace {

// Layer widths and markers read straight off instr_v: block j runs from the (j+1)-th left
// at or after `start` up to the next left; each non-sleep entry carries a marker that is set
// when a sleep follows it.
step_primitives primitives_from_stack(const stack_source& src, long site, long start)
{
    auto stack = std::make_shared<const stack_source>(src);
    auto pos = std::make_shared<long>(start);
    return step_primitives::custom(0, 0, [stack, site, pos](long, std::vector<std::uint8_t>& out) {
        long p = *pos;
        std::vector<std::uint8_t> marks;
        long rights = 0;
        for (;;) {
            long q = p + 1;
            while (stack->at(site, q) == instruction::sleep)
                ++q;
            marks.push_back(q > p + 1 ? 1 : 0);
            if (stack->at(site, q) == instruction::left) {
                p = q;
                break;
            }
            ++rights;
            p = q;
        }
        out.insert(out.end(), marks.begin(), marks.end());
        *pos = p;
        return rights;
    });
}

} // namespace

realization theta(const stack_source& src, const odometer_class_key& key)
{
    check_key(key);
    extended_odometer m = minimal_odometer(src, key.sigma, key.u0, key.f0, key.n);
    std::map<long, step_primitives> steps;
    for (long v = 1; v <= key.n; ++v)
        steps[v] = primitives_from_stack(src, v, m(v));
    return realization::listed(std::move(steps), src.is_seeded() ? src.lambda() : 1.0);
}

// ---- phi, chi, psi, tau ----

psi_value psi_map(const step_primitives& prim, lp_cell from, lp_cell to)
{
    if (!infects(prim, from, to))
        throw not_an_infection("cell does not infect the target");
    return {from.r + from.s + 1 + to.r, static_cast<int>(to.s - from.s)};
}

std::vector<std::pair<lp_cell, lp_cell>> psi_preimage(const step_primitives& prim, long j, int z)
{
    if (j < 1 || (z != 0 && z != 1))
        throw config_invalid("psi preimage needs j >= 1 and z in {0,1}");
    long q = 0;
    for (long i = 1; i <= j; ++i)
        q += prim.reduced_at(i).first == instruction::left ? 1 : 0;
    const long rp = j - q;
    std::vector<std::pair<lp_cell, lp_cell>> out;
    for (long s = 0; s <= q - 1; ++s) {
        lp_cell from{q - 1 - s, s}, to{rp, s + z};
        if (infects(prim, from, to))
            out.emplace_back(from, to);
    }
    return out;
}

psi_value tau(const stack_source& src, const odometer_class_key& key, long v, long k)
{
    check_key(key);
    extended_odometer m = minimal_odometer(src, key.sigma, key.u0, key.f0, key.n);
    if (k < m(v))
        throw config_invalid("tau is defined only at or above the minimal odometer");
    psi_value out;
    for (long i = m(v); i <= k; ++i)
        out.j += src.at(v, i) == instruction::sleep ? 0 : 1;
    out.z = src.at(v, k) == instruction::sleep ? 1 : 0;
    return out;
}

infection_path phi(const extended_odometer& u, const stack_source& src, const odometer_class_key& key)
{
    check_key(key);
    if (u.first() != 0 || u.last() != key.n)
        throw not_in_class("odometer must live on [0,n]");
    if (u(0) != key.u0)
        throw not_in_class("odometer does not match u0");
    if (rights_at(src, 0, u(0)) - lefts_at(src, 1, u(1)) != key.f0)
        throw not_in_class("odometer does not match f0");
    if (!stability_check(u, key.sigma, src, 1, key.n - 1, stability_mode::stable))
        throw not_in_class("odometer is not stable on [1,n-1]");
    extended_odometer m = minimal_odometer(src, key.sigma, key.u0, key.f0, key.n);
    flow_profile fp = flows(u, src);
    infection_path path;
    path.first_step = 0;
    for (long v = 0; v <= key.n; ++v)
        path.cells.push_back({rights_at(src, v, u(v)) - rights_at(src, v, m(v)), fp.s_at(v)});
    if (!is_infection_path(path, theta(src, key)))
        throw error("phi produced a sequence that is not an infection path");
    return path;
}

extended_odometer chi(const infection_path& path, const stack_source& src, const odometer_class_key& key)
{
    check_key(key);
    if (path.first_step != 0 || static_cast<long>(path.cells.size()) != key.n + 1 ||
        path.cells.front() != lp_cell{0, 0})
        throw not_a_path("path must run from (0,0) at step 0 through step n");
    realization lp = theta(src, key);
    if (!is_infection_path(path, lp))
        throw not_a_path("consecutive cells do not infect each other");
    extended_odometer m = minimal_odometer(src, key.sigma, key.u0, key.f0, key.n);
    std::vector<long> values{key.u0};
    for (long v = 1; v <= key.n; ++v) {
        psi_value jz = psi_map(lp.step(v), path.cells[static_cast<std::size_t>(v - 1)],
                               path.cells[static_cast<std::size_t>(v)]);
        reduced_instructions red = reduced_instructions::from_stack(src, v, m(v));
        long k = red.source_index(jz.j);
        // the first sleep of the run following a_j
        values.push_back(jz.z ? k + 1 : k);
    }
    extended_odometer u(0, std::move(values));
    if (phi(u, src, key).cells != path.cells)
        throw error("chi is not a right inverse of phi on this path");
    return u;
}

// ---- enumeration ----

namespace {

struct enumerator {
    const stack_source& src;
    const configuration& sigma;
    long n;
    enumeration_mode mode;
    enumeration_options opts;
    std::vector<long> u;
    std::vector<extended_odometer> out;

    void site(long v, long f_prev)
    {
        const long target = rights_at(src, v - 1, u.back()) - f_prev;
        const long lo = src.nth_left_index(v, target);
        const long hi = src.nth_left_index(v, target + 1) - 1;
        if (hi - lo + 1 > opts.index_budget)
            throw enumeration_budget_exceeded("index range at site " + std::to_string(v) + " exceeds budget");
        long first = lo, last = hi;
        if (v == n && opts.last_value) {
            first = std::max(lo, *opts.last_value);
            last = std::min(hi, *opts.last_value);
        }
        for (long k = first; k <= last; ++k) {
            if (mode == enumeration_mode::weak && k < 0)
                continue;
            const bool sleep = src.at(v, k) == instruction::sleep;
            if (opts.policy == sleep_run_policy::canonical && sleep && k > lo &&
                src.at(v, k - 1) == instruction::sleep)
                continue;
            u.push_back(k);
            if (v == n) {
                if (out.size() >= opts.result_budget)
                    throw enumeration_budget_exceeded("enumeration result budget exceeded");
                out.emplace_back(0, u);
            } else {
                const long mass = sigma.count(v);
                if (mode == enumeration_mode::stable) {
                    site(v + 1, f_prev + mass - (sleep ? 1 : 0));
                } else {
                    site(v + 1, f_prev + mass);
                    if (sleep)
                        site(v + 1, f_prev + mass - 1);
                }
            }
            u.pop_back();
        }
    }
};

} // namespace

std::vector<extended_odometer> enumerate_stable_odometers(const stack_source& src, const odometer_class_key& key,
                                                          enumeration_mode mode, const weak_caps& caps,
                                                          const enumeration_options& opts)
{
    check_key(key);
    enumerator e{src, key.sigma, key.n, mode, opts, {}, {}};
    if (mode == enumeration_mode::stable) {
        e.u.push_back(key.u0);
        e.site(1, key.f0);
    } else {
        if (caps.u0_lo < 0 || caps.u0_lo > caps.u0_hi || caps.f0_lo > caps.f0_hi)
            throw config_invalid("weak enumeration needs 0 <= u0_lo <= u0_hi and f0_lo <= f0_hi");
        for (long u0 = caps.u0_lo; u0 <= caps.u0_hi; ++u0)
            for (long f0 = caps.f0_lo; f0 <= caps.f0_hi; ++f0) {
                e.u.assign(1, u0);
                e.site(1, f0);
            }
    }
    std::sort(e.out.begin(), e.out.end());
    e.out.erase(std::unique(e.out.begin(), e.out.end()), e.out.end());
    return e.out;
}

std::string format_odometers(const std::vector<extended_odometer>& list)
{
    std::ostringstream os;
    for (const auto& u : list) {
        os << '(';
        for (std::size_t i = 0; i < u.size(); ++i)
            os << (i ? "," : "") << u.values()[i];
        os << ")\n";
    }
    return os.str();
}

// ---- boundary criteria ----

long boundary_conditions(const stack_source& src, const configuration& sigma, long f0)
{
    if (f0 >= 0)
        throw config_invalid("left-boundary rule needs f0 < 0");
    if (sigma.sleeping(0))
        throw config_invalid("site 0 must not hold a sleeping particle");
    return src.nth_left_index(0, sigma.count(0) - f0);
}

bool stability_at_n(const infection_path& path, const stack_source& src, const odometer_class_key& key)
{
    check_key(key);
    if (static_cast<long>(path.cells.size()) != key.n + 1)
        throw not_a_path("path must have n+1 cells");
    extended_odometer m = minimal_odometer(src, key.sigma, key.u0, key.f0, key.n);
    long mass = 0;
    for (long v = 1; v <= key.n; ++v)
        mass += key.sigma.count(v);
    const lp_cell end = path.cells.back();
    return end.r == key.f0 + mass - rights_at(src, key.n, m(key.n)) - end.s;
}

// ---- infection paths ----

namespace {

// Cells infected by `c` in one step.
std::vector<lp_cell> successors(const step_primitives& p, lp_cell c)
{
    std::vector<lp_cell> out;
    const long d = c.diagonal();
    const long lo = p.lo(d), hi = p.hi(d);
    for (long x = lo; x <= hi; ++x)
        out.push_back({x, c.s});
    for (long x = lo; x <= hi; ++x)
        if (p.marker(d, x - lo))
            out.push_back({x, c.s + 1});
    return out;
}

} // namespace

std::uint64_t count_infection_paths(const realization& lp, long n)
{
    std::map<lp_cell, std::uint64_t> cur{{{0, 0}, 1}};
    for (long k = 1; k <= n; ++k) {
        std::map<lp_cell, std::uint64_t> next;
        const step_primitives& p = lp.step(k);
        for (const auto& [c, cnt] : cur)
            for (const lp_cell& t : successors(p, c))
                next[t] += cnt;
        cur = std::move(next);
    }
    std::uint64_t total = 0;
    for (const auto& kv : cur)
        total += kv.second;
    return total;
}

std::vector<infection_path> enumerate_infection_paths(const realization& lp, long n, std::size_t budget)
{
    std::vector<infection_path> out;
    infection_path cur;
    cur.first_step = 0;
    cur.cells.push_back({0, 0});
    auto rec = [&](auto&& self, long k) -> void {
        if (k > n) {
            if (out.size() >= budget)
                throw enumeration_budget_exceeded("infection path budget exceeded");
            out.push_back(cur);
            return;
        }
        for (const lp_cell& t : successors(lp.step(k), cur.cells.back())) {
            cur.cells.push_back(t);
            self(self, k + 1);
            cur.cells.pop_back();
        }
    };
    rec(rec, 1);
    std::sort(out.begin(), out.end(),
              [](const infection_path& a, const infection_path& b) { return a.cells < b.cells; });
    return out;
}

bool single_sign_change(const std::vector<long>& f)
{
    std::size_t k = 0;
    while (k < f.size() && f[k] <= 0)
        ++k;
    for (std::size_t v = k; v < f.size(); ++v)
        if (f[v] < 1)
            return false;
    return true;
}

} // namespace arwlab
