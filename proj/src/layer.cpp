#include "arwlab/layer.hpp"
#include "arwlab/error.hpp"
#include "arwlab/random.hpp"

#include <algorithm>
#include <cmath>

namespace arwlab {

namespace {

std::uint64_t marker_threshold(double lambda)
{
    double p = lambda / (1.0 + lambda);
    if (p >= 1.0)
        return UINT64_MAX;
    return static_cast<std::uint64_t>(std::ldexp(p, 64));
}

// Sort, then merge overlapping or adjacent runs.
void normalize(std::vector<column_range>& runs)
{
    if (runs.size() < 2)
        return;
    std::sort(runs.begin(), runs.end(), [](const column_range& a, const column_range& b) { return a.lo < b.lo; });
    std::size_t out = 0;
    for (std::size_t i = 1; i < runs.size(); ++i) {
        if (runs[i].lo <= runs[out].hi + 1)
            runs[out].hi = std::max(runs[out].hi, runs[i].hi);
        else
            runs[++out] = runs[i];
    }
    runs.resize(out + 1);
}

// Parts of [lo,hi] not covered by the sorted disjoint runs in `cover`.
template <class F>
void for_each_gap(long lo, long hi, const std::vector<column_range>& cover, F&& f)
{
    auto it = std::upper_bound(cover.begin(), cover.end(), lo,
                               [](long v, const column_range& r) { return v < r.lo; });
    if (it != cover.begin() && std::prev(it)->hi >= lo) {
        lo = std::prev(it)->hi + 1;
    }
    while (lo <= hi) {
        if (it == cover.end() || it->lo > hi) {
            f(lo, hi);
            return;
        }
        if (it->lo > lo)
            f(lo, it->lo - 1);
        lo = std::max(lo, it->hi + 1);
        ++it;
    }
}

std::uint64_t count_cells(const std::vector<std::vector<column_range>>& rows)
{
    std::uint64_t n = 0;
    for (const auto& row : rows)
        for (const auto& run : row)
            n += static_cast<std::uint64_t>(run.size());
    return n;
}

instruction swapped(instruction in)
{
    return in == instruction::left ? instruction::right : instruction::left;
}

} // namespace

// ---------------------------------------------------------------- step_primitives

struct step_primitives::state {
    long first = 0;
    std::vector<long> lo;          // lo[k] = lo(first + k)
    std::vector<std::size_t> off;  // off[k] = position of B^{first+k}_0 in markers
    std::vector<std::uint8_t> markers;
    producer make;

    void produce()
    {
        long j = first + static_cast<long>(lo.size()) - 1;
        long width = make(j, markers);
        if (width < 0 || markers.size() != off.back() + static_cast<std::size_t>(width) + 1)
            throw error("primitive producer returned an inconsistent diagonal");
        lo.push_back(lo.back() + width);
        off.push_back(markers.size());
    }
};

step_primitives step_primitives::custom(long first, long first_column, producer make)
{
    step_primitives p;
    p.m = std::make_shared<state>();
    p.m->first = first;
    p.m->lo.push_back(first_column);
    p.m->off.push_back(0);
    p.m->make = std::move(make);
    return p;
}

step_primitives step_primitives::sampled(std::uint64_t seed, long step, double lambda)
{
    return anchored(seed, step, lambda, 0);
}

step_primitives step_primitives::anchored(std::uint64_t seed, long step, double lambda, long first)
{
    if (first < 0)
        throw config_invalid("anchor diagonal must be nonnegative");
    const std::uint64_t thr = marker_threshold(lambda);
    const auto ustep = static_cast<std::uint64_t>(step);
    long c0 = 0;
    if (first > 0) {
        counter_rng rng(hash_key(seed, ustep, static_cast<std::uint64_t>(first), 0xa4c4ULL));
        c0 = negative_binomial_half(first, rng);
    }
    return custom(first, c0, [seed, ustep, thr](long j, std::vector<std::uint8_t>& out) {
        std::uint64_t key = hash_key(seed, ustep, static_cast<std::uint64_t>(j));
        long width = geometric_half(mix64(key ^ 0x52ULL));
        counter_rng rng(key);
        for (long i = 0; i <= width; ++i)
            out.push_back(rng() < thr ? 1 : 0);
        return width;
    });
}

step_primitives step_primitives::listed(std::vector<long> widths, std::vector<std::vector<int>> markers, long step)
{
    if (widths.size() != markers.size())
        throw config_invalid("listed primitives need one marker list per width");
    for (std::size_t j = 0; j < widths.size(); ++j)
        if (widths[j] < 0 || markers[j].size() != static_cast<std::size_t>(widths[j]) + 1)
            throw config_invalid("marker list B^j must have R_j + 1 entries");
    return custom(0, 0, [widths = std::move(widths), markers = std::move(markers), step](long j, std::vector<std::uint8_t>& out) {
        if (j >= static_cast<long>(widths.size()))
            throw fixture_out_of_window(step, j);
        for (int b : markers[static_cast<std::size_t>(j)])
            out.push_back(b ? 1 : 0);
        return widths[static_cast<std::size_t>(j)];
    });
}

step_primitives step_primitives::from_reduced(std::function<instruction(long)> a, std::function<bool(long)> b)
{
    auto pos = std::make_shared<long>(1);
    return custom(0, 0, [a = std::move(a), b = std::move(b), pos](long, std::vector<std::uint8_t>& out) {
        long p = *pos;
        if (a(p) != instruction::left)
            throw error("reduced instructions must open each block with a left");
        long q = p + 1;
        while (a(q) == instruction::right)
            ++q;
        for (long i = p; i < q; ++i)
            out.push_back(b(i) ? 1 : 0);
        *pos = q;
        return q - p - 1;
    });
}

void step_primitives::ensure(long j) const
{
    if (!m)
        throw error("empty step primitives");
    if (j < m->first)
        throw error("diagonal " + std::to_string(j) + " lies below the materialized window");
    while (static_cast<long>(m->lo.size()) - 1 + m->first < j)
        m->produce();
}

long step_primitives::first_diagonal() const
{
    return m ? m->first : 0;
}

long step_primitives::lo(long j) const
{
    ensure(j);
    return m->lo[static_cast<std::size_t>(j - m->first)];
}

long step_primitives::width(long j) const
{
    return lo(j + 1) - lo(j);
}

bool step_primitives::marker(long j, long i) const
{
    long w = width(j);
    if (i < 0 || i > w)
        return false;
    return m->markers[m->off[static_cast<std::size_t>(j - m->first)] + static_cast<std::size_t>(i)] != 0;
}

std::pair<long, long> step_primitives::diagonals_covering(long c) const
{
    ensure(m ? m->first : 0);
    if (c < m->lo.front())
        return {1, 0};
    while (m->lo.back() <= c)
        m->produce();
    const auto& lo = m->lo;
    // largest k with lo[k] <= c
    long kmax = static_cast<long>(std::upper_bound(lo.begin(), lo.end(), c) - lo.begin()) - 1;
    // smallest k with lo[k+1] >= c
    long kmin = static_cast<long>(std::lower_bound(lo.begin() + 1, lo.end(), c) - lo.begin()) - 1;
    return {m->first + kmin, m->first + kmax};
}

long step_primitives::first_reaching(long c) const
{
    ensure(m ? m->first : 0);
    while (m->lo.back() < c)
        m->produce();
    const auto& lo = m->lo;
    if (c <= lo.front())
        return m->first;
    return m->first + static_cast<long>(std::lower_bound(lo.begin() + 1, lo.end(), c) - lo.begin()) - 1;
}

std::pair<instruction, bool> step_primitives::reduced_at(long i) const
{
    ensure(0);
    if (m->first != 0 || m->lo.front() != 0)
        throw error("reduced form needs primitives starting at diagonal 0");
    if (i < 1)
        throw error("reduced positions start at 1");
    // the (j+1)-th left sits at position j + lo(j) + 1
    while (static_cast<long>(m->lo.size()) - 1 + m->lo.back() + 1 <= i)
        m->produce();
    long a = 0, b = static_cast<long>(m->lo.size()) - 1;
    while (b - a > 1) {
        long mid = (a + b) / 2;
        if (mid + m->lo[static_cast<std::size_t>(mid)] + 1 <= i)
            a = mid;
        else
            b = mid;
    }
    long x = i - (a + m->lo[static_cast<std::size_t>(a)] + 1);
    bool bit = m->markers[m->off[static_cast<std::size_t>(a)] + static_cast<std::size_t>(x)] != 0;
    return {x == 0 ? instruction::left : instruction::right, bit};
}

long step_primitives::materialized() const
{
    return m ? static_cast<long>(m->lo.size()) - 1 : 0;
}

// ---------------------------------------------------------------- realization

realization realization::sampled(std::uint64_t seed, double lambda)
{
    realization lp;
    lp.m_kind = kind::sampled;
    lp.m_seed = seed;
    lp.m_lambda = lambda;
    return lp;
}

realization realization::anchored(std::uint64_t seed, double lambda)
{
    realization lp = sampled(seed, lambda);
    lp.m_kind = kind::anchored;
    return lp;
}

realization realization::listed(std::map<long, step_primitives> steps, double lambda)
{
    realization lp;
    lp.m_kind = kind::listed;
    lp.m_lambda = lambda;
    lp.m_steps = std::move(steps);
    return lp;
}

bool realization::has_step(long k) const
{
    return m_kind != kind::listed || m_steps.count(k) > 0;
}

const step_primitives& realization::step(long k, long hint) const
{
    auto it = m_steps.find(k);
    if (it != m_steps.end())
        return it->second;
    switch (m_kind) {
    case kind::sampled:
        return m_steps.emplace(k, step_primitives::sampled(m_seed, k, m_lambda)).first->second;
    case kind::anchored:
        return m_steps.emplace(k, step_primitives::anchored(m_seed, k, m_lambda, std::max(0L, hint))).first->second;
    case kind::listed:
        break;
    }
    throw config_invalid("no primitives recorded for step " + std::to_string(k));
}

bool infects(const step_primitives& p, lp_cell from, lp_cell to)
{
    if (from.r < 0 || from.s < 0 || to.r < 0 || to.s < 0)
        return false;
    long j = from.diagonal();
    long lo = p.lo(j);
    if (to.r < lo || to.r > p.hi(j))
        return false;
    if (to.s == from.s)
        return true;
    return to.s == from.s + 1 && p.marker(j, to.r - lo);
}

// ---------------------------------------------------------------- infection_set

infection_set::infection_set(long step, lp_cell c) : m_step(step), m_min_row(c.s)
{
    m_rows.push_back({column_range{c.r, c.r}});
}

infection_set infection_set::from_rows(long step, long min_row, std::vector<std::vector<column_range>> rows)
{
    infection_set set;
    set.m_step = step;
    for (auto& row : rows)
        normalize(row);
    std::size_t a = 0, b = rows.size();
    while (a < b && rows[a].empty())
        ++a;
    while (b > a && rows[b - 1].empty())
        --b;
    set.m_min_row = min_row + static_cast<long>(a);
    set.m_rows.assign(std::make_move_iterator(rows.begin() + static_cast<long>(a)),
                      std::make_move_iterator(rows.begin() + static_cast<long>(b)));
    if (set.m_rows.empty())
        set.m_min_row = 0;
    return set;
}

const std::vector<column_range>& infection_set::row(long s) const
{
    static const std::vector<column_range> none;
    if (m_rows.empty() || s < m_min_row || s > max_row())
        return none;
    return m_rows[static_cast<std::size_t>(s - m_min_row)];
}

bool infection_set::contains(long r, long s) const
{
    const auto& runs = row(s);
    auto it = std::upper_bound(runs.begin(), runs.end(), r, [](long v, const column_range& x) { return v < x.lo; });
    return it != runs.begin() && std::prev(it)->hi >= r;
}

std::uint64_t infection_set::size() const
{
    return count_cells(m_rows);
}

std::vector<lp_cell> infection_set::cells() const
{
    std::vector<lp_cell> out;
    for (std::size_t i = 0; i < m_rows.size(); ++i)
        for (const auto& run : m_rows[i])
            for (long r = run.lo; r <= run.hi; ++r)
                out.push_back({r, m_min_row + static_cast<long>(i)});
    return out;
}

long infection_set::leftmost(long s) const
{
    const auto& runs = row(s);
    if (runs.empty())
        throw error("row " + std::to_string(s) + " is empty");
    return runs.front().lo;
}

long infection_set::rightmost(long s) const
{
    const auto& runs = row(s);
    if (runs.empty())
        throw error("row " + std::to_string(s) + " is empty");
    return runs.back().hi;
}

std::string infection_set::grid() const
{
    if (m_rows.empty())
        return "";
    long width = 0;
    for (const auto& row : m_rows)
        if (!row.empty())
            width = std::max(width, row.back().hi + 1);
    std::string out;
    for (long s = max_row(); s >= 0; --s) {
        for (long r = 0; r < width; ++r)
            out.push_back(contains(r, s) ? '#' : '.');
        out.push_back('\n');
    }
    return out;
}

infection_set advance(const infection_set& set, const step_primitives& p, std::uint64_t cell_budget)
{
    if (set.empty())
        return infection_set::from_rows(set.step() + 1, 0, {});
    const long s0 = set.min_row();
    const auto nrows = static_cast<std::size_t>(set.max_row() - s0 + 1);
    std::vector<std::vector<column_range>> same(nrows + 1), out(nrows + 1);
    for (std::size_t i = 0; i < nrows; ++i) {
        long s = s0 + static_cast<long>(i);
        for (const auto& run : set.row(s))
            same[i].push_back({p.lo(run.lo + s), p.hi(run.hi + s)});
        normalize(same[i]);
    }
    for (std::size_t i = 0; i < nrows; ++i) {
        long s = s0 + static_cast<long>(i);
        std::vector<column_range>& marks = out[i + 1];
        for (const auto& run : set.row(s)) {
            const long d1 = run.lo + s, d2 = run.hi + s;
            for_each_gap(p.lo(d1), p.hi(d2), same[i + 1], [&](long g1, long g2) {
                for (long j = std::max(d1, p.first_reaching(g1)); j <= d2 && p.lo(j) <= g2; ++j) {
                    long lo = p.lo(j), hi = p.hi(j);
                    for (long c = std::max(lo, g1); c <= std::min(hi, g2); ++c)
                        if (p.marker(j, c - lo))
                            marks.push_back({c, c});
                }
            });
        }
    }
    for (std::size_t i = 0; i <= nrows; ++i) {
        out[i].insert(out[i].end(), same[i].begin(), same[i].end());
        normalize(out[i]);
    }
    std::uint64_t n = count_cells(out);
    if (n > cell_budget)
        throw memory_budget_exceeded(n);
    return infection_set::from_rows(set.step() + 1, s0, std::move(out));
}

infection_set retreat(const infection_set& set, const step_primitives& p, std::uint64_t cell_budget)
{
    if (set.empty())
        return infection_set::from_rows(set.step() - 1, 0, {});
    const long t0 = set.min_row(), t1 = set.max_row();
    const long base = std::max(0L, t0 - 1);
    const auto nrows = static_cast<std::size_t>(t1 - base + 1);
    // same-row infectors, stored as diagonal runs
    std::vector<std::vector<column_range>> diag(nrows);
    for (long t = t0; t <= t1; ++t) {
        auto& d = diag[static_cast<std::size_t>(t - base)];
        for (const auto& run : set.row(t)) {
            long ja = std::max(t, p.diagonals_covering(run.lo).first);
            long jb = p.diagonals_covering(run.hi).second;
            if (ja <= jb)
                d.push_back({ja, jb});
        }
        normalize(d);
    }
    std::vector<std::vector<column_range>> marks(nrows);
    for (long t = std::max(1L, t0); t <= t1; ++t) {
        const long src = t - 1;
        const auto& cover = diag[static_cast<std::size_t>(src - base)];
        auto& out = marks[static_cast<std::size_t>(src - base)];
        for (const auto& run : set.row(t)) {
            long ja = std::max(src, p.diagonals_covering(run.lo).first);
            long jb = p.diagonals_covering(run.hi).second;
            if (ja > jb)
                continue;
            for_each_gap(ja, jb, cover, [&](long g1, long g2) {
                for (long j = g1; j <= g2; ++j) {
                    long lo = p.lo(j), hi = p.hi(j);
                    for (long c = std::max(lo, run.lo); c <= std::min(hi, run.hi); ++c) {
                        if (p.marker(j, c - lo)) {
                            out.push_back({j, j});
                            break;
                        }
                    }
                }
            });
        }
    }
    std::vector<std::vector<column_range>> rows(nrows);
    for (std::size_t i = 0; i < nrows; ++i) {
        long s = base + static_cast<long>(i);
        for (const auto& d : diag[i])
            rows[i].push_back({d.lo - s, d.hi - s});
        for (const auto& d : marks[i])
            rows[i].push_back({d.lo - s, d.hi - s});
        normalize(rows[i]);
    }
    std::uint64_t n = count_cells(rows);
    if (n > cell_budget)
        throw memory_budget_exceeded(n);
    return infection_set::from_rows(set.step() - 1, base, std::move(rows));
}

std::vector<infection_set> infection_sets(lp_cell start, long k, long n, const realization& lp,
                                          std::uint64_t cell_budget)
{
    if (n < 0)
        throw config_invalid("step count must be nonnegative");
    std::vector<infection_set> sets;
    sets.reserve(static_cast<std::size_t>(n + 1));
    sets.emplace_back(k, start);
    for (long i = 0; i < n; ++i) {
        const infection_set& cur = sets.back();
        long hint = cur.empty() ? 0 : cur.leftmost(cur.min_row()) + cur.min_row();
        sets.push_back(advance(cur, lp.step(k + i + 1, hint), cell_budget));
    }
    return sets;
}

infection_set infection_set_after(lp_cell start, long k, long n, const realization& lp, std::uint64_t cell_budget)
{
    if (n < 0)
        throw config_invalid("step count must be nonnegative");
    infection_set cur(k, start);
    for (long i = 0; i < n; ++i) {
        long hint = cur.leftmost(cur.min_row()) + cur.min_row();
        cur = advance(cur, lp.step(k + i + 1, hint), cell_budget);
    }
    return cur;
}

std::vector<infection_set> backward_infection_sets(lp_cell target, long m, long n, const realization& lp,
                                                   std::uint64_t cell_budget)
{
    if (n < 0 || n > m)
        throw config_invalid("backward step count must lie in [0, m]");
    std::vector<infection_set> sets;
    sets.emplace_back(m, target);
    for (long i = 1; i <= n; ++i)
        sets.push_back(retreat(sets.back(), lp.step(m - i + 1), cell_budget));
    return sets;
}

infection_set backward_infection_set(lp_cell target, long m, long n, const realization& lp, std::uint64_t cell_budget)
{
    return backward_infection_sets(target, m, n, lp, cell_budget).back();
}

bool is_infection_path(const infection_path& path, const realization& lp)
{
    for (std::size_t i = 0; i + 1 < path.cells.size(); ++i) {
        long step = path.first_step + static_cast<long>(i) + 1;
        if (!infects(lp.step(step, path.cells[i].diagonal()), path.cells[i], path.cells[i + 1]))
            return false;
    }
    return true;
}

// ---------------------------------------------------------------- paths

namespace {

// Predecessor of c (at step k) inside `prev` (step k-1): highest row, then largest column.
lp_cell best_predecessor(const infection_set& prev, const step_primitives& p, lp_cell c)
{
    auto [ja, jb] = p.diagonals_covering(c.r);
    for (long j = jb; j >= ja; --j) {
        lp_cell cand{j - c.s, c.s};
        if (cand.r >= 0 && prev.contains(cand))
            return cand;
    }
    if (c.s > 0) {
        for (long j = jb; j >= ja; --j) {
            lp_cell cand{j - c.s + 1, c.s - 1};
            if (cand.r >= 0 && p.marker(j, c.r - p.lo(j)) && prev.contains(cand))
                return cand;
        }
    }
    throw error("greedy backfill found no predecessor");
}

// Successor of c (at step k-1) inside `next` (step k): lowest row, then largest column.
lp_cell best_successor(const infection_set& next, const step_primitives& p, lp_cell c)
{
    long j = c.diagonal();
    long lo = p.lo(j), hi = p.hi(j);
    const auto& same = next.row(c.s);
    for (auto it = same.rbegin(); it != same.rend(); ++it) {
        if (it->lo > hi)
            continue;
        if (it->hi < lo)
            break;
        return {std::min(hi, it->hi), c.s};
    }
    for (long r = hi; r >= lo; --r)
        if (p.marker(j, r - lo) && next.contains(r, c.s + 1))
            return {r, c.s + 1};
    throw error("reverse greedy fill found no successor");
}

} // namespace

infection_path minimal_path(lp_cell start, long k, long n, const realization& lp, path_direction dir)
{
    infection_path path;
    if (dir == path_direction::forward) {
        path.first_step = k;
        path.cells.push_back(start);
        for (long i = 0; i < n; ++i) {
            lp_cell c = path.cells.back();
            path.cells.push_back({lp.step(k + i + 1, c.diagonal()).lo(c.diagonal()), c.s});
        }
        return path;
    }
    if (n > k)
        throw config_invalid("reverse path longer than its end step");
    path.first_step = k - n;
    std::vector<lp_cell> rev{start};
    for (long i = 1; i <= n; ++i) {
        lp_cell c = rev.back();
        auto [ja, jb] = lp.step(k - i + 1).diagonals_covering(c.r);
        long j = std::max(ja, c.s);
        if (j > jb)
            throw reverse_path_blocked("no same-row infector of (" + std::to_string(c.r) + "," +
                                       std::to_string(c.s) + ") at step " + std::to_string(k - i + 1));
        rev.push_back({j - c.s, c.s});
    }
    path.cells.assign(rev.rbegin(), rev.rend());
    return path;
}

std::vector<lp_cell> upper_right_sequence(lp_cell start, long k, long n, const realization& lp)
{
    std::vector<lp_cell> seq{start};
    for (long i = 0; i < n; ++i) {
        lp_cell c = seq.back();
        long d = c.r + start.s + i;
        seq.push_back({lp.step(k + i + 1, d).hi(d), start.s + i + 1});
    }
    return seq;
}

std::vector<long> lower_column_envelope(long r0, const std::vector<long>& smin, long k, const realization& lp)
{
    std::vector<long> r{r0};
    for (std::size_t i = 1; i < smin.size(); ++i) {
        long d = r.back() + smin[i - 1];
        r.push_back(lp.step(k + static_cast<long>(i), d).lo(d));
    }
    return r;
}

std::vector<long> upper_column_envelope(long r0, const std::vector<long>& smax, long k, const realization& lp)
{
    std::vector<long> r{r0};
    for (std::size_t i = 1; i < smax.size(); ++i) {
        long d = r.back() + smax[i - 1];
        r.push_back(lp.step(k + static_cast<long>(i), d).hi(d));
    }
    return r;
}

infection_path greedy_path(lp_cell start, long block, long k, long n, const realization& lp,
                           std::optional<long> cap, path_direction dir, std::uint64_t cell_budget)
{
    if (block < 1 || n < 0)
        throw config_invalid("greedy path needs block >= 1 and n >= 0");
    if (dir == path_direction::forward) {
        infection_path path{k, {start}};
        long done = 0;
        while (done < n) {
            lp_cell cur = path.back();
            if (cap && cur.s >= *cap) {
                infection_path rest = minimal_path(cur, k + done, n - done, lp);
                path.cells.insert(path.cells.end(), rest.cells.begin() + 1, rest.cells.end());
                break;
            }
            long b = std::min(block, n - done);
            long at = k + done;
            auto sets = infection_sets(cur, at, b, lp, cell_budget);
            const infection_set& last = sets.back();
            std::vector<lp_cell> seg(static_cast<std::size_t>(b + 1));
            seg[static_cast<std::size_t>(b)] = {last.rightmost(last.max_row()), last.max_row()};
            for (long i = b; i >= 1; --i)
                seg[static_cast<std::size_t>(i - 1)] =
                    best_predecessor(sets[static_cast<std::size_t>(i - 1)], lp.step(at + i), seg[static_cast<std::size_t>(i)]);
            for (long i = 1; i <= b; ++i) {
                path.cells.push_back(seg[static_cast<std::size_t>(i)]);
                ++done;
                if (cap && seg[static_cast<std::size_t>(i)].s >= *cap)
                    break;
            }
        }
        return path;
    }

    // reverse: cells collected backwards in time from `start` at step k
    if (n > k)
        throw config_invalid("reverse path longer than its end step");
    std::vector<lp_cell> rev{start};
    long done = 0;
    while (done < n) {
        lp_cell cur = rev.back();
        long at = k - done;
        if (cap && cur.s <= *cap) {
            infection_path rest = minimal_path(cur, at, n - done, lp, path_direction::reverse);
            rev.insert(rev.end(), rest.cells.rbegin() + 1, rest.cells.rend());
            break;
        }
        long b = std::min(block, n - done);
        auto sets = backward_infection_sets(cur, at, b, lp, cell_budget);
        const infection_set& last = sets.back();
        if (last.empty())
            throw reverse_path_blocked("backward set emptied before step " + std::to_string(at - b));
        std::vector<lp_cell> seg(static_cast<std::size_t>(b + 1)); // seg[i] at step at-i
        seg[static_cast<std::size_t>(b)] = {last.rightmost(last.min_row()), last.min_row()};
        for (long i = b - 1; i >= 0; --i)
            seg[static_cast<std::size_t>(i)] =
                best_successor(sets[static_cast<std::size_t>(i)], lp.step(at - i), seg[static_cast<std::size_t>(i + 1)]);
        for (long i = 1; i <= b; ++i) {
            rev.push_back(seg[static_cast<std::size_t>(i)]);
            ++done;
            if (cap && seg[static_cast<std::size_t>(i)].s <= *cap)
                break;
        }
    }
    infection_path path;
    path.first_step = k - n;
    path.cells.assign(rev.rbegin(), rev.rend());
    return path;
}

// ---------------------------------------------------------------- couplings

shift_coupled shift_coupling(lp_cell start, const realization& base, long n, std::uint64_t seed)
{
    if (start.r < 0 || start.s < 0 || n < 0)
        throw config_invalid("shift coupling needs a nonnegative start and step count");
    shift_coupled out{realization::listed({}, base.lambda()), {start.r}};
    const std::uint64_t fresh_seed = hash_key(seed, 0x5f1f7ULL);
    for (long i = 0; i < n; ++i) {
        const long offset = out.r.back() + start.s;
        step_primitives fresh = step_primitives::sampled(fresh_seed, i + 1, base.lambda());
        step_primitives orig = base.step(i + 1);
        if (orig.first_diagonal() != 0)
            throw config_invalid("shift coupling needs primitives from diagonal 0");
        step_primitives p = step_primitives::custom(0, 0, [fresh, orig, offset](long j, std::vector<std::uint8_t>& bits) {
            const step_primitives& src = j < offset ? fresh : orig;
            long jj = j < offset ? j : j - offset;
            long w = src.width(jj);
            for (long x = 0; x <= w; ++x)
                bits.push_back(src.marker(jj, x) ? 1 : 0);
            return w;
        });
        out.r.push_back(p.lo(offset));
        out.coupled.set_step(i + 1, std::move(p));
    }
    return out;
}

reverse_coupled reverse_coupling(long u, long t, long m, const realization& base, std::uint64_t seed)
{
    if (u < 0 || t < 0 || m < 0)
        throw config_invalid("reverse coupling needs u, t, m >= 0");
    reverse_coupled out{realization::listed({}, base.lambda()), {u}};
    const std::uint64_t thr = marker_threshold(base.lambda());
    for (long n = 0; n < m; ++n) {
        const long z = out.z.back();
        counter_rng rng(hash_key(seed, 0x4e7eULL, static_cast<std::uint64_t>(n)));
        if (z < 0) {
            out.coupled.set_step(m - n, step_primitives::sampled(hash_key(seed, 0xfee1ULL), m - n, base.lambda()));
            long children = 0;
            for (long i = 0; i < -z; ++i)
                children += geometric_half(rng());
            out.z.push_back(-children - t);
            continue;
        }
        // Draws prepended one at a time to the left until z lefts are drawn.
        std::vector<instruction> drawn;
        long lefts = 0, rights = 0;
        while (lefts < z) {
            bool left = (rng() >> 63) != 0;
            drawn.push_back(left ? instruction::left : instruction::right);
            (left ? lefts : rights) += 1;
        }
        const long added = static_cast<long>(drawn.size());
        std::vector<instruction> front(drawn.rbegin(), drawn.rend()); // positions 1..A
        std::vector<bool> front_bits;
        for (long i = 0; i < added; ++i)
            front_bits.push_back(rng() < thr);
        step_primitives orig = base.step(n + 1);
        auto a = [front, orig, added](long i) -> instruction {
            instruction x = i <= added ? front[static_cast<std::size_t>(i - 1)] : orig.reduced_at(i - added).first;
            return i == 1 ? x : swapped(x);
        };
        auto b = [front_bits, orig, added](long i) -> bool {
            return i <= added ? front_bits[static_cast<std::size_t>(i - 1)] : orig.reduced_at(i - added).second;
        };
        out.coupled.set_step(m - n, step_primitives::from_reduced(a, b));
        out.z.push_back(rights - t);
    }
    return out;
}

} // namespace arwlab
