#ifndef ARWLAB_LAYER_HPP
#define ARWLAB_LAYER_HPP

#include "arwlab/instructions.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace arwlab {

inline constexpr std::uint64_t default_cell_budget = 100'000'000ULL;

// Cell (r,s): column r, row s. The step is carried by the owning set or path.
struct lp_cell {
    long r = 0;
    long s = 0;
    auto operator<=>(const lp_cell&) const = default;
    long diagonal() const { return r + s; }
};

// Inclusive column interval.
struct column_range {
    long lo = 0;
    long hi = -1;
    bool operator==(const column_range&) const = default;
    bool empty() const { return lo > hi; }
    long size() const { return hi - lo + 1; }
};

// Widths R_j and markers B^j for one step, materialized lazily from diagonal `first`
// onwards. Handles share state; a handle is not safe for concurrent use.
class step_primitives {
public:
    // Appends the R+1 markers of diagonal j to `markers` and returns R.
    using producer = std::function<long(long j, std::vector<std::uint8_t>& markers)>;

    // R_j, B^j from the counter-based generator, for every j >= 0.
    static step_primitives sampled(std::uint64_t seed, long step, double lambda);
    // Same law restricted to j >= first; lo(first) is drawn as a sum of `first` Geo(1/2).
    static step_primitives anchored(std::uint64_t seed, long step, double lambda, long first);
    // Finite fixture: diagonals past the list are out of window.
    static step_primitives listed(std::vector<long> widths, std::vector<std::vector<int>> markers,
                                  long step = 0);
    // Arbitrary producer, starting at diagonal `first` with lo(first) = first_column.
    static step_primitives custom(long first, long first_column, producer make);
    // Step built from reduced instructions a_1,a_2,... (a_1 = left) and b_1,b_2,...
    static step_primitives from_reduced(std::function<instruction(long)> a, std::function<bool(long)> b);

    step_primitives() = default;

    bool valid() const { return static_cast<bool>(m); }
    long first_diagonal() const;
    long width(long j) const;
    long lo(long j) const;
    long hi(long j) const { return lo(j + 1); }
    column_range layer(long j) const { return {lo(j), hi(j)}; }
    bool marker(long j, long i) const;
    // Diagonals whose layer contains column c, as {first, last}; first > last if none.
    std::pair<long, long> diagonals_covering(long c) const;
    // Smallest diagonal j >= first whose layer reaches column c (hi(j) >= c).
    long first_reaching(long c) const;
    // Reduced form (a_i, b_i) at 1-based position i; requires first_diagonal() == 0.
    std::pair<instruction, bool> reduced_at(long i) const;
    long materialized() const;

private:
    struct state;
    void ensure(long j) const; // materialize widths through diagonal j
    std::shared_ptr<state> m;
};

// The primitives of every step. step(k) governs infections from step k-1 to step k.
class realization {
public:
    static realization sampled(std::uint64_t seed, double lambda);
    // Each step is anchored at the diagonal hint passed on its first use.
    static realization anchored(std::uint64_t seed, double lambda);
    static realization listed(std::map<long, step_primitives> steps, double lambda = 1.0);

    const step_primitives& step(long k, long hint = 0) const;
    void set_step(long k, step_primitives p) { m_steps[k] = std::move(p); }
    bool has_step(long k) const;
    double lambda() const { return m_lambda; }
    std::uint64_t seed() const { return m_seed; }

private:
    enum class kind { sampled, anchored, listed };
    kind m_kind = kind::listed;
    std::uint64_t m_seed = 0;
    double m_lambda = 1.0;
    mutable std::map<long, step_primitives> m_steps;
};

bool infects(const step_primitives& p, lp_cell from, lp_cell to);

// Cells at one step stored as sorted, disjoint, non-adjacent column runs per row.
class infection_set {
public:
    infection_set() = default;
    infection_set(long step, lp_cell c);
    static infection_set from_rows(long step, long min_row, std::vector<std::vector<column_range>> rows);

    long step() const { return m_step; }
    bool empty() const { return m_rows.empty(); }
    long min_row() const { return m_min_row; }
    long max_row() const { return m_min_row + static_cast<long>(m_rows.size()) - 1; }
    const std::vector<column_range>& row(long s) const;
    bool contains(long r, long s) const;
    bool contains(lp_cell c) const { return contains(c.r, c.s); }
    std::uint64_t size() const;
    std::vector<lp_cell> cells() const;
    long leftmost(long s) const;
    long rightmost(long s) const;
    // Rows descending, '#' for members and '.' otherwise, columns 0..max.
    std::string grid() const;
    bool operator==(const infection_set&) const = default;

private:
    long m_step = 0;
    long m_min_row = 0;
    std::vector<std::vector<column_range>> m_rows;
};

infection_set advance(const infection_set& set, const step_primitives& p,
                      std::uint64_t cell_budget = default_cell_budget);
// Cells one step earlier that infect some member; p is the primitive record of set.step().
infection_set retreat(const infection_set& set, const step_primitives& p,
                      std::uint64_t cell_budget = default_cell_budget);

// Forward sets from `start` at step k: element i is the set at step k+i, i = 0..n.
std::vector<infection_set> infection_sets(lp_cell start, long k, long n, const realization& lp,
                                          std::uint64_t cell_budget = default_cell_budget);
infection_set infection_set_after(lp_cell start, long k, long n, const realization& lp,
                                  std::uint64_t cell_budget = default_cell_budget);
// Backward sets from `target` at step m: element i is the set at step m-i, i = 0..n.
std::vector<infection_set> backward_infection_sets(lp_cell target, long m, long n, const realization& lp,
                                                   std::uint64_t cell_budget = default_cell_budget);
infection_set backward_infection_set(lp_cell target, long m, long n, const realization& lp,
                                     std::uint64_t cell_budget = default_cell_budget);

struct infection_path {
    long first_step = 0;
    std::vector<lp_cell> cells;
    long last_step() const { return first_step + static_cast<long>(cells.size()) - 1; }
    const lp_cell& back() const { return cells.back(); }
};

bool is_infection_path(const infection_path& path, const realization& lp);

enum class path_direction { forward, reverse };

// Forward: from `start` at step k for n steps. Reverse: ends at `start` at step k, beginning at step k-n.
infection_path minimal_path(lp_cell start, long k, long n, const realization& lp,
                            path_direction dir = path_direction::forward);
std::vector<lp_cell> upper_right_sequence(lp_cell start, long k, long n, const realization& lp);
// Column envelopes from row envelopes: r_i = lo(layer(r_{i-1} + smin_{i-1})) and
// r_i = hi(layer(r_{i-1} + smax_{i-1})); the first element is r0.
std::vector<long> lower_column_envelope(long r0, const std::vector<long>& smin, long k, const realization& lp);
std::vector<long> upper_column_envelope(long r0, const std::vector<long>& smax, long k, const realization& lp);

infection_path greedy_path(lp_cell start, long block, long k, long n, const realization& lp,
                           std::optional<long> cap = std::nullopt,
                           path_direction dir = path_direction::forward,
                           std::uint64_t cell_budget = default_cell_budget);

struct shift_coupled {
    realization coupled;
    std::vector<long> r; // minimal path columns r_0..r_n in the coupled instance
};
// Coupled instance for steps 1..n in which the set from `start` at step 0 is the base set
// from (0,0) shifted by (r_i, start.s).
shift_coupled shift_coupling(lp_cell start, const realization& base, long n, std::uint64_t seed);

struct reverse_coupled {
    realization coupled;
    std::vector<long> z; // Z_0..Z_m
};
// Coupled instance for steps 1..m: step m-i of it is built from step i+1 of `base`.
reverse_coupled reverse_coupling(long u, long t, long m, const realization& base, std::uint64_t seed);

} // namespace arwlab

#endif
