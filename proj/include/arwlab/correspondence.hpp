#ifndef ARWLAB_CORRESPONDENCE_HPP
#define ARWLAB_CORRESPONDENCE_HPP

#include "arwlab/instructions.hpp"
#include "arwlab/layer.hpp"
#include "arwlab/odometer.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace arwlab {

// Boundary data of the class of extended odometers on [0,n] with u(0) = u0 and
// rt(u,0) - lt(u,1) = f0, stable on [1,n-1].
struct odometer_class_key {
    configuration sigma;
    long u0 = 0;
    long f0 = 0;
    long n = 1;
};

// Non-sleep instructions a_1, a_2, ... (a_1 = left) and sleep markers b_i, where b_i is set
// when a sleep sits between a_i and a_{i+1}. Either backed lazily by a stack or listed.
class reduced_instructions {
public:
    // Reads instr_site from index `start`, which must hold a left.
    static reduced_instructions from_stack(const stack_source& src, long site, long start);
    static reduced_instructions listed(std::vector<instruction> a, std::vector<bool> b);

    instruction a(long i) const;
    bool b(long i) const;
    // Stack index of a_i (stack-backed only).
    long source_index(long i) const;
    // Number of materializable entries; LONG_MAX when unbounded.
    long length() const;
    // Number of lefts among a_1..a_i.
    long lefts_through(long i) const;

private:
    struct state;
    std::shared_ptr<state> m;
};

reduced_instructions reduced_from_arw(const stack_source& src, const odometer_class_key& key, long v);

// Conversions between the two encodings of one step.
step_primitives to_primitives(const reduced_instructions& red);
reduced_instructions to_reduced(const step_primitives& prim, long length);

// Steps 1..n built directly from the stacks above the minimal odometer; step v comes from site v.
realization theta(const stack_source& src, const odometer_class_key& key);

// Path (r_v, s_v) with r_v = rt(u,v) - rt(m,v) and s_v the count of sleep-final sites in [1,v].
infection_path phi(const extended_odometer& u, const stack_source& src, const odometer_class_key& key);
// Smallest odometer mapped to `path` (first index of each run of sleeps).
extended_odometer chi(const infection_path& path, const stack_source& src, const odometer_class_key& key);

struct psi_value {
    long j = 0; // a_1..a_j executed
    int z = 0;  // final instruction is the sleep after a_j
    bool operator==(const psi_value&) const = default;
};
psi_value psi_map(const step_primitives& prim, lp_cell from, lp_cell to);
// All infections (from, to) with psi_map(...) == (j, z).
std::vector<std::pair<lp_cell, lp_cell>> psi_preimage(const step_primitives& prim, long j, int z);
// tau_v(k) for k >= m(v): non-sleep count over [m(v), k] and whether instr_v(k) is sleep.
psi_value tau(const stack_source& src, const odometer_class_key& key, long v, long k);

enum class enumeration_mode { stable, weak };
enum class sleep_run_policy { all, canonical };

struct weak_caps {
    long u0_lo = 0, u0_hi = 0;
    long f0_lo = 0, f0_hi = 0;
};

inline constexpr long default_index_budget = 10'000;
inline constexpr std::size_t default_result_budget = 1'000'000;

struct enumeration_options {
    sleep_run_policy policy = sleep_run_policy::all;
    long index_budget = default_index_budget; // per-site index range
    std::size_t result_budget = default_result_budget;
    std::optional<long> last_value; // keep only odometers with u(n) equal to this
};

// Stable mode: E^sos of `key`. Weak mode: nonnegative odometers on [0,key.n] weakly stable on
// [1,n-1] with u0, f0 ranging over `caps` (key.u0 and key.f0 are ignored). Sorted.
std::vector<extended_odometer> enumerate_stable_odometers(const stack_source& src, const odometer_class_key& key,
                                                          enumeration_mode mode = enumeration_mode::stable,
                                                          const weak_caps& caps = {},
                                                          const enumeration_options& opts = {});

// One tuple per line, for golden comparison.
std::string format_odometers(const std::vector<extended_odometer>& list);

// u0 making the class stable at 0 for f0 < 0: index of the (sigma(0) - f0)-th left at site 0.
long boundary_conditions(const stack_source& src, const configuration& sigma, long f0);
// Whether the endpoint satisfies r_n = f0 + sum_{v=1}^n |sigma(v)| - rt(m,n) - s_n.
bool stability_at_n(const infection_path& path, const stack_source& src, const odometer_class_key& key);

// Number of infection paths of n steps from (0,0) at step 0.
std::uint64_t count_infection_paths(const realization& lp, long n);
// All such paths, in lexicographic order of cells.
std::vector<infection_path> enumerate_infection_paths(const realization& lp, long n,
                                                      std::size_t budget = default_result_budget);

// Flows f_0..f_n change sign once: f_v <= 0 below some k and f_v >= 1 from k on.
bool single_sign_change(const std::vector<long>& f);

} // namespace arwlab

#endif
