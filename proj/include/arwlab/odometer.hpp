#ifndef ARWLAB_ODOMETER_HPP
#define ARWLAB_ODOMETER_HPP

#include "arwlab/instructions.hpp"

#include <string>
#include <vector>

namespace arwlab {

// Site states: sleeping_state is the single sleeping particle, otherwise the active count.
inline constexpr int sleeping_state = -1;

// Finite-support particle configuration; every site outside the support is empty.
class configuration {
public:
    configuration() = default;
    configuration(long first, std::vector<int> states);
    static configuration uniform(long a, long b, int count);

    long first() const { return m_first; }
    long last() const { return m_first + static_cast<long>(m_states.size()) - 1; }
    bool empty_support() const { return m_states.empty(); }

    int state(long v) const;
    int count(long v) const { int s = state(v); return s == sleeping_state ? 1 : s; }
    bool sleeping(long v) const { return state(v) == sleeping_state; }
    bool has_sleepers() const;
    long total() const;
    long sleepers() const;
    void set(long v, int state);

    const std::vector<int>& states() const { return m_states; }
    bool operator==(const configuration& other) const;
    std::string serialize() const;

private:
    long m_first = 0;
    std::vector<int> m_states;
};

// Integer-valued function on [first, last], zero elsewhere. Values may be negative.
class extended_odometer {
public:
    extended_odometer() = default;
    extended_odometer(long first, std::vector<long> values)
        : m_first(first), m_values(std::move(values)) {}

    long operator()(long v) const
    {
        long i = v - m_first;
        return (i < 0 || i >= static_cast<long>(m_values.size())) ? 0 : m_values[static_cast<std::size_t>(i)];
    }
    long first() const { return m_first; }
    long last() const { return m_first + static_cast<long>(m_values.size()) - 1; }
    std::size_t size() const { return m_values.size(); }
    const std::vector<long>& values() const { return m_values; }
    void set(long v, long value);

    bool operator==(const extended_odometer& other) const;
    bool operator<(const extended_odometer& other) const;
    bool pointwise_le(const extended_odometer& other) const;
    std::string serialize() const;
    static extended_odometer parse(const std::string& text);

private:
    long m_first = 0;
    std::vector<long> m_values;
};

// Final executed instruction is sleep; an empty odometer executes nothing.
bool final_is_sleep(const stack_source& src, long v, long u_v);

long height(const extended_odometer& u, const configuration& sigma, const stack_source& src, long v);

enum class stability_mode { stable, weak };

bool stability_check(const extended_odometer& u, const configuration& sigma, const stack_source& src,
                     const std::vector<long>& sites, stability_mode mode);
bool stability_check(const extended_odometer& u, const configuration& sigma, const stack_source& src,
                     long a, long b, stability_mode mode);

// f_v = rt(u,v) - lt(u,v+1); s_v = #{1 <= v' <= v : final instruction at v' is sleep}.
struct flow_profile {
    long first = 0;
    std::vector<long> f;
    std::vector<long> s;
    long f_at(long v) const { return f[static_cast<std::size_t>(v - first)]; }
    long s_at(long v) const { return s[static_cast<std::size_t>(v - first)]; }
};

flow_profile flows(const extended_odometer& u, const stack_source& src);

// m(0) = u0 and m(v) the least index with lt(m,v) = rt(m,v-1) - f0 - sum_{i<v} |sigma(i)|.
extended_odometer minimal_odometer(const stack_source& src, const configuration& sigma, long u0, long f0,
                                   long n);

} // namespace arwlab

#endif
