#include "arwlab/odometer.hpp"
#include "arwlab/error.hpp"

#include <algorithm>
#include <sstream>

namespace arwlab {

configuration::configuration(long first, std::vector<int> states)
    : m_first(first), m_states(std::move(states))
{
    for (int s : m_states)
        if (s < sleeping_state)
            throw config_invalid("negative particle count in configuration");
}

configuration configuration::uniform(long a, long b, int count)
{
    return configuration(a, std::vector<int>(static_cast<std::size_t>(std::max(0L, b - a + 1)), count));
}

int configuration::state(long v) const
{
    long i = v - m_first;
    if (i < 0 || i >= static_cast<long>(m_states.size()))
        return 0;
    return m_states[static_cast<std::size_t>(i)];
}

bool configuration::has_sleepers() const
{
    return std::find(m_states.begin(), m_states.end(), sleeping_state) != m_states.end();
}

long configuration::total() const
{
    long t = 0;
    for (int s : m_states)
        t += s == sleeping_state ? 1 : s;
    return t;
}

long configuration::sleepers() const
{
    return std::count(m_states.begin(), m_states.end(), sleeping_state);
}

void configuration::set(long v, int state)
{
    if (m_states.empty()) {
        m_first = v;
        m_states.assign(1, 0);
    }
    if (v < m_first) {
        m_states.insert(m_states.begin(), static_cast<std::size_t>(m_first - v), 0);
        m_first = v;
    } else if (v > last()) {
        m_states.resize(static_cast<std::size_t>(v - m_first + 1), 0);
    }
    m_states[static_cast<std::size_t>(v - m_first)] = state;
}

bool configuration::operator==(const configuration& other) const
{
    long a = std::min(first(), other.first());
    long b = std::max(last(), other.last());
    if (empty_support())
        a = other.first(), b = other.last();
    if (other.empty_support())
        a = first(), b = last();
    for (long v = a; v <= b; ++v)
        if (state(v) != other.state(v))
            return false;
    return true;
}

std::string configuration::serialize() const
{
    std::ostringstream out;
    for (long v = first(); v <= last(); ++v) {
        out << v << '\t';
        if (sleeping(v))
            out << 's';
        else
            out << state(v);
        out << '\n';
    }
    return out.str();
}

void extended_odometer::set(long v, long value)
{
    if (m_values.empty()) {
        m_first = v;
        m_values.assign(1, 0);
    }
    if (v < m_first) {
        m_values.insert(m_values.begin(), static_cast<std::size_t>(m_first - v), 0);
        m_first = v;
    } else if (v > last()) {
        m_values.resize(static_cast<std::size_t>(v - m_first + 1), 0);
    }
    m_values[static_cast<std::size_t>(v - m_first)] = value;
}

bool extended_odometer::operator==(const extended_odometer& other) const
{
    long a = std::min(first(), other.first());
    long b = std::max(last(), other.last());
    for (long v = a; v <= b; ++v)
        if ((*this)(v) != other(v))
            return false;
    return true;
}

bool extended_odometer::operator<(const extended_odometer& other) const
{
    if (m_first != other.m_first)
        return m_first < other.m_first;
    return m_values < other.m_values;
}

bool extended_odometer::pointwise_le(const extended_odometer& other) const
{
    long a = std::min(first(), other.first());
    long b = std::max(last(), other.last());
    for (long v = a; v <= b; ++v)
        if ((*this)(v) > other(v))
            return false;
    return true;
}

std::string extended_odometer::serialize() const
{
    std::ostringstream out;
    for (long v = first(); v <= last(); ++v)
        out << v << '\t' << (*this)(v) << '\n';
    return out.str();
}

extended_odometer extended_odometer::parse(const std::string& text)
{
    std::istringstream in(text);
    extended_odometer u;
    long v = 0, value = 0;
    while (in >> v >> value)
        u.set(v, value);
    return u;
}

bool final_is_sleep(const stack_source& src, long v, long u_v)
{
    return u_v != 0 && src.at(v, u_v) == instruction::sleep;
}

long height(const extended_odometer& u, const configuration& sigma, const stack_source& src, long v)
{
    lr_counts here = src.signed_lr_counts(v, u(v));
    long rt_left = src.signed_lr_counts(v - 1, u(v - 1)).rights;
    long lt_right = src.signed_lr_counts(v + 1, u(v + 1)).lefts;
    return sigma.count(v) + rt_left + lt_right - here.lefts - here.rights;
}

bool stability_check(const extended_odometer& u, const configuration& sigma, const stack_source& src,
                     const std::vector<long>& sites, stability_mode mode)
{
    for (long v : sites) {
        if (sigma.sleeping(v))
            throw config_invalid("stability_check requires a configuration without sleepers");
        long h = height(u, sigma, src, v);
        if (h != 0 && h != 1)
            return false;
        bool sleep_final = final_is_sleep(src, v, u(v));
        if (mode == stability_mode::stable && (h == 1) != sleep_final)
            return false;
        if (mode == stability_mode::weak && h == 1 && !sleep_final)
            return false;
    }
    return true;
}

bool stability_check(const extended_odometer& u, const configuration& sigma, const stack_source& src,
                     long a, long b, stability_mode mode)
{
    std::vector<long> sites;
    for (long v = a; v <= b; ++v)
        sites.push_back(v);
    return stability_check(u, sigma, src, sites, mode);
}

flow_profile flows(const extended_odometer& u, const stack_source& src)
{
    flow_profile p;
    p.first = u.first();
    long sleeps = 0;
    for (long v = u.first(); v <= u.last(); ++v) {
        long rt = src.signed_lr_counts(v, u(v)).rights;
        long lt_next = src.signed_lr_counts(v + 1, u(v + 1)).lefts;
        p.f.push_back(rt - lt_next);
        if (v >= 1 && final_is_sleep(src, v, u(v)))
            ++sleeps;
        p.s.push_back(v >= 1 ? sleeps : 0);
    }
    return p;
}

extended_odometer minimal_odometer(const stack_source& src, const configuration& sigma, long u0, long f0,
                                   long n)
{
    if (n < 0)
        throw config_invalid("minimal_odometer needs n >= 0");
    std::vector<long> m(static_cast<std::size_t>(n + 1));
    m[0] = u0;
    long mass = 0; // sum_{i=1}^{v-1} |sigma(i)|
    for (long v = 1; v <= n; ++v) {
        long rt_prev = src.signed_lr_counts(v - 1, m[static_cast<std::size_t>(v - 1)]).rights;
        long target = rt_prev - f0 - mass;
        m[static_cast<std::size_t>(v)] = src.nth_left_index(v, target);
        mass += sigma.count(v);
    }
    return extended_odometer(0, std::move(m));
}

} // namespace arwlab
