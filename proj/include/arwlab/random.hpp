#ifndef ARWLAB_RANDOM_HPP
#define ARWLAB_RANDOM_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace arwlab {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_key(std::uint64_t seed, std::uint64_t a)
{
    return mix64(mix64(seed) ^ a);
}

constexpr std::uint64_t hash_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    return mix64(hash_key(seed, a) ^ (b * 0xd6e8feb86659fd93ULL));
}

constexpr std::uint64_t hash_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                 std::uint64_t c)
{
    return mix64(hash_key(seed, a, b) ^ (c * 0xa0761d6478bd642fULL));
}

// uniform on [0,1) from the top 53 bits
inline double to_unit(std::uint64_t w)
{
    return static_cast<double>(w >> 11) * 0x1.0p-53;
}

// Counter-mode generator: the i-th output is mix64(key + i * gamma).
class counter_rng {
public:
    using result_type = std::uint64_t;

    explicit counter_rng(std::uint64_t key = 0) : m_key(mix64(key)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        return mix64(m_key + (++m_counter) * 0x9e3779b97f4a7c15ULL);
    }

    double uniform() { return to_unit((*this)()); }

    bool bernoulli(double p) { return uniform() < p; }

    long below(long n) { return static_cast<long>(uniform() * static_cast<double>(n)); }

private:
    std::uint64_t m_key;
    std::uint64_t m_counter = 0;
};

// Geo(1/2) on {0,1,...}: trailing zeros of a uniform word.
inline long geometric_half(std::uint64_t w)
{
    return w == 0 ? 64 : std::countr_zero(w);
}

// Geo(p) on {0,1,...} by inversion.
inline long geometric(double p, double u)
{
    if (p >= 1.0)
        return 0;
    return static_cast<long>(std::floor(std::log1p(-u) / std::log1p(-p)));
}

// Sum of n independent Geo(1/2) variables.
template <class Rng>
long negative_binomial_half(long n, Rng& rng)
{
    if (n <= 0)
        return 0;
    if (n <= 64) {
        long total = 0;
        for (long i = 0; i < n; ++i)
            total += geometric_half(rng());
        return total;
    }
    std::negative_binomial_distribution<long> dist(n, 0.5);
    return dist(rng);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replica)
{
    return hash_key(master, 0x5eedULL, replica);
}

} // namespace arwlab

#endif
