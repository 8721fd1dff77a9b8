#ifndef ARWLAB_INSTRUCTIONS_HPP
#define ARWLAB_INSTRUCTIONS_HPP

#include "arwlab/random.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace arwlab {

enum class instruction : std::uint8_t { left, right, sleep };

char to_char(instruction in);
instruction instruction_from_char(char c);

struct lr_counts {
    long lefts = 0;
    long rights = 0;
    bool operator==(const lr_counts&) const = default;
};

// Contiguous block of fixture instructions starting at index `first`.
struct fixture_row {
    long first = 1;
    std::vector<instruction> instrs;
};

// Two-sided instruction stacks, one per site. Index 0 is always left.
class stack_source {
public:
    static constexpr long checkpoint_stride = 1024;

    static stack_source seeded(std::uint64_t master_seed, double lambda);
    static stack_source fixture(std::map<long, fixture_row> table);
    // Lines of the form "site <v>: <LRS string for indices 1..n>".
    static stack_source parse_fixture(std::istream& in);
    static stack_source load_fixture(const std::string& path);

    stack_source(const stack_source& other);
    stack_source& operator=(const stack_source& other);
    stack_source(stack_source&&) noexcept;
    stack_source& operator=(stack_source&&) noexcept;
    ~stack_source();

    bool is_seeded() const { return m_seeded; }
    double lambda() const { return m_lambda; }
    std::uint64_t master_seed() const { return m_seed; }

    instruction at(long site, long index) const
    {
        if (index == 0)
            return instruction::left;
        if (m_seeded)
            return from_word(hash_word(site_key(site), index));
        return fixture_at(site, index);
    }

    // Fast path for seeded sources: key once per site, then one mix per index.
    std::uint64_t site_key(long site) const { return hash_key(m_seed, static_cast<std::uint64_t>(site)); }
    static std::uint64_t hash_word(std::uint64_t key, long index)
    {
        return mix64(key ^ (static_cast<std::uint64_t>(index) * 0xd1b54a32d192ed03ULL));
    }
    instruction from_word(std::uint64_t w) const
    {
        if (w < m_sleep_threshold)
            return instruction::sleep;
        return w < m_left_threshold ? instruction::left : instruction::right;
    }

    // Raw thresholds for seeded sources: below sleep_threshold is sleep, then left, then right.
    std::uint64_t sleep_threshold() const { return m_sleep_threshold; }
    std::uint64_t left_threshold() const { return m_left_threshold; }

    // n>0: index of the n-th left after 0; n=0: 0; n<0: the |n|-th left before 0.
    long nth_left_index(long site, long n) const;

    // u>=0: counts over 1..u; u<0: negated counts over u+1..0.
    lr_counts signed_lr_counts(long site, long u) const;

    // Declared window of a fixture site, or {LONG_MIN, LONG_MAX} when seeded.
    std::pair<long, long> window(long site) const;

private:
    stack_source() = default;
    instruction fixture_at(long site, long index) const;
    lr_counts scan(long site, long from, long to) const;

    struct cache;

    bool m_seeded = false;
    double m_lambda = 0.0;
    std::uint64_t m_seed = 0;
    std::uint64_t m_sleep_threshold = 0;
    std::uint64_t m_left_threshold = 0;
    std::map<long, fixture_row> m_table;
    std::unique_ptr<cache> m_cache;
};

} // namespace arwlab

#endif
