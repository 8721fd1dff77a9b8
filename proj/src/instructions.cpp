#include "arwlab/instructions.hpp"
#include "arwlab/error.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <fstream>
#include <istream>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace arwlab {

char to_char(instruction in)
{
    switch (in) {
    case instruction::left: return 'L';
    case instruction::right: return 'R';
    case instruction::sleep: return 'S';
    }
    return '?';
}

instruction instruction_from_char(char c)
{
    switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'L': return instruction::left;
    case 'R': return instruction::right;
    case 'S': return instruction::sleep;
    default: throw config_invalid(std::string("bad instruction letter '") + c + "'");
    }
}

// pos[k]: counts over 1..k*stride; neg[k]: counts over -k*stride..-1 (unsigned).
struct stack_source::cache {
    struct site_checkpoints {
        std::vector<lr_counts> pos{lr_counts{}};
        std::vector<lr_counts> neg{lr_counts{}};
    };
    std::mutex mutex;
    std::unordered_map<long, site_checkpoints> sites;
};

stack_source stack_source::seeded(std::uint64_t master_seed, double lambda)
{
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw config_invalid("lambda must be positive");
    stack_source src;
    src.m_seeded = true;
    src.m_lambda = lambda;
    src.m_seed = master_seed;
    const long double two64 = 18446744073709551616.0L;
    const long double p_sleep = static_cast<long double>(lambda) / (1.0L + lambda);
    const long double sleep_cut = std::min(p_sleep * two64, two64 - 1.0L);
    src.m_sleep_threshold = static_cast<std::uint64_t>(sleep_cut);
    src.m_left_threshold =
        src.m_sleep_threshold + (std::numeric_limits<std::uint64_t>::max() - src.m_sleep_threshold) / 2;
    src.m_cache = std::make_unique<cache>();
    return src;
}

stack_source stack_source::fixture(std::map<long, fixture_row> table)
{
    stack_source src;
    src.m_table = std::move(table);
    src.m_cache = std::make_unique<cache>();
    return src;
}

stack_source stack_source::parse_fixture(std::istream& in)
{
    std::map<long, fixture_row> table;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word))
            continue;
        if (word != "site")
            throw config_invalid("fixture line must start with 'site': " + line);
        long site = 0;
        char colon = 0;
        std::string letters;
        if (!(ls >> site >> colon) || colon != ':')
            throw config_invalid("malformed fixture line: " + line);
        ls >> letters;
        fixture_row row;
        row.first = 1;
        for (char c : letters)
            row.instrs.push_back(instruction_from_char(c));
        table[site] = std::move(row);
    }
    return fixture(std::move(table));
}

stack_source stack_source::load_fixture(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_invalid("cannot open fixture " + path);
    return parse_fixture(in);
}

stack_source::stack_source(const stack_source& other)
    : m_seeded(other.m_seeded), m_lambda(other.m_lambda), m_seed(other.m_seed),
      m_sleep_threshold(other.m_sleep_threshold), m_left_threshold(other.m_left_threshold),
      m_table(other.m_table), m_cache(std::make_unique<cache>())
{
}

stack_source& stack_source::operator=(const stack_source& other)
{
    if (this != &other) {
        stack_source copy(other);
        *this = std::move(copy);
    }
    return *this;
}

stack_source::stack_source(stack_source&&) noexcept = default;
stack_source& stack_source::operator=(stack_source&&) noexcept = default;
stack_source::~stack_source() = default;

std::pair<long, long> stack_source::window(long site) const
{
    if (m_seeded)
        return {LONG_MIN, LONG_MAX};
    auto it = m_table.find(site);
    if (it == m_table.end())
        return {0, 0};
    long lo = std::min(0L, it->second.first);
    long hi = std::max(0L, it->second.first + static_cast<long>(it->second.instrs.size()) - 1);
    return {lo, hi};
}

instruction stack_source::fixture_at(long site, long index) const
{
    auto it = m_table.find(site);
    if (it == m_table.end())
        throw fixture_out_of_window(site, index);
    const fixture_row& row = it->second;
    long offset = index - row.first;
    if (offset < 0 || offset >= static_cast<long>(row.instrs.size()))
        throw fixture_out_of_window(site, index);
    return row.instrs[static_cast<std::size_t>(offset)];
}

// Unsigned counts over the inclusive index range [from, to].
lr_counts stack_source::scan(long site, long from, long to) const
{
    lr_counts c;
    if (m_seeded) {
        const std::uint64_t key = site_key(site);
        for (long i = from; i <= to; ++i) {
            instruction in = i == 0 ? instruction::left : from_word(hash_word(key, i));
            c.lefts += in == instruction::left;
            c.rights += in == instruction::right;
        }
    } else {
        for (long i = from; i <= to; ++i) {
            instruction in = at(site, i);
            c.lefts += in == instruction::left;
            c.rights += in == instruction::right;
        }
    }
    return c;
}

lr_counts stack_source::signed_lr_counts(long site, long u) const
{
    if (u == 0)
        return {};
    if (!m_seeded) {
        if (u > 0)
            return scan(site, 1, u);
        lr_counts c = scan(site, u + 1, 0);
        return {-c.lefts, -c.rights};
    }
    const long stride = checkpoint_stride;
    std::lock_guard lock(m_cache->mutex);
    auto& cp = m_cache->sites[site];
    if (u > 0) {
        const std::size_t k = static_cast<std::size_t>(u / stride);
        while (cp.pos.size() <= k) {
            long start = static_cast<long>(cp.pos.size() - 1) * stride;
            lr_counts block = scan(site, start + 1, start + stride);
            lr_counts last = cp.pos.back();
            cp.pos.push_back({last.lefts + block.lefts, last.rights + block.rights});
        }
        lr_counts base = cp.pos[k];
        long done = static_cast<long>(k) * stride;
        if (done < u) {
            lr_counts rest = scan(site, done + 1, u);
            base.lefts += rest.lefts;
            base.rights += rest.rights;
        }
        return base;
    }
    // indices -w..0 where w = -u-1
    const long w = -u - 1;
    const std::size_t k = static_cast<std::size_t>(w / stride);
    while (cp.neg.size() <= k) {
        long start = static_cast<long>(cp.neg.size() - 1) * stride;
        lr_counts block = scan(site, -(start + stride), -(start + 1));
        lr_counts last = cp.neg.back();
        cp.neg.push_back({last.lefts + block.lefts, last.rights + block.rights});
    }
    lr_counts c = cp.neg[k];
    long done = static_cast<long>(k) * stride;
    if (done < w) {
        lr_counts rest = scan(site, -w, -(done + 1));
        c.lefts += rest.lefts;
        c.rights += rest.rights;
    }
    c.lefts += 1; // index 0
    return {-c.lefts, -c.rights};
}

long stack_source::nth_left_index(long site, long n) const
{
    if (n == 0)
        return 0;
    if (!m_seeded) {
        long seen = 0;
        if (n > 0) {
            for (long i = 1;; ++i)
                if (at(site, i) == instruction::left && ++seen == n)
                    return i;
        }
        for (long i = -1;; --i)
            if (at(site, i) == instruction::left && ++seen == -n)
                return i;
    }
    const long stride = checkpoint_stride;
    std::lock_guard lock(m_cache->mutex);
    auto& cp = m_cache->sites[site];
    const std::uint64_t key = site_key(site);
    if (n > 0) {
        while (cp.pos.back().lefts < n) {
            long start = static_cast<long>(cp.pos.size() - 1) * stride;
            lr_counts block = scan(site, start + 1, start + stride);
            lr_counts last = cp.pos.back();
            cp.pos.push_back({last.lefts + block.lefts, last.rights + block.rights});
        }
        // largest k with pos[k].lefts < n
        auto it = std::lower_bound(cp.pos.begin(), cp.pos.end(), n,
                                   [](const lr_counts& c, long v) { return c.lefts < v; });
        std::size_t k = static_cast<std::size_t>(it - cp.pos.begin()) - 1;
        long seen = cp.pos[k].lefts;
        for (long i = static_cast<long>(k) * stride + 1;; ++i)
            if (from_word(hash_word(key, i)) == instruction::left && ++seen == n)
                return i;
    }
    const long target = -n;
    while (cp.neg.back().lefts < target) {
        long start = static_cast<long>(cp.neg.size() - 1) * stride;
        lr_counts block = scan(site, -(start + stride), -(start + 1));
        lr_counts last = cp.neg.back();
        cp.neg.push_back({last.lefts + block.lefts, last.rights + block.rights});
    }
    auto it = std::lower_bound(cp.neg.begin(), cp.neg.end(), target,
                               [](const lr_counts& c, long v) { return c.lefts < v; });
    std::size_t k = static_cast<std::size_t>(it - cp.neg.begin()) - 1;
    long seen = cp.neg[k].lefts;
    for (long i = -(static_cast<long>(k) * stride + 1);; --i)
        if (from_word(hash_word(key, i)) == instruction::left && ++seen == target)
            return i;
}

} // namespace arwlab
