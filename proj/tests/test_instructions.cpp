#include "arwlab/error.hpp"
#include "arwlab/instructions.hpp"
#include "arwlab/stats.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace arwlab;

namespace {

stack_source example()
{
    return stack_source::load_fixture(ARWLAB_DATA_DIR "/example_stacks.txt");
}

// Oracle: walk the stack one index at a time.
lr_counts naive_counts(const stack_source& src, long site, long u)
{
    lr_counts c;
    long lo = u >= 0 ? 1 : u + 1, hi = u >= 0 ? u : 0;
    for (long i = lo; i <= hi; ++i) {
        instruction in = src.at(site, i);
        c.lefts += in == instruction::left ? 1 : 0;
        c.rights += in == instruction::right ? 1 : 0;
    }
    if (u < 0) {
        c.lefts = -c.lefts;
        c.rights = -c.rights;
    }
    return c;
}

long naive_nth_left(const stack_source& src, long site, long n)
{
    if (n == 0)
        return 0;
    long step = n > 0 ? 1 : -1, seen = 0;
    for (long i = step;; i += step)
        if (src.at(site, i) == instruction::left && ++seen == (n > 0 ? n : -n))
            return i;
}

} // namespace

TEST_CASE("fixture lookups", "[instructions]")
{
    stack_source src = example();
    CHECK(src.at(0, 2) == instruction::right);
    CHECK(src.at(0, 0) == instruction::left);
    CHECK(src.at(1, 1) == instruction::right);
    CHECK(src.at(2, 25) == instruction::sleep);
    CHECK_THROWS_AS(src.at(0, 26), fixture_out_of_window);
    CHECK_THROWS_AS(src.at(0, -1), fixture_out_of_window);
    CHECK_THROWS_AS(src.at(5, 1), fixture_out_of_window);
}

TEST_CASE("fixture left indices and counts", "[instructions]")
{
    stack_source src = example();
    CHECK(src.nth_left_index(1, 7) == 19);
    CHECK(src.nth_left_index(2, 5) == 11);
    CHECK(src.nth_left_index(0, 0) == 0);
    CHECK(src.signed_lr_counts(0, 20) == lr_counts{7, 9});
    CHECK(src.signed_lr_counts(1, 0) == lr_counts{0, 0});
    CHECK_THROWS_AS(src.nth_left_index(0, 100), fixture_out_of_window);
}

TEST_CASE("fixture parsing", "[instructions]")
{
    std::istringstream in("# comment\nsite 4: LRS\n\nsite -1: S\n");
    stack_source src = stack_source::parse_fixture(in);
    CHECK(src.at(4, 1) == instruction::left);
    CHECK(src.at(4, 3) == instruction::sleep);
    CHECK(src.at(-1, 1) == instruction::sleep);
    CHECK(src.window(4) == std::pair<long, long>{0, 3});
    std::istringstream bad("site 1: LXR\n");
    CHECK_THROWS_AS(stack_source::parse_fixture(bad), error);
}

TEST_CASE("seeded stacks are deterministic with a left at index 0", "[instructions]")
{
    stack_source a = stack_source::seeded(42, 1.0), b = stack_source::seeded(42, 1.0);
    CHECK(a.at(7, 0) == instruction::left);
    CHECK(a.at(3, 5) == a.at(3, 5));
    for (long i = -50; i <= 50; ++i)
        CHECK(a.at(-3, i) == b.at(-3, i));
    CHECK(a.signed_lr_counts(2, 5000) == b.signed_lr_counts(2, 5000));
}

TEST_CASE("negative index counts", "[instructions]")
{
    stack_source src = stack_source::seeded(5, 1.0);
    CHECK(src.signed_lr_counts(0, -1) == lr_counts{-1, 0});
    for (long u : {-1L, -2L, -17L, -3000L})
        CHECK(src.signed_lr_counts(9, u) == naive_counts(src, 9, u));
}

TEST_CASE("counts and left indices agree with a linear scan", "[instructions][property]")
{
    for (double lambda : {0.25, 1.0, 3.0}) {
        stack_source src = stack_source::seeded(11, lambda);
        for (long site = -2; site <= 2; ++site) {
            for (long u : {0L, 1L, 5L, 1023L, 1024L, 1025L, 2049L, 5000L, -5L, -1024L, -2500L})
                CHECK(src.signed_lr_counts(site, u) == naive_counts(src, site, u));
            long prev = src.nth_left_index(site, -40);
            for (long n = -39; n <= 800; ++n) {
                long idx = src.nth_left_index(site, n);
                REQUIRE(idx > prev);
                REQUIRE(src.at(site, idx) == instruction::left);
                prev = idx;
            }
            for (long n : {-30L, -1L, 0L, 1L, 300L, 700L})
                CHECK(src.nth_left_index(site, n) == naive_nth_left(src, site, n));
        }
    }
}

TEST_CASE("signed counts are additive", "[instructions][property]")
{
    stack_source src = stack_source::seeded(99, 0.5);
    for (long a = 0; a <= 3000; a += 371)
        for (long b = a; b <= 4000; b += 523) {
            lr_counts whole = src.signed_lr_counts(4, b), head = src.signed_lr_counts(4, a);
            lr_counts tail;
            for (long i = a + 1; i <= b; ++i) {
                tail.lefts += src.at(4, i) == instruction::left ? 1 : 0;
                tail.rights += src.at(4, i) == instruction::right ? 1 : 0;
            }
            CHECK(whole.lefts == head.lefts + tail.lefts);
            CHECK(whole.rights == head.rights + tail.rights);
        }
}

TEST_CASE("seeded marginal law", "[instructions][statistical]")
{
    for (double lambda : {0.5, 1.0, 2.0}) {
        stack_source src = stack_source::seeded(2024, lambda);
        std::vector<long> counts(3, 0);
        for (long v = 0; v < 100; ++v)
            for (long i = 1; i <= 1000; ++i)
                ++counts[static_cast<std::size_t>(src.at(v, i))];
        const double side = 0.5 / (1.0 + lambda);
        test_result t = chi_square_test(counts, {side, side, lambda / (1.0 + lambda)});
        INFO("lambda=" << lambda << " p=" << t.p_value);
        CHECK(t.p_value >= 1e-3);
    }
}
