#include "arwlab/correspondence.hpp"
#include "arwlab/error.hpp"
#include "arwlab/random.hpp"
#include "arwlab/stats.hpp"
#include "arwlab/verify.hpp"

#include <catch_amalgamated.hpp>

#include <set>
#include <sstream>
#include <string>

using namespace arwlab;

namespace {

stack_source example()
{
    return stack_source::load_fixture(ARWLAB_DATA_DIR "/example_stacks.txt");
}

odometer_class_key example_key()
{
    return {configuration::uniform(0, 2, 1), 20, 2, 2};
}

std::vector<instruction> parse_letters(const std::string& s)
{
    std::vector<instruction> out;
    for (char c : s)
        out.push_back(c == 'L' ? instruction::left : c == 'R' ? instruction::right : instruction::sleep);
    return out;
}

infection_path make_path(std::vector<lp_cell> cells)
{
    return {0, std::move(cells)};
}

} // namespace

TEST_CASE("worked example odometers", "[correspondence]")
{
    stack_source src = example();
    enumeration_options all;
    auto full = enumerate_stable_odometers(src, example_key(), enumeration_mode::stable, {}, all);
    const std::string expected = "(20,19,11)\n(20,19,12)\n(20,19,13)\n(20,20,14)\n(20,21,15)\n(20,21,16)\n"
                                 "(20,22,15)\n(20,22,16)\n(20,23,17)\n(20,23,18)\n(20,23,19)\n(20,23,20)\n"
                                 "(20,23,21)\n(20,23,22)\n";
    CHECK(full.size() == 14);
    CHECK(format_odometers(full) == expected);
    // one representative per sleep run: indices 21 and 22 at site 2 are consecutive sleeps
    enumeration_options canon;
    canon.policy = sleep_run_policy::canonical;
    auto reps = enumerate_stable_odometers(src, example_key(), enumeration_mode::stable, {}, canon);
    CHECK(reps.size() == 13);
    CHECK(std::find(reps.begin(), reps.end(), extended_odometer(0, {20, 23, 22})) == reps.end());
    CHECK(count_infection_paths(theta(src, example_key()), 2) == 13);

    // trivial class: no mass, no flow, and stacks of lefts only
    std::istringstream lefts("site 0: LLLLLLLL\nsite 1: LLLLLLLL\nsite 2: LLLLLLLL\nsite 3: LLLLLLLL\n");
    stack_source degenerate = stack_source::parse_fixture(lefts);
    odometer_class_key empty{configuration::uniform(0, 3, 0), 0, 0, 3};
    auto single = enumerate_stable_odometers(degenerate, empty, enumeration_mode::stable, {}, canon);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == minimal_odometer(degenerate, empty.sigma, 0, 0, 3));
}

TEST_CASE("reduced instructions of the example", "[correspondence]")
{
    stack_source src = example();
    reduced_instructions two = reduced_from_arw(src, example_key(), 2);
    auto a = parse_letters("LRLLLRRLL");
    const std::string b = "010110101";
    for (long i = 1; i <= 9; ++i) {
        CHECK(two.a(i) == a[static_cast<std::size_t>(i - 1)]);
        CHECK(two.b(i) == (b[static_cast<std::size_t>(i - 1)] == '1'));
    }
    CHECK(two.source_index(1) == 11);
    reduced_instructions one = reduced_from_arw(src, example_key(), 1);
    CHECK(one.a(1) == instruction::left);
    CHECK(one.a(2) == instruction::right);
    CHECK(one.a(3) == instruction::right);
    CHECK_FALSE(one.b(1));
    CHECK(one.b(2));
    CHECK(one.b(3));
}

TEST_CASE("reduced and primitive forms convert", "[correspondence]")
{
    step_primitives p = to_primitives(reduced_instructions::listed(parse_letters("LRL"), {false, true, false}));
    CHECK(p.width(0) == 1);
    CHECK_FALSE(p.marker(0, 0));
    CHECK(p.marker(0, 1));
    // no rights and no sleeps: zero widths
    step_primitives z = to_primitives(reduced_instructions::listed(parse_letters("LLLLL"), std::vector<bool>(5, false)));
    for (long j = 0; j < 3; ++j) {
        CHECK(z.width(j) == 0);
        CHECK_FALSE(z.marker(j, 0));
    }
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        step_primitives s = step_primitives::sampled(seed, 1, seed % 2 ? 1.0 : 0.3);
        const long length = 40;
        reduced_instructions red = to_reduced(s, length);
        REQUIRE(red.a(1) == instruction::left);
        step_primitives back = to_primitives(red);
        // diagonals fully inside the first `length` entries
        for (long j = 0; red.lefts_through(length) > j + 1; ++j) {
            REQUIRE(back.width(j) == s.width(j));
            for (long i = 0; i <= s.width(j); ++i)
                REQUIRE(back.marker(j, i) == s.marker(j, i));
        }
        reduced_instructions again = to_reduced(back, 20);
        for (long i = 1; i <= 20; ++i) {
            REQUIRE(again.a(i) == red.a(i));
            REQUIRE(again.b(i) == red.b(i));
        }
    }
}

TEST_CASE("theta on the example", "[correspondence]")
{
    stack_source src = example();
    realization lp = theta(src, example_key());
    const step_primitives& one = lp.step(1);
    CHECK(one.width(0) == 2);
    CHECK_FALSE(one.marker(0, 0));
    CHECK(one.marker(0, 1));
    CHECK(one.marker(0, 2));
    const step_primitives& two = lp.step(2);
    const std::vector<long> widths{1, 0, 0, 2, 0};
    const std::vector<std::vector<int>> markers{{0, 1}, {0}, {1}, {1, 0, 1}, {0}};
    for (long j = 0; j < 5; ++j) {
        REQUIRE(two.width(j) == widths[static_cast<std::size_t>(j)]);
        for (long i = 0; i <= widths[static_cast<std::size_t>(j)]; ++i)
            CHECK(two.marker(j, i) == (markers[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] == 1));
    }
    auto sets = infection_sets({0, 0}, 0, 2, lp);
    CHECK(sets[1].grid() == ".##\n###\n");
    CHECK(sets[2].grid() == ".#.#\n.###\n##..\n");
}

TEST_CASE("theta equals the reduced instructions", "[correspondence][property]")
{
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        class_instance inst = random_class_instance(seed, 5);
        realization lp = theta(inst.src, inst.key);
        for (long v = 1; v <= inst.key.n; ++v) {
            reduced_instructions red = reduced_from_arw(inst.src, inst.key, v);
            reduced_instructions from_theta = to_reduced(lp.step(v), 30);
            for (long i = 1; i <= 30; ++i) {
                REQUIRE(from_theta.a(i) == red.a(i));
                REQUIRE(from_theta.b(i) == red.b(i));
            }
        }
    }
}

TEST_CASE("phi and chi on the example", "[correspondence]")
{
    stack_source src = example();
    odometer_class_key key = example_key();
    infection_path p = phi(extended_odometer(0, {20, 21, 16}), src, key);
    CHECK(p.cells == std::vector<lp_cell>{{0, 0}, {1, 1}, {1, 2}});
    infection_path m = phi(extended_odometer(0, {20, 19, 11}), src, key);
    CHECK(m.cells == std::vector<lp_cell>{{0, 0}, {0, 0}, {0, 0}});
    extended_odometer u = chi(make_path({{0, 0}, {1, 1}, {1, 2}}), src, key);
    CHECK(u(1) == 21);
    CHECK(u(2) == 16);
    CHECK(chi(make_path({{0, 0}, {0, 0}, {0, 0}}), src, key) == minimal_odometer(src, key.sigma, 20, 2, 2));
    CHECK_THROWS_AS(phi(extended_odometer(0, {20, 19, 14}), src, key), not_in_class);
    CHECK_THROWS_AS(chi(make_path({{0, 0}, {0, 1}, {0, 1}}), src, key), not_a_path);
}

TEST_CASE("psi on the example", "[correspondence]")
{
    stack_source src = example();
    realization lp = theta(src, example_key());
    CHECK(psi_map(lp.step(2), {1, 1}, {1, 2}) == psi_value{4, 1});
    CHECK(tau(src, example_key(), 2, 16) == psi_value{4, 1});
    CHECK(psi_map(lp.step(2), {0, 0}, {lp.step(2).lo(0), 0}) == psi_value{1, 0});
    CHECK_THROWS_AS(psi_map(lp.step(2), {0, 0}, {3, 0}), not_an_infection);
    CHECK_THROWS_AS(tau(src, example_key(), 2, 5), error);
}

TEST_CASE("psi preimages", "[correspondence][property]")
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        step_primitives p = step_primitives::sampled(seed, 1, 1.0);
        reduced_instructions red = to_reduced(p, 30);
        for (long j = 1; j <= 20; ++j)
            for (int z = 0; z <= 1; ++z) {
                auto pre = psi_preimage(p, j, z);
                if (z == 1 && !red.b(j)) {
                    REQUIRE(pre.empty());
                    continue;
                }
                REQUIRE(static_cast<long>(pre.size()) == red.lefts_through(j));
                for (const auto& [from, to] : pre) {
                    REQUIRE(infects(p, from, to));
                    REQUIRE(psi_map(p, from, to) == psi_value{j, z});
                    // diagonal-mates map together
                    REQUIRE(from.diagonal() == pre.front().first.diagonal());
                    REQUIRE(to.s - from.s == z);
                }
            }
    }
}

TEST_CASE("phi is a bijection onto infection paths", "[correspondence][property]")
{
    long failures = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        check_result r = verify_correspondence_instance(random_class_instance(seed, 6));
        if (!r.passed) {
            ++failures;
            UNSCOPED_INFO("seed " << seed << ": " << r.detail);
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("boundary conditions", "[correspondence]")
{
    stack_source src = example();
    // second left at site 0 counting from index 1: "SRSSLL" puts it at 6
    CHECK(boundary_conditions(src, configuration::uniform(0, 2, 1), -1) == 6);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        counter_rng rng(hash_key(seed, 0xb0ULL));
        const long n = 1 + rng.below(4);
        std::vector<int> states;
        for (long v = 0; v <= n; ++v)
            states.push_back(static_cast<int>(rng.below(3)));
        configuration sigma(0, states);
        stack_source s = stack_source::seeded(seed, 1.0);
        const long f0 = -1 - rng.below(3);
        odometer_class_key key{sigma, boundary_conditions(s, sigma, f0), f0, n};
        enumeration_options canon;
        canon.policy = sleep_run_policy::canonical;
        for (const auto& u : enumerate_stable_odometers(s, key, enumeration_mode::stable, {}, canon)) {
            REQUIRE(stability_check(u, sigma, s, 0, 0, stability_mode::stable));
            // the endpoint identity decides stability at n
            REQUIRE(stability_at_n(phi(u, s, key), s, key) == stability_check(u, sigma, s, n, n, stability_mode::stable));
        }
    }
}

TEST_CASE("odometers with one flow sign change are nonnegative", "[correspondence][property]")
{
    long checked = 0;
    CHECK(single_sign_change({-2, -1, 0, 1, 3}));
    CHECK(single_sign_change({1, 1}));
    CHECK_FALSE(single_sign_change({1, 0, 1}));
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        class_instance inst = random_class_instance(seed, 5);
        enumeration_options canon;
        canon.policy = sleep_run_policy::canonical;
        for (const auto& u : enumerate_stable_odometers(inst.src, inst.key, enumeration_mode::stable, {}, canon)) {
            flow_profile p = flows(u, inst.src);
            std::vector<long> f;
            for (long v = 0; v <= inst.key.n; ++v)
                f.push_back(p.f_at(v));
            if (!single_sign_change(f) || u(0) < 0 || u(inst.key.n) < 0)
                continue;
            ++checked;
            for (long v = 0; v <= inst.key.n; ++v)
                REQUIRE(u(v) >= 0);
        }
    }
    CHECK(checked > 100);
}

TEST_CASE("path counts do not depend on the class", "[correspondence][statistical]")
{
    const long n = 4, seeds = 10000;
    odometer_class_key a{configuration::uniform(0, n, 1), 0, 0, n};
    odometer_class_key b{configuration(0, {2, 0, 2, 1, 0}), 5, -1, n};
    std::vector<double> ca, cb;
    for (long i = 0; i < seeds; ++i) {
        stack_source sa = stack_source::seeded(derive_seed(901, static_cast<std::uint64_t>(i)), 1.0);
        stack_source sb = stack_source::seeded(derive_seed(902, static_cast<std::uint64_t>(i)), 1.0);
        ca.push_back(static_cast<double>(count_infection_paths(theta(sa, a), n)));
        cb.push_back(static_cast<double>(count_infection_paths(theta(sb, b), n)));
    }
    test_result t = ks_two_sample(ca, cb);
    INFO("p=" << t.p_value << " means " << mean(ca) << " " << mean(cb));
    CHECK(t.p_value >= 1e-3);
}
