#include "arwlab/layer.hpp"
#include "arwlab/verify.hpp"

#include <catch_amalgamated.hpp>

using namespace arwlab;

TEST_CASE("random class instances stay in range", "[verify]")
{
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        class_instance inst = random_class_instance(seed, 4);
        REQUIRE(inst.key.n >= 1);
        REQUIRE(inst.key.n <= 4);
        REQUIRE(inst.key.u0 >= 0);
        REQUIRE(inst.key.u0 <= 6);
        REQUIRE(inst.key.f0 >= -2);
        REQUIRE(inst.key.f0 <= 3);
        for (long v = 0; v <= inst.key.n; ++v) {
            REQUIRE(inst.key.sigma.count(v) >= 0);
            REQUIRE(inst.key.sigma.count(v) <= 2);
        }
    }
    class_instance a = random_class_instance(9), b = random_class_instance(9);
    CHECK(a.key.sigma == b.key.sigma);
    CHECK(a.key.u0 == b.key.u0);
    CHECK(a.key.f0 == b.key.f0);
}

TEST_CASE("set intersection", "[verify]")
{
    infection_set a = infection_set::from_rows(3, 0, {{{0, 2}, {6, 8}}, {{4, 4}}});
    infection_set b = infection_set::from_rows(3, 1, {{{5, 9}}});
    infection_set c = infection_set::from_rows(3, 1, {{{4, 4}}});
    infection_set d = infection_set::from_rows(3, 0, {{{3, 5}}});
    CHECK_FALSE(sets_intersect(a, b));
    CHECK(sets_intersect(a, c));
    CHECK_FALSE(sets_intersect(a, d));
    CHECK(sets_intersect(d, infection_set::from_rows(3, 0, {{{5, 5}}})));
}

TEST_CASE("theta output law", "[verify][statistical]")
{
    for (double lambda : {0.5, 1.0, 2.0}) {
        auto checks = theta_distribution_checks(100000, 17, lambda);
        CHECK(checks.size() >= 5);
        for (const auto& r : checks) {
            INFO("lambda=" << lambda << " " << r.name << ": " << r.detail);
            CHECK(r.passed);
        }
    }
}

TEST_CASE("crossing detection is not vacuous", "[verify]")
{
    long detected = 0;
    for (std::uint64_t seed = 0; seed < 300; ++seed)
        detected += crossing_instance(seed).detected ? 1 : 0;
    CHECK(detected > 30);
}
