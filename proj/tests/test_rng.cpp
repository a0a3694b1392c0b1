#include <catch2/catch_amalgamated.hpp>

#include "aoifleet/rng.hpp"

using namespace aoifleet;

TEST_CASE("identical seeds give identical streams") {
    RngStream a(42), b(42);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next_u64() == b.next_u64());
}

TEST_CASE("named sub-streams are independent of each other") {
    RngStream tasks = make_stream(7, "tasks");
    RngStream tasks2 = make_stream(7, "tasks");
    RngStream background = make_stream(7, "background");
    bool any_diff = false;
    for (int i = 0; i < 16; ++i) {
        const std::uint64_t t = tasks.next_u64();
        REQUIRE(t == tasks2.next_u64());
        if (t != background.next_u64()) any_diff = true;
    }
    REQUIRE(any_diff);
}

TEST_CASE("indexed sub-streams differ") {
    RngStream a = make_stream(1, "background", 0);
    RngStream b = make_stream(1, "background", 1);
    REQUIRE(a.next_u64() != b.next_u64());
}

TEST_CASE("uniform01 stays in [0, 1)") {
    RngStream rng(3);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("uniform_below respects the bound and covers all values") {
    RngStream rng(5);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const std::uint32_t v = rng.uniform_below(7);
        REQUIRE(v < 7);
        ++counts[v];
    }
    for (int c : counts) {
        REQUIRE(c > 9000);
        REQUIRE(c < 11000);
    }
}

TEST_CASE("exponential gaps average to 1/rate") {
    RngStream rng(11);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += rng.exponential(0.5);
    REQUIRE(sum / n == Catch::Approx(2.0).epsilon(0.02));
}
