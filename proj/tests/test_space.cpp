#include "doctest.h"

#include "chaincalc/errors.hpp"
#include "chaincalc/space.hpp"

#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace chaincalc;

namespace {

PointCloudSpace line_space(std::vector<double> positions, std::vector<double> masses) {
    PointCloudSpace s;
    s.n = static_cast<int>(positions.size());
    s.mass = std::move(masses);
    s.dist.assign(static_cast<size_t>(s.n) * s.n, 0.0);
    for (int i = 0; i < s.n; ++i)
        for (int j = 0; j < s.n; ++j) s.d_mut(i, j) = std::fabs(positions[i] - positions[j]);
    return s;
}

PointCloudSpace from_tiny(const oracle::TinySpace& t) {
    PointCloudSpace s;
    s.n = t.n;
    s.dist = t.dist;
    s.mass = t.mass;
    return s;
}

std::string code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

} // namespace

TEST_CASE("validation reports metric and mass defects") {
    PointCloudSpace s = line_space({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0});
    CHECK_NOTHROW(validate_space(s));

    SUBCASE("triangle violation names the worst triple") {
        s.d_mut(0, 2) = 5.0;
        s.d_mut(2, 0) = 5.0;
        CHECK(code_of([&] { validate_space(s); }) == "TriangleViolation");
    }
    SUBCASE("asymmetry") {
        s.d_mut(0, 1) = 1.5;
        CHECK(code_of([&] { validate_space(s); }) == "NonSymmetricDistance");
    }
    SUBCASE("negative mass") {
        s.mass[1] = -0.25;
        CHECK(code_of([&] { validate_space(s); }) == "NegativeMass");
    }
    SUBCASE("zero total mass") {
        s.mass = {0.0, 0.0, 0.0};
        CHECK(code_of([&] { validate_space(s); }) == "ZeroTotalMass");
    }
    SUBCASE("zero off-diagonal distance") {
        s.d_mut(1, 2) = 0.0;
        s.d_mut(2, 1) = 0.0;
        CHECK(code_of([&] { validate_space(s); }).empty() == false);
    }
}

TEST_CASE("triangle check scales to sampled mode") {
    std::mt19937_64 rng(11);
    PointCloudSpace s = from_tiny(oracle::random_euclidean_space(rng, 310));
    CHECK_NOTHROW(validate_space(s)); // n > 300 takes the sampled path
}

TEST_CASE("epsilon graph uses the closed step threshold") {
    PointCloudSpace g = generate_grid(1, 11, 0.1);
    CHECK(g.n == 11);
    CHECK(g.mass[0] == doctest::Approx(0.1));

    EpsilonGraph eg = build_epsilon_graph(g, 0.1);
    int directed = 0;
    for (int i = 0; i < g.n; ++i) directed += static_cast<int>(eg.adjacency[i].size());
    CHECK(directed == 20); // 10 undirected unit-spacing edges, both directions
    for (const auto& e : eg.adjacency[4]) CHECK(e.length == 0.1);
    CHECK(eg.adjacency[0].size() == 1);
    CHECK(eg.adjacency[5].size() == 2);

    CHECK(code_of([&] { build_epsilon_graph(g, 0.0); }) == "NonPositiveEps");

    SUBCASE("edge sets grow monotonically in eps") {
        EpsilonGraph wide = build_epsilon_graph(g, 0.25);
        for (int i = 0; i < g.n; ++i) CHECK(wide.adjacency[i].size() >= eg.adjacency[i].size());
        CHECK(wide.adjacency[5].size() == 4);
    }
}

TEST_CASE("chain components split exactly at the eps gap") {
    PointCloudSpace s = line_space({0.0, 1.0, 3.0, 4.0}, {1.0, 1.0, 1.0, 1.0});
    ComponentPartition parts = chain_components(s, 1.0);
    REQUIRE(parts.components.size() == 2);
    CHECK(parts.components[0] == std::vector<int>{0, 1});
    CHECK(parts.components[1] == std::vector<int>{2, 3});

    // distinct components stay >= eps apart
    double closest = oracle::kInf;
    for (int i = 0; i < s.n; ++i)
        for (int j = 0; j < s.n; ++j)
            if (parts.component_of[i] != parts.component_of[j])
                closest = std::min(closest, s.d(i, j));
    CHECK(closest >= parts.eps);
}

TEST_CASE("finer eps refines the partition on random spaces") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 12; ++trial) {
        PointCloudSpace s = from_tiny(oracle::random_euclidean_space(rng, 9));
        ComponentPartition coarse = chain_components(s, 0.30);
        ComponentPartition fine = chain_components(s, 0.11);
        for (const auto& block : fine.components) {
            int host = coarse.component_of[block.front()];
            for (int id : block) CHECK(coarse.component_of[id] == host);
        }
    }
}

TEST_CASE("snowflake composes multiplicatively and stays a metric") {
    std::mt19937_64 rng(23);
    PointCloudSpace s = from_tiny(oracle::random_euclidean_space(rng, 8));
    PointCloudSpace twice = snowflake(snowflake(s, 0.5), 0.8);
    PointCloudSpace direct = snowflake(s, 0.4);
    for (int i = 0; i < s.n; ++i)
        for (int j = 0; j < s.n; ++j)
            CHECK(twice.d(i, j) == doctest::Approx(direct.d(i, j)).epsilon(1e-12));
    CHECK_NOTHROW(validate_space(direct));

    CHECK(code_of([&] { snowflake(s, 0.0); }) == "AlphaOutOfRange");
    CHECK(code_of([&] { snowflake(s, 1.0); }) == "AlphaOutOfRange");
    CHECK(code_of([&] { snowflake(s, 1.3); }) == "AlphaOutOfRange");
}

TEST_CASE("two sequence generator matches the pinned layout") {
    PointCloudSpace s = generate_two_sequence(3, 5);
    REQUIRE(s.n == 6);
    CHECK(s.labels == std::vector<std::string>{"x3", "y3", "x4", "y4", "x5", "y5"});
    CHECK(s.mass[0] == 1.0 / 27.0);
    CHECK(s.mass[1] == 1.0 / 27.0);
    CHECK(s.mass[2] == 1.0 / 64.0);
    CHECK(s.mass[3] == 1.0 / 64.0);
    CHECK(s.mass[4] == 1.0 / 125.0);
    CHECK(s.mass[5] == 1.0 / 125.0);
    CHECK(s.d(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(s.d(2, 3) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(s.resolve("y4") == 3);
    CHECK(s.resolve("0") == 0);
    CHECK_NOTHROW(validate_space(s));
    CHECK(code_of([&] { (void)s.resolve("z9"); }) == "UnknownPoint");
}

TEST_CASE("ball masses honor open boundaries") {
    PointCloudSpace s = line_space({0.0, 1.0, 2.0}, {1.0, 2.0, 3.0});
    CHECK(open_ball_mass(s, 1, 1.0) == 2.0);       // strictly inside only
    CHECK(closed_ball_mass(s, 1, 1.0) == 6.0);     // boundary included
    CHECK(open_ball_mass(s, 1, 1.0 + 1e-9) == 6.0);
    CHECK(open_ball_members(s, 0, 1.5) == std::vector<int>{0, 1});
}

TEST_CASE("doubling constant on explicit balls") {
    SUBCASE("single point is trivially doubling") {
        PointCloudSpace one;
        one.n = 1;
        one.dist = {0.0};
        one.mass = {2.5};
        DoublingReport rep = doubling_constant(one, {1.0});
        CHECK(rep.constant == 1.0);
    }
    SUBCASE("two-point space ratio computed by hand") {
        PointCloudSpace s = line_space({0.0, 1.0}, {1.0, 3.0});
        DoublingReport rep = doubling_constant(s, {1.0});
        // B_1(0) = {0} mass 1, B_2(0) = both, mass 4 -> worst ratio 4
        CHECK(rep.constant == 4.0);
        CHECK(rep.witness_center == 0);
        CHECK(rep.witness_radius == 1.0);
    }
    SUBCASE("radius grid must be usable") {
        PointCloudSpace s = line_space({0.0, 1.0}, {1.0, 1.0});
        CHECK(code_of([&] { doubling_constant(s, {}); }) == "EmptyRadiusGrid");
    }
}

TEST_CASE("distance scales enumerate distinct positive distances") {
    PointCloudSpace s = line_space({0.0, 1.0, 3.0}, {1.0, 1.0, 1.0});
    std::vector<double> scales = distance_scales(s);
    CHECK(scales == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(s.diameter() == 3.0);
    CHECK(s.min_positive_distance() == 1.0);
}

TEST_CASE("grid distances are exact at the spacing scale") {
    PointCloudSpace g = generate_grid(1, 11, 0.1);
    for (int i = 0; i + 1 < g.n; ++i) CHECK(g.d(i, i + 1) == 0.1);
    PointCloudSpace q = generate_grid(2, 3, 0.5);
    CHECK(q.n == 9);
    CHECK(q.d(0, 4) == 0.5 * std::sqrt(2.0)); // diagonal neighbor
    CHECK(q.mass[0] == 0.25);
}

TEST_CASE("punctured grid zeroes chosen masses but keeps geometry") {
    PointCloudSpace g = generate_punctured_grid(2, 3, 1.0, {4});
    CHECK(g.mass[4] == 0.0);
    CHECK(g.mass[0] == 1.0);
    CHECK_NOTHROW(validate_space(g));
}

TEST_CASE("descriptor strings drive the generators") {
    CHECK(generate_space("grid:1,11,0.1").n == 11);
    CHECK(generate_space("two_sequence:3,5").n == 6);
    PointCloudSpace p = generate_space("punctured_grid:2,3,1,4");
    CHECK(p.mass[4] == 0.0);
    PointCloudSpace p2 = generate_space("punctured_grid:2,3,1,0;8");
    CHECK(p2.mass[0] == 0.0);
    CHECK(p2.mass[8] == 0.0);

    CHECK(code_of([] { generate_space("grid:0,5,1"); }) == "BadDescriptor");
    CHECK(code_of([] { generate_space("florp:1"); }) == "BadDescriptor");
    CHECK(code_of([] { generate_space("grid:1,11"); }) == "BadDescriptor");
    CHECK(code_of([] { generate_space("two_sequence:5,3"); }) == "BadDescriptor");
}
