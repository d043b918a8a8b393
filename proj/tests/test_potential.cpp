#include "doctest.h"

#include "chaincalc/errors.hpp"
#include "chaincalc/potential.hpp"

#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace chaincalc;

namespace {

PointCloudSpace line_space(std::vector<double> positions, std::vector<double> masses = {}) {
    PointCloudSpace s;
    s.n = static_cast<int>(positions.size());
    s.mass = masses.empty() ? std::vector<double>(s.n, 1.0) : std::move(masses);
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

template <typename Fn> std::string code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

ScalarField grad(std::vector<double> v) { return make_field(std::move(v), FieldRole::gradient); }
ScalarField fn(std::vector<double> v) { return make_field(std::move(v), FieldRole::function); }

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

TEST_CASE("zero weights spread the seed value") {
    PointCloudSpace s = line_space({0.0, 1.0, 2.0, 3.0, 4.0});
    PotentialSpec spec;
    spec.seeds = {2};
    spec.seed_values = {7.0};
    spec.g = grad(std::vector<double>(5, 0.0));
    spec.eps = 1.0;
    PotentialResult res = chain_potential(s, spec);
    CHECK(res.unreachable == 0);
    for (double v : res.u.values) CHECK(v == 7.0);
}

TEST_CASE("unit weights accumulate distance") {
    PointCloudSpace s = generate_grid(1, 11, 0.1);
    PotentialSpec spec;
    spec.seeds = {0};
    spec.seed_values = {0.0};
    spec.g = grad(std::vector<double>(11, 1.0));
    spec.eps = 0.1;
    PotentialResult res = chain_potential(s, spec);
    for (int k = 0; k < 11; ++k)
        CHECK(res.u.values[k] == doctest::Approx(0.1 * k).epsilon(1e-12));
}

TEST_CASE("shrinking the scale can only raise the potential") {
    std::mt19937_64 rng(0xD15CULL);
    std::uniform_real_distribution<double> gd(0.0, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        oracle::TinySpace t = oracle::random_euclidean_space(rng, 8);
        PointCloudSpace s = from_tiny(t);
        std::vector<double> dists;
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j) dists.push_back(t.d(i, j));
        std::sort(dists.begin(), dists.end());

        PotentialSpec spec;
        spec.seeds = {0};
        spec.seed_values = {0.5};
        std::vector<double> gv(8);
        for (double& v : gv) v = gd(rng);
        spec.g = grad(gv);

        spec.eps = dists[dists.size() / 4];
        PotentialResult fine = chain_potential(s, spec);
        spec.eps = dists[3 * dists.size() / 4];
        PotentialResult coarse = chain_potential(s, spec);
        for (int i = 0; i < 8; ++i)
            CHECK(coarse.u.values[i] <= fine.u.values[i] + 1e-12);
    }
}

TEST_CASE("seed shifts move the potential rigidly") {
    // dyadic data keeps every sum exact, so the shift identity is bitwise
    PointCloudSpace s = line_space({0.0, 1.0, 2.0, 3.0});
    PotentialSpec spec;
    spec.seeds = {0, 3};
    spec.seed_values = {0.5, -1.25};
    spec.g = grad({0.25, 0.5, 0.75, 0.25});
    spec.eps = 1.0;
    PotentialResult base = chain_potential(s, spec);

    for (double& v : spec.seed_values) v += 3.0;
    PotentialResult shifted = chain_potential(s, spec);
    for (int i = 0; i < 4; ++i) CHECK(shifted.u.values[i] == base.u.values[i] + 3.0);
}

TEST_CASE("seeding everywhere never overshoots the sample") {
    std::mt19937_64 rng(0x5EEDULL);
    std::uniform_real_distribution<double> ud(-2.0, 2.0), gd(0.0, 1.5);
    for (int trial = 0; trial < 10; ++trial) {
        oracle::TinySpace t = oracle::random_euclidean_space(rng, 9);
        PointCloudSpace s = from_tiny(t);
        PotentialSpec spec;
        spec.seeds.resize(9);
        spec.seed_values.resize(9);
        std::vector<double> gv(9);
        for (int i = 0; i < 9; ++i) {
            spec.seeds[i] = i;
            spec.seed_values[i] = ud(rng);
            gv[i] = gd(rng);
        }
        spec.g = grad(gv);
        spec.eps = 0.7;
        PotentialResult res = chain_potential(s, spec);
        for (int i = 0; i < 9; ++i) CHECK(res.u.values[i] <= spec.seed_values[i]);
    }
}

TEST_CASE("the cap is a plain truncation") {
    PointCloudSpace s = generate_grid(1, 11, 0.1);
    PotentialSpec spec;
    spec.seeds = {0};
    spec.seed_values = {0.0};
    spec.g = grad(std::vector<double>(11, 3.0));
    spec.eps = 0.1;
    PotentialResult open = chain_potential(s, spec);
    spec.cap = 1.0;
    PotentialResult capped = chain_potential(s, spec);
    for (int i = 0; i < 11; ++i)
        CHECK(capped.u.values[i] == std::min(1.0, open.u.values[i]));
}

TEST_CASE("unreachable points report and inherit the cap") {
    PointCloudSpace split = line_space({0.0, 1.0, 5.0, 6.0});
    PotentialSpec spec;
    spec.seeds = {0};
    spec.seed_values = {2.0};
    spec.g = grad(std::vector<double>(4, 1.0));
    spec.eps = 1.0;
    PotentialResult open = chain_potential(split, spec);
    CHECK(open.unreachable == 2);
    CHECK(open.u.values[2] == kInf);
    CHECK(open.u.values[3] == kInf);

    spec.cap = 9.0;
    PotentialResult capped = chain_potential(split, spec);
    CHECK(capped.unreachable == 2);
    CHECK(capped.u.values[2] == 9.0);
    CHECK(capped.u.values[3] == 9.0);

    // both variants still verify against their own weight field
    spec.cap.reset();
    CHECK(potential_gradient_check(split, spec).verdict.ok);
    spec.cap = 9.0;
    CHECK(potential_gradient_check(split, spec).verdict.ok);
}

TEST_CASE("the construction contract holds on random instances") {
    std::mt19937_64 rng(0xC0FFEEULL);
    std::uniform_real_distribution<double> ud(-3.0, 3.0), gd(0.0, 2.0);
    int checked = 0;
    for (int trial = 0; trial < 40; ++trial) {
        int n = 6 + static_cast<int>(rng() % 7);
        oracle::TinySpace t = oracle::random_euclidean_space(rng, n);
        PointCloudSpace s = from_tiny(t);
        std::vector<double> dists;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) dists.push_back(t.d(i, j));
        std::sort(dists.begin(), dists.end());

        PotentialSpec spec;
        int nseeds = 1 + static_cast<int>(rng() % 3);
        for (int k = 0; k < nseeds; ++k) {
            spec.seeds.push_back(static_cast<int>(rng() % n));
            spec.seed_values.push_back(ud(rng));
        }
        std::vector<double> gv(n);
        for (double& v : gv) v = gd(rng);
        if (rng() % 4 == 0) gv[rng() % n] = kInf; // occasional blocked point
        spec.g = grad(gv);
        spec.eps = dists[dists.size() / 2];
        double lambdas[] = {0.0, 0.5, 1.0};
        spec.lambda = lambdas[rng() % 3];
        if (rng() % 3 == 0) spec.cap = ud(rng);

        PotentialCheck check = potential_gradient_check(s, spec);
        CHECK(check.verdict.ok);
        CHECK(check.one_sided == (spec.lambda != 0.5));
        checked++;
    }
    CHECK(checked == 40);
}

TEST_CASE("product rule field") {
    PointCloudSpace s = line_space({0.0, 1.0, 2.0, 3.0});
    ScalarField u = fn({1.0, -2.0, 0.5, 3.0});
    ScalarField g = grad({3.0, 3.0, 2.5, kInf});

    ScalarField ones = fn(std::vector<double>(4, 1.0));
    ScalarField lz = leibniz_gradient(s, u, g, ones, 1.0);
    CHECK(lz.values == g.values); // sl(1) = 0 and Q(1) = 1

    ScalarField zeros = fn(std::vector<double>(4, 0.0));
    ScalarField lz0 = leibniz_gradient(s, u, g, zeros, 1.0);
    CHECK(lz0.values == std::vector<double>(4, 0.0));

    CHECK(code_of([&] { leibniz_gradient(s, g, g, ones, 1.0); }) == "BadField");
    CHECK(code_of([&] { leibniz_gradient(s, u, u, ones, 1.0); }) == "BadField");
    CHECK(code_of([&] { leibniz_gradient(s, u, g, ones, 0.0); }) == "NonPositiveEps");
}

TEST_CASE("product rule output verifies on random instances") {
    std::mt19937_64 rng(0x1E1BULL);
    std::uniform_real_distribution<double> vd(-2.0, 2.0);
    int checked = 0;
    for (int trial = 0; trial < 30; ++trial) {
        int n = 5 + static_cast<int>(rng() % 8);
        oracle::TinySpace t = oracle::random_euclidean_space(rng, n);
        PointCloudSpace s = from_tiny(t);
        std::vector<double> uv(n), pv(n);
        for (int i = 0; i < n; ++i) {
            uv[i] = vd(rng);
            pv[i] = vd(rng);
        }
        ScalarField u = fn(uv);
        ScalarField phi = fn(pv);
        double eps = 0.6;
        ScalarField g = slope_field(s, u, eps); // an exact upper gradient of u

        ScalarField lz = leibniz_gradient(s, u, g, phi, eps);
        std::vector<double> prod(n);
        for (int i = 0; i < n; ++i) prod[i] = uv[i] * pv[i];
        VerifyReport rep = verify_upper_gradient(s, fn(prod), lz, eps, 0.5);
        CHECK(rep.ok);
        checked++;
    }
    CHECK(checked == 30);
}

TEST_CASE("reconstruction pipeline on refining grids") {
    auto tent = [](double x) { return std::min(x, 1.0 - x); };
    auto one = [](double) { return 1.0; };
    EbReport boundary = eb_pipeline({16, 64}, tent, one, 1.0, 2.0, EbSeeds::boundary);
    REQUIRE(boundary.entries.size() == 2);
    for (const EbEntry& e : boundary.entries) {
        CHECK(e.err_u <= 1e-12); // boundary distance rebuilds the tent exactly
        CHECK(std::isfinite(e.err_g));
    }

    auto zero = [](double) { return 0.0; };
    EbReport nul = eb_pipeline({8, 16}, zero, zero, 2.0);
    for (const EbEntry& e : nul.entries) {
        CHECK(e.err_u == 0.0);
        CHECK(e.err_g <= 1e-9);
    }

    auto parab = [](double x) { return x * (1.0 - x); };
    auto dparab = [](double x) { return std::fabs(1.0 - 2.0 * x); };

    // seeding every point reproduces the sample whenever g really is an upper
    // gradient of it; the reconstruction gap then lives in the gradient only
    EbReport full = eb_pipeline({32, 64, 128}, parab, dparab, 1.0);
    REQUIRE(full.entries.size() == 3);
    for (const EbEntry& e : full.entries) {
        CHECK(e.status == "optimal");
        CHECK(e.err_u <= 1e-12);
    }
    CHECK(full.entries[2].err_g < full.entries[0].err_g);

    // endpoint-weighted sums are exact on piecewise-linear weights, so the
    // parabola rebuilds from the boundary too; a curved weight leaves a real
    // discretization gap that decays with the grid
    EbReport flat = eb_pipeline({32, 128}, parab, dparab, 1.0, 2.0, EbSeeds::boundary);
    for (const EbEntry& e : flat.entries) CHECK(e.err_u <= 1e-12);

    double pi = 4.0 * std::atan(1.0);
    auto bump = [pi](double x) { return std::sin(pi * x) / pi; };
    auto dbump = [pi](double x) { return std::fabs(std::cos(pi * x)); };
    EbReport ladder =
        eb_pipeline({32, 64, 128}, bump, dbump, 1.0, 2.0, EbSeeds::boundary);
    for (const EbEntry& e : ladder.entries) CHECK(e.status == "optimal");
    CHECK(ladder.entries[1].err_u < ladder.entries[0].err_u);
    CHECK(ladder.entries[2].err_u < ladder.entries[1].err_u);
    CHECK(ladder.entries[2].err_g < ladder.entries[0].err_g);

    // a scale below the grid spacing cannot reach anything from the boundary
    EbReport stuck = eb_pipeline({16}, tent, one, 1.0, 0.5, EbSeeds::boundary);
    CHECK(stuck.entries[0].status == "disconnected");
    CHECK(std::isinf(stuck.entries[0].err_u));

    CHECK(code_of([&] { eb_pipeline({}, tent, one, 1.0); }) == "BadParameter");
    CHECK(code_of([&] { eb_pipeline({1}, tent, one, 1.0); }) == "BadParameter");
    CHECK(code_of([&] { eb_pipeline({16}, tent, one, 0.5); }) == "BadParameter");
    CHECK(code_of([&] { eb_pipeline({16}, tent, one, 1.0, 0.0); }) == "BadParameter");
}

TEST_CASE("potential input validation") {
    PointCloudSpace s = line_space({0.0, 1.0, 2.0});
    PotentialSpec spec;
    spec.g = grad({1.0, 1.0, 1.0});
    spec.eps = 1.0;
    CHECK(code_of([&] { chain_potential(s, spec); }) == "EmptySeedSet");

    spec.seeds = {0};
    CHECK(code_of([&] { chain_potential(s, spec); }) == "BadParameter"); // no values
    spec.seed_values = {kInf};
    CHECK(code_of([&] { chain_potential(s, spec); }) == "BadParameter");
    spec.seed_values = {0.0};
    spec.seeds = {9};
    CHECK(code_of([&] { chain_potential(s, spec); }) == "UnknownPoint");
    spec.seeds = {0};
    spec.eps = 0.0;
    CHECK(code_of([&] { chain_potential(s, spec); }) == "NonPositiveEps");
    spec.eps = 1.0;
    spec.lambda = -0.5;
    CHECK(code_of([&] { chain_potential(s, spec); }) == "LambdaOutOfRange");
    spec.lambda = 0.5;
    spec.g = fn({1.0, 1.0, 1.0});
    CHECK(code_of([&] { chain_potential(s, spec); }) == "BadField");
    spec.g = grad({1.0, 1.0});
    CHECK(code_of([&] { chain_potential(s, spec); }) == "BadField");
    spec.g = grad({1.0, 1.0, 1.0});
    spec.cap = std::nan("");
    CHECK(code_of([&] { chain_potential(s, spec); }) == "BadParameter");
}
