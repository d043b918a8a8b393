#include "doctest.h"

#include "chaincalc/errors.hpp"
#include "chaincalc/gradient.hpp"

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

ScalarField fn(std::vector<double> v) { return make_field(std::move(v), FieldRole::function); }
ScalarField grad(std::vector<double> v) { return make_field(std::move(v), FieldRole::gradient); }

std::vector<oracle::DenseRow> dense_rows(const ConvexProgram& prog) {
    std::vector<oracle::DenseRow> out;
    for (const SparseRow& r : prog.rows) {
        oracle::DenseRow d;
        d.a.assign(prog.nvars, 0.0);
        for (auto& [idx, coef] : r.terms) d.a[idx] += coef;
        d.b = r.rhs;
        out.push_back(std::move(d));
    }
    return out;
}

PointCloudSpace drop_point(const PointCloudSpace& s, int victim) {
    PointCloudSpace out;
    out.n = s.n - 1;
    out.mass.reserve(out.n);
    std::vector<int> keep;
    for (int i = 0; i < s.n; ++i)
        if (i != victim) {
            keep.push_back(i);
            out.mass.push_back(s.mass[i]);
        }
    out.dist.assign(static_cast<size_t>(out.n) * out.n, 0.0);
    for (int a = 0; a < out.n; ++a)
        for (int b = 0; b < out.n; ++b) out.d_mut(a, b) = s.d(keep[a], keep[b]);
    return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace

TEST_CASE("slope field takes the closed-ball supremum") {
    PointCloudSpace s = line_space({0.0, 0.5, 1.0});
    ScalarField u = fn({0.0, 0.5, 1.0});
    ScalarField sl = slope_field(s, u, 0.6);
    CHECK(sl.values == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(slope_field(s, u, 0.5).values == std::vector<double>{1.0, 1.0, 1.0}); // d == eps counts

    CHECK(slope_field(s, fn({3.0, 3.0, 3.0}), 0.6).values ==
          std::vector<double>{0.0, 0.0, 0.0});

    PointCloudSpace iso = line_space({0.0, 10.0});
    CHECK(slope_field(iso, fn({0.0, 4.0}), 1.0).values == std::vector<double>{0.0, 0.0});

    CHECK_THROWS_AS(slope_field(s, u, 0.0), Error);
}

TEST_CASE("two point verification matches the pinned examples") {
    PointCloudSpace s = line_space({0.0, 1.0});
    ScalarField u = fn({0.0, 1.0});

    VerifyReport ok = verify_upper_gradient(s, u, grad({1.0, 1.0}), 1.0, 0.5);
    CHECK(ok.ok);
    CHECK(ok.pairs_checked == 2);

    VerifyReport bad = verify_upper_gradient(s, u, grad({0.0, 1.5}), 1.0, 0.5);
    CHECK_FALSE(bad.ok);
    REQUIRE(bad.violations.size() == 2); // both orientations miss by 0.25
    CHECK(bad.violations[0].deficit == doctest::Approx(0.25));
    CHECK(bad.violations[0].required == 1.0);
    CHECK(bad.violations[0].available == doctest::Approx(0.75));
}

TEST_CASE("one sided mode only tests increasing steps") {
    PointCloudSpace s = line_space({0.0, 1.0});
    ScalarField u = fn({0.0, 1.0});
    ScalarField g = grad({1.0, 0.0});

    VerifyOptions one;
    one.one_sided = true;
    CHECK(verify_upper_gradient(s, u, g, 1.0, 1.0, one).ok);
    CHECK_FALSE(verify_upper_gradient(s, u, g, 1.0, 1.0).ok); // reversed pair fails
}

TEST_CASE("infinite gradient values absorb their pairs") {
    PointCloudSpace s = line_space({0.0, 1.0, 2.0});
    ScalarField u = fn({0.0, 5.0, 0.0});
    ScalarField g = grad({0.0, kInf, 0.0});
    CHECK(verify_upper_gradient(s, u, g, 1.0, 0.5).ok);
}

TEST_CASE("the slope field is always an upper gradient") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> ud(-2.0, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        PointCloudSpace s = from_tiny(oracle::random_euclidean_space(rng, 7));
        std::vector<double> uv(7);
        for (double& v : uv) v = ud(rng);
        ScalarField u = fn(uv);
        for (double eps : {0.2, 0.5, 1.5}) {
            ScalarField sl = slope_field(s, u, eps);
            CHECK(verify_upper_gradient(s, u, sl, eps, 0.5).ok);
        }
    }
}

TEST_CASE("upper gradients stay valid when eps shrinks") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    PointCloudSpace s = from_tiny(oracle::random_euclidean_space(rng, 8));
    std::vector<double> uv(8);
    for (double& v : uv) v = ud(rng);
    ScalarField u = fn(uv);
    ScalarField sl = slope_field(s, u, 0.9);
    REQUIRE(verify_upper_gradient(s, u, sl, 0.9, 0.5).ok);
    for (double eps : {0.6, 0.3, 0.05}) CHECK(verify_upper_gradient(s, u, sl, eps, 0.5).ok);
}

TEST_CASE("constant functions cost nothing") {
    PointCloudSpace s = line_space({0.0, 1.0, 2.0});
    GradientReport rep = minimal_gradient(s, fn({4.0, 4.0, 4.0}), 1.0, 2.0, 0.5);
    CHECK(rep.status == "optimal");
    CHECK(rep.objective == 0.0);
    CHECK(rep.gradient == std::vector<double>{0.0, 0.0, 0.0});
    CHECK(rep.constraints == 0);
}

TEST_CASE("paired sequence linear program hits the analytic objective") {
    PointCloudSpace s = generate_two_sequence(3, 50);
    std::vector<double> uv(s.n);
    for (int i = 0; i < s.n; ++i) uv[i] = (i % 2 == 0) ? 0.0 : 1.0;
    ScalarField u = fn(uv);

    GradientReport rep = minimal_gradient(s, u, 1.0 / 3.0, 1.0, 0.5);
    double target = oracle::paired_sequence_objective(3, 50);
    CHECK(rep.status == "optimal");
    CHECK(rep.objective == doctest::Approx(target).epsilon(1e-9));
    CHECK(rep.max_violation <= 1e-9);
    CHECK(rep.duality_gap <= 1e-8);

    SUBCASE("every mu-interpolated optimizer is feasible with equal objective") {
        for (double mu : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            std::vector<double> gmu(s.n, 0.0);
            double objective = 0.0;
            for (int k = 0; 2 * k < s.n; ++k) {
                double n = 3.0 + k;
                gmu[2 * k] = 2.0 * n * mu;
                gmu[2 * k + 1] = 2.0 * n * (1.0 - mu);
                objective += s.mass[2 * k] * gmu[2 * k] + s.mass[2 * k + 1] * gmu[2 * k + 1];
            }
            CHECK(verify_upper_gradient(s, u, grad(gmu), 1.0 / 3.0, 0.5).ok);
            // the mu family shares one exact objective; the solver value is
            // only tied to it through its own 1e-9 gap contract
            CHECK(objective == doctest::Approx(target).epsilon(1e-12));
        }
    }
}

TEST_CASE("grid identity function at p=1 solves to the vertex-cover value") {
    PointCloudSpace g = generate_grid(1, 11, 0.1);
    std::vector<double> uv(g.n);
    for (int i = 0; i < g.n; ++i) uv[i] = 0.1 * i;
    GradientReport rep = minimal_gradient(g, fn(uv), 0.1, 1.0, 0.5);
    CHECK(rep.status == "optimal");
    CHECK(rep.objective == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(verify_upper_gradient(g, fn(uv), grad(rep.gradient), 0.1, 0.5,
                                VerifyOptions{false, false, 1e-7, 16})
              .ok);
}

TEST_CASE("one sided lambda=1 program needs only the uphill sources") {
    PointCloudSpace g = generate_grid(1, 11, 0.1);
    std::vector<double> uv(g.n);
    for (int i = 0; i < g.n; ++i) uv[i] = 0.1 * i;
    GradientOptions one;
    one.one_sided = true;
    GradientReport rep1 = minimal_gradient(g, fn(uv), 0.1, 1.0, 1.0, one);
    CHECK(rep1.objective == doctest::Approx(1.0).epsilon(1e-9));
    GradientReport rep2 = minimal_gradient(g, fn(uv), 0.1, 1.0, 1.0);
    CHECK(rep2.objective == doctest::Approx(1.1).epsilon(1e-9)); // both orientations bind
}

TEST_CASE("random spaces: p=1 matches vertex enumeration, p>1 matches the sweep") {
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> ud(-1.5, 1.5);
    for (int trial = 0; trial < 10; ++trial) {
        PointCloudSpace s = from_tiny(oracle::random_euclidean_space(rng, 5));
        std::vector<double> uv(5);
        for (double& v : uv) v = ud(rng);
        ScalarField u = fn(uv);
        double eps = 0.8;

        ConvexProgram lp = build_gradient_program(s, u, eps, 1.0, 0.5, false, false);
        if (lp.rows.empty()) continue;
        oracle::LpResult ref = oracle::lp_vertex_min(lp.weight, dense_rows(lp));
        REQUIRE(ref.feasible_found);
        GradientReport rep = minimal_gradient(s, u, eps, 1.0, 0.5);
        CHECK(rep.objective == doctest::Approx(ref.value).epsilon(1e-7));

        if (lp.rows.size() <= 10) {
            oracle::PowerResult pref =
                oracle::power_min_active_set_sweep(lp.weight, 2.0, dense_rows(lp));
            REQUIRE(pref.found);
            GradientReport rep2 = minimal_gradient(s, u, eps, 2.0, 0.5);
            CHECK(rep2.energy == doctest::Approx(pref.value).epsilon(1e-6));
        }
    }
}

TEST_CASE("weak variant ignores zero-mass endpoints") {
    SUBCASE("identical when every mass is positive") {
        std::mt19937_64 rng(7);
        PointCloudSpace s = from_tiny(oracle::random_euclidean_space(rng, 6));
        std::vector<double> uv = {0.4, -0.2, 0.9, 0.0, -1.1, 0.3};
        GradientReport a = minimal_gradient(s, fn(uv), 0.7, 1.0, 0.5);
        GradientReport b = minimal_weak_gradient(s, fn(uv), 0.7, 1.0, 0.5);
        CHECK(a.objective == b.objective);
        CHECK(a.gradient == b.gradient);
    }

    SUBCASE("paired sequence with one mass zeroed drops that rung") {
        PointCloudSpace s = generate_two_sequence(3, 9);
        int x7 = s.resolve("x7");
        s.mass[x7] = 0.0;
        std::vector<double> uv(s.n);
        for (int i = 0; i < s.n; ++i) uv[i] = (i % 2 == 0) ? 0.0 : 1.0;
        GradientReport rep = minimal_weak_gradient(s, fn(uv), 1.0 / 3.0, 1.0, 0.5);
        double target = oracle::paired_sequence_objective(3, 9) - 2.0 / 49.0;
        CHECK(rep.objective == doctest::Approx(target).epsilon(1e-9));
    }

    SUBCASE("zero-mass outlier point equals deleting the point") {
        PointCloudSpace g = generate_grid(1, 11, 0.1);
        g.mass[5] = 0.0;
        std::vector<double> uv(g.n);
        for (int i = 0; i < g.n; ++i) uv[i] = 0.1 * i;
        uv[5] = 100.0; // wild value on the massless point
        GradientReport weak = minimal_weak_gradient(g, fn(uv), 0.1, 1.0, 0.5);

        PointCloudSpace cut = drop_point(g, 5);
        std::vector<double> uc(uv.begin(), uv.end());
        uc.erase(uc.begin() + 5);
        GradientReport direct = minimal_gradient(cut, fn(uc), 0.1, 1.0, 0.5);
        CHECK(weak.objective == doctest::Approx(direct.objective).epsilon(1e-9));
    }
}

TEST_CASE("objective scales linearly with the function") {
    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    PointCloudSpace s = from_tiny(oracle::random_euclidean_space(rng, 6));
    std::vector<double> uv(6), uv3(6);
    for (int i = 0; i < 6; ++i) {
        uv[i] = ud(rng);
        uv3[i] = 3.0 * uv[i];
    }
    for (double p : {1.0, 2.0}) {
        GradientReport base = minimal_gradient(s, fn(uv), 0.8, p, 0.5);
        GradientReport scaled = minimal_gradient(s, fn(uv3), 0.8, p, 0.5);
        CHECK(scaled.objective == doctest::Approx(3.0 * base.objective).epsilon(1e-7));
    }
}

TEST_CASE("p>1 minimizers are unique across warm starts") {
    std::mt19937_64 rng(59);
    PointCloudSpace s = from_tiny(oracle::random_euclidean_space(rng, 6));
    std::vector<double> uv = {0.0, 0.5, -0.3, 0.8, 0.1, -0.6};
    GradientOptions cold;
    GradientReport a = minimal_gradient(s, fn(uv), 0.9, 2.0, 0.5, cold);
    GradientOptions warm;
    warm.solve.start = std::vector<double>(6, 5.0);
    GradientReport b = minimal_gradient(s, fn(uv), 0.9, 2.0, 0.5, warm);
    double dist = 0.0;
    for (int i = 0; i < 6; ++i)
        dist += s.mass[i] * std::pow(std::fabs(a.gradient[i] - b.gradient[i]), 2.0);
    CHECK(std::sqrt(dist) <= 1e-6);
}

TEST_CASE("energy ladder is monotone and bottoms out below the resolution") {
    PointCloudSpace g = generate_grid(1, 21, 0.05);
    std::vector<double> uv(g.n);
    for (int i = 0; i < g.n; ++i) uv[i] = 0.05 * i;
    ScalarField u = fn(uv);
    std::vector<LadderRung> ladder = energy_ladder(g, u, {0.2, 0.1, 0.05, 0.01}, 1.0, 0.5);
    REQUIRE(ladder.size() == 4);
    for (size_t k = 1; k < ladder.size(); ++k)
        CHECK(ladder[k].objective <= ladder[k - 1].objective + 1e-9);
    CHECK(ladder.back().objective == 0.0); // eps below the spacing: no constraints

    CHECK_THROWS_AS(energy_ladder(g, u, {}, 1.0, 0.5), Error);
    CHECK_THROWS_AS(energy_ladder(g, u, {0.1, 0.1}, 1.0, 0.5), Error);
    CHECK_THROWS_AS(energy_ladder(g, u, {0.1, -0.2}, 1.0, 0.5), Error);
}

TEST_CASE("snowflaked ladders collapse against the base ladder") {
    PointCloudSpace g = generate_grid(1, 33, 1.0 / 32.0);
    std::vector<double> uv(g.n);
    for (int i = 0; i < g.n; ++i) uv[i] = i / 32.0;
    ScalarField u = fn(uv);
    double alpha = 0.5, h = 1.0 / 32.0;

    PointCloudSpace snow = snowflake(g, alpha);
    std::vector<LadderRung> base = energy_ladder(g, u, {2.0 * h, h}, 1.0, 0.5);
    std::vector<LadderRung> flaked =
        energy_ladder(snow, u, {std::pow(2.0 * h, alpha), std::pow(h, alpha)}, 1.0, 0.5);
    for (size_t k = 0; k < base.size(); ++k) {
        double cap = std::pow(base[k].eps, 1.0 - alpha) * base[k].objective + 1e-9;
        CHECK(flaked[k].objective <= cap);
    }
}

TEST_CASE("fuglede style limits remain weak upper gradients") {
    PointCloudSpace g = generate_punctured_grid(1, 9, 0.125, {4});
    std::vector<double> base(g.n);
    for (int i = 0; i < g.n; ++i) base[i] = 0.125 * i;
    ScalarField u = fn(base);

    // limit objects: u_j -> u and g_j = g + 1/j -> g pointwise; the 1/j bump
    // dominates the O(1/j^2) drift of the constraints, so each g_j is a weak
    // upper gradient of u_j along the whole sequence.
    std::vector<double> glimit = minimal_weak_gradient(g, u, 0.125, 2.0, 0.5).gradient;
    VerifyOptions weak;
    weak.weak = true;
    for (int j = 2; j <= 7; ++j) {
        std::vector<double> uj = base;
        uj[4] += 1.0 / (j * j); // massless point may drift arbitrarily
        for (int i = 0; i < g.n; ++i)
            if (g.mass[i] > 0.0) uj[i] += 1.0 / (j * j * (i + 2.0));
        std::vector<double> gj = glimit;
        for (double& v : gj) v += 1.0 / j;
        CHECK(verify_upper_gradient(g, fn(uj), grad(gj), 0.125, 0.5, weak).ok);
    }
    // ... and the limit pair itself verifies weakly
    weak.slack_tol = 1e-8;
    CHECK(verify_upper_gradient(g, u, grad(glimit), 0.125, 0.5, weak).ok);
}

TEST_CASE("curve consistency telescopes from the two point tests") {
    SUBCASE("exhaustive mode on a tiny space") {
        std::mt19937_64 rng(61);
        PointCloudSpace s = from_tiny(oracle::random_euclidean_space(rng, 6));
        std::vector<double> uv = {0.2, -0.4, 0.6, 0.0, 0.5, -0.2};
        ScalarField u = fn(uv);
        ScalarField sl = slope_field(s, u, 0.8);
        ConsistencyReport rep = check_curve_consistency(s, u, sl, 0.8);
        CHECK(rep.two_point_ok);
        CHECK(rep.consistent);
        CHECK(rep.paths_checked > 0);
        CHECK(rep.worst_slack >= -1e-9);
    }
    SUBCASE("failed verification short-circuits") {
        PointCloudSpace s = line_space({0.0, 1.0, 2.0});
        ScalarField u = fn({0.0, 0.0, 5.0}); // step function
        ConsistencyReport rep = check_curve_consistency(s, u, grad({0.0, 0.0, 0.0}), 1.0);
        CHECK_FALSE(rep.two_point_ok);
        CHECK_FALSE(rep.consistent);
        CHECK(rep.paths_checked == 0);
    }
    SUBCASE("sampled mode on a larger grid") {
        PointCloudSpace g = generate_grid(1, 15, 0.1);
        std::vector<double> uv(g.n);
        for (int i = 0; i < g.n; ++i) uv[i] = 0.1 * i;
        ScalarField u = fn(uv);
        GradientReport rep = minimal_gradient(g, u, 0.1, 2.0, 0.5);
        ConsistencyReport audit =
            check_curve_consistency(g, u, grad(rep.gradient), 0.1);
        CHECK(audit.two_point_ok);
        CHECK(audit.consistent);
        CHECK(audit.paths_checked > 100);
    }
    SUBCASE("infinite interior values absorb the paths that cross them") {
        PointCloudSpace s = line_space({0.0, 1.0, 2.0});
        ScalarField u = fn({0.0, 3.0, 6.0});
        ScalarField g = grad({3.0, kInf, 3.0});
        ConsistencyReport rep = check_curve_consistency(s, u, g, 1.0);
        CHECK(rep.two_point_ok);
        CHECK(rep.consistent);
    }
}

TEST_CASE("field role validation") {
    CHECK_THROWS_AS(make_field({0.0, -1.0}, FieldRole::gradient), Error);
    CHECK_THROWS_AS(make_field({0.0, kInf}, FieldRole::function), Error);
    CHECK_THROWS_AS(make_field({std::nan("")}, FieldRole::density), Error);
    CHECK_NOTHROW(make_field({0.0, kInf}, FieldRole::density));
}
