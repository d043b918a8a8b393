#include "chaincalc/potential.hpp"

#include "chaincalc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace chaincalc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Mirrors the verifier's endpoint-weighted step cost: an infinite endpoint
// only counts on a side with positive weight.
double step_cost(double d, double ga, double gb, double lambda) {
    if ((lambda > 0.0 && std::isinf(ga)) || (lambda < 1.0 && std::isinf(gb))) return kInf;
    double avg = 0.0;
    if (lambda > 0.0) avg += lambda * ga;
    if (lambda < 1.0) avg += (1.0 - lambda) * gb;
    return avg * d;
}

void validate_spec(const PointCloudSpace& space, const PotentialSpec& spec) {
    if (spec.seeds.empty()) fail("EmptySeedSet", "the potential needs at least one seed");
    if (spec.seeds.size() != spec.seed_values.size())
        fail("BadParameter", "got " + std::to_string(spec.seeds.size()) + " seeds but " +
                                 std::to_string(spec.seed_values.size()) + " seed values");
    for (int a : spec.seeds)
        if (a < 0 || a >= space.n)
            fail("UnknownPoint", "seed id " + std::to_string(a) + " is out of range");
    for (double v : spec.seed_values)
        if (!std::isfinite(v)) fail("BadParameter", "seed values must be finite");
    if (!(spec.eps > 0.0)) fail("NonPositiveEps", "eps must be positive");
    if (!(spec.lambda >= 0.0) || !(spec.lambda <= 1.0))
        fail("LambdaOutOfRange", "lambda must lie in [0,1]");
    if (spec.g.role != FieldRole::gradient)
        fail("BadField", "the weight field must carry the gradient role");
    if (static_cast<int>(spec.g.values.size()) != space.n)
        fail("BadField", "the weight field has " + std::to_string(spec.g.values.size()) +
                             " values for a space of " + std::to_string(space.n) + " points");
    for (double v : spec.g.values)
        if (std::isnan(v) || v < 0.0) fail("BadField", "the weight field must be nonnegative");
    if (spec.cap && std::isnan(*spec.cap)) fail("BadParameter", "the cap must not be NaN");
}

} // namespace

PotentialResult chain_potential(const PointCloudSpace& space, const PotentialSpec& spec) {
    validate_spec(space, spec);
    EpsilonGraph graph = build_epsilon_graph(space, spec.eps);
    const std::vector<double>& g = spec.g.values;

    std::vector<double> dist(space.n, kInf);
    std::priority_queue<std::pair<double, int>, std::vector<std::pair<double, int>>,
                        std::greater<>>
        pq;
    for (size_t k = 0; k < spec.seeds.size(); ++k) {
        int a = spec.seeds[k];
        if (spec.seed_values[k] < dist[a]) {
            dist[a] = spec.seed_values[k];
            pq.push({dist[a], a});
        }
    }
    while (!pq.empty()) {
        auto [c, i] = pq.top();
        pq.pop();
        if (c > dist[i]) continue;
        for (const auto& e : graph.adjacency[i]) {
            double cand = c + step_cost(e.length, g[i], g[e.to], spec.lambda);
            if (cand < dist[e.to]) {
                dist[e.to] = cand;
                pq.push({cand, e.to});
            }
        }
    }

    PotentialResult out;
    for (double& v : dist) {
        if (std::isinf(v)) out.unreachable++;
        if (spec.cap) v = std::min(*spec.cap, v);
    }
    out.u.values = std::move(dist);
    out.u.role = FieldRole::function;
    return out;
}

PotentialCheck potential_gradient_check(const PointCloudSpace& space,
                                        const PotentialSpec& spec) {
    PotentialCheck out;
    out.potential = chain_potential(space, spec);
    out.one_sided = spec.lambda != 0.5;

    std::vector<double> uv = out.potential.u.values;
    double top = 0.0;
    for (double v : uv)
        if (std::isfinite(v)) top = std::max(top, std::fabs(v));
    for (double& v : uv)
        if (std::isinf(v)) v = top + 1.0;

    VerifyOptions vo;
    vo.one_sided = out.one_sided;
    vo.slack_tol = 1e-12;
    ScalarField u = make_field(std::move(uv), FieldRole::function);
    out.verdict = verify_upper_gradient(space, u, spec.g, spec.eps, spec.lambda, vo);
    return out;
}

ScalarField leibniz_gradient(const PointCloudSpace& space, const ScalarField& u,
                             const ScalarField& g, const ScalarField& phi, double eps) {
    if (!(eps > 0.0)) fail("NonPositiveEps", "eps must be positive");
    if (u.role != FieldRole::function || phi.role != FieldRole::function)
        fail("BadField", "u and phi must carry the function role");
    if (g.role != FieldRole::gradient)
        fail("BadField", "g must carry the gradient role");
    for (const ScalarField* f : {&u, &g, &phi})
        if (static_cast<int>(f->values.size()) != space.n)
            fail("BadField", "field length does not match the space");
    for (double v : u.values)
        if (!std::isfinite(v)) fail("BadField", "u must be finite-valued");
    for (double v : phi.values)
        if (!std::isfinite(v)) fail("BadField", "phi must be finite-valued");
    for (double v : g.values)
        if (std::isnan(v) || v < 0.0) fail("BadField", "g must be nonnegative");

    ScalarField sl = slope_field(space, phi, eps);

    ScalarField out;
    out.role = FieldRole::gradient;
    out.values.assign(space.n, 0.0);
    for (int i = 0; i < space.n; ++i) {
        double q = std::fabs(phi.values[i]); // closed ball includes the point
        for (int j = 0; j < space.n; ++j) {
            if (j == i) continue;
            double d = space.d(i, j);
            if (d <= 0.0 || d > eps) continue;
            q = std::max(q, std::fabs(phi.values[j]));
        }
        double v = std::fabs(u.values[i]) * sl.values[i];
        if (q > 0.0) v += q * g.values[i]; // a vanishing sup absorbs infinite g
        out.values[i] = v;
    }
    return out;
}

EbReport eb_pipeline(const std::vector<int>& grid_sizes,
                     const std::function<double(double)>& u,
                     const std::function<double(double)>& g, double p, double eps_factor,
                     EbSeeds seeds) {
    if (grid_sizes.empty()) fail("BadParameter", "the grid family must not be empty");
    for (int n : grid_sizes)
        if (n < 2) fail("BadParameter", "grids need at least two points");
    if (!(p >= 1.0)) fail("BadParameter", "the exponent must satisfy p >= 1");
    if (!(eps_factor > 0.0)) fail("BadParameter", "the scale factor must be positive");

    EbReport report;
    report.p = p;
    report.seeds = seeds;
    for (int n : grid_sizes) {
        double spacing = 1.0 / (n - 1);
        PointCloudSpace space = generate_grid(1, n, spacing);

        std::vector<double> uv(n), gv(n);
        for (int i = 0; i < n; ++i) {
            double x = spacing * i;
            uv[i] = u(x);
            gv[i] = g(x);
            if (!std::isfinite(uv[i])) fail("BadField", "u must sample finite");
            if (std::isnan(gv[i]) || gv[i] < 0.0)
                fail("BadField", "g must sample nonnegative");
        }

        PotentialSpec spec;
        spec.g = make_field(gv, FieldRole::gradient);
        spec.eps = eps_factor / n;
        spec.lambda = 0.5;
        if (seeds == EbSeeds::all) {
            spec.seeds.resize(n);
            for (int i = 0; i < n; ++i) spec.seeds[i] = i;
            spec.seed_values = uv;
        } else {
            spec.seeds = {0, n - 1};
            spec.seed_values = {uv[0], uv[n - 1]};
        }
        PotentialResult pot = chain_potential(space, spec);

        EbEntry entry;
        entry.n = n;
        entry.eps = spec.eps;
        if (pot.unreachable > 0) { // scale too small for the seed set
            entry.err_u = kInf;
            entry.err_g = kInf;
            entry.status = "disconnected";
            report.entries.push_back(std::move(entry));
            continue;
        }
        double acc_u = 0.0;
        for (int i = 0; i < n; ++i) {
            double diff = std::fabs(pot.u.values[i] - uv[i]);
            acc_u += space.mass[i] * std::pow(diff, p);
        }
        entry.err_u = std::pow(acc_u, 1.0 / p);

        GradientReport grad =
            minimal_gradient(space, pot.u, spec.eps, p, spec.lambda);
        entry.status = grad.status;
        double acc_g = 0.0;
        for (int i = 0; i < n; ++i) {
            double diff = std::fabs(grad.gradient[i] - gv[i]);
            acc_g += space.mass[i] * std::pow(diff, p);
        }
        entry.err_g = std::pow(acc_g, 1.0 / p);
        report.entries.push_back(std::move(entry));
    }
    return report;
}

} // namespace chaincalc
