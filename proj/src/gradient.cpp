#include "chaincalc/gradient.hpp"

#include "chaincalc/chain.hpp"
#include "chaincalc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace chaincalc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_lambda(double lambda) {
    if (!(lambda >= 0.0) || !(lambda <= 1.0))
        fail("LambdaOutOfRange", "lambda must lie in [0,1], got " + std::to_string(lambda));
}

void check_lengths(const PointCloudSpace& space, const ScalarField& f, const char* what) {
    if (static_cast<int>(f.values.size()) != space.n)
        fail("BadField", std::string(what) + " has " + std::to_string(f.values.size()) +
                             " values for a space of " + std::to_string(space.n) + " points");
}

void require_finite(const ScalarField& u, const char* what) {
    for (double v : u.values)
        if (!std::isfinite(v)) fail("BadField", std::string(what) + " must be finite-valued");
}

// Endpoint-weighted step cost; infinite values only count with positive weight.
double pair_cost(double d, double ga, double gb, double lambda) {
    if ((lambda > 0.0 && std::isinf(ga)) || (lambda < 1.0 && std::isinf(gb))) return kInf;
    double avg = 0.0;
    if (lambda > 0.0) avg += lambda * ga;
    if (lambda < 1.0) avg += (1.0 - lambda) * gb;
    return avg * d;
}

} // namespace

ScalarField make_field(std::vector<double> values, FieldRole role) {
    for (double v : values) {
        if (std::isnan(v)) fail("BadField", "field contains NaN");
        if (role == FieldRole::function && !std::isfinite(v))
            fail("BadField", "function fields must be finite");
        if (role != FieldRole::function && v < 0.0)
            fail("BadField", "gradient/density fields must be nonnegative");
    }
    ScalarField f;
    f.values = std::move(values);
    f.role = role;
    return f;
}

ScalarField slope_field(const PointCloudSpace& space, const ScalarField& u, double eps) {
    if (!(eps > 0.0)) fail("NonPositiveEps", "eps must be positive");
    check_lengths(space, u, "u");
    require_finite(u, "u");
    ScalarField out;
    out.role = FieldRole::gradient;
    out.values.assign(space.n, 0.0);
    for (int i = 0; i < space.n; ++i) {
        double best = 0.0;
        for (int j = 0; j < space.n; ++j) {
            if (j == i) continue;
            double d = space.d(i, j);
            if (d <= 0.0 || d > eps) continue;
            best = std::max(best, std::fabs(u.values[j] - u.values[i]) / d);
        }
        out.values[i] = best;
    }
    return out;
}

VerifyReport verify_upper_gradient(const PointCloudSpace& space, const ScalarField& u,
                                   const ScalarField& g, double eps, double lambda,
                                   const VerifyOptions& opts) {
    if (!(eps > 0.0)) fail("NonPositiveEps", "eps must be positive");
    check_lambda(lambda);
    check_lengths(space, u, "u");
    check_lengths(space, g, "g");
    require_finite(u, "u");
    for (double v : g.values)
        if (std::isnan(v) || v < 0.0) fail("BadField", "g must be nonnegative");

    VerifyReport rep;
    for (int i = 0; i < space.n; ++i) {
        for (int j = 0; j < space.n; ++j) {
            if (i == j) continue;
            double d = space.d(i, j);
            if (d <= 0.0 || d > eps) continue;
            if (opts.weak && (space.mass[i] == 0.0 || space.mass[j] == 0.0)) continue;
            double delta = u.values[j] - u.values[i];
            double required = opts.one_sided ? delta : std::fabs(delta);
            ++rep.pairs_checked;
            double available = pair_cost(d, g.values[i], g.values[j], lambda);
            double deficit = required - available;
            if (std::isinf(available)) deficit = -kInf;
            if (deficit > opts.slack_tol * std::max(1.0, std::fabs(required))) {
                rep.ok = false;
                rep.violations.push_back({i, j, required, available, deficit});
            }
            rep.worst_deficit = std::max(rep.worst_deficit, deficit);
        }
    }
    std::stable_sort(rep.violations.begin(), rep.violations.end(),
                     [](const PairViolation& a, const PairViolation& b) {
                         return a.deficit > b.deficit;
                     });
    if (static_cast<int>(rep.violations.size()) > opts.max_report)
        rep.violations.resize(opts.max_report);
    return rep;
}

ConvexProgram build_gradient_program(const PointCloudSpace& space, const ScalarField& u,
                                     double eps, double p, double lambda, bool weak,
                                     bool one_sided) {
    if (!(eps > 0.0)) fail("NonPositiveEps", "eps must be positive");
    check_lambda(lambda);
    check_lengths(space, u, "u");
    require_finite(u, "u");

    ConvexProgram prog;
    prog.nvars = space.n;
    prog.weight = space.mass;
    prog.p = p;
    const bool symmetric = lambda == 0.5;
    for (int i = 0; i < space.n; ++i) {
        for (int j = 0; j < space.n; ++j) {
            if (i == j) continue;
            if (symmetric && j < i) continue; // both orientations coincide
            double d = space.d(i, j);
            if (d <= 0.0 || d > eps) continue;
            if (weak && (space.mass[i] == 0.0 || space.mass[j] == 0.0)) continue;
            double delta = u.values[j] - u.values[i];
            double rhs = one_sided ? delta : std::fabs(delta);
            if (rhs <= 0.0) continue; // vacuous under g >= 0
            SparseRow row;
            if (lambda > 0.0) row.terms.emplace_back(i, lambda * d);
            if (lambda < 1.0) row.terms.emplace_back(j, (1.0 - lambda) * d);
            row.rhs = rhs;
            prog.rows.push_back(std::move(row));
        }
    }
    return prog;
}

namespace {

GradientReport run_gradient_program(const PointCloudSpace& space, const ConvexProgram& prog,
                                    double p, const SolveOptions& solve) {
    SolveReport rep = solve_separable(prog, solve);
    GradientReport out;
    out.status = rep.status;
    out.energy = rep.objective_energy;
    out.objective = rep.objective_norm;
    out.gradient = std::move(rep.solution);
    out.max_violation = rep.max_violation;
    out.dual_bound = rep.dual_bound;
    out.duality_gap = rep.duality_gap;
    out.kkt_residual = rep.kkt_residual;
    out.iterations = rep.iterations;
    out.constraints = static_cast<int>(prog.rows.size());
    (void)space;
    (void)p;
    return out;
}

} // namespace

GradientReport minimal_gradient(const PointCloudSpace& space, const ScalarField& u,
                                double eps, double p, double lambda,
                                const GradientOptions& opts) {
    ConvexProgram prog =
        build_gradient_program(space, u, eps, p, lambda, opts.weak, opts.one_sided);
    return run_gradient_program(space, prog, p, opts.solve);
}

GradientReport minimal_weak_gradient(const PointCloudSpace& space, const ScalarField& u,
                                     double eps, double p, double lambda,
                                     const GradientOptions& opts) {
    GradientOptions weak = opts;
    weak.weak = true;
    return minimal_gradient(space, u, eps, p, lambda, weak);
}

std::vector<LadderRung> energy_ladder(const PointCloudSpace& space, const ScalarField& u,
                                      const std::vector<double>& eps_list, double p,
                                      double lambda, const GradientOptions& opts) {
    if (eps_list.empty()) fail("BadParameter", "eps ladder must be nonempty");
    for (size_t k = 0; k < eps_list.size(); ++k) {
        if (!(eps_list[k] > 0.0)) fail("NonPositiveEps", "ladder eps must be positive");
        if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
            fail("BadParameter", "eps ladder must be strictly decreasing");
    }
    std::vector<LadderRung> out;
    out.reserve(eps_list.size());
    for (double eps : eps_list) {
        GradientReport rep = minimal_gradient(space, u, eps, p, lambda, opts);
        out.push_back({eps, rep.objective, rep.status});
    }
    return out;
}

ConsistencyReport check_curve_consistency(const PointCloudSpace& space, const ScalarField& u,
                                          const ScalarField& g, double eps) {
    ConsistencyReport rep;
    VerifyReport two_point = verify_upper_gradient(space, u, g, eps, 0.5);
    rep.two_point_ok = two_point.ok;
    if (!two_point.ok) return rep; // precondition failed; paths not examined

    EpsilonGraph graph = build_epsilon_graph(space, eps);
    rep.worst_slack = kInf;
    rep.consistent = true;

    auto record = [&](const std::vector<int>& path) {
        double du = std::fabs(u.values[path.back()] - u.values[path.front()]);
        double integral = 0.0;
        for (size_t k = 0; k + 1 < path.size(); ++k) {
            integral += pair_cost(space.d(path[k], path[k + 1]), g.values[path[k]],
                                  g.values[path[k + 1]], 0.5);
            if (std::isinf(integral)) break;
        }
        ++rep.paths_checked;
        double slack = integral - du;
        if (slack < rep.worst_slack) {
            rep.worst_slack = slack;
            // a slack beyond accumulated per-step tolerance is a real failure
            double allow = 1e-9 * static_cast<double>(path.size()) *
                           std::max(1.0, std::fabs(du));
            if (slack < -allow) {
                rep.consistent = false;
                rep.counterexample = path;
            }
        }
    };

    std::vector<int> finite_ids;
    for (int i = 0; i < space.n; ++i)
        if (std::isfinite(g.values[i])) finite_ids.push_back(i);

    if (space.n <= 8) {
        // exhaustive simple paths between finite-g endpoints
        std::vector<int> path;
        std::vector<char> used(space.n, 0);
        std::function<void(int)> dfs = [&](int at) {
            if (path.size() >= 2 && std::isfinite(g.values[at])) record(path);
            for (const auto& e : graph.adjacency[at]) {
                if (used[e.to]) continue;
                used[e.to] = 1;
                path.push_back(e.to);
                dfs(e.to);
                path.pop_back();
                used[e.to] = 0;
            }
        };
        for (int start : finite_ids) {
            used.assign(space.n, 0);
            used[start] = 1;
            path = {start};
            dfs(start);
        }
    } else {
        std::mt19937_64 rng(0xC0FFEEULL);
        const int walks_per_start = 64;
        const int max_len = 2 * space.n;
        for (int start : finite_ids) {
            for (int w = 0; w < walks_per_start; ++w) {
                std::vector<int> path = {start};
                int at = start;
                std::uniform_int_distribution<int> len_d(1, max_len);
                int len = len_d(rng);
                for (int s = 0; s < len; ++s) {
                    const auto& nb = graph.adjacency[at];
                    if (nb.empty()) break;
                    std::uniform_int_distribution<int> pick(0,
                                                            static_cast<int>(nb.size()) - 1);
                    at = nb[pick(rng)].to;
                    path.push_back(at);
                }
                if (path.size() >= 2 && std::isfinite(g.values[path.back()])) record(path);
            }
        }
    }
    if (rep.paths_checked == 0) rep.worst_slack = 0.0;
    return rep;
}

} // namespace chaincalc
