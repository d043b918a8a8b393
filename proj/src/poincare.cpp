#include "chaincalc/poincare.hpp"

#include "chaincalc/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <tuple>
#include <utility>
#include <vector>

namespace chaincalc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_point(const PointCloudSpace& space, int id, const char* what) {
    if (id < 0 || id >= space.n) {
        std::ostringstream os;
        os << what << " refers to point " << id << " outside the space (n = " << space.n
           << ")";
        fail("UnknownPoint", os.str());
    }
}

void check_scale(double eps) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        fail("NonPositiveEps", "the chain scale must be a positive real");
}

std::vector<char> point_mask(const PointCloudSpace& space, const std::vector<int>& ids,
                             const char* what) {
    std::vector<char> mask(space.n, 0);
    for (int id : ids) {
        check_point(space, id, what);
        mask[id] = 1;
    }
    return mask;
}

// Distance from each point to the masked set (+inf if the set is empty).
std::vector<double> set_distance(const PointCloudSpace& space,
                                 const std::vector<char>& mask) {
    std::vector<double> dmin(space.n, kInf);
    for (int z = 0; z < space.n; ++z) {
        if (mask[z]) {
            dmin[z] = 0.0;
            continue;
        }
        for (int a = 0; a < space.n; ++a)
            if (mask[a]) dmin[z] = std::min(dmin[z], space.d(z, a));
    }
    return dmin;
}

} // namespace

RieszWeights riesz_weights(const PointCloudSpace& space, int x, int y, double truncation) {
    check_point(space, x, "kernel pole");
    check_point(space, y, "kernel pole");
    if (x == y) fail("BadParameter", "the kernel poles must be distinct");
    if (!(truncation >= 1.0) || !std::isfinite(truncation))
        fail("BadParameter", "the truncation factor must be a finite real >= 1");

    const double radius = truncation * space.d(x, y);
    RieszWeights out;
    out.x = x;
    out.y = y;
    out.truncation = truncation;
    out.weights.assign(space.n, 0.0);
    for (int z = 0; z < space.n; ++z) {
        if (z == x || z == y) continue; // poles pinned to zero
        double dx = space.d(x, z);
        double dy = space.d(y, z);
        if (!(dx < radius || dy < radius)) continue; // outside the open two-ball union
        double acc = 0.0;
        for (auto [pole, dist] : {std::pair<int, double>{x, dx}, {y, dy}}) {
            double ball = open_ball_mass(space, pole, dist);
            if (ball <= 0.0) {
                std::ostringstream os;
                os << "open ball around point " << space.label_of(pole) << " of radius "
                   << dist << " carries no mass";
                fail("ZeroBallMass", os.str());
            }
            acc += dist / ball;
        }
        out.weights[z] = acc;
        out.total += acc * space.mass[z];
    }
    return out;
}

BallAudit ball_pi_audit(const PointCloudSpace& space, const ScalarField& u,
                        const ScalarField& g, double p, double dilation,
                        const std::vector<double>& radii) {
    if (u.role != FieldRole::function)
        fail("BadField", "the first field must carry the function role");
    if (g.role != FieldRole::gradient)
        fail("BadField", "the second field must carry the gradient role");
    for (double v : u.values)
        if (!std::isfinite(v)) fail("BadField", "function values must be finite");
    for (double v : g.values)
        if (!(v >= 0.0)) fail("BadField", "gradient values must be nonnegative");
    if (!(p >= 1.0) || !std::isfinite(p))
        fail("BadParameter", "the exponent must be a finite real >= 1");
    if (!(dilation >= 1.0) || !std::isfinite(dilation))
        fail("BadParameter", "the dilation factor must be a finite real >= 1");

    std::vector<double> rads;
    if (radii.empty()) {
        std::vector<double> scales = distance_scales(space);
        for (size_t k = 0; k < scales.size(); ++k) {
            rads.push_back(scales[k]);
            if (k + 1 < scales.size()) rads.push_back(0.5 * (scales[k] + scales[k + 1]));
        }
    } else {
        for (double r : radii)
            if (!(r > 0.0) || !std::isfinite(r))
                fail("BadParameter", "audit radii must be positive reals");
        rads = radii;
        std::sort(rads.begin(), rads.end());
        rads.erase(std::unique(rads.begin(), rads.end()), rads.end());
    }

    BallAudit audit;
    for (int center = 0; center < space.n; ++center) {
        for (double r : rads) {
            BallCase bc;
            bc.center = center;
            bc.radius = r;
            std::vector<int> ball = open_ball_members(space, center, r);
            double mass = 0.0;
            for (int z : ball) mass += space.mass[z];
            if (mass <= 0.0) {
                bc.empty = true;
                audit.skipped++;
                audit.cases.push_back(bc);
                continue;
            }
            double ubar = 0.0;
            bool constant = true;
            double first = u.values[ball.front()];
            for (int z : ball) {
                if (space.mass[z] > 0.0) ubar += space.mass[z] * u.values[z];
                if (u.values[z] != first) constant = false;
            }
            ubar /= mass;
            double lhs = 0.0;
            if (!constant) { // a constant deviates by exactly zero, division noise aside
                for (int z : ball)
                    if (space.mass[z] > 0.0)
                        lhs += space.mass[z] * std::abs(u.values[z] - ubar);
                lhs /= mass;
            }

            std::vector<int> wide = open_ball_members(space, center, dilation * r);
            double wide_mass = 0.0, mean_gp = 0.0;
            for (int z : wide) wide_mass += space.mass[z];
            for (int z : wide)
                if (space.mass[z] > 0.0) mean_gp += space.mass[z] * std::pow(g.values[z], p);
            mean_gp /= wide_mass;
            double rhs = r * std::pow(mean_gp, 1.0 / p);

            bc.lhs = lhs;
            bc.rhs = rhs;
            if (rhs > 0.0) {
                bc.ratio = lhs / rhs;
                if (bc.ratio > audit.worst_constant) {
                    audit.worst_constant = bc.ratio;
                    audit.worst_case = static_cast<int>(audit.cases.size());
                }
            } else {
                bc.zero_rhs = true;
                if (lhs > 0.0 && !audit.unbounded) {
                    audit.unbounded = true;
                    audit.unbounded_case = static_cast<int>(audit.cases.size());
                }
            }
            audit.cases.push_back(bc);
        }
    }
    return audit;
}

PointwiseReport pointwise_pi_check(const PointCloudSpace& space, int x, int y,
                                   const ScalarField& g, double p, double C,
                                   double truncation, double lambda,
                                   const PointwiseOptions& opts) {
    check_point(space, x, "estimate pole");
    check_point(space, y, "estimate pole");
    if (x == y) fail("BadParameter", "the estimate poles must be distinct");
    if (g.role != FieldRole::gradient)
        fail("BadField", "the field must carry the gradient role");
    for (double v : g.values)
        if (!(v >= 0.0)) fail("BadField", "gradient values must be nonnegative");
    if (!std::isfinite(g.values[x]) || !std::isfinite(g.values[y]))
        fail("BadField", "the class requires finite gradient values at the poles");
    if (!(p >= 1.0) || !std::isfinite(p))
        fail("BadParameter", "the exponent must be a finite real >= 1");
    if (!(C > 0.0) || !std::isfinite(C))
        fail("BadParameter", "the length-budget factor must be a positive real");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        fail("LambdaOutOfRange", "the endpoint weight must lie in [0, 1]");

    PointwiseReport report;

    // Scale: explicit override, or the smallest pairwise-distance scale at
    // which the poles fall into one chain component (connectivity is monotone
    // in the scale, so a binary search over the scale grid is exact).
    if (opts.eps) {
        check_scale(*opts.eps);
        report.eps = *opts.eps;
    } else {
        std::vector<double> scales = distance_scales(space);
        auto joined = [&](double e) {
            ComponentPartition comp = chain_components(space, e);
            return comp.component_of[x] == comp.component_of[y];
        };
        if (scales.empty() || !joined(scales.back()))
            fail("NoChainWithinBudget", "the poles are not chain-joinable at any scale");
        size_t lo = 0, hi = scales.size() - 1;
        while (lo < hi) {
            size_t mid = (lo + hi) / 2;
            if (joined(scales[mid]))
                hi = mid;
            else
                lo = mid + 1;
        }
        report.eps = scales[lo];
    }

    const double dxy = space.d(x, y);
    report.length_budget = C * dxy;
    EpsilonGraph graph = build_epsilon_graph(space, report.eps);

    // Feasibility of the length budget alone.
    {
        std::vector<double> len(space.n, kInf);
        std::vector<char> done(space.n, 0);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
        len[x] = 0.0;
        pq.push({0.0, x});
        while (!pq.empty()) {
            auto [l, u] = pq.top();
            pq.pop();
            if (done[u]) continue;
            done[u] = 1;
            if (u == y) break;
            for (const auto& e : graph.adjacency[u])
                if (!done[e.to] && l + e.length < len[e.to]) {
                    len[e.to] = l + e.length;
                    pq.push({len[e.to], e.to});
                }
        }
        if (len[y] > report.length_budget) {
            std::ostringstream os;
            os << "no chain joins the poles within length " << report.length_budget
               << " at scale " << report.eps << " (shortest is " << len[y] << ")";
            fail("NoChainWithinBudget", os.str());
        }
    }

    RieszWeights kernel = riesz_weights(space, x, y, truncation);
    double sum_gp = 0.0;
    for (int z = 0; z < space.n; ++z) {
        double w = kernel.weights[z] * space.mass[z];
        if (w > 0.0) sum_gp += std::pow(g.values[z], p) * w;
    }
    report.rhs = C * std::pow(dxy, p - 1.0) * sum_gp;

    // Exact bicriteria shortest chain: label setting over (cost, length)
    // states with Pareto dominance pruning; deterministic lexicographic pops.
    struct Label {
        double cost, len;
        int node, pred;
    };
    std::vector<Label> arena;
    std::vector<std::vector<std::pair<double, double>>> front(space.n);
    using Item = std::tuple<double, double, int, int>; // cost, len, node, arena id
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;

    auto dominated = [&](int node, double cost, double len) {
        for (const auto& [c, l] : front[node]) {
            if (c > cost) break;
            if (l <= len) return true;
        }
        return false;
    };
    auto insert_front = [&](int node, double cost, double len) {
        auto& f = front[node];
        size_t pos = 0;
        while (pos < f.size() && f[pos].first < cost) pos++;
        f.insert(f.begin() + pos, {cost, len});
        size_t w = pos + 1;
        for (size_t r = pos + 1; r < f.size(); ++r)
            if (f[r].second < len) f[w++] = f[r];
        f.resize(w);
    };
    auto on_front = [&](int node, double cost, double len) {
        for (const auto& [c, l] : front[node]) {
            if (c > cost) break;
            if (c == cost && l == len) return true;
        }
        return false;
    };

    arena.push_back({0.0, 0.0, x, -1});
    insert_front(x, 0.0, 0.0);
    pq.push({0.0, 0.0, x, 0});

    const auto t0 = std::chrono::steady_clock::now();
    const bool budgeted = opts.time_budget_ms > 0.0;
    long pops = 0;
    double best_cost = kInf;
    int best_label = -1;

    while (!pq.empty()) {
        auto [cost, len, node, id] = pq.top();
        pq.pop();
        if (!on_front(node, cost, len)) continue;
        if (budgeted && (++pops & 511) == 0) {
            double ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count();
            if (ms > opts.time_budget_ms) {
                // Everything still queued costs at least this much.
                report.lower_bound_only = true;
                best_cost = cost;
                best_label = -1;
                break;
            }
        }
        if (node == y) {
            best_cost = cost;
            best_label = id;
            break;
        }
        for (const auto& e : graph.adjacency[node]) {
            double ncost =
                cost + (lambda * g.values[node] + (1.0 - lambda) * g.values[e.to]) * e.length;
            double nlen = len + e.length;
            if (nlen > report.length_budget) continue;
            if (!std::isfinite(ncost)) continue;
            if (dominated(e.to, ncost, nlen)) continue;
            insert_front(e.to, ncost, nlen);
            arena.push_back({ncost, nlen, e.to, id});
            pq.push({ncost, nlen, e.to, static_cast<int>(arena.size()) - 1});
        }
    }

    report.lhs = std::pow(best_cost, p);
    if (best_label >= 0) {
        for (int id = best_label; id != -1; id = arena[id].pred)
            report.witness.push_back(arena[id].node);
        std::reverse(report.witness.begin(), report.witness.end());
    }
    report.satisfied = report.lhs <= report.rhs;
    return report;
}

double chain_width(const PointCloudSpace& space, int x, int y,
                   const std::vector<int>& target, double eps) {
    check_point(space, x, "width endpoint");
    check_point(space, y, "width endpoint");
    if (x == y) fail("BadParameter", "the width endpoints must be distinct");
    check_scale(eps);
    std::vector<char> mask = point_mask(space, target, "width target");

    EpsilonGraph graph = build_epsilon_graph(space, eps);
    std::vector<double> dist(space.n, kInf);
    std::vector<char> done(space.n, 0);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[x] = 0.0;
    pq.push({0.0, x});
    while (!pq.empty()) {
        auto [cost, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        if (u == y) break;
        for (const auto& e : graph.adjacency[u]) {
            if (done[e.to]) continue;
            double step = 0.5 * (mask[u] + mask[e.to]) * e.length;
            if (cost + step < dist[e.to]) {
                dist[e.to] = cost + step;
                pq.push({dist[e.to], e.to});
            }
        }
    }
    return dist[y];
}

MinkowskiProfile minkowski_profile(const PointCloudSpace& space,
                                   const std::vector<int>& set,
                                   const std::vector<double>& measure,
                                   const std::vector<double>& radii) {
    std::vector<char> mask = point_mask(space, set, "profile set");
    if (static_cast<int>(measure.size()) != space.n)
        fail("BadField", "measure vector length does not match the space");
    for (double w : measure)
        if (!(w >= 0.0) || !std::isfinite(w))
            fail("BadField", "measure entries must be finite and nonnegative");
    if (radii.empty()) fail("EmptyRadiusGrid", "the profile needs at least one radius");
    std::vector<double> rads = radii;
    for (double r : rads)
        if (!(r > 0.0) || !std::isfinite(r))
            fail("BadParameter", "profile radii must be positive reals");
    std::sort(rads.begin(), rads.end());
    rads.erase(std::unique(rads.begin(), rads.end()), rads.end());

    std::vector<double> dmin = set_distance(space, mask);
    MinkowskiProfile profile;
    for (double r : rads) {
        ShellEntry entry;
        entry.r = r;
        for (int z = 0; z < space.n; ++z)
            if (!mask[z] && dmin[z] < r) entry.shell_measure += measure[z];
        entry.value = entry.shell_measure / r;
        profile.entries.push_back(entry);
    }
    profile.minimum = kInf;
    for (size_t k = 0; k < profile.entries.size(); ++k) {
        if (profile.entries[k].value < profile.minimum) {
            profile.minimum = profile.entries[k].value;
            profile.argmin = static_cast<int>(k);
        }
    }
    return profile;
}

BmcAudit bmc_audit(const PointCloudSpace& space, int x, int y, double truncation,
                   const std::vector<std::vector<int>>& candidates, double eps,
                   const std::vector<double>& radii) {
    check_point(space, x, "audit pole");
    check_point(space, y, "audit pole");
    if (x == y) fail("BadParameter", "the audit poles must be distinct");
    check_scale(eps);
    if (candidates.empty())
        fail("BadParameter", "the audit needs at least one candidate separating set");

    RieszWeights kernel = riesz_weights(space, x, y, truncation);
    std::vector<double> wvec(space.n, 0.0);
    for (int z = 0; z < space.n; ++z) wvec[z] = kernel.weights[z] * space.mass[z];

    std::vector<double> rads = radii.empty() ? distance_scales(space) : radii;
    if (rads.empty()) fail("EmptyRadiusGrid", "the audit needs at least one radius");
    for (double r : rads)
        if (!(r > 0.0) || !std::isfinite(r))
            fail("BadParameter", "audit radii must be positive reals");
    std::sort(rads.begin(), rads.end());
    rads.erase(std::unique(rads.begin(), rads.end()), rads.end());

    BmcAudit audit;
    audit.worst_lower = kInf;
    for (size_t ci = 0; ci < candidates.size(); ++ci) {
        std::vector<char> mask = point_mask(space, candidates[ci], "candidate set");
        std::ostringstream who;
        who << "candidate " << ci;
        if (!mask[x]) fail("NotSeparating", who.str() + " does not contain pole x");
        if (mask[y]) fail("NotSeparating", who.str() + " contains pole y");
        for (int z : open_ball_members(space, x, eps))
            if (!mask[z])
                fail("NotSeparating", who.str() + " misses point " + space.label_of(z) +
                                          " of the eps-ball around pole x");

        std::vector<double> dmin = set_distance(space, mask);
        BmcCandidate cand;
        cand.separating_set = candidates[ci];
        cand.profile_min = kInf;
        for (double r : rads) {
            BmcShell shell;
            shell.r = r;
            std::vector<int> members;
            for (int z = 0; z < space.n; ++z) {
                if (mask[z] || !(dmin[z] < r)) continue;
                members.push_back(z);
                shell.shell_measure += wvec[z];
            }
            shell.width = chain_width(space, x, y, members, eps);
            if (shell.shell_measure > 0.0) {
                shell.ratio = shell.width / shell.shell_measure;
                if (shell.ratio > audit.worst_upper) {
                    audit.worst_upper = shell.ratio;
                    audit.worst_upper_candidate = static_cast<int>(ci);
                }
            } else {
                shell.zero_measure = true;
                audit.zero_measure_shells++;
            }
            cand.profile_min = std::min(cand.profile_min, shell.shell_measure / r);
            cand.shells.push_back(shell);
        }
        if (cand.profile_min < audit.worst_lower) {
            audit.worst_lower = cand.profile_min;
            audit.worst_lower_candidate = static_cast<int>(ci);
        }
        audit.candidates.push_back(std::move(cand));
    }
    return audit;
}

} // namespace chaincalc
