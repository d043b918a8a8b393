#include "chaincalc/modulus.hpp"

#include "chaincalc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>
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

struct Separation {
    double value = kInf;
    std::vector<int> chain;
};

// Cheapest chain from `from` to `to` under the ordered-step costs
// (lambda*rho[a] + (1-lambda)*rho[b]) * d(a,b). Costs are nonnegative, so the
// minimum over the whole family is attained on a simple chain and Dijkstra is
// an exact oracle. Ties resolve toward the smallest point id.
Separation separate_connect(const EpsilonGraph& graph, const std::vector<double>& rho,
                            double lambda, int from, int to) {
    const int n = static_cast<int>(graph.adjacency.size());
    std::vector<double> dist(n, kInf);
    std::vector<int> pred(n, -1);
    std::vector<char> done(n, 0);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[from] = 0.0;
    pq.push({0.0, from});
    while (!pq.empty()) {
        auto [cost, u] = pq.top();
        pq.pop();
        if (done[u]) continue;
        done[u] = 1;
        if (u == to) break;
        for (const auto& e : graph.adjacency[u]) {
            if (done[e.to]) continue;
            double step = (lambda * rho[u] + (1.0 - lambda) * rho[e.to]) * e.length;
            double next = cost + step;
            if (next < dist[e.to]) {
                dist[e.to] = next;
                pred[e.to] = u;
                pq.push({next, e.to});
            }
        }
    }
    Separation sep;
    sep.value = dist[to];
    if (std::isfinite(sep.value)) {
        for (int v = to; v != -1; v = pred[v]) sep.chain.push_back(v);
        std::reverse(sep.chain.begin(), sep.chain.end());
    }
    return sep;
}

// Every positive-length chain meeting the target set contains a positive step
// that starts or ends at a target (collapse the zero-length steps and look at
// the hit's neighbors in the sequence). Dropping all other steps only lowers
// the cost, so the family minimum is attained on a single step touching a
// target and a scan over target edges is an exact oracle.
Separation separate_hit(const EpsilonGraph& graph, const std::vector<double>& rho,
                        double lambda, const std::vector<int>& targets,
                        HitEndpointRule rule) {
    Separation best;
    for (int t : targets) {
        for (const auto& e : graph.adjacency[t]) {
            if (rule != HitEndpointRule::exclude_first) {
                double v = (lambda * rho[t] + (1.0 - lambda) * rho[e.to]) * e.length;
                if (v < best.value) {
                    best.value = v;
                    best.chain = {t, e.to};
                }
            }
            if (rule != HitEndpointRule::exclude_last) {
                double v = (lambda * rho[e.to] + (1.0 - lambda) * rho[t]) * e.length;
                if (v < best.value) {
                    best.value = v;
                    best.chain = {e.to, t};
                }
            }
        }
    }
    return best;
}

double chain_cost(const PointCloudSpace& space, const std::vector<int>& pts,
                  const std::vector<double>& rho, double lambda) {
    double acc = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        double d = space.d(pts[i], pts[i + 1]);
        if (d == 0.0) continue;
        acc += (lambda * rho[pts[i]] + (1.0 - lambda) * rho[pts[i + 1]]) * d;
    }
    return acc;
}

Separation separate_explicit(const PointCloudSpace& space,
                             const std::vector<std::vector<int>>& chains,
                             const std::vector<double>& rho, double lambda) {
    Separation best;
    for (const auto& pts : chains) {
        double v = chain_cost(space, pts, rho, lambda);
        if (v < best.value) {
            best.value = v;
            best.chain = pts;
        }
    }
    return best;
}

// lambda-integral coefficients of a chain, poles of the function class pinned
// out. `all_pinned` reports a positive-length chain whose row vanished
// entirely: no density in the class can cover it.
SparseRow row_for_chain(const PointCloudSpace& space, const std::vector<int>& pts,
                        double lambda, const std::vector<char>& pinned,
                        bool& all_pinned) {
    std::map<int, double> coef;
    bool positive_step = false;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        double d = space.d(pts[i], pts[i + 1]);
        if (d == 0.0) continue;
        positive_step = true;
        if (lambda > 0.0) coef[pts[i]] += lambda * d;
        if (lambda < 1.0) coef[pts[i + 1]] += (1.0 - lambda) * d;
    }
    SparseRow row;
    row.rhs = 1.0;
    for (const auto& [id, c] : coef) {
        if (pinned[id]) continue;
        row.terms.emplace_back(id, c);
    }
    all_pinned = positive_step && row.terms.empty();
    return row;
}

double eval_row(const SparseRow& row, const std::vector<double>& rho) {
    double acc = 0.0;
    for (const auto& [id, c] : row.terms) acc += c * rho[id];
    return acc;
}

// |rho(a) - rho(b)| <= bound * d(a,b) for every pair, as two >= rows each.
// Rows that lose all mixed signs to pinning and cannot bind are skipped.
std::vector<SparseRow> lipschitz_rows(const PointCloudSpace& space, double bound,
                                      const std::vector<char>& pinned) {
    std::vector<SparseRow> rows;
    for (int i = 0; i < space.n; ++i) {
        for (int j = i + 1; j < space.n; ++j) {
            double rhs = -bound * space.d(i, j);
            for (int flip = 0; flip < 2; ++flip) {
                SparseRow row;
                row.rhs = rhs;
                double si = flip ? 1.0 : -1.0;
                if (!pinned[i]) row.terms.emplace_back(i, si);
                if (!pinned[j]) row.terms.emplace_back(j, -si);
                bool vacuous = true;
                for (const auto& [id, c] : row.terms)
                    if (c < 0.0) vacuous = false;
                if (row.terms.empty() || vacuous) continue;
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

struct Master {
    SolveReport report;
    std::vector<double> rho; // full-length, zeros at pinned/untouched points
};

Master solve_master(const PointCloudSpace& space, const std::vector<double>& measure,
                    double p, const std::vector<SparseRow>& fixed_rows,
                    const std::vector<SparseRow>& cut_rows,
                    const std::vector<double>& warm, const SolveOptions& solve_opts) {
    std::vector<int> index_of(space.n, -1);
    std::vector<int> active;
    auto touch = [&](const SparseRow& row) {
        for (const auto& [id, c] : row.terms) {
            (void)c;
            if (index_of[id] < 0) {
                index_of[id] = static_cast<int>(active.size());
                active.push_back(id);
            }
        }
    };
    for (const auto& row : fixed_rows) touch(row);
    for (const auto& row : cut_rows) touch(row);

    ConvexProgram prog;
    prog.nvars = static_cast<int>(active.size());
    prog.p = p;
    prog.weight.resize(active.size());
    for (size_t k = 0; k < active.size(); ++k) prog.weight[k] = measure[active[k]];
    auto remap = [&](const SparseRow& row) {
        SparseRow out;
        out.rhs = row.rhs;
        out.terms.reserve(row.terms.size());
        for (const auto& [id, c] : row.terms) out.terms.emplace_back(index_of[id], c);
        return out;
    };
    prog.rows.reserve(fixed_rows.size() + cut_rows.size());
    for (const auto& row : fixed_rows) prog.rows.push_back(remap(row));
    for (const auto& row : cut_rows) prog.rows.push_back(remap(row));

    SolveOptions opts = solve_opts;
    if (!warm.empty()) {
        std::vector<double> start(active.size());
        for (size_t k = 0; k < active.size(); ++k) start[k] = warm[active[k]];
        opts.start = std::move(start);
    }

    Master out;
    out.report = solve_separable(prog, opts);
    if (out.report.status == "infeasible_detected")
        fail("NoAdmissibleDensity", "the function class admits no density for this family");
    out.rho.assign(space.n, 0.0);
    for (size_t k = 0; k < active.size(); ++k) out.rho[active[k]] = out.report.solution[k];
    return out;
}

void validate_common(const PointCloudSpace& space, const ChainFamily& family, double p,
                     const std::vector<double>& measure, const FunctionClass& cls,
                     double lambda) {
    if (!(family.eps > 0.0) || !std::isfinite(family.eps))
        fail("NonPositiveEps", "the chain scale must be a positive real");
    if (!(p >= 1.0) || !std::isfinite(p))
        fail("BadParameter", "the exponent must be a finite real >= 1");
    if (!(lambda >= 0.0 && lambda <= 1.0))
        fail("LambdaOutOfRange", "the endpoint weight must lie in [0, 1]");
    if (static_cast<int>(measure.size()) != space.n)
        fail("BadField", "measure vector length does not match the space");
    for (double w : measure)
        if (!(w >= 0.0) || !std::isfinite(w))
            fail("BadField", "measure entries must be finite and nonnegative");
    switch (family.kind) {
    case ChainFamily::Kind::connect:
        check_point(space, family.from, "connect family");
        check_point(space, family.to, "connect family");
        if (family.from == family.to)
            fail("BadParameter", "a connecting family needs two distinct endpoints");
        break;
    case ChainFamily::Kind::hit:
        if (family.targets.empty())
            fail("BadParameter", "a hit family needs at least one target point");
        for (int t : family.targets) check_point(space, t, "hit family target");
        break;
    case ChainFamily::Kind::explicit_list:
        for (const auto& c : family.chains)
            for (int id : c.points) check_point(space, id, "explicit family chain");
        break;
    }
    if (cls.tag == FunctionClass::Tag::finite_at) {
        check_point(space, cls.x, "function class pole");
        check_point(space, cls.y, "function class pole");
    }
    if (cls.tag == FunctionClass::Tag::lipschitz && cls.bound &&
        (!(*cls.bound >= 0.0) || !std::isfinite(*cls.bound)))
        fail("BadParameter", "the Lipschitz cap must be a finite nonnegative real");
}

} // namespace

ChainFamily ChainFamily::connect(int from, int to, double eps) {
    if (from == to) fail("BadParameter", "a connecting family needs distinct endpoints");
    ChainFamily f;
    f.kind = Kind::connect;
    f.from = from;
    f.to = to;
    f.eps = eps;
    return f;
}

ChainFamily ChainFamily::hit(std::vector<int> targets, double eps, HitEndpointRule rule) {
    if (targets.empty()) fail("BadParameter", "a hit family needs at least one target");
    ChainFamily f;
    f.kind = Kind::hit;
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    f.targets = std::move(targets);
    f.eps = eps;
    f.hit_rule = rule;
    return f;
}

ChainFamily ChainFamily::from_chains(std::vector<Chain> chains, double eps) {
    ChainFamily f;
    f.kind = Kind::explicit_list;
    f.chains = std::move(chains);
    f.eps = eps;
    return f;
}

FunctionClass FunctionClass::all() { return FunctionClass{}; }

FunctionClass FunctionClass::finite_at(int x, int y) {
    FunctionClass c;
    c.tag = Tag::finite_at;
    c.x = x;
    c.y = y;
    return c;
}

FunctionClass FunctionClass::lipschitz(std::optional<double> bound) {
    FunctionClass c;
    c.tag = Tag::lipschitz;
    c.bound = bound;
    return c;
}

ModulusReport chain_modulus(const PointCloudSpace& space, const ChainFamily& family,
                            double p, const std::vector<double>& measure,
                            const FunctionClass& cls, double lambda,
                            const ModulusOptions& opts) {
    validate_common(space, family, p, measure, cls, lambda);

    std::vector<char> pinned(space.n, 0);
    if (cls.tag == FunctionClass::Tag::finite_at) pinned[cls.x] = pinned[cls.y] = 1;

    EpsilonGraph graph = build_epsilon_graph(space, family.eps);

    ModulusReport report;
    report.rho.assign(space.n, 0.0);

    // Chains outside the scale and zero-length chains carry no constraint.
    std::vector<std::vector<int>> explicit_chains;
    if (family.kind == ChainFamily::Kind::explicit_list) {
        for (const auto& c : family.chains) {
            bool in_scale = c.points.size() >= 2;
            double length = 0.0;
            for (size_t i = 0; i + 1 < c.points.size(); ++i) {
                double d = space.d(c.points[i], c.points[i + 1]);
                if (d > family.eps) in_scale = false;
                length += d;
            }
            if (in_scale && length > 0.0)
                explicit_chains.push_back(c.points);
            else
                report.dropped_chains++;
        }
    }

    bool empty = false;
    switch (family.kind) {
    case ChainFamily::Kind::connect: {
        ComponentPartition comp = chain_components(space, family.eps);
        empty = comp.component_of[family.from] != comp.component_of[family.to];
        break;
    }
    case ChainFamily::Kind::hit: {
        empty = true;
        for (int t : family.targets)
            if (!graph.adjacency[t].empty()) empty = false;
        break;
    }
    case ChainFamily::Kind::explicit_list:
        empty = explicit_chains.empty();
        break;
    }
    if (empty) {
        report.status = "empty_family";
        report.empty_family = true;
        report.min_family_integral = kInf;
        return report;
    }

    std::vector<SparseRow> fixed_rows;
    if (cls.tag == FunctionClass::Tag::lipschitz && cls.bound)
        fixed_rows = lipschitz_rows(space, *cls.bound, pinned);

    std::vector<SparseRow> cut_rows;
    std::vector<std::vector<int>> cut_chains;
    std::set<std::vector<std::pair<int, double>>> seen;

    auto add_cut = [&](const std::vector<int>& pts) {
        bool all_pinned = false;
        SparseRow row = row_for_chain(space, pts, lambda, pinned, all_pinned);
        if (all_pinned)
            fail("NoAdmissibleDensity",
                 "a family chain is supported entirely on the pinned poles; the "
                 "function class admits no density");
        if (!seen.insert(row.terms).second) return false;
        cut_rows.push_back(std::move(row));
        cut_chains.push_back(pts);
        return true;
    };

    auto separate = [&](const std::vector<double>& rho) {
        switch (family.kind) {
        case ChainFamily::Kind::connect:
            return separate_connect(graph, rho, lambda, family.from, family.to);
        case ChainFamily::Kind::hit:
            return separate_hit(graph, rho, lambda, family.targets, family.hit_rule);
        default:
            return separate_explicit(space, explicit_chains, rho, lambda);
        }
    };

    std::vector<double> rho(space.n, 0.0);
    SolveReport last;
    bool solved = false;

    // Explicit families are finite: install every constraint up front.
    if (family.kind == ChainFamily::Kind::explicit_list) {
        for (const auto& pts : explicit_chains) add_cut(pts);
        Master m = solve_master(space, measure, p, fixed_rows, cut_rows, {}, opts.solve);
        last = m.report;
        rho = m.rho;
        solved = true;
    }

    double family_min = kInf;
    bool closed = false;
    int rounds = 0;
    for (int round = 0; round < opts.max_rounds; ++round) {
        rounds++;
        Separation sep = separate(rho);
        family_min = sep.value;
        if (sep.value >= 1.0 - opts.family_slack) {
            closed = true;
            break;
        }
        if (!add_cut(sep.chain)) {
            // The violated cut is already installed; the master solution meets
            // it within solver tolerance, so nothing sharper is available.
            closed = true;
            break;
        }
        Master m = solve_master(space, measure, p, fixed_rows, cut_rows, rho, opts.solve);
        last = m.report;
        rho = m.rho;
        solved = true;

        if ((round + 1) % 50 == 0) {
            // Retire cuts that went slack; they can only return by being
            // separated again.
            std::vector<SparseRow> keep_rows;
            std::vector<std::vector<int>> keep_chains;
            seen.clear();
            for (size_t i = 0; i < cut_rows.size(); ++i) {
                if (eval_row(cut_rows[i], rho) <= 1.1) {
                    seen.insert(cut_rows[i].terms);
                    keep_rows.push_back(std::move(cut_rows[i]));
                    keep_chains.push_back(std::move(cut_chains[i]));
                }
            }
            cut_rows = std::move(keep_rows);
            cut_chains = std::move(keep_chains);
        }
    }
    if (!closed)
        fail("SolverStall", "cutting-plane separation still found violated chains after " +
                                std::to_string(opts.max_rounds) + " rounds");
    if (!solved) {
        // Unreachable for well-formed nonempty families (the zero density
        // violates every constraint), kept as a guard.
        fail("SolverStall", "separation closed before any master solve");
    }

    report.status = last.status;
    report.objective = last.objective_energy;
    report.objective_norm = last.objective_norm;
    report.rho = rho;
    report.min_family_integral = family_min;
    report.rounds = rounds;
    report.cuts = static_cast<int>(cut_rows.size());
    report.dual_bound = last.dual_bound;
    report.duality_gap = last.duality_gap;
    report.kkt_residual = last.kkt_residual;
    report.iterations = last.iterations;
    for (size_t i = 0; i < cut_rows.size(); ++i)
        if (eval_row(cut_rows[i], rho) <= 1.0 + 1e-6)
            report.binding.push_back(make_chain(space, cut_chains[i], family.eps));
    return report;
}

ModulusReport chain_modulus(const PointCloudSpace& space, const ChainFamily& family,
                            double p, const ScalarField& measure, const FunctionClass& cls,
                            double lambda, const ModulusOptions& opts) {
    if (measure.role != FieldRole::density)
        fail("BadField", "the measure field must carry the density role");
    return chain_modulus(space, family, p, measure.values, cls, lambda, opts);
}

ModulusReport chain_modulus(const PointCloudSpace& space, const ChainFamily& family,
                            double p, const RieszWeights& measure, const FunctionClass& cls,
                            double lambda, const ModulusOptions& opts) {
    if (static_cast<int>(measure.weights.size()) != space.n)
        fail("BadField", "kernel weights length does not match the space");
    // The kernel is a density against the base masses; the measure of a point
    // is weight * mass.
    std::vector<double> m(space.n, 0.0);
    for (int i = 0; i < space.n; ++i) m[i] = measure.weights[i] * space.mass[i];
    return chain_modulus(space, family, p, m, cls, lambda, opts);
}

std::vector<KeithRung> keith_modulus_ladder(const PointCloudSpace& space, int x, int y,
                                            double truncation, double p,
                                            const std::vector<double>& eps_list,
                                            const FunctionClass& cls, double lambda,
                                            const ModulusOptions& opts) {
    check_point(space, x, "ladder pole");
    check_point(space, y, "ladder pole");
    if (x == y) fail("BadParameter", "the ladder poles must be distinct");
    if (eps_list.empty()) fail("EmptyRadiusGrid", "the ladder needs at least one scale");
    RieszWeights kernel = riesz_weights(space, x, y, truncation);
    std::vector<KeithRung> ladder;
    ladder.reserve(eps_list.size());
    for (double eps : eps_list) {
        ModulusReport rep =
            chain_modulus(space, ChainFamily::connect(x, y, eps), p, kernel, cls, lambda, opts);
        ladder.push_back({eps, rep.objective, rep.status});
    }
    return ladder;
}

ExceptionalReport is_weak_exceptional(const PointCloudSpace& space,
                                      const ChainFamily& family, double eps, double p,
                                      double lambda) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        fail("NonPositiveEps", "the chain scale must be a positive real");
    ChainFamily fam = family;
    fam.eps = eps;

    ExceptionalReport out;
    ModulusReport rep =
        chain_modulus(space, fam, p, space.mass, FunctionClass::all(), lambda);
    out.modulus = rep.objective;
    out.exceptional = rep.empty_family || rep.objective <= 1e-9;
    if (rep.empty_family) {
        out.note = "empty family: no chain carries a constraint at this scale";
        return out;
    }

    if (fam.kind == ChainFamily::Kind::hit) {
        bool all_null = true;
        for (int t : fam.targets)
            if (space.mass[t] != 0.0) all_null = false;
        bool rule_covers =
            (lambda > 0.0 && lambda < 1.0) ||
            (lambda == 1.0 && fam.hit_rule == HitEndpointRule::exclude_last) ||
            (lambda == 0.0 && fam.hit_rule == HitEndpointRule::exclude_first);
        if (all_null && rule_covers) {
            EpsilonGraph graph = build_epsilon_graph(space, eps);
            double delta = kInf;
            for (int t : fam.targets)
                for (const auto& e : graph.adjacency[t]) delta = std::min(delta, e.length);
            double w = (lambda == 0.0 || lambda == 1.0) ? 1.0 : std::min(lambda, 1.0 - lambda);
            double k = std::max(1.0, std::ceil(1.0 / (2.0 * w * delta)));
            std::vector<double> cert(space.n, 0.0);
            for (int t : fam.targets) cert[t] = 2.0 * k;
            Separation audit = separate_hit(graph, cert, lambda, fam.targets, fam.hit_rule);
            if (audit.value >= 1.0 - 1e-9) {
                out.certified = true;
                out.certificate = std::move(cert);
                out.note = "targets carry no mass: a scaled target indicator is admissible "
                           "at zero energy";
                return out;
            }
        } else if (all_null && !rule_covers) {
            out.note = "one-sided weighting: the null certificate only covers the "
                       "endpoint-excluded hit families";
            return out;
        }
    }
    out.note = out.exceptional ? "modulus vanishes within tolerance"
                               : "modulus is positive";
    return out;
}

} // namespace chaincalc
