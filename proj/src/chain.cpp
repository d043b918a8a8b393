#include "chaincalc/chain.hpp"

#include "chaincalc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chaincalc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_lambda(double lambda) {
    if (!(lambda >= 0.0) || !(lambda <= 1.0))
        fail("LambdaOutOfRange", "lambda must lie in [0,1], got " + std::to_string(lambda));
}
} // namespace

Chain make_chain(const PointCloudSpace& space, std::vector<int> points, double eps) {
    if (!(eps > 0.0)) fail("NonPositiveEps", "eps must be positive");
    if (points.size() < 2)
        fail("DegenerateChain", "a chain needs at least one step (two points)");
    for (int p : points)
        if (p < 0 || p >= space.n)
            fail("UnknownPoint", "chain point out of range: " + std::to_string(p));
    for (size_t i = 0; i + 1 < points.size(); ++i) {
        double d = space.d(points[i], points[i + 1]);
        if (d > eps)
            fail("ChainStepTooLong", "step " + std::to_string(i) + " has length " +
                                         std::to_string(d) + " > eps " + std::to_string(eps));
    }
    return Chain{std::move(points), eps};
}

double lambda_integral(const PointCloudSpace& space, const Chain& c,
                       const std::vector<double>& g, double lambda) {
    check_lambda(lambda);
    double acc = 0.0;
    for (size_t i = 0; i + 1 < c.points.size(); ++i) {
        double d = space.d(c.points[i], c.points[i + 1]);
        if (d == 0.0) continue;
        double ga = g[c.points[i]], gb = g[c.points[i + 1]];
        if ((lambda > 0.0 && std::isinf(ga)) || (lambda < 1.0 && std::isinf(gb)))
            return kInf;
        // zero-weight endpoints are dropped outright so 0 * inf never forms
        double avg = 0.0;
        if (lambda > 0.0) avg += lambda * ga;
        if (lambda < 1.0) avg += (1.0 - lambda) * gb;
        acc += avg * d;
    }
    return acc;
}

double chain_length(const PointCloudSpace& space, const Chain& c) {
    double acc = 0.0;
    for (size_t i = 0; i + 1 < c.points.size(); ++i)
        acc += space.d(c.points[i], c.points[i + 1]);
    return acc;
}

Chain concat(const PointCloudSpace& space, const Chain& a, const Chain& b) {
    (void)space;
    if (a.points.back() != b.points.front())
        fail("EndpointMismatch", "first chain ends at " + std::to_string(a.points.back()) +
                                     ", second starts at " + std::to_string(b.points.front()));
    Chain out;
    out.eps = std::max(a.eps, b.eps);
    out.points = a.points;
    out.points.insert(out.points.end(), b.points.begin() + 1, b.points.end());
    return out;
}

Chain inverse(const Chain& c) {
    Chain out = c;
    std::reverse(out.points.begin(), out.points.end());
    return out;
}

StepCurve to_step_curve(const PointCloudSpace& space, const Chain& c) {
    double total = chain_length(space, c);
    if (!(total > 0.0)) fail("ZeroLengthChain", "all chain points coincide");
    StepCurve sc;
    sc.omega = c.points.back();
    double prefix = 0.0;
    for (size_t i = 0; i + 1 < c.points.size(); ++i) {
        double t = prefix / total;
        double step = space.d(c.points[i], c.points[i + 1]);
        // zero-length steps occupy an empty interval; skip them
        if (step > 0.0) {
            sc.breakpoints.push_back(t);
            sc.values.push_back(c.points[i]);
        }
        prefix += step;
    }
    return sc;
}

double riemann_sum(const std::function<double(double)>& f, double ell, double t, int n,
                   double lambda) {
    check_lambda(lambda);
    if (!(ell > 0.0)) fail("BadParameter", "ell must be positive");
    if (n < 1) fail("BadParameter", "n must be >= 1");
    if (!(t >= 0.0) || !(t <= 1.0)) fail("BadParameter", "t must lie in [0,1]");
    auto avg = [lambda](double a, double b) { return lambda * a + (1.0 - lambda) * b; };
    // Compensated accumulation keeps constant integrands exact to the last
    // ulp even at n ~ 1e4 panels.
    double acc = 0.0, comp = 0.0;
    auto add = [&](double term) {
        double y = term - comp;
        double s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    };
    add(avg(f(0.0), f(ell * t / n)) * (ell * t / n));
    for (int i = 0; i + 1 < n; ++i)
        add(avg(f(ell * (t + i) / n), f(ell * (t + i + 1) / n)) * (ell / n));
    add(avg(f(ell * (t + n - 1) / n), f(ell)) * (ell * (1.0 - t) / n));
    return acc;
}

SampledChain sample_chain_from_curve(const PointCloudSpace& space,
                                     const std::vector<int>& curve, double t, int n) {
    if (n < 1) fail("BadParameter", "n must be >= 1");
    if (!(t >= 0.0) || !(t <= 1.0)) fail("BadParameter", "t must lie in [0,1]");
    if (curve.size() < 2) fail("DegenerateCurve", "curve needs at least two samples");
    std::vector<double> arc(curve.size(), 0.0);
    for (size_t i = 1; i < curve.size(); ++i)
        arc[i] = arc[i - 1] + space.d(curve[i - 1], curve[i]);
    double L = arc.back();
    if (!(L > 0.0)) fail("DegenerateCurve", "curve has zero length");

    SampledChain out;
    auto snap = [&](double target) -> std::pair<int, double> {
        // nearest sample by arc length, earlier index on ties
        auto it = std::lower_bound(arc.begin(), arc.end(), target);
        size_t hi = static_cast<size_t>(it - arc.begin());
        size_t lo = hi > 0 ? hi - 1 : 0;
        if (hi >= arc.size()) hi = arc.size() - 1;
        double dlo = std::fabs(arc[lo] - target), dhi = std::fabs(arc[hi] - target);
        size_t pick = dlo <= dhi ? lo : hi;
        return {curve[pick], std::fabs(arc[pick] - target)};
    };

    std::vector<int> pts;
    pts.reserve(n + 2);
    pts.push_back(curve.front());
    for (int i = 0; i < n; ++i) {
        auto [id, err] = snap(L * (t + i) / n);
        pts.push_back(id);
        out.max_snap_error = std::max(out.max_snap_error, err);
    }
    pts.push_back(curve.back());

    double bound = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        bound = std::max(bound, space.d(pts[i], pts[i + 1]));
    out.step_bound = bound;
    out.chain.points = std::move(pts);
    out.chain.eps = bound > 0.0 ? bound : space.min_positive_distance();
    return out;
}

} // namespace chaincalc
