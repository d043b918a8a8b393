#pragma once

#include "chaincalc/space.hpp"

#include <functional>
#include <vector>

namespace chaincalc {

// An ordered point sequence with at least one step and every consecutive
// distance <= eps. Repeated points (zero-length steps) are legal and
// contribute nothing to any integral.
struct Chain {
    std::vector<int> points; // N+1 ids, N >= 1
    double eps = 0.0;        // validated step bound
};

// Unit-interval reparametrization of a chain by relative arc length: the
// value on [breakpoints[k], breakpoints[k+1]) is values[k]; the final point
// of the chain is kept separately since it occupies no interval.
struct StepCurve {
    std::vector<double> breakpoints; // strictly increasing, starts at 0
    std::vector<int> values;         // same length as breakpoints
    int omega = -1;                  // the chain's final point
};

Chain make_chain(const PointCloudSpace& space, std::vector<int> points, double eps);

// sum over steps of (lambda*g[start] + (1-lambda)*g[end]) * step length;
// +inf propagates whenever an infinite value carries positive weight over a
// positive-length step.
double lambda_integral(const PointCloudSpace& space, const Chain& c,
                       const std::vector<double>& g, double lambda);

double chain_length(const PointCloudSpace& space, const Chain& c);

Chain concat(const PointCloudSpace& space, const Chain& a, const Chain& b);
Chain inverse(const Chain& c);

StepCurve to_step_curve(const PointCloudSpace& space, const Chain& c);

// Endpoint-weighted Riemann sum of a function on [0, ell]: a short first
// panel of width ell*t/n, n-1 full panels of width ell/n, and a final panel
// of width ell*(1-t)/n, each averaged with weights (lambda, 1-lambda).
double riemann_sum(const std::function<double(double)>& f, double ell, double t, int n,
                   double lambda);

struct SampledChain {
    Chain chain;
    double step_bound = 0.0;       // max consecutive distance actually realized
    double max_snap_error = 0.0;   // worst |target arc length - snapped arc length|
};

// Resample an ordered curve (given as point ids in the space) into an
// (n+2)-point chain anchored at offsets L*(t+i)/n along its arc length; each
// target is snapped to the nearest available curve sample (earlier sample on
// ties).
SampledChain sample_chain_from_curve(const PointCloudSpace& space,
                                     const std::vector<int>& curve, double t, int n);

} // namespace chaincalc
