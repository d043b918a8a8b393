#pragma once

#include "chaincalc/gradient.hpp"
#include "chaincalc/space.hpp"

#include <optional>
#include <string>
#include <vector>

namespace chaincalc {

// Two-pole kernel weights
//   R(z) = d(x,z)/m(B_{d(x,z)}(x)) + d(y,z)/m(B_{d(y,z)}(y))
// restricted to the union of the two balls of radius truncation*d(x,y) around
// the poles, with R(x) = R(y) = 0 pinned. All balls are open.
struct RieszWeights {
    int x = -1;
    int y = -1;
    double truncation = 1.0;     // the factor L in the ball radius L*d(x,y)
    std::vector<double> weights; // size n, nonnegative
    double total = 0.0;          // sum over z of weights(z) * mass(z)
};

RieszWeights riesz_weights(const PointCloudSpace& space, int x, int y, double truncation);

// --- two-sided ball audit ---------------------------------------------------

struct BallCase {
    int center = -1;
    double radius = 0.0;
    double lhs = 0.0;   // mean deviation of u over the ball
    double rhs = 0.0;   // radius * (mean of g^p over the dilated ball)^(1/p)
    double ratio = 0.0; // lhs / rhs when rhs > 0
    bool zero_rhs = false;
    bool empty = false; // massless ball; case skipped
};

struct BallAudit {
    double worst_constant = 0.0;
    int worst_case = -1;
    bool unbounded = false; // some ball has positive deviation against zero rhs
    int unbounded_case = -1;
    int skipped = 0;
    std::vector<BallCase> cases;
};

// Every center against every radius in `radii` (default: the pairwise-distance
// scale grid plus consecutive midpoints).
BallAudit ball_pi_audit(const PointCloudSpace& space, const ScalarField& u,
                        const ScalarField& g, double p, double dilation,
                        const std::vector<double>& radii = {});

// --- pointwise two-point estimate -------------------------------------------

struct PointwiseOptions {
    double time_budget_ms = 0.0;       // 0 = unlimited
    std::optional<double> eps;         // override the smallest joining scale
};

struct PointwiseReport {
    double eps = 0.0;           // scale actually used
    double length_budget = 0.0; // C * d(x,y)
    double lhs = 0.0;           // (min length-constrained chain integral)^p
    double rhs = 0.0;           // C * d(x,y)^(p-1) * sum g^p dR
    bool satisfied = false;
    std::vector<int> witness;          // a minimizing chain (empty if none)
    bool lower_bound_only = false;     // time budget hit; lhs is a certified lower bound
};

// Minimal (lambda-weighted) integral of g over chains from x to y of length at
// most C*d(x,y), evaluated at the smallest scale joining x and y, against the
// two-pole kernel bound. The bicriteria search is exact (label setting with
// dominance pruning); a time budget degrades it to a certified lower bound.
PointwiseReport pointwise_pi_check(const PointCloudSpace& space, int x, int y,
                                   const ScalarField& g, double p, double C,
                                   double truncation, double lambda,
                                   const PointwiseOptions& opts = {});

// --- chain width -------------------------------------------------------------

// Cheapest crossing of `target`: inf over eps-chains from x to y of the
// integral of its indicator (lambda = 1/2); +inf when x,y are not joinable.
double chain_width(const PointCloudSpace& space, int x, int y,
                   const std::vector<int>& target, double eps);

// --- shell profiles ----------------------------------------------------------

struct ShellEntry {
    double r = 0.0;
    double shell_measure = 0.0; // measure of B_r(A) minus A (open neighborhood)
    double value = 0.0;         // shell_measure / r
};

// The r -> 0 lower limit has no finite-space meaning; the reported `minimum`
// is the profile minimum over the supplied radii, nothing more.
struct MinkowskiProfile {
    std::vector<ShellEntry> entries; // ascending r
    double minimum = 0.0;
    int argmin = -1;
};

MinkowskiProfile minkowski_profile(const PointCloudSpace& space,
                                   const std::vector<int>& set,
                                   const std::vector<double>& measure,
                                   const std::vector<double>& radii);

// --- separating-set audit ------------------------------------------------------

struct BmcShell {
    double r = 0.0;
    double shell_measure = 0.0; // under the two-pole weights
    double width = 0.0;         // chain width of the shell between the poles
    double ratio = 0.0;         // width / shell_measure when the measure is positive
    bool zero_measure = false;
};

struct BmcCandidate {
    std::vector<int> separating_set;
    double profile_min = 0.0;
    std::vector<BmcShell> shells;
};

struct BmcAudit {
    double worst_lower = 0.0; // smallest shell-profile minimum across candidates
    int worst_lower_candidate = -1;
    double worst_upper = 0.0; // largest width/measure ratio across candidates
    int worst_upper_candidate = -1;
    int zero_measure_shells = 0;
    std::vector<BmcCandidate> candidates;
};

// Candidates must contain x together with its whole open eps-ball and must
// exclude y; violations are rejected, not silently skipped.
BmcAudit bmc_audit(const PointCloudSpace& space, int x, int y, double truncation,
                   const std::vector<std::vector<int>>& candidates, double eps,
                   const std::vector<double>& radii = {});

} // namespace chaincalc
