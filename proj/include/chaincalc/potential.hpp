#pragma once

#include "chaincalc/gradient.hpp"
#include "chaincalc/space.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace chaincalc {

// Boundary data for a potential: seed points with prescribed values, the edge
// weight field, and the scale. A duplicate seed keeps its smallest value.
struct PotentialSpec {
    std::vector<int> seeds;
    std::vector<double> seed_values; // aligned with seeds; finite
    ScalarField g;                   // role: gradient
    double eps = 0.0;
    double lambda = 0.5;
    std::optional<double> cap; // truncation level M; absent = none
};

struct PotentialResult {
    // Without a cap, points no seed reaches at this scale hold +inf.
    ScalarField u;
    int unreachable = 0;
};

// Multi-source shortest reachability value
//   P(x) = min{ M, min over seeds a of u_A(a) + cheapest chain cost a -> x }
// with chain steps priced (lambda*g(q) + (1-lambda)*g(q'))*d over the
// eps-graph. Infinite g blocks a step only on its weighted side.
PotentialResult chain_potential(const PointCloudSpace& space, const PotentialSpec& spec);

struct PotentialCheck {
    VerifyReport verdict;
    PotentialResult potential;
    bool one_sided = false; // set for the endpoint-weighted cases lambda != 1/2
};

// Confirms the construction contract: g is an upper gradient of its own
// potential. Unreachable points are screened with a sentinel above the finite
// range before verification; every pair they touch is constrained only
// through a step the search already priced as infinite.
PotentialCheck potential_gradient_check(const PointCloudSpace& space,
                                        const PotentialSpec& spec);

// The product-rule field |u|*sl_eps(phi) + Q_eps(phi)*g for the product u*phi,
// where Q_eps(phi)(x) is the sup of |phi| over the closed eps-ball around x
// (the point included). Requires g to be an upper gradient of u at this scale.
ScalarField leibniz_gradient(const PointCloudSpace& space, const ScalarField& u,
                             const ScalarField& g, const ScalarField& phi, double eps);

enum class EbSeeds { all, boundary };

struct EbEntry {
    int n = 0;
    double eps = 0.0;
    double err_u = 0.0; // L^p(m) distance of the potential to the sample
    double err_g = 0.0; // L^p(m) distance of its minimal gradient to the sample
    std::string status; // gradient solve status
};

struct EbReport {
    double p = 2.0;
    EbSeeds seeds = EbSeeds::all;
    std::vector<EbEntry> entries;
};

// Density-in-energy demonstration on refining uniform [0,1] grids: sample u
// and g, rebuild u as a chain potential (seeds = every grid point, or just the
// two endpoints), synthesize its minimal upper gradient, and report both
// L^p(m) reconstruction errors per grid. eps = eps_factor / n on the n-point
// grid; lambda is fixed at 1/2.
EbReport eb_pipeline(const std::vector<int>& grid_sizes,
                     const std::function<double(double)>& u,
                     const std::function<double(double)>& g, double p,
                     double eps_factor = 2.0, EbSeeds seeds = EbSeeds::all);

} // namespace chaincalc
