#pragma once

#include "chaincalc/solver.hpp"
#include "chaincalc/space.hpp"

#include <string>
#include <vector>

namespace chaincalc {

enum class FieldRole { function, gradient, density };

struct ScalarField {
    std::vector<double> values;
    FieldRole role = FieldRole::function;
};

// Validates role invariants: gradient/density values must be >= 0 (+inf ok),
// function values must be finite. Length checked against the space later.
ScalarField make_field(std::vector<double> values, FieldRole role);

// One failed two-point test: the step from -> to needed `required` but the
// weighted endpoint average only supplies `available`.
struct PairViolation {
    int from = -1;
    int to = -1;
    double required = 0.0;
    double available = 0.0;
    double deficit = 0.0;
};

struct VerifyReport {
    bool ok = true;
    int pairs_checked = 0;
    double worst_deficit = 0.0;
    std::vector<PairViolation> violations; // sorted worst-first, capped
};

struct VerifyOptions {
    bool one_sided = false;  // test u(y)-u(x) instead of |u(y)-u(x)|
    bool weak = false;       // skip pairs with a zero-mass endpoint
    double slack_tol = 1e-9; // relative acceptance slack
    int max_report = 16;
};

// sup over the closed eps-ball (minus the point itself) of |du|/d; zero when
// the ball is empty.
ScalarField slope_field(const PointCloudSpace& space, const ScalarField& u, double eps);

VerifyReport verify_upper_gradient(const PointCloudSpace& space, const ScalarField& u,
                                   const ScalarField& g, double eps, double lambda,
                                   const VerifyOptions& opts = {});

struct GradientOptions {
    bool weak = false;      // drop pairs touching zero-mass points
    bool one_sided = false; // (eps,lambda) one-sided variant
    SolveOptions solve;
};

struct GradientReport {
    std::string status;
    double objective = 0.0; // L^p(m) norm of the minimal gradient
    double energy = 0.0;    // sum_i mass_i * g_i^p
    std::vector<double> gradient;
    double max_violation = 0.0;
    double dual_bound = 0.0;
    double duality_gap = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0;
    int constraints = 0;
};

// The two-point program: one row per ordered pair within eps (deduplicated to
// unordered pairs at lambda = 1/2, where both orientations coincide).
ConvexProgram build_gradient_program(const PointCloudSpace& space, const ScalarField& u,
                                     double eps, double p, double lambda, bool weak,
                                     bool one_sided);

GradientReport minimal_gradient(const PointCloudSpace& space, const ScalarField& u,
                                double eps, double p, double lambda,
                                const GradientOptions& opts = {});

GradientReport minimal_weak_gradient(const PointCloudSpace& space, const ScalarField& u,
                                     double eps, double p, double lambda,
                                     const GradientOptions& opts = {});

struct LadderRung {
    double eps = 0.0;
    double objective = 0.0;
    std::string status;
};

// eps values must be positive and strictly decreasing; objectives are
// nonincreasing down the ladder (fewer pairs constrain smaller eps).
std::vector<LadderRung> energy_ladder(const PointCloudSpace& space, const ScalarField& u,
                                      const std::vector<double>& eps_list, double p,
                                      double lambda, const GradientOptions& opts = {});

struct ConsistencyReport {
    bool two_point_ok = false; // verifier verdict; paths only checked when true
    bool consistent = false;
    long long paths_checked = 0;
    double worst_slack = 0.0; // min over paths of (integral - |du|)
    std::vector<int> counterexample;
};

// Telescoping audit: every simple eps-graph path between finite-g endpoints
// must carry integral >= |du|. Exhaustive for n <= 8, seeded random walks
// otherwise.
ConsistencyReport check_curve_consistency(const PointCloudSpace& space, const ScalarField& u,
                                          const ScalarField& g, double eps);

} // namespace chaincalc
