#pragma once

#include "chaincalc/chain.hpp"
#include "chaincalc/gradient.hpp"
#include "chaincalc/poincare.hpp"
#include "chaincalc/solver.hpp"
#include "chaincalc/space.hpp"

#include <optional>
#include <string>
#include <vector>

namespace chaincalc {

// For the one-sided weightings (lambda 0 or 1) one chain endpoint carries no
// weight, so a hit that occurs only at that end is invisible to any density.
// Hit families can therefore be taken with that end excluded; hits are judged
// after collapsing zero-length steps.
enum class HitEndpointRule { include_all, exclude_first, exclude_last };

struct ChainFamily {
    enum class Kind { connect, hit, explicit_list };
    Kind kind = Kind::connect;
    double eps = 0.0;

    int from = -1, to = -1;   // connect endpoints
    std::vector<int> targets; // hit set
    HitEndpointRule hit_rule = HitEndpointRule::include_all;
    std::vector<Chain> chains; // explicit list

    // All chains from one point to another.
    static ChainFamily connect(int from, int to, double eps);
    // All positive-length chains meeting the target set.
    static ChainFamily hit(std::vector<int> targets, double eps,
                           HitEndpointRule rule = HitEndpointRule::include_all);
    // Exactly the listed chains; entries with a step over eps or of zero
    // length fall outside the scale and are dropped (counted in the report).
    static ChainFamily from_chains(std::vector<Chain> chains, double eps);
};

struct FunctionClass {
    enum class Tag { all_borel, finite_at, lipschitz };
    Tag tag = Tag::all_borel;

    int x = -1, y = -1;          // finite_at poles
    std::optional<double> bound; // lipschitz cap, when supplied

    static FunctionClass all();
    // On a finite space every field is finite, so the finiteness restriction
    // is realized by pinning the density to zero at the two poles (they carry
    // the role of the measure-null poles of the two-pole kernel).
    static FunctionClass finite_at(int x, int y);
    // Without a cap this is every field (finite spaces have no Lipschitz
    // obstruction); with a cap K it adds |rho(a) - rho(b)| <= K d(a,b) rows.
    static FunctionClass lipschitz(std::optional<double> bound = std::nullopt);
};

struct ModulusOptions {
    SolveOptions solve{};
    int max_rounds = 400;       // separation rounds before giving up
    double family_slack = 1e-7; // stop once the family minimum reaches 1 - slack
};

struct ModulusReport {
    std::string status; // solver status, or "empty_family"
    double objective = 0.0;      // sum_i measure_i * rho_i^p
    double objective_norm = 0.0; // objective^(1/p)
    std::vector<double> rho;
    std::vector<Chain> binding;        // cut chains tight at the returned rho
    double min_family_integral = 0.0;  // final separation value; +inf when empty
    bool empty_family = false;
    int rounds = 0;         // separation passes
    int cuts = 0;           // constraint rows kept at the end
    int dropped_chains = 0; // explicit chains outside the scale or of zero length
    double dual_bound = 0.0;
    double duality_gap = 0.0;
    double kkt_residual = 0.0;
    int iterations = 0; // interior-point iterations of the final solve
};

// min sum_i measure_i rho_i^p over nonnegative rho subject to
// lambda-integral(c, rho) >= 1 for every chain c in the family, computed by
// cutting planes with a shortest-chain separation oracle.
ModulusReport chain_modulus(const PointCloudSpace& space, const ChainFamily& family,
                            double p, const std::vector<double>& measure,
                            const FunctionClass& cls, double lambda,
                            const ModulusOptions& opts = {});
ModulusReport chain_modulus(const PointCloudSpace& space, const ChainFamily& family,
                            double p, const ScalarField& measure,
                            const FunctionClass& cls, double lambda,
                            const ModulusOptions& opts = {});
ModulusReport chain_modulus(const PointCloudSpace& space, const ChainFamily& family,
                            double p, const RieszWeights& measure,
                            const FunctionClass& cls, double lambda,
                            const ModulusOptions& opts = {});

struct KeithRung {
    double eps = 0.0;
    double modulus = 0.0;
    std::string status;
};

// Modulus of the connecting family against the two-pole kernel measure, one
// rung per scale. No monotonicity across rungs is asserted: the family and
// the scale shrink together and the two effects compete.
std::vector<KeithRung> keith_modulus_ladder(const PointCloudSpace& space, int x, int y,
                                            double truncation, double p,
                                            const std::vector<double>& eps_list,
                                            const FunctionClass& cls, double lambda = 0.5,
                                            const ModulusOptions& opts = {});

struct ExceptionalReport {
    bool exceptional = false; // modulus vanishes within 1e-9
    double modulus = 0.0;
    bool certified = false;          // closed-form null certificate applies
    std::vector<double> certificate; // admissible density of zero energy when certified
    std::string note;
};

// A family is weak-exceptional when its modulus vanishes. For hit families
// whose targets all carry zero mass the certificate 2k * indicator(targets)
// is attached (k chosen from the smallest step leaving the target set); for
// lambda in {0,1} that argument only covers the endpoint-excluded rules.
ExceptionalReport is_weak_exceptional(const PointCloudSpace& space,
                                      const ChainFamily& family, double eps, double p,
                                      double lambda = 0.5);

} // namespace chaincalc
