// Python bindings. Reports cross the boundary as plain dicts (the same shapes
// the CLI writes as JSON); scalar fields cross as float lists and pick up
// their role from the argument position. Library errors surface as
// ChainCalcError with a stable `code` attribute.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "chaincalc/chain.hpp"
#include "chaincalc/errors.hpp"
#include "chaincalc/gradient.hpp"
#include "chaincalc/modulus.hpp"
#include "chaincalc/poincare.hpp"
#include "chaincalc/potential.hpp"
#include "chaincalc/space.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace chaincalc;

namespace {

ScalarField field(std::vector<double> values, FieldRole role) {
    return make_field(std::move(values), role);
}

SolveOptions solve_options(double feas_tol, double kkt_tol, double gap_tol,
                           int max_iterations) {
    SolveOptions s;
    s.feas_tol = feas_tol;
    s.kkt_tol = kkt_tol;
    s.gap_tol = gap_tol;
    s.max_iterations = max_iterations;
    return s;
}

py::dict verify_dict(const VerifyReport& r) {
    py::list viols;
    for (const PairViolation& v : r.violations) {
        py::dict d;
        d["from"] = v.from;
        d["to"] = v.to;
        d["required"] = v.required;
        d["available"] = v.available;
        d["deficit"] = v.deficit;
        viols.append(d);
    }
    py::dict d;
    d["ok"] = r.ok;
    d["pairs_checked"] = r.pairs_checked;
    d["worst_deficit"] = r.worst_deficit;
    d["violations"] = viols;
    return d;
}

py::dict gradient_dict(const GradientReport& r) {
    py::dict d;
    d["status"] = r.status;
    d["objective"] = r.objective;
    d["energy"] = r.energy;
    d["gradient"] = r.gradient;
    d["max_violation"] = r.max_violation;
    d["dual_bound"] = r.dual_bound;
    d["duality_gap"] = r.duality_gap;
    d["kkt_residual"] = r.kkt_residual;
    d["iterations"] = r.iterations;
    d["constraints"] = r.constraints;
    return d;
}

py::dict modulus_dict(const ModulusReport& r) {
    py::list binding;
    for (const Chain& c : r.binding) binding.append(c.points);
    py::dict d;
    d["status"] = r.status;
    d["objective"] = r.objective;
    d["objective_norm"] = r.objective_norm;
    d["rho"] = r.rho;
    d["binding"] = binding;
    d["min_family_integral"] = r.min_family_integral;
    d["empty_family"] = r.empty_family;
    d["rounds"] = r.rounds;
    d["cuts"] = r.cuts;
    d["dropped_chains"] = r.dropped_chains;
    d["dual_bound"] = r.dual_bound;
    d["duality_gap"] = r.duality_gap;
    d["kkt_residual"] = r.kkt_residual;
    d["iterations"] = r.iterations;
    return d;
}

HitEndpointRule rule_from(const std::string& name) {
    if (name == "include_all") return HitEndpointRule::include_all;
    if (name == "exclude_first") return HitEndpointRule::exclude_first;
    if (name == "exclude_last") return HitEndpointRule::exclude_last;
    fail("BadParameter", "unknown hit rule: " + name);
}

std::vector<double> measure_or_mass(const PointCloudSpace& s,
                                    const std::optional<std::vector<double>>& measure) {
    return measure ? *measure : s.mass;
}

std::vector<double> radii_or_scales(const PointCloudSpace& s,
                                    const std::optional<std::vector<double>>& radii) {
    return radii ? *radii : distance_scales(s);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "chain calculus on finite weighted metric spaces";
#ifdef VERSION_INFO
    m.attr("__version__") = VERSION_INFO;
#endif

    static py::handle err_type =
        py::exception<Error>(m, "ChainCalcError").release();
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object inst =
                py::reinterpret_borrow<py::object>(err_type)(e.what());
            inst.attr("code") = py::str(e.code());
            PyErr_SetObject(err_type.ptr(), inst.ptr());
        }
    });

    // --- spaces -------------------------------------------------------------
    py::class_<PointCloudSpace>(m, "Space")
        .def(py::init([](std::vector<std::vector<double>> dist, std::vector<double> mass,
                         std::vector<std::string> labels,
                         std::vector<std::vector<double>> coords, bool validate) {
                 PointCloudSpace s;
                 s.n = static_cast<int>(dist.size());
                 s.dist.reserve(static_cast<size_t>(s.n) * s.n);
                 for (const auto& row : dist) {
                     if (static_cast<int>(row.size()) != s.n)
                         fail("BadDistanceMatrix", "distance matrix must be square");
                     s.dist.insert(s.dist.end(), row.begin(), row.end());
                 }
                 s.mass = std::move(mass);
                 s.labels = std::move(labels);
                 s.coords = std::move(coords);
                 if (validate) validate_space(s);
                 return s;
             }),
             py::arg("dist"), py::arg("mass"), py::arg("labels") = std::vector<std::string>{},
             py::arg("coords") = std::vector<std::vector<double>>{},
             py::arg("validate") = true)
        .def_readonly("n", &PointCloudSpace::n)
        .def_readonly("mass", &PointCloudSpace::mass)
        .def_readonly("labels", &PointCloudSpace::labels)
        .def_readonly("coords", &PointCloudSpace::coords)
        .def("d", &PointCloudSpace::d, py::arg("i"), py::arg("j"))
        .def("dist_matrix",
             [](const PointCloudSpace& s) {
                 std::vector<std::vector<double>> rows(s.n, std::vector<double>(s.n));
                 for (int i = 0; i < s.n; ++i)
                     for (int j = 0; j < s.n; ++j) rows[i][j] = s.d(i, j);
                 return rows;
             })
        .def("total_mass", &PointCloudSpace::total_mass)
        .def("diameter", &PointCloudSpace::diameter)
        .def("min_positive_distance", &PointCloudSpace::min_positive_distance)
        .def("resolve", &PointCloudSpace::resolve, py::arg("token"))
        .def("label_of", &PointCloudSpace::label_of, py::arg("i"))
        .def("__repr__", [](const PointCloudSpace& s) {
            return "<Space n=" + std::to_string(s.n) + ">";
        });

    m.def("generate_space", &generate_space, py::arg("descriptor"),
          "build a space from a descriptor like 'grid:1,101,0.01'");
    m.def("validate_space", &validate_space, py::arg("space"));
    m.def("snowflake", &snowflake, py::arg("space"), py::arg("alpha"));
    m.def("distance_scales", &distance_scales, py::arg("space"));
    m.def("open_ball_mass", &open_ball_mass, py::arg("space"), py::arg("center"),
          py::arg("r"));
    m.def("closed_ball_mass", &closed_ball_mass, py::arg("space"), py::arg("center"),
          py::arg("r"));
    m.def("open_ball_members", &open_ball_members, py::arg("space"), py::arg("center"),
          py::arg("r"));
    m.def(
        "chain_components",
        [](const PointCloudSpace& s, double eps) {
            ComponentPartition part = chain_components(s, eps);
            py::dict d;
            d["eps"] = part.eps;
            d["component_of"] = part.component_of;
            d["components"] = part.components;
            return d;
        },
        py::arg("space"), py::arg("eps"));
    m.def(
        "doubling_constant",
        [](const PointCloudSpace& s, std::optional<std::vector<double>> radii) {
            DoublingReport r = doubling_constant(s, radii_or_scales(s, radii));
            py::dict d;
            d["constant"] = r.constant;
            d["skipped"] = r.skipped;
            d["witness_center"] = r.witness_center;
            d["witness_radius"] = r.witness_radius;
            return d;
        },
        py::arg("space"), py::arg("radii") = std::nullopt);

    // --- chains ---------------------------------------------------------------
    py::class_<Chain>(m, "Chain")
        .def_readonly("points", &Chain::points)
        .def_readonly("eps", &Chain::eps)
        .def("__repr__", [](const Chain& c) {
            return "<Chain steps=" + std::to_string(c.points.size() - 1) + ">";
        });
    m.def("make_chain", &make_chain, py::arg("space"), py::arg("points"), py::arg("eps"));
    m.def(
        "lambda_integral",
        [](const PointCloudSpace& s, const Chain& c, std::vector<double> g, double lam) {
            return lambda_integral(s, c, g, lam);
        },
        py::arg("space"), py::arg("chain"), py::arg("g"), py::arg("lambda_"));
    m.def(
        "chain_length",
        [](const PointCloudSpace& s, const Chain& c) { return chain_length(s, c); },
        py::arg("space"), py::arg("chain"));
    m.def("riemann_sum", &riemann_sum, py::arg("f"), py::arg("ell"), py::arg("t"),
          py::arg("n"), py::arg("lambda_"),
          "endpoint-weighted Riemann sum of f over [0, ell] with offset t");

    // --- gradients --------------------------------------------------------------
    m.def(
        "slope_field",
        [](const PointCloudSpace& s, std::vector<double> u, double eps) {
            return slope_field(s, field(std::move(u), FieldRole::function), eps).values;
        },
        py::arg("space"), py::arg("u"), py::arg("eps"));
    m.def(
        "verify_upper_gradient",
        [](const PointCloudSpace& s, std::vector<double> u, std::vector<double> g,
           double eps, double lam, bool one_sided, bool weak, double slack_tol,
           int max_report) {
            VerifyOptions o;
            o.one_sided = one_sided;
            o.weak = weak;
            o.slack_tol = slack_tol;
            o.max_report = max_report;
            return verify_dict(verify_upper_gradient(
                s, field(std::move(u), FieldRole::function),
                field(std::move(g), FieldRole::gradient), eps, lam, o));
        },
        py::arg("space"), py::arg("u"), py::arg("g"), py::arg("eps"), py::arg("lambda_"),
        py::arg("one_sided") = false, py::arg("weak") = false,
        py::arg("slack_tol") = 1e-9, py::arg("max_report") = 16);

    auto bind_min_gradient = [](const PointCloudSpace& s, std::vector<double> u,
                                double eps, double p, double lam, bool weak,
                                bool one_sided, double feas_tol, double kkt_tol,
                                double gap_tol, int max_iterations, bool weak_entry) {
        GradientOptions o;
        o.weak = weak;
        o.one_sided = one_sided;
        o.solve = solve_options(feas_tol, kkt_tol, gap_tol, max_iterations);
        ScalarField uf = field(std::move(u), FieldRole::function);
        return gradient_dict(weak_entry ? minimal_weak_gradient(s, uf, eps, p, lam, o)
                                        : minimal_gradient(s, uf, eps, p, lam, o));
    };
    m.def(
        "minimal_gradient",
        [bind_min_gradient](const PointCloudSpace& s, std::vector<double> u, double eps,
                            double p, double lam, bool weak, bool one_sided,
                            double feas_tol, double kkt_tol, double gap_tol,
                            int max_iterations) {
            return bind_min_gradient(s, std::move(u), eps, p, lam, weak, one_sided,
                                     feas_tol, kkt_tol, gap_tol, max_iterations, false);
        },
        py::arg("space"), py::arg("u"), py::arg("eps"), py::arg("p"), py::arg("lambda_"),
        py::arg("weak") = false, py::arg("one_sided") = false, py::arg("feas_tol") = 1e-9,
        py::arg("kkt_tol") = 1e-7, py::arg("gap_tol") = 1e-9,
        py::arg("max_iterations") = 200);
    m.def(
        "minimal_weak_gradient",
        [bind_min_gradient](const PointCloudSpace& s, std::vector<double> u, double eps,
                            double p, double lam, bool one_sided, double feas_tol,
                            double kkt_tol, double gap_tol, int max_iterations) {
            return bind_min_gradient(s, std::move(u), eps, p, lam, true, one_sided,
                                     feas_tol, kkt_tol, gap_tol, max_iterations, true);
        },
        py::arg("space"), py::arg("u"), py::arg("eps"), py::arg("p"), py::arg("lambda_"),
        py::arg("one_sided") = false, py::arg("feas_tol") = 1e-9,
        py::arg("kkt_tol") = 1e-7, py::arg("gap_tol") = 1e-9,
        py::arg("max_iterations") = 200);
    m.def(
        "energy_ladder",
        [](const PointCloudSpace& s, std::vector<double> u, std::vector<double> eps_list,
           double p, double lam, bool weak, bool one_sided) {
            GradientOptions o;
            o.weak = weak;
            o.one_sided = one_sided;
            py::list out;
            for (const LadderRung& r : energy_ladder(
                     s, field(std::move(u), FieldRole::function), eps_list, p, lam, o)) {
                py::dict d;
                d["eps"] = r.eps;
                d["objective"] = r.objective;
                d["status"] = r.status;
                out.append(d);
            }
            return out;
        },
        py::arg("space"), py::arg("u"), py::arg("eps_list"), py::arg("p"),
        py::arg("lambda_"), py::arg("weak") = false, py::arg("one_sided") = false);
    m.def(
        "check_curve_consistency",
        [](const PointCloudSpace& s, std::vector<double> u, std::vector<double> g,
           double eps) {
            ConsistencyReport r = check_curve_consistency(
                s, field(std::move(u), FieldRole::function),
                field(std::move(g), FieldRole::gradient), eps);
            py::dict d;
            d["two_point_ok"] = r.two_point_ok;
            d["consistent"] = r.consistent;
            d["paths_checked"] = r.paths_checked;
            d["worst_slack"] = r.worst_slack;
            d["counterexample"] = r.counterexample;
            return d;
        },
        py::arg("space"), py::arg("u"), py::arg("g"), py::arg("eps"));

    // --- modulus ------------------------------------------------------------------
    py::class_<ChainFamily>(m, "ChainFamily")
        .def_static("connect", &ChainFamily::connect, py::arg("from_"), py::arg("to"),
                    py::arg("eps"))
        .def_static(
            "hit",
            [](std::vector<int> targets, double eps, const std::string& rule) {
                return ChainFamily::hit(std::move(targets), eps, rule_from(rule));
            },
            py::arg("targets"), py::arg("eps"), py::arg("rule") = "include_all")
        .def_static(
            "explicit",
            [](const PointCloudSpace& s, std::vector<std::vector<int>> chains,
               double eps) {
                // over-scale entries are built wide and left for from_chains to
                // drop, so the report's dropped_chains count stays meaningful
                std::vector<Chain> built;
                for (auto& pts : chains) {
                    double widest = eps;
                    for (size_t i = 0; i + 1 < pts.size(); ++i)
                        widest = std::max(widest, s.d(pts[i], pts[i + 1]));
                    built.push_back(make_chain(s, std::move(pts), widest));
                }
                return ChainFamily::from_chains(std::move(built), eps);
            },
            py::arg("space"), py::arg("chains"), py::arg("eps"));

    py::class_<FunctionClass>(m, "FunctionClass")
        .def_static("all", &FunctionClass::all)
        .def_static("finite_at", &FunctionClass::finite_at, py::arg("x"), py::arg("y"))
        .def_static("lipschitz", &FunctionClass::lipschitz,
                    py::arg("bound") = std::nullopt);

    m.def(
        "chain_modulus",
        [](const PointCloudSpace& s, const ChainFamily& fam, double p,
           std::optional<std::vector<double>> measure, std::optional<FunctionClass> cls,
           double lam, int max_rounds, double family_slack, double feas_tol,
           double kkt_tol, double gap_tol, int max_iterations) {
            ModulusOptions o;
            o.max_rounds = max_rounds;
            o.family_slack = family_slack;
            o.solve = solve_options(feas_tol, kkt_tol, gap_tol, max_iterations);
            return modulus_dict(chain_modulus(s, fam, p, measure_or_mass(s, measure),
                                              cls ? *cls : FunctionClass::all(), lam, o));
        },
        py::arg("space"), py::arg("family"), py::arg("p"),
        py::arg("measure") = std::nullopt, py::arg("cls") = std::nullopt,
        py::arg("lambda_") = 0.5, py::arg("max_rounds") = 400,
        py::arg("family_slack") = 1e-7, py::arg("feas_tol") = 1e-9,
        py::arg("kkt_tol") = 1e-7, py::arg("gap_tol") = 1e-9,
        py::arg("max_iterations") = 200);
    m.def(
        "keith_modulus_ladder",
        [](const PointCloudSpace& s, int x, int y, double truncation, double p,
           std::vector<double> eps_list, std::optional<FunctionClass> cls, double lam) {
            py::list out;
            for (const KeithRung& r : keith_modulus_ladder(
                     s, x, y, truncation, p, eps_list,
                     cls ? *cls : FunctionClass::all(), lam)) {
                py::dict d;
                d["eps"] = r.eps;
                d["modulus"] = r.modulus;
                d["status"] = r.status;
                out.append(d);
            }
            return out;
        },
        py::arg("space"), py::arg("x"), py::arg("y"), py::arg("truncation"), py::arg("p"),
        py::arg("eps_list"), py::arg("cls") = std::nullopt, py::arg("lambda_") = 0.5);
    m.def(
        "is_weak_exceptional",
        [](const PointCloudSpace& s, const ChainFamily& fam, double eps, double p,
           double lam) {
            ExceptionalReport r = is_weak_exceptional(s, fam, eps, p, lam);
            py::dict d;
            d["exceptional"] = r.exceptional;
            d["modulus"] = r.modulus;
            d["certified"] = r.certified;
            d["certificate"] = r.certificate;
            d["note"] = r.note;
            return d;
        },
        py::arg("space"), py::arg("family"), py::arg("eps"), py::arg("p"),
        py::arg("lambda_") = 0.5);

    // --- poincare diagnostics -------------------------------------------------------
    m.def(
        "riesz_weights",
        [](const PointCloudSpace& s, int x, int y, double truncation) {
            RieszWeights r = riesz_weights(s, x, y, truncation);
            py::dict d;
            d["x"] = r.x;
            d["y"] = r.y;
            d["truncation"] = r.truncation;
            d["weights"] = r.weights;
            d["total"] = r.total;
            return d;
        },
        py::arg("space"), py::arg("x"), py::arg("y"), py::arg("truncation"));
    m.def(
        "ball_pi_audit",
        [](const PointCloudSpace& s, std::vector<double> u, std::vector<double> g,
           double p, double dilation, std::optional<std::vector<double>> radii) {
            BallAudit a = ball_pi_audit(s, field(std::move(u), FieldRole::function),
                                        field(std::move(g), FieldRole::gradient), p,
                                        dilation, radii ? *radii : std::vector<double>{});
            py::list cases;
            for (const BallCase& bc : a.cases) {
                py::dict cd;
                cd["center"] = bc.center;
                cd["radius"] = bc.radius;
                cd["lhs"] = bc.lhs;
                cd["rhs"] = bc.rhs;
                cd["ratio"] = bc.ratio;
                cd["zero_rhs"] = bc.zero_rhs;
                cd["empty"] = bc.empty;
                cases.append(cd);
            }
            py::dict d;
            d["worst_constant"] = a.worst_constant;
            d["worst_case"] = a.worst_case;
            d["unbounded"] = a.unbounded;
            d["unbounded_case"] = a.unbounded_case;
            d["skipped"] = a.skipped;
            d["cases"] = cases;
            return d;
        },
        py::arg("space"), py::arg("u"), py::arg("g"), py::arg("p"), py::arg("dilation"),
        py::arg("radii") = std::nullopt);
    m.def(
        "pointwise_pi_check",
        [](const PointCloudSpace& s, int x, int y, std::vector<double> g, double p,
           double C, double truncation, double lam, std::optional<double> eps,
           double time_budget_ms) {
            PointwiseOptions o;
            o.eps = eps;
            o.time_budget_ms = time_budget_ms;
            PointwiseReport r = pointwise_pi_check(
                s, x, y, field(std::move(g), FieldRole::gradient), p, C, truncation, lam,
                o);
            py::dict d;
            d["eps"] = r.eps;
            d["length_budget"] = r.length_budget;
            d["lhs"] = r.lhs;
            d["rhs"] = r.rhs;
            d["satisfied"] = r.satisfied;
            d["witness"] = r.witness;
            d["lower_bound_only"] = r.lower_bound_only;
            return d;
        },
        py::arg("space"), py::arg("x"), py::arg("y"), py::arg("g"), py::arg("p"),
        py::arg("C"), py::arg("truncation"), py::arg("lambda_") = 0.5,
        py::arg("eps") = std::nullopt, py::arg("time_budget_ms") = 0.0);
    m.def("chain_width", &chain_width, py::arg("space"), py::arg("x"), py::arg("y"),
          py::arg("target"), py::arg("eps"));
    m.def(
        "minkowski_profile",
        [](const PointCloudSpace& s, std::vector<int> set,
           std::optional<std::vector<double>> measure,
           std::optional<std::vector<double>> radii) {
            MinkowskiProfile prof = minkowski_profile(
                s, set, measure_or_mass(s, measure), radii_or_scales(s, radii));
            py::list entries;
            for (const ShellEntry& e : prof.entries) {
                py::dict ed;
                ed["r"] = e.r;
                ed["shell_measure"] = e.shell_measure;
                ed["value"] = e.value;
                entries.append(ed);
            }
            py::dict d;
            d["entries"] = entries;
            d["minimum"] = prof.minimum;
            d["argmin"] = prof.argmin;
            return d;
        },
        py::arg("space"), py::arg("set"), py::arg("measure") = std::nullopt,
        py::arg("radii") = std::nullopt);
    m.def(
        "bmc_audit",
        [](const PointCloudSpace& s, int x, int y, double truncation,
           std::vector<std::vector<int>> candidates, double eps,
           std::optional<std::vector<double>> radii) {
            BmcAudit a = bmc_audit(s, x, y, truncation, candidates, eps,
                                   radii ? *radii : std::vector<double>{});
            py::list cands;
            for (const BmcCandidate& bc : a.candidates) {
                py::list shells;
                for (const BmcShell& sh : bc.shells) {
                    py::dict sd;
                    sd["r"] = sh.r;
                    sd["shell_measure"] = sh.shell_measure;
                    sd["width"] = sh.width;
                    sd["ratio"] = sh.ratio;
                    sd["zero_measure"] = sh.zero_measure;
                    shells.append(sd);
                }
                py::dict cd;
                cd["separating_set"] = bc.separating_set;
                cd["profile_min"] = bc.profile_min;
                cd["shells"] = shells;
                cands.append(cd);
            }
            py::dict d;
            d["worst_lower"] = a.worst_lower;
            d["worst_lower_candidate"] = a.worst_lower_candidate;
            d["worst_upper"] = a.worst_upper;
            d["worst_upper_candidate"] = a.worst_upper_candidate;
            d["zero_measure_shells"] = a.zero_measure_shells;
            d["candidates"] = cands;
            return d;
        },
        py::arg("space"), py::arg("x"), py::arg("y"), py::arg("truncation"),
        py::arg("candidates"), py::arg("eps"), py::arg("radii") = std::nullopt);

    // --- potentials ---------------------------------------------------------------
    auto build_spec = [](std::vector<int> seeds, std::vector<double> values,
                         std::vector<double> g, double eps, double lam,
                         std::optional<double> cap) {
        PotentialSpec spec;
        spec.seeds = std::move(seeds);
        spec.seed_values = std::move(values);
        spec.g = field(std::move(g), FieldRole::gradient);
        spec.eps = eps;
        spec.lambda = lam;
        spec.cap = cap;
        return spec;
    };
    m.def(
        "chain_potential",
        [build_spec](const PointCloudSpace& s, std::vector<int> seeds,
                     std::vector<double> values, std::vector<double> g, double eps,
                     double lam, std::optional<double> cap) {
            PotentialResult r = chain_potential(
                s, build_spec(std::move(seeds), std::move(values), std::move(g), eps, lam,
                              cap));
            py::dict d;
            d["u"] = r.u.values;
            d["unreachable"] = r.unreachable;
            return d;
        },
        py::arg("space"), py::arg("seeds"), py::arg("values"), py::arg("g"),
        py::arg("eps"), py::arg("lambda_") = 0.5, py::arg("cap") = std::nullopt);
    m.def(
        "potential_gradient_check",
        [build_spec](const PointCloudSpace& s, std::vector<int> seeds,
                     std::vector<double> values, std::vector<double> g, double eps,
                     double lam, std::optional<double> cap) {
            PotentialCheck r = potential_gradient_check(
                s, build_spec(std::move(seeds), std::move(values), std::move(g), eps, lam,
                              cap));
            py::dict d;
            d["verdict"] = verify_dict(r.verdict);
            d["u"] = r.potential.u.values;
            d["unreachable"] = r.potential.unreachable;
            d["one_sided"] = r.one_sided;
            return d;
        },
        py::arg("space"), py::arg("seeds"), py::arg("values"), py::arg("g"),
        py::arg("eps"), py::arg("lambda_") = 0.5, py::arg("cap") = std::nullopt);
    m.def(
        "leibniz_gradient",
        [](const PointCloudSpace& s, std::vector<double> u, std::vector<double> g,
           std::vector<double> phi, double eps) {
            return leibniz_gradient(s, field(std::move(u), FieldRole::function),
                                    field(std::move(g), FieldRole::gradient),
                                    field(std::move(phi), FieldRole::function), eps)
                .values;
        },
        py::arg("space"), py::arg("u"), py::arg("g"), py::arg("phi"), py::arg("eps"));
    m.def(
        "eb_pipeline",
        [](std::vector<int> grid_sizes, const std::function<double(double)>& u,
           const std::function<double(double)>& g, double p, double eps_factor,
           const std::string& seeds) {
            EbSeeds mode;
            if (seeds == "all")
                mode = EbSeeds::all;
            else if (seeds == "boundary")
                mode = EbSeeds::boundary;
            else
                fail("BadParameter", "seeds must be 'all' or 'boundary'");
            EbReport r = eb_pipeline(grid_sizes, u, g, p, eps_factor, mode);
            py::list entries;
            for (const EbEntry& e : r.entries) {
                py::dict ed;
                ed["n"] = e.n;
                ed["eps"] = e.eps;
                ed["err_u"] = e.err_u;
                ed["err_g"] = e.err_g;
                ed["status"] = e.status;
                entries.append(ed);
            }
            py::dict d;
            d["p"] = r.p;
            d["seeds"] = seeds;
            d["entries"] = entries;
            return d;
        },
        py::arg("grid_sizes"), py::arg("u"), py::arg("g"), py::arg("p"),
        py::arg("eps_factor") = 2.0, py::arg("seeds") = "all");
}
