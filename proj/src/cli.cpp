#include "chaincalc/chain.hpp"
#include "chaincalc/errors.hpp"
#include "chaincalc/expr.hpp"
#include "chaincalc/gradient.hpp"
#include "chaincalc/io.hpp"
#include "chaincalc/modulus.hpp"
#include "chaincalc/poincare.hpp"
#include "chaincalc/potential.hpp"
#include "chaincalc/space.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace cc = chaincalc;
using cc::Json;

namespace {

// ---- small parsing helpers ---------------------------------------------------

std::vector<std::string> split_tokens(const std::string& text, const std::string& seps) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (seps.find(c) != std::string::npos) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<int> resolve_ids(const cc::PointCloudSpace& space, const std::string& text,
                             const std::string& what) {
    std::vector<int> ids;
    for (const std::string& tok : split_tokens(text, ",;")) ids.push_back(space.resolve(tok));
    if (ids.empty()) cc::fail("ConfigParse", what + ": no points given");
    return ids;
}

double parse_double(const std::string& tok, const std::string& what) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || tok.empty())
        cc::fail("ConfigParse", what + ": cannot read number \"" + tok + "\"");
    return v;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const std::string& tok : split_tokens(text, ",;")) out.push_back(parse_double(tok, what));
    if (out.empty()) cc::fail("ConfigParse", what + ": empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<int> out;
    for (double v : parse_double_list(text, what)) {
        int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            cc::fail("ConfigParse", what + ": expected integers");
        out.push_back(i);
    }
    return out;
}

std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return Json(v).dump();
}

// ---- report -> JSON ------------------------------------------------------------

Json verify_json(const cc::VerifyReport& rep) {
    Json r;
    r["ok"] = rep.ok;
    r["pairs_checked"] = rep.pairs_checked;
    r["worst_deficit"] = cc::encode_number(rep.worst_deficit);
    Json vs = Json::array();
    for (const cc::PairViolation& v : rep.violations)
        vs.push_back({{"from", v.from},
                      {"to", v.to},
                      {"required", cc::encode_number(v.required)},
                      {"available", cc::encode_number(v.available)},
                      {"deficit", cc::encode_number(v.deficit)}});
    r["violations"] = std::move(vs);
    return r;
}

Json gradient_json(const cc::GradientReport& rep) {
    Json r;
    r["status"] = rep.status;
    r["objective"] = cc::encode_number(rep.objective);
    r["energy"] = cc::encode_number(rep.energy);
    r["max_violation"] = cc::encode_number(rep.max_violation);
    r["dual_bound"] = cc::encode_number(rep.dual_bound);
    r["duality_gap"] = cc::encode_number(rep.duality_gap);
    r["kkt_residual"] = cc::encode_number(rep.kkt_residual);
    r["iterations"] = rep.iterations;
    r["constraints"] = rep.constraints;
    r["gradient"] = cc::encode_vector(rep.gradient);
    return r;
}

Json modulus_json(const cc::ModulusReport& rep) {
    Json r;
    r["status"] = rep.status;
    r["objective"] = cc::encode_number(rep.objective);
    r["objective_norm"] = cc::encode_number(rep.objective_norm);
    r["empty_family"] = rep.empty_family;
    r["min_family_integral"] = cc::encode_number(rep.min_family_integral);
    r["rounds"] = rep.rounds;
    r["cuts"] = rep.cuts;
    r["dropped_chains"] = rep.dropped_chains;
    r["dual_bound"] = cc::encode_number(rep.dual_bound);
    r["duality_gap"] = cc::encode_number(rep.duality_gap);
    r["kkt_residual"] = cc::encode_number(rep.kkt_residual);
    r["iterations"] = rep.iterations;
    r["rho"] = cc::encode_vector(rep.rho);
    Json binding = Json::array();
    for (const cc::Chain& c : rep.binding) binding.push_back(c.points);
    r["binding"] = std::move(binding);
    return r;
}

Json ball_case_json(const cc::BallCase& c) {
    return {{"center", c.center},
            {"radius", cc::encode_number(c.radius)},
            {"lhs", cc::encode_number(c.lhs)},
            {"rhs", cc::encode_number(c.rhs)},
            {"ratio", cc::encode_number(c.ratio)},
            {"zero_rhs", c.zero_rhs}};
}

// ---- option storage -------------------------------------------------------------

struct SpaceGenOpts {
    std::string descriptor, save;
    double alpha = 0.5;
};
struct PathOpts {
    std::string space;
};
struct VerifyOpts {
    std::string space, u, g;
    double eps = 0.0, lambda = 0.5, slack_tol = 1e-9;
    bool one_sided = false, weak = false;
};
struct MinOpts {
    std::string space, u, save_gradient;
    double eps = 0.0, p = 2.0, lambda = 0.5;
    bool one_sided = false;
};
struct LadderOpts {
    std::string space, u, eps_list;
    double p = 2.0, lambda = 0.5;
    bool one_sided = false, weak = false;
};
struct ModulusOpts {
    std::string space, family, measure = "default", cls = "all";
    double eps = 0.0, p = 2.0, lambda = 0.5;
    int max_rounds = 400;
    bool check_exceptional = false;
};
struct KeithOpts {
    std::string space, x, y, eps_list, cls = "all";
    double truncation = 1.0, p = 2.0, lambda = 0.5;
};
struct RieszOpts {
    std::string space, x, y, save_weights;
    double truncation = 1.0;
};
struct BallOpts {
    std::string space, u, g, radii;
    double p = 2.0, dilation = 2.0;
};
struct PointwiseOpts {
    std::string space, x, y, g;
    double p = 2.0, C = 2.0, truncation = 1.0, lambda = 0.5, eps = 0.0;
};
struct WidthOpts {
    std::string space, x, y, set;
    double eps = 0.0;
};
struct MinkowskiOpts {
    std::string space, set, measure = "default", radii;
};
struct BmcOpts {
    std::string space, x, y, candidates, radii;
    double truncation = 1.0, eps = 0.0;
};
struct PotentialOpts {
    std::string space, seeds, values, g, save;
    double eps = 0.0, lambda = 0.5, cap = 0.0;
    bool check = false;
};
struct LeibnizOpts {
    std::string space, u, g, phi, save;
    double eps = 0.0;
};
struct EbOpts {
    std::string n, u, g, seeds = "all";
    double p = 2.0, eps_factor = 2.0;
};
struct RiemannOpts {
    std::string f;
    double ell = 1.0, t = 0.0, lambda = 0.5;
    int n = 0;
};
struct FixturesOpts {
    std::string dir = "fixtures";
    bool list = false;
};
struct RunCfgOpts {
    std::string config;
};

struct RunState {
    std::string command;
    Json params = Json::object();
    std::vector<cc::InputRecord> inputs;
    Json result;
    bool ran = false;
};

CLI::App* sub(CLI::App* parent, const std::string& name, const std::string& desc) {
    CLI::App* s = parent->add_subcommand(name, desc);
    s->fallthrough();
    return s;
}

int run_cli(std::vector<std::string> args, bool nested);

// ---- fixture construction ---------------------------------------------------------

// Everything below is deterministic, so the emitted bytes (and digests) are
// stable across runs and machines.
Json build_fixtures(const std::string& dir, bool list_only,
                    std::vector<cc::InputRecord>&) {
    namespace fs = std::filesystem;
    struct Def {
        std::string name;
        std::string descriptor; // empty for the snowflaked entries
        std::string base;
        double alpha = 0.0;
    };
    const std::vector<Def> defs = {
        {"two_sequence_3_50", "two_sequence:3,50", "", 0.0},
        {"grid1d_11", "grid:1,11,0.1", "", 0.0},
        {"grid1d_101", "grid:1,101,0.01", "", 0.0},
        {"grid1d_1001", "grid:1,1001,0.001", "", 0.0},
        {"snowflake_a0.5", "", "grid:1,101,0.01", 0.5},
        {"snowflake_a0.8", "", "grid:1,101,0.01", 0.8},
        {"punctured_grid", "punctured_grid:2,5,0.1,12", "", 0.0},
    };

    if (!list_only) fs::create_directories(dir);
    Json entries = Json::array();
    for (const Def& def : defs) {
        Json entry;
        entry["name"] = def.name;
        entry["file"] = def.name + ".space.json";
        if (!def.descriptor.empty()) {
            entry["descriptor"] = def.descriptor;
        } else {
            entry["base"] = def.base;
            entry["alpha"] = def.alpha;
        }
        cc::PointCloudSpace s = cc::generate_space(
            def.descriptor.empty() ? def.base : def.descriptor);
        if (!def.descriptor.empty() && def.name == "two_sequence_3_50") {
            // Example weights: u alternates 0 on the x-row and 1 on the y-row.
            std::vector<double> uv(s.n);
            for (int i = 0; i < s.n; ++i) uv[i] = (i % 2 == 0) ? 0.0 : 1.0;
            double expected = 0.0;
            for (int n = 3; n <= 50; ++n) expected += 1.0 / (static_cast<double>(n) * n);
            expected *= 2.0;
            entry["fields"] = Json::array(
                {{{"name", "u"}, {"file", def.name + ".u.field.json"}, {"role", "function"}}});
            entry["expected"] = {{"formula", "2*sum(n=3..50) n^-2"},
                                 {"objective", expected},
                                 {"eps", 1.0 / 3.0},
                                 {"p", 1.0},
                                 {"lambda", 0.5}};
            if (!list_only) {
                std::string text =
                    cc::field_to_json(cc::make_field(uv, cc::FieldRole::function)).dump(2) + "\n";
                cc::write_text_file(dir + "/" + def.name + ".u.field.json", text);
                entry["fields"][0]["digest"] = cc::content_digest(text);
            }
        }
        if (!def.descriptor.empty() && def.name == "punctured_grid")
            entry["punctured_point"] = 12;
        if (def.descriptor.empty()) s = cc::snowflake(s, def.alpha);
        cc::validate_space(s);
        entry["n"] = s.n;
        if (!list_only) {
            std::string text = cc::space_to_json(s).dump() + "\n";
            cc::write_text_file(dir + "/" + entry["file"].get<std::string>(), text);
            entry["digest"] = cc::content_digest(text);
        }
        entries.push_back(std::move(entry));
    }

    Json result;
    result["dir"] = dir;
    result["fixtures"] = entries;
    if (!list_only) {
        Json manifest;
        manifest["schema"] = 1;
        manifest["kind"] = "manifest";
        manifest["fixtures"] = entries;
        std::string text = manifest.dump(2) + "\n";
        cc::write_text_file(dir + "/manifest.json", text);
        result["manifest"] = {{"path", dir + "/manifest.json"},
                              {"digest", cc::content_digest(text)}};
    }
    return result;
}

// ---- the command surface ----------------------------------------------------------

int run_cli(std::vector<std::string> args, bool nested) {
    CLI::App app{"discrete chain calculus on finite weighted metric spaces", "chaincalc"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string out_path, csv_path;
    unsigned long long seed = 0;
    double tol_feas = 1e-9, tol_kkt = 1e-7, time_budget_ms = 0.0;
    auto* out_opt = app.add_option("--out", out_path, "write the result JSON here, not stdout");
    auto* csv_opt =
        app.add_option("--csv", csv_path, "also emit the command's profile as CSV (r,value)");
    auto* seed_opt = app.add_option("--seed", seed, "seed recorded for randomized harnesses");
    auto* tf_opt = app.add_option("--tol-feas", tol_feas, "solver feasibility tolerance");
    auto* tk_opt = app.add_option("--tol-kkt", tol_kkt, "solver KKT tolerance");
    auto* tb_opt =
        app.add_option("--time-budget-ms", time_budget_ms, "budget for budgeted searches");

    RunState rs;
    int delegated_exit = -1;

    auto record_global = [&](Json& p) {
        if (*out_opt) p["out"] = out_path;
        if (*csv_opt) p["csv"] = csv_path;
        if (*seed_opt) p["seed"] = seed;
        if (*tf_opt) p["tol_feas"] = tol_feas;
        if (*tk_opt) p["tol_kkt"] = tol_kkt;
        if (*tb_opt) p["time_budget_ms"] = time_budget_ms;
    };
    auto solve_options = [&] {
        cc::SolveOptions s;
        s.feas_tol = tol_feas;
        s.kkt_tol = tol_kkt;
        return s;
    };
    auto input_space = [&rs](const std::string& name, const std::string& path) {
        std::string text = cc::read_text_file(path);
        rs.inputs.push_back({name, path, cc::content_digest(text)});
        cc::PointCloudSpace s =
            cc::space_from_json(cc::parse_json(text, "space file " + path));
        cc::validate_space(s);
        return s;
    };
    auto input_field = [&rs](const std::string& name, const std::string& path) {
        std::string text = cc::read_text_file(path);
        rs.inputs.push_back({name, path, cc::content_digest(text)});
        return cc::field_from_json(cc::parse_json(text, "field file " + path));
    };
    auto save_field_file = [](const cc::ScalarField& f, const std::string& path) {
        std::string text = cc::field_to_json(f).dump(2) + "\n";
        cc::write_text_file(path, text);
        return Json{{"path", path}, {"digest", cc::content_digest(text)}};
    };
    auto write_profile = [&](const std::vector<std::pair<double, double>>& rows) {
        std::string text = "r,value\n";
        for (const auto& [r, v] : rows) text += csv_number(r) + "," + csv_number(v) + "\n";
        cc::write_text_file(csv_path, text);
        return Json{{"path", csv_path}, {"rows", rows.size()}};
    };
    auto parse_family = [&](const cc::PointCloudSpace& s, const std::string& spec,
                            double eps) -> cc::ChainFamily {
        auto bad = [&spec]() {
            cc::fail("ConfigParse", "family \"" + spec +
                                        "\": expected connect:x,y | hit:ids[:rule] | file:path");
        };
        size_t colon = spec.find(':');
        if (colon == std::string::npos) bad();
        std::string head = spec.substr(0, colon), rest = spec.substr(colon + 1);
        if (head == "connect") {
            std::vector<int> pts = resolve_ids(s, rest, "family " + spec);
            if (pts.size() != 2) bad();
            return cc::ChainFamily::connect(pts[0], pts[1], eps);
        }
        if (head == "hit") {
            cc::HitEndpointRule rule = cc::HitEndpointRule::include_all;
            size_t rule_at = rest.find(':');
            if (rule_at != std::string::npos) {
                std::string name = rest.substr(rule_at + 1);
                rest = rest.substr(0, rule_at);
                if (name == "include_all")
                    rule = cc::HitEndpointRule::include_all;
                else if (name == "exclude_first")
                    rule = cc::HitEndpointRule::exclude_first;
                else if (name == "exclude_last")
                    rule = cc::HitEndpointRule::exclude_last;
                else
                    bad();
            }
            return cc::ChainFamily::hit(resolve_ids(s, rest, "family " + spec), eps, rule);
        }
        if (head == "file") {
            std::string text = cc::read_text_file(rest);
            rs.inputs.push_back({"chains", rest, cc::content_digest(text)});
            auto lists =
                cc::chain_lists_from_json(cc::parse_json(text, "chains file " + rest));
            std::vector<cc::Chain> chains;
            for (const auto& tokens : lists) {
                std::vector<int> pts;
                pts.reserve(tokens.size());
                for (const std::string& tok : tokens) pts.push_back(s.resolve(tok));
                double widest = eps;
                for (size_t i = 0; i + 1 < pts.size(); ++i)
                    widest = std::max(widest, s.d(pts[i], pts[i + 1]));
                // over-scale entries are built wide and left for from_chains to drop
                chains.push_back(cc::make_chain(s, std::move(pts), widest));
            }
            return cc::ChainFamily::from_chains(std::move(chains), eps);
        }
        bad();
        return {};
    };
    auto parse_class = [](const cc::PointCloudSpace& s,
                          const std::string& spec) -> cc::FunctionClass {
        if (spec == "all") return cc::FunctionClass::all();
        if (spec.rfind("finite:", 0) == 0) {
            std::vector<int> pts = resolve_ids(s, spec.substr(7), "class " + spec);
            if (pts.size() != 2)
                cc::fail("ConfigParse", "class " + spec + ": needs exactly two poles");
            return cc::FunctionClass::finite_at(pts[0], pts[1]);
        }
        if (spec == "lip") return cc::FunctionClass::lipschitz();
        if (spec.rfind("lip:", 0) == 0)
            return cc::FunctionClass::lipschitz(
                parse_double(spec.substr(4), "class " + spec));
        cc::fail("ConfigParse",
                 "class \"" + spec + "\": expected all | finite:x,y | lip[:K]");
    };
    // measure spec -> per-point measure vector (shared by modulus and minkowski)
    auto parse_measure = [&](const cc::PointCloudSpace& s,
                             const std::string& spec) -> std::vector<double> {
        if (spec == "default") return s.mass;
        if (spec.rfind("riesz:", 0) == 0) {
            std::vector<std::string> parts = split_tokens(spec.substr(6), ",");
            if (parts.size() != 3)
                cc::fail("ConfigParse", "measure " + spec + ": expected riesz:x,y,L");
            cc::RieszWeights w =
                cc::riesz_weights(s, s.resolve(parts[0]), s.resolve(parts[1]),
                                  parse_double(parts[2], "measure " + spec));
            std::vector<double> out(s.mass.size());
            for (size_t i = 0; i < out.size(); ++i) out[i] = w.weights[i] * s.mass[i];
            return out;
        }
        if (spec.rfind("file:", 0) == 0) {
            cc::ScalarField f = input_field("measure", spec.substr(5));
            if (f.role != cc::FieldRole::density)
                cc::fail("BadField", "the measure field must carry the density role");
            return f.values;
        }
        cc::fail("ConfigParse",
                 "measure \"" + spec + "\": expected default | riesz:x,y,L | file:path");
    };

    // --- space ---
    auto* space_cmd = sub(&app, "space", "generate and validate spaces");
    space_cmd->require_subcommand(1);
    {
        auto o = std::make_shared<SpaceGenOpts>();
        auto* cmd = sub(space_cmd, "gen", "build a space from a descriptor");
        cmd->add_option("--descriptor", o->descriptor,
                        "grid:dim,side,spacing | two_sequence:nmin,nmax | "
                        "punctured_grid:dim,side,spacing,ids")
            ->required();
        auto* alpha_opt =
            cmd->add_option("--snowflake", o->alpha, "replace d by d^alpha, 0 < alpha < 1");
        cmd->add_option("--save", o->save, "write the space JSON here");
        cmd->callback([&, o, alpha_opt] {
            rs.command = "space gen";
            rs.params["descriptor"] = o->descriptor;
            if (*alpha_opt) rs.params["snowflake"] = o->alpha;
            if (!o->save.empty()) rs.params["save"] = o->save;
            record_global(rs.params);
            cc::PointCloudSpace s = cc::generate_space(o->descriptor);
            if (*alpha_opt) s = cc::snowflake(s, o->alpha);
            cc::validate_space(s);
            Json r;
            r["n"] = s.n;
            r["total_mass"] = cc::encode_number(s.total_mass());
            r["diameter"] = cc::encode_number(s.diameter());
            r["min_positive_distance"] = cc::encode_number(s.min_positive_distance());
            if (!o->save.empty()) {
                std::string text = cc::space_to_json(s).dump() + "\n";
                cc::write_text_file(o->save, text);
                r["saved"] = {{"path", o->save}, {"digest", cc::content_digest(text)}};
            } else {
                r["space"] = cc::space_to_json(s);
            }
            rs.result = std::move(r);
            rs.ran = true;
        });
    }
    {
        auto o = std::make_shared<PathOpts>();
        auto* cmd = sub(space_cmd, "validate", "check a space file");
        cmd->add_option("--space", o->space, "space JSON file")->required();
        cmd->callback([&, o] {
            rs.command = "space validate";
            rs.params["space"] = o->space;
            record_global(rs.params);
            cc::PointCloudSpace s = input_space("space", o->space);
            rs.result = {{"valid", true},
                         {"n", s.n},
                         {"total_mass", cc::encode_number(s.total_mass())},
                         {"diameter", cc::encode_number(s.diameter())},
                         {"min_positive_distance",
                          cc::encode_number(s.min_positive_distance())}};
            rs.ran = true;
        });
    }

    // --- gradient ---
    auto* grad_cmd = sub(&app, "gradient", "upper-gradient verification and synthesis");
    grad_cmd->require_subcommand(1);
    {
        auto o = std::make_shared<VerifyOpts>();
        auto* cmd = sub(grad_cmd, "verify", "test the two-point upper-gradient inequality");
        cmd->add_option("--space", o->space)->required();
        cmd->add_option("--u", o->u, "function field file")->required();
        cmd->add_option("--g", o->g, "gradient field file")->required();
        cmd->add_option("--eps", o->eps)->required();
        cmd->add_option("--lambda", o->lambda);
        cmd->add_flag("--one-sided", o->one_sided, "test u(y)-u(x) only");
        cmd->add_flag("--weak", o->weak, "skip pairs with a zero-mass endpoint");
        cmd->add_option("--slack-tol", o->slack_tol);
        cmd->callback([&, o] {
            rs.command = "gradient verify";
            rs.params = {{"space", o->space}, {"u", o->u},
                         {"g", o->g},         {"eps", o->eps},
                         {"lambda", o->lambda}, {"one_sided", o->one_sided},
                         {"weak", o->weak},   {"slack_tol", o->slack_tol}};
            record_global(rs.params);
            cc::PointCloudSpace s = input_space("space", o->space);
            cc::ScalarField u = input_field("u", o->u), g = input_field("g", o->g);
            cc::VerifyOptions vo;
            vo.one_sided = o->one_sided;
            vo.weak = o->weak;
            vo.slack_tol = o->slack_tol;
            rs.result = verify_json(cc::verify_upper_gradient(s, u, g, o->eps, o->lambda, vo));
            rs.ran = true;
        });
    }
    for (const char* name : {"min", "weak"}) {
        auto o = std::make_shared<MinOpts>();
        bool weak = std::string(name) == "weak";
        auto* cmd = sub(grad_cmd, name,
                        weak ? "minimal p-weak upper gradient" : "minimal upper gradient");
        cmd->add_option("--space", o->space)->required();
        cmd->add_option("--u", o->u, "function field file")->required();
        cmd->add_option("--eps", o->eps)->required();
        cmd->add_option("--p", o->p);
        cmd->add_option("--lambda", o->lambda);
        cmd->add_flag("--one-sided", o->one_sided);
        cmd->add_option("--save-gradient", o->save_gradient, "write the solution field here");
        cmd->callback([&, o, weak] {
            rs.command = weak ? "gradient weak" : "gradient min";
            rs.params = {{"space", o->space}, {"u", o->u},     {"eps", o->eps},
                         {"p", o->p},         {"lambda", o->lambda},
                         {"one_sided", o->one_sided}};
            if (!o->save_gradient.empty()) rs.params["save_gradient"] = o->save_gradient;
            record_global(rs.params);
            cc::PointCloudSpace s = input_space("space", o->space);
            cc::ScalarField u = input_field("u", o->u);
            cc::GradientOptions go;
            go.one_sided = o->one_sided;
            go.solve = solve_options();
            cc::GradientReport rep =
                weak ? cc::minimal_weak_gradient(s, u, o->eps, o->p, o->lambda, go)
                     : cc::minimal_gradient(s, u, o->eps, o->p, o->lambda, go);
            Json r = gradient_json(rep);
            if (!o->save_gradient.empty())
                r["saved_gradient"] = save_field_file(
                    cc::make_field(rep.gradient, cc::FieldRole::gradient), o->save_gradient);
            rs.result = std::move(r);
            rs.ran = true;
        });
    }
    {
        auto o = std::make_shared<LadderOpts>();
        auto* cmd = sub(grad_cmd, "ladder", "minimal energies down a decreasing eps list");
        cmd->add_option("--space", o->space)->required();
        cmd->add_option("--u", o->u)->required();
        cmd->add_option("--eps-list", o->eps_list, "comma-separated, strictly decreasing")
            ->required();
        cmd->add_option("--p", o->p);
        cmd->add_option("--lambda", o->lambda);
        cmd->add_flag("--one-sided", o->one_sided);
        cmd->add_flag("--weak", o->weak);
        cmd->callback([&, o] {
            rs.command = "gradient ladder";
            rs.params = {{"space", o->space}, {"u", o->u},
                         {"eps_list", o->eps_list}, {"p", o->p},
                         {"lambda", o->lambda}, {"one_sided", o->one_sided},
                         {"weak", o->weak}};
            record_global(rs.params);
            cc::PointCloudSpace s = input_space("space", o->space);
            cc::ScalarField u = input_field("u", o->u);
            cc::GradientOptions go;
            go.weak = o->weak;
            go.one_sided = o->one_sided;
            go.solve = solve_options();
            auto rungs = cc::energy_ladder(s, u, parse_double_list(o->eps_list, "eps list"),
                                           o->p, o->lambda, go);
            Json arr = Json::array();
            std::vector<std::pair<double, double>> profile;
            for (const cc::LadderRung& rung : rungs) {
                arr.push_back({{"eps", cc::encode_number(rung.eps)},
                               {"objective", cc::encode_number(rung.objective)},
                               {"status", rung.status}});
                profile.emplace_back(rung.eps, rung.objective);
            }
            rs.result["rungs"] = std::move(arr);
            if (*csv_opt) rs.result["csv"] = write_profile(profile);
            rs.ran = true;
        });
    }

    // --- modulus / keith ---
    {
        auto o = std::make_shared<ModulusOpts>();
        auto* cmd = sub(&app, "modulus", "(eps,p)-modulus of a chain family");
        cmd->add_option("--space", o->space)->required();
        cmd->add_option("--family", o->family, "connect:x,y | hit:ids[:rule] | file:path")
            ->required();
        cmd->add_option("--eps", o->eps)->required();
        cmd->add_option("--p", o->p);
        cmd->add_option("--lambda", o->lambda);
        cmd->add_option("--measure", o->measure, "default | riesz:x,y,L | file:path");
        cmd->add_option("--class", o->cls, "all | finite:x,y | lip[:K]");
        cmd->add_option("--max-rounds", o->max_rounds);
        cmd->add_flag("--check-exceptional", o->check_exceptional,
                      "also test for a vanishing modulus with certificate");
        cmd->callback([&, o] {
            rs.command = "modulus";
            rs.params = {{"space", o->space},   {"family", o->family}, {"eps", o->eps},
                         {"p", o->p},           {"lambda", o->lambda},
                         {"measure", o->measure}, {"class", o->cls},
                         {"max_rounds", o->max_rounds},
                         {"check_exceptional", o->check_exceptional}};
            record_global(rs.params);
            cc::PointCloudSpace s = input_space("space", o->space);
            cc::ChainFamily family = parse_family(s, o->family, o->eps);
            cc::FunctionClass cls = parse_class(s, o->cls);
            std::vector<double> measure = parse_measure(s, o->measure);
            cc::ModulusOptions mo;
            mo.solve = solve_options();
            mo.max_rounds = o->max_rounds;
            Json r = modulus_json(
                cc::chain_modulus(s, family, o->p, measure, cls, o->lambda, mo));
            if (o->check_exceptional) {
                cc::ExceptionalReport ex =
                    cc::is_weak_exceptional(s, family, o->eps, o->p, o->lambda);
                r["exceptional"] = {{"exceptional", ex.exceptional},
                                    {"modulus", cc::encode_number(ex.modulus)},
                                    {"certified", ex.certified},
                                    {"certificate", cc::encode_vector(ex.certificate)},
                                    {"note", ex.note}};
            }
            rs.result = std::move(r);
            rs.ran = true;
        });
    }
    {
        auto o = std::make_shared<KeithOpts>();
        auto* cmd = sub(&app, "keith", "connecting modulus against the two-pole kernel, per scale");
        cmd->add_option("--space", o->space)->required();
        cmd->add_option("--x", o->x)->required();
        cmd->add_option("--y", o->y)->required();
        cmd->add_option("--truncation", o->truncation, "kernel cutoff factor L");
        cmd->add_option("--p", o->p);
        cmd->add_option("--eps-list", o->eps_list)->required();
        cmd->add_option("--class", o->cls);
        cmd->add_option("--lambda", o->lambda);
        cmd->callback([&, o] {
            rs.command = "keith";
            rs.params = {{"space", o->space}, {"x", o->x},
                         {"y", o->y},         {"truncation", o->truncation},
                         {"p", o->p},         {"eps_list", o->eps_list},
                         {"class", o->cls},   {"lambda", o->lambda}};
            record_global(rs.params);
            cc::PointCloudSpace s = input_space("space", o->space);
            cc::ModulusOptions mo;
            mo.solve = solve_options();
            auto rungs = cc::keith_modulus_ladder(
                s, s.resolve(o->x), s.resolve(o->y), o->truncation, o->p,
                parse_double_list(o->eps_list, "eps list"), parse_class(s, o->cls),
                o->lambda, mo);
            Json arr = Json::array();
            std::vector<std::pair<double, double>> profile;
            for (const cc::KeithRung& rung : rungs) {
                arr.push_back({{"eps", cc::encode_number(rung.eps)},
                               {"modulus", cc::encode_number(rung.modulus)},
                               {"status", rung.status}});
                profile.emplace_back(rung.eps, rung.modulus);
            }
            rs.result["rungs"] = std::move(arr);
            if (*csv_opt) rs.result["csv"] = write_profile(profile);
            rs.ran = true;
        });
    }

    // --- poincare ---
    auto* poin_cmd = sub(&app, "poincare", "Poincare-inequality diagnostics");
    poin_cmd->require_subcommand(1);
    {
        auto o = std::make_shared<RieszOpts>();
        auto* cmd = sub(poin_cmd, "riesz", "truncated two-pole kernel weights");
        cmd->add_option("--space", o->space)->required();
        cmd->add_option("--x", o->x)->required();
        cmd->add_option("--y", o->y)->required();
        cmd->add_option("--truncation", o->truncation);
        cmd->add_option("--save-weights", o->save_weights,
                        "write the weights as a density field");
        cmd->callback([&, o] {
            rs.command = "poincare riesz";
            rs.params = {{"space", o->space},
                         {"x", o->x},
                         {"y", o->y},
                         {"truncation", o->truncation}};
            if (!o->save_weights.empty()) rs.params["save_weights"] = o->save_weights;
            record_global(rs.params);
            cc::PointCloudSpace s = input_space("space", o->space);
            cc::RieszWeights w =
                cc::riesz_weights(s, s.resolve(o->x), s.resolve(o->y), o->truncation);
            Json r = {{"x", w.x},
                      {"y", w.y},
                      {"truncation", w.truncation},
                      {"total", cc::encode_number(w.total)},
                      {"weights", cc::encode_vector(w.weights)}};
            if (!o->save_weights.empty())
                r["saved_weights"] = save_field_file(
                    cc::make_field(w.weights, cc::FieldRole::density), o->save_weights);
            rs.result = std::move(r);
            rs.ran = true;
        });
    }
    {
        auto o = std::make_shared<BallOpts>();
        auto* cmd = sub(poin_cmd, "ball", "two-sided ball Poincare audit");
        cmd->add_option("--space", o->space)->required();
        cmd->add_option("--u", o->u)->required();
        cmd->add_option("--g", o->g)->required();
        cmd->add_option("--p", o->p);
        cmd->add_option("--dilation", o->dilation);
        cmd->add_option("--radii", o->radii, "comma-separated; default: distance scales");
        cmd->callback([&, o] {
            rs.command = "poincare ball";
            rs.params = {{"space", o->space},
                         {"u", o->u},
                         {"g", o->g},
                         {"p", o->p},
                         {"dilation", o->dilation}};
            if (!o->radii.empty()) rs.params["radii"] = o->radii;
            record_global(rs.params);
            cc::PointCloudSpace s = input_space("space", o->space);
            cc::ScalarField u = input_field("u", o->u), g = input_field("g", o->g);
            std::vector<double> radii;
            if (!o->radii.empty()) radii = parse_double_list(o->radii, "radii");
            cc::BallAudit audit = cc::ball_pi_audit(s, u, g, o->p, o->dilation, radii);
            Json r;
            r["worst_constant"] = cc::encode_number(audit.worst_constant);
            r["unbounded"] = audit.unbounded;
            r["skipped"] = audit.skipped;
            r["cases_checked"] = audit.cases.size();
            if (audit.worst_case >= 0)
                r["worst_case"] = ball_case_json(audit.cases[audit.worst_case]);
            if (audit.unbounded_case >= 0)
                r["unbounded_case"] = ball_case_json(audit.cases[audit.unbounded_case]);
            rs.result = std::move(r);
            rs.ran = true;
        });
    }
    {
        auto o = std::make_shared<PointwiseOpts>();
        auto* cmd = sub(poin_cmd, "pointwise", "two-point estimate via constrained search");
        cmd->add_option("--space", o->space)->required();
        cmd->add_option("--x", o->x)->required();
        cmd->add_option("--y", o->y)->required();
        cmd->add_option("--g", o->g)->required();
        cmd->add_option("--p", o->p);
        cmd->add_option("--C", o->C, "length budget factor");
        cmd->add_option("--truncation", o->truncation);
        cmd->add_option("--lambda", o->lambda);
        auto* eps_opt = cmd->add_option("--eps", o->eps, "override the joining scale");
        cmd->callback([&, o, eps_opt] {
            rs.command = "poincare pointwise";
            rs.params = {{"space", o->space}, {"x", o->x},
                         {"y", o->y},         {"g", o->g},
                         {"p", o->p},         {"C", o->C},
                         {"truncation", o->truncation}, {"lambda", o->lambda}};
            if (*eps_opt) rs.params["eps"] = o->eps;
            record_global(rs.params);
            cc::PointCloudSpace s = input_space("space", o->space);
            cc::ScalarField g = input_field("g", o->g);
            cc::PointwiseOptions po;
            po.time_budget_ms = time_budget_ms;
            if (*eps_opt) po.eps = o->eps;
            cc::PointwiseReport rep =
                cc::pointwise_pi_check(s, s.resolve(o->x), s.resolve(o->y), g, o->p, o->C,
                                       o->truncation, o->lambda, po);
            rs.result = {{"eps", cc::encode_number(rep.eps)},
                         {"length_budget", cc::encode_number(rep.length_budget)},
                         {"lhs", cc::encode_number(rep.lhs)},
                         {"rhs", cc::encode_number(rep.rhs)},
                         {"satisfied", rep.satisfied},
                         {"witness", rep.witness},
                         {"lower_bound_only", rep.lower_bound_only}};
            rs.ran = true;
        });
    }
    {
        auto o = std::make_shared<WidthOpts>();
        auto* cmd = sub(poin_cmd, "width", "chain width of a set between two points");
        cmd->add_option("--space", o->space)->required();
        cmd->add_option("--x", o->x)->required();
        cmd->add_option("--y", o->y)->required();
        cmd->add_option("--set", o->set, "point ids of the set to cross")->required();
        cmd->add_option("--eps", o->eps)->required();
        cmd->callback([&, o] {
            rs.command = "poincare width";
            rs.params = {{"space", o->space},
                         {"x", o->x},
                         {"y", o->y},
                         {"set", o->set},
                         {"eps", o->eps}};
            record_global(rs.params);
            cc::PointCloudSpace s = input_space("space", o->space);
            double w = cc::chain_width(s, s.resolve(o->x), s.resolve(o->y),
                                       resolve_ids(s, o->set, "set"), o->eps);
            rs.result = {{"width", cc::encode_number(w)}};
            rs.ran = true;
        });
    }
    {
        auto o = std::make_shared<MinkowskiOpts>();
        auto* cmd = sub(poin_cmd, "minkowski", "shell profile of a set");
        cmd->add_option("--space", o->space)->required();
        cmd->add_option("--set", o->set)->required();
        cmd->add_option("--measure", o->measure, "default | riesz:x,y,L | file:path");
        cmd->add_option("--radii", o->radii, "comma-separated; default: distance scales");
        cmd->callback([&, o] {
            rs.command = "poincare minkowski";
            rs.params = {{"space", o->space}, {"set", o->set}, {"measure", o->measure}};
            if (!o->radii.empty()) rs.params["radii"] = o->radii;
            record_global(rs.params);
            cc::PointCloudSpace s = input_space("space", o->space);
            std::vector<double> radii = o->radii.empty()
                                            ? cc::distance_scales(s)
                                            : parse_double_list(o->radii, "radii");
            cc::MinkowskiProfile prof = cc::minkowski_profile(
                s, resolve_ids(s, o->set, "set"), parse_measure(s, o->measure), radii);
            Json arr = Json::array();
            std::vector<std::pair<double, double>> profile;
            for (const cc::ShellEntry& e : prof.entries) {
                arr.push_back({{"r", cc::encode_number(e.r)},
                               {"shell_measure", cc::encode_number(e.shell_measure)},
                               {"value", cc::encode_number(e.value)}});
                profile.emplace_back(e.r, e.value);
            }
            rs.result = {{"minimum", cc::encode_number(prof.minimum)},
                         {"argmin", prof.argmin},
                         {"entries", std::move(arr)}};
            if (*csv_opt) rs.result["csv"] = write_profile(profile);
            rs.ran = true;
        });
    }
    {
        auto o = std::make_shared<BmcOpts>();
        auto* cmd = sub(poin_cmd, "bmc", "separating-set shell audit between two poles");
        cmd->add_option("--space", o->space)->required();
        cmd->add_option("--x", o->x)->required();
        cmd->add_option("--y", o->y)->required();
        cmd->add_option("--truncation", o->truncation);
        cmd->add_option("--eps", o->eps)->required();
        cmd->add_option("--candidates", o->candidates,
                        "separating sets: ids joined by ';', sets joined by '|'")
            ->required();
        cmd->add_option("--radii", o->radii);
        cmd->callback([&, o] {
            rs.command = "poincare bmc";
            rs.params = {{"space", o->space},   {"x", o->x},
                         {"y", o->y},           {"truncation", o->truncation},
                         {"eps", o->eps},       {"candidates", o->candidates}};
            if (!o->radii.empty()) rs.params["radii"] = o->radii;
            record_global(rs.params);
            cc::PointCloudSpace s = input_space("space", o->space);
            std::vector<std::vector<int>> candidates;
            for (const std::string& part : split_tokens(o->candidates, "|"))
                candidates.push_back(resolve_ids(s, part, "candidates"));
            if (candidates.empty()) cc::fail("ConfigParse", "candidates: empty list");
            std::vector<double> radii;
            if (!o->radii.empty()) radii = parse_double_list(o->radii, "radii");
            cc::BmcAudit audit = cc::bmc_audit(s, s.resolve(o->x), s.resolve(o->y),
                                               o->truncation, candidates, o->eps, radii);
            Json cands = Json::array();
            for (const cc::BmcCandidate& cand : audit.candidates) {
                Json shells = Json::array();
                for (const cc::BmcShell& sh : cand.shells)
                    shells.push_back({{"r", cc::encode_number(sh.r)},
                                      {"shell_measure", cc::encode_number(sh.shell_measure)},
                                      {"width", cc::encode_number(sh.width)},
                                      {"ratio", cc::encode_number(sh.ratio)},
                                      {"zero_measure", sh.zero_measure}});
                cands.push_back({{"separating_set", cand.separating_set},
                                 {"profile_min", cc::encode_number(cand.profile_min)},
                                 {"shells", std::move(shells)}});
            }
            rs.result = {{"worst_lower", cc::encode_number(audit.worst_lower)},
                         {"worst_lower_candidate", audit.worst_lower_candidate},
                         {"worst_upper", cc::encode_number(audit.worst_upper)},
                         {"worst_upper_candidate", audit.worst_upper_candidate},
                         {"zero_measure_shells", audit.zero_measure_shells},
                         {"candidates", std::move(cands)}};
            rs.ran = true;
        });
    }

    // --- potential / leibniz / eb / riemann ---
    {
        auto o = std::make_shared<PotentialOpts>();
        auto* cmd = sub(&app, "potential", "chain potential from seed values");
        cmd->add_option("--space", o->space)->required();
        cmd->add_option("--seeds", o->seeds, "seed point ids")->required();
        cmd->add_option("--values", o->values, "seed values, aligned with --seeds")->required();
        cmd->add_option("--g", o->g, "gradient field file")->required();
        cmd->add_option("--eps", o->eps)->required();
        cmd->add_option("--lambda", o->lambda);
        auto* cap_opt = cmd->add_option("--cap", o->cap, "truncation level M");
        cmd->add_flag("--check", o->check, "verify g against the returned potential");
        cmd->add_option("--save", o->save, "write the potential as a function field");
        cmd->callback([&, o, cap_opt] {
            rs.command = "potential";
            rs.params = {{"space", o->space}, {"seeds", o->seeds},
                         {"values", o->values}, {"g", o->g},
                         {"eps", o->eps},     {"lambda", o->lambda},
                         {"check", o->check}};
            if (*cap_opt) rs.params["cap"] = o->cap;
            if (!o->save.empty()) rs.params["save"] = o->save;
            record_global(rs.params);
            cc::PointCloudSpace s = input_space("space", o->space);
            cc::PotentialSpec spec;
            spec.seeds = resolve_ids(s, o->seeds, "seeds");
            spec.seed_values = parse_double_list(o->values, "seed values");
            spec.g = input_field("g", o->g);
            spec.eps = o->eps;
            spec.lambda = o->lambda;
            if (*cap_opt) spec.cap = o->cap;
            Json r;
            cc::PotentialResult pot;
            if (o->check) {
                cc::PotentialCheck chk = cc::potential_gradient_check(s, spec);
                pot = std::move(chk.potential);
                r["check"] = {{"ok", chk.verdict.ok},
                              {"pairs_checked", chk.verdict.pairs_checked},
                              {"worst_deficit", cc::encode_number(chk.verdict.worst_deficit)},
                              {"one_sided", chk.one_sided}};
            } else {
                pot = cc::chain_potential(s, spec);
            }
            r["u"] = cc::encode_vector(pot.u.values);
            r["unreachable"] = pot.unreachable;
            if (!o->save.empty()) {
                bool finite = true;
                for (double v : pot.u.values)
                    if (!std::isfinite(v)) finite = false;
                if (!finite)
                    cc::fail("NoChainWithinBudget",
                             "the potential is infinite at " +
                                 std::to_string(pot.unreachable) +
                                 " points and cannot be saved as a function field");
                r["saved"] = save_field_file(pot.u, o->save);
            }
            rs.result = std::move(r);
            rs.ran = true;
        });
    }
    {
        auto o = std::make_shared<LeibnizOpts>();
        auto* cmd = sub(&app, "leibniz", "product-rule upper gradient for u*phi");
        cmd->add_option("--space", o->space)->required();
        cmd->add_option("--u", o->u)->required();
        cmd->add_option("--g", o->g, "an upper gradient of u")->required();
        cmd->add_option("--phi", o->phi)->required();
        cmd->add_option("--eps", o->eps)->required();
        cmd->add_option("--save", o->save, "write the product field here");
        cmd->callback([&, o] {
            rs.command = "leibniz";
            rs.params = {{"space", o->space},
                         {"u", o->u},
                         {"g", o->g},
                         {"phi", o->phi},
                         {"eps", o->eps}};
            if (!o->save.empty()) rs.params["save"] = o->save;
            record_global(rs.params);
            cc::PointCloudSpace s = input_space("space", o->space);
            cc::ScalarField field = cc::leibniz_gradient(s, input_field("u", o->u),
                                                         input_field("g", o->g),
                                                         input_field("phi", o->phi), o->eps);
            Json r = {{"values", cc::encode_vector(field.values)}};
            if (!o->save.empty()) r["saved"] = save_field_file(field, o->save);
            rs.result = std::move(r);
            rs.ran = true;
        });
    }
    {
        auto o = std::make_shared<EbOpts>();
        auto* cmd = sub(&app, "eb-pipeline", "potential/gradient reconstruction on refining grids");
        cmd->add_option("--n", o->n, "grid sizes, e.g. 64,256,1024")->required();
        cmd->add_option("--u", o->u, "expression in x for the sampled function")->required();
        cmd->add_option("--g", o->g, "expression in x for the sampled gradient")->required();
        cmd->add_option("--p", o->p);
        cmd->add_option("--eps-factor", o->eps_factor, "eps = factor/n");
        cmd->add_option("--seeds", o->seeds)->check(CLI::IsMember({"all", "boundary"}));
        cmd->callback([&, o] {
            rs.command = "eb-pipeline";
            rs.params = {{"n", o->n},   {"u", o->u},
                         {"g", o->g},   {"p", o->p},
                         {"eps_factor", o->eps_factor}, {"seeds", o->seeds}};
            record_global(rs.params);
            cc::Expression fu = cc::Expression::parse(o->u);
            cc::Expression fg = cc::Expression::parse(o->g);
            if (fu.arity() > 1 || fg.arity() > 1)
                cc::fail("ConfigParse", "eb-pipeline expressions must use a single variable");
            cc::EbReport rep = cc::eb_pipeline(
                parse_int_list(o->n, "grid sizes"),
                [&fu](double x) { return fu.eval1(x); },
                [&fg](double x) { return fg.eval1(x); }, o->p, o->eps_factor,
                o->seeds == "all" ? cc::EbSeeds::all : cc::EbSeeds::boundary);
            Json arr = Json::array();
            std::vector<std::pair<double, double>> profile;
            for (const cc::EbEntry& e : rep.entries) {
                arr.push_back({{"n", e.n},
                               {"eps", cc::encode_number(e.eps)},
                               {"err_u", cc::encode_number(e.err_u)},
                               {"err_g", cc::encode_number(e.err_g)},
                               {"status", e.status}});
                profile.emplace_back(static_cast<double>(e.n), e.err_u);
            }
            rs.result = {{"p", rep.p},
                         {"seeds", o->seeds},
                         {"entries", std::move(arr)}};
            if (*csv_opt) rs.result["csv"] = write_profile(profile);
            rs.ran = true;
        });
    }
    {
        auto o = std::make_shared<RiemannOpts>();
        auto* cmd = sub(&app, "riemann", "endpoint-weighted Riemann sum of an expression");
        cmd->add_option("--f", o->f, "expression in one variable")->required();
        cmd->add_option("--ell", o->ell, "interval length");
        cmd->add_option("--t", o->t, "panel offset in [0,1)");
        cmd->add_option("--n", o->n, "panel count")->required();
        cmd->add_option("--lambda", o->lambda);
        cmd->callback([&, o] {
            rs.command = "riemann";
            rs.params = {{"f", o->f},
                         {"ell", o->ell},
                         {"t", o->t},
                         {"n", o->n},
                         {"lambda", o->lambda}};
            record_global(rs.params);
            cc::Expression f = cc::Expression::parse(o->f);
            if (f.arity() > 1)
                cc::fail("ConfigParse", "riemann expression must use a single variable");
            double value = cc::riemann_sum([&f](double s) { return f.eval1(s); }, o->ell,
                                           o->t, o->n, o->lambda);
            rs.result = {{"value", cc::encode_number(value)}};
            rs.ran = true;
        });
    }
    {
        auto o = std::make_shared<FixturesOpts>();
        auto* cmd = sub(&app, "fixtures", "write the bundled example spaces and manifest");
        cmd->add_option("--dir", o->dir, "output directory");
        cmd->add_flag("--list", o->list, "enumerate without writing files");
        cmd->callback([&, o] {
            rs.command = "fixtures";
            rs.params = {{"dir", o->dir}, {"list", o->list}};
            record_global(rs.params);
            rs.result = build_fixtures(o->dir, o->list, rs.inputs);
            rs.ran = true;
        });
    }
    {
        auto o = std::make_shared<RunCfgOpts>();
        auto* cmd = sub(&app, "run", "re-execute a saved result or config file");
        cmd->add_option("--config", o->config, "result JSON from an earlier run")->required();
        cmd->callback([&, o, nested] {
            rs.command = "run";
            if (nested)
                cc::fail("ConfigParse", "config files cannot chain into further run commands");
            std::string text = cc::read_text_file(o->config);
            Json doc = cc::parse_json(text, "config file " + o->config);
            if (!doc.is_object() || !doc.contains("command") || !doc["command"].is_string())
                cc::fail("ConfigParse", "config file " + o->config + ": missing \"command\"");
            for (const auto& item : doc.items()) {
                const std::string& key = item.key();
                if (key != "schema" && key != "kind" && key != "command" &&
                    key != "parameters" && key != "inputs" && key != "result" &&
                    key != "runtime_ms")
                    cc::fail("ConfigParse",
                             "config file " + o->config + ": unknown key \"" + key + "\"");
            }
            std::vector<std::string> rebuilt;
            std::istringstream words(doc["command"].get<std::string>());
            std::string word;
            while (words >> word) rebuilt.push_back(word);
            if (doc.contains("parameters")) {
                if (!doc["parameters"].is_object())
                    cc::fail("ConfigParse", "config parameters must be an object");
                for (const auto& item : doc["parameters"].items()) {
                    std::string flag = "--" + item.key();
                    std::replace(flag.begin(), flag.end(), '_', '-');
                    const Json& v = item.value();
                    if (v.is_boolean()) {
                        if (v.get<bool>()) rebuilt.push_back(flag);
                    } else if (v.is_string()) {
                        rebuilt.push_back(flag);
                        rebuilt.push_back(v.get<std::string>());
                    } else if (v.is_number()) {
                        rebuilt.push_back(flag);
                        rebuilt.push_back(v.dump());
                    } else {
                        cc::fail("ConfigParse", "config parameter \"" + item.key() +
                                                    "\" must be a scalar");
                    }
                }
            }
            delegated_exit = run_cli(std::move(rebuilt), true);
        });
    }

    auto t0 = std::chrono::steady_clock::now();
    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
        if (delegated_exit >= 0) return delegated_exit;
        if (!rs.ran) {
            std::cout << cc::error_envelope("cli", "ConfigParse", "no command given").dump(2)
                      << "\n";
            return 2;
        }
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        Json env = cc::result_envelope(rs.command, rs.params, rs.inputs, rs.result, ms);
        std::string text = env.dump(2) + "\n";
        if (*out_opt)
            cc::write_text_file(out_path, text);
        else
            std::cout << text;
        return 0;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cout << cc::error_envelope(rs.command.empty() ? "cli" : rs.command,
                                        "ConfigParse", e.what())
                         .dump(2)
                  << "\n";
        return 2;
    } catch (const cc::Error& e) {
        std::cout << cc::error_envelope(rs.command.empty() ? "cli" : rs.command, e.code(),
                                        e.what())
                         .dump(2)
                  << "\n";
        return (e.code() == "ConfigParse" || e.code() == "MissingInput") ? 2 : 1;
    } catch (const std::exception& e) {
        std::cout << cc::error_envelope(rs.command.empty() ? "cli" : rs.command, "Internal",
                                        e.what())
                         .dump(2)
                  << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(std::move(args), false);
}
