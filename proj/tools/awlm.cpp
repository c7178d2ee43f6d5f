// Command-line front end: simulate | identify | estimate | falsify | axioms.
// Reports are JSON on stdout (or --output); exit codes: 0 ok, 2 validation
// failure, 3 model falsified, 4 degenerate or under-identified.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "awlm/axioms.hpp"
#include "awlm/gmm.hpp"
#include "awlm/ident.hpp"
#include "awlm/io.hpp"
#include "awlm/model.hpp"
#include "awlm/numeric.hpp"
#include "awlm/sim.hpp"

using json = nlohmann::json;
using namespace awlm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitFalsified = 3;
constexpr int kExitDegenerate = 4;

bool log_enabled() {
    const char* v = std::getenv("AWLM_LOG");
    return v != nullptr && std::string(v) != "" && std::string(v) != "off";
}

void log_line(const std::string& msg) {
    if (log_enabled()) std::cerr << "[awlm] " << msg << "\n";
}

json label_map(const Universe& universe, const IndexSet& S, const std::vector<double>& values) {
    json out = json::object();
    for (size_t i = 0; i < S.size(); ++i) out[universe.label(S[i])] = values[i];
    return out;
}

json report_skeleton(const std::string& command, const std::string& inputs_digest) {
    json r;
    r["schema_version"] = 1;
    r["command"] = command;
    r["inputs_digest"] = inputs_digest;
    r["config"] = json::object();
    r["results"] = json::object();
    r["diagnostics"] = json::object();
    r["warnings"] = json::array();
    return r;
}

void emit_report(const json& report, const std::string& output_path) {
    const std::string text = report.dump(2) + "\n";
    if (output_path.empty()) {
        std::cout << text;
    } else {
        io::write_text_file(output_path, text);
    }
}

// Inline JSON object or a path to one.
std::map<std::string, double> parse_weight_map(const std::string& spec) {
    std::string text = spec;
    if (!spec.empty() && spec.front() != '{') text = io::read_text_file(spec);
    try {
        return json::parse(text).get<std::map<std::string, double>>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("cannot parse the weight map: ") + e.what());
    }
}

io::DatasetFile load_input(const std::string& input_path, const std::string& counts_csv) {
    io::DatasetFile dataset = io::load_dataset_file(input_path);
    if (!counts_csv.empty()) {
        io::apply_counts_csv(dataset, io::read_text_file(counts_csv));
    }
    return dataset;
}

struct Observations {
    std::vector<ident::Regime> regimes; // exposure + choice distribution
    std::vector<std::int64_t> ns;
    bool any_counts = false;
    bool any_probabilities = false;
};

Observations to_observations(const io::BoundDataset& bound) {
    Observations out;
    const IndexSet& S = bound.menu.feasible();
    for (const auto& r : bound.regimes) {
        out.regimes.push_back({r.exposure, Dist(S, r.shares())});
        out.ns.push_back(r.effective_n());
        out.any_counts = out.any_counts || r.counts.has_value();
        out.any_probabilities = out.any_probabilities || r.probabilities.has_value();
    }
    return out;
}

// 3 * sqrt(2 * max multinomial variance / n): the scale of a difference of
// two noisy shares. Exact-probability datasets get a tight default.
double default_tolerance(const Observations& obs, const IndexSet& S) {
    (void)S;
    double tol = 1e-9;
    for (size_t i = 0; i < obs.regimes.size(); ++i) {
        if (!obs.any_counts) continue;
        const auto& shares = obs.regimes[i].P.masses();
        double worst = 0.0;
        for (double p : shares) worst = std::max(worst, p * (1.0 - p));
        tol = std::max(tol, 3.0 * std::sqrt(2.0 * worst / static_cast<double>(obs.ns[i])));
    }
    return tol;
}

gmm::GmmDataset to_gmm_dataset(const io::BoundDataset& bound) {
    const IndexSet& S = bound.menu.feasible();
    std::vector<gmm::RegimeData> regimes;
    for (const auto& r : bound.regimes) {
        regimes.push_back({r.exposure.restrict_to(S), r.shares(), r.effective_n()});
    }
    return {bound.menu, std::move(regimes)};
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& design_path, const std::string& output_path,
                 const std::string& report_path, double alpha, const std::string& weights_spec,
                 std::uint64_t seed, std::int64_t n_override, const std::string& rule_name,
                 double retry_prob) {
    const std::string design_text = io::read_text_file(design_path);
    io::DatasetFile design = io::parse_dataset(design_text);
    const io::BoundDataset bound = io::bind_design(design);

    const auto weight_map = parse_weight_map(weights_spec);
    std::vector<double> weights(static_cast<size_t>(bound.universe.size()), 0.0);
    for (const auto& [label, w] : weight_map) {
        weights[static_cast<size_t>(bound.universe.index_of(label))] = w;
    }
    // alpha = 0 means uninfluenced sampling; the smallest positive double is
    // distributionally identical (1 - eps rounds to 1) and keeps the model
    // parameters interior.
    double alpha_eff = alpha;
    if (alpha == 0.0) alpha_eff = std::numeric_limits<double>::min();
    const ModelParams params(alpha_eff, LuceWeights(weights));

    sim::FailureRule rule = sim::FailureRule::persist;
    if (rule_name == "revert") rule = sim::FailureRule::revert;
    else if (rule_name == "retry") rule = sim::FailureRule::retry;
    else if (rule_name != "persist") throw ValidationError("unknown failure rule: " + rule_name);

    if (n_override >= 0 && n_override < 1) {
        throw ValidationError("simulate: --n must be a positive draw count");
    }
    std::vector<sim::RegimeSpec> specs;
    for (const auto& r : bound.regimes) {
        const std::int64_t n = n_override > 0 ? n_override : r.n.value_or(0);
        if (n < 1) {
            throw ValidationError("simulate: every regime needs n (from the design file or --n)");
        }
        specs.push_back({bound.menu, r.exposure, n, rule, retry_prob});
    }
    log_line("simulating " + std::to_string(specs.size()) + " regimes");
    const sim::Dataset data = sim::simulate_dataset(params, specs, seed);

    const IndexSet& S = bound.menu.feasible();
    io::DatasetFile out_file = design;
    for (size_t i = 0; i < out_file.regimes.size(); ++i) {
        std::map<std::string, std::int64_t> counts;
        for (size_t c = 0; c < S.size(); ++c) {
            counts[bound.universe.label(S[c])] = data.counts[i].counts[c];
        }
        out_file.regimes[i].counts = std::move(counts);
        out_file.regimes[i].probabilities.reset();
        out_file.regimes[i].n = data.counts[i].total;
    }
    io::save_dataset_file(out_file, output_path);

    json report = report_skeleton("simulate", fnv1a_hex(design_text));
    report["config"] = {{"alpha", alpha},
                        {"weights", weight_map},
                        {"seed", seed},
                        {"rule", rule_name},
                        {"retry_prob", retry_prob},
                        {"n_override", n_override}};
    report["results"]["output"] = output_path;
    report["results"]["regimes"] = json::array();
    for (size_t i = 0; i < data.counts.size(); ++i) {
        json jr;
        jr["n"] = data.counts[i].total;
        jr["counts"] = json::object();
        for (size_t c = 0; c < S.size(); ++c) {
            jr["counts"][bound.universe.label(S[c])] = data.counts[i].counts[c];
        }
        jr["mean_attempts"] = static_cast<double>(data.counts[i].total_attempts) /
                              static_cast<double>(data.counts[i].total);
        report["results"]["regimes"].push_back(std::move(jr));
    }
    emit_report(report, report_path);
    return kExitOk;
}

// ---------------------------------------------------------------- identify

int cmd_identify(const std::string& input_path, const std::string& counts_csv,
                 const std::string& output_path, double tol_override) {
    const io::DatasetFile dataset = load_input(input_path, counts_csv);
    const io::BoundDataset bound = io::bind_dataset(dataset);
    const Observations obs = to_observations(bound);
    const IndexSet& S = bound.menu.feasible();
    if (obs.regimes.size() < 2) {
        throw ValidationError("identify needs at least two regimes");
    }
    const double tol = tol_override > 0 ? tol_override : default_tolerance(obs, S);

    json report = report_skeleton("identify", fnv1a_hex(io::serialize_dataset(dataset)));
    report["config"]["tol"] = tol;
    if (obs.any_counts) {
        report["warnings"].push_back(
            "counts converted to shares; estimates carry sampling noise");
    }

    json pair_reports = json::array();
    std::vector<ident::DeltaA> das;
    int informative_pairs = 0;
    for (size_t i = 0; i < obs.regimes.size(); ++i) {
        for (size_t j = i + 1; j < obs.regimes.size(); ++j) {
            const ident::ExposurePair pair(bound.menu, obs.regimes[i].q, obs.regimes[j].q,
                                           obs.regimes[i].P, obs.regimes[j].P);
            das.push_back(ident::delta_and_A(pair));
            json jp;
            jp["pair"] = {i, j};
            try {
                const auto r = ident::recover_alpha_pair(pair, tol);
                jp["degenerate"] = r.degenerate;
                if (r.alpha) jp["alpha"] = *r.alpha;
                jp["out_of_class"] = r.out_of_class;
                json ratios = json::array();
                for (const auto& ratio : r.coordinate_ratios) {
                    ratios.push_back(ratio ? json(*ratio) : json());
                }
                jp["coordinate_ratios"] = std::move(ratios);
                if (!r.degenerate) ++informative_pairs;
            } catch (const ModelViolationError& e) {
                jp["inconsistent"] = true;
                jp["error"] = e.what();
            }
            pair_reports.push_back(std::move(jp));
        }
    }
    report["results"]["pairs"] = std::move(pair_reports);

    const auto rat = ident::rationalizability_check(obs.regimes, S, tol);
    report["results"]["rationalizable"] = rat.rationalizable;
    report["results"]["underdetermined"] = rat.underdetermined;
    report["diagnostics"]["violations"] = rat.violations;

    if (informative_pairs == 0) {
        report["results"]["degenerate"] = true;
        emit_report(report, output_path);
        return kExitDegenerate;
    }
    report["results"]["degenerate"] = false;

    const double alpha_hat = ident::ls_alpha(das);
    report["results"]["alpha"] = alpha_hat;
    if (alpha_hat > 0.0 && alpha_hat < 1.0) {
        const auto fit = ident::ls_p0(alpha_hat, obs.regimes, S);
        report["results"]["p0"] = label_map(bound.universe, S, fit.p0.masses());
        report["results"]["p0_projected"] = fit.projected;
    } else {
        report["warnings"].push_back("pooled alpha falls outside (0,1); p0 not recovered");
    }
    emit_report(report, output_path);
    return kExitOk;
}

// ---------------------------------------------------------------- estimate

int cmd_estimate(const std::string& input_path, const std::string& counts_csv,
                 const std::string& output_path, const std::string& kind,
                 double tol_override, bool model_implied_jacobian) {
    const io::DatasetFile dataset = load_input(input_path, counts_csv);
    const io::BoundDataset bound = io::bind_dataset(dataset);
    const Observations obs = to_observations(bound);
    const IndexSet& S = bound.menu.feasible();

    json report = report_skeleton("estimate", fnv1a_hex(io::serialize_dataset(dataset)));
    report["config"]["kind"] = kind;
    if (obs.any_probabilities) {
        report["warnings"].push_back(
            "probabilities treated as empirical shares with the recorded n (default 1)");
    }

    if (kind == "ls") {
        const double tol = tol_override > 0 ? tol_override : default_tolerance(obs, S);
        std::vector<ident::DeltaA> das;
        for (size_t i = 0; i < obs.regimes.size(); ++i) {
            for (size_t j = i + 1; j < obs.regimes.size(); ++j) {
                const ident::ExposurePair pair(bound.menu, obs.regimes[i].q, obs.regimes[j].q,
                                               obs.regimes[i].P, obs.regimes[j].P);
                das.push_back(ident::delta_and_A(pair));
            }
        }
        const double alpha_hat = ident::ls_alpha(das);
        report["results"]["alpha_hat"] = alpha_hat;
        report["config"]["tol"] = tol;
        if (alpha_hat > 0.0 && alpha_hat < 1.0) {
            const auto fit = ident::ls_p0(alpha_hat, obs.regimes, S);
            report["results"]["p0_hat"] = label_map(bound.universe, S, fit.p0.masses());
            report["results"]["p0_projected"] = fit.projected;
        } else {
            report["warnings"].push_back("least-squares alpha falls outside (0,1)");
        }
        emit_report(report, output_path);
        return kExitOk;
    }

    gmm::WeightSpec spec;
    if (kind == "md") {
        spec.kind = gmm::WeightKind::identity;
    } else if (kind == "gmm2") {
        spec.kind = gmm::WeightKind::optimal;
    } else {
        throw ValidationError("unknown estimator kind: " + kind);
    }
    spec.model_implied_jacobian = model_implied_jacobian;
    report["config"]["model_implied_jacobian"] = model_implied_jacobian;
    const gmm::GmmDataset gd = to_gmm_dataset(bound);
    log_line("estimating with kind=" + kind);
    const gmm::GmmEstimate est = gmm::estimate(gd, spec);

    report["results"]["alpha_hat"] = est.alpha_hat;
    report["results"]["p0_hat"] = label_map(bound.universe, S, est.p0_hat);
    report["results"]["se_alpha"] = est.se_alpha;
    report["results"]["se_p0"] = label_map(bound.universe, S, est.se_p0);
    report["results"]["J"] = est.J_stat;
    report["results"]["df"] = est.df;
    report["results"]["p_value"] = est.p_value;
    report["results"]["criterion_min"] = est.criterion_min;
    report["results"]["weight_kind"] = kind;
    report["diagnostics"]["ridge_used"] = est.ridge_used;
    report["diagnostics"]["boundary"] = est.boundary;
    json trace = json::array();
    for (const auto& [a, q] : est.criterion_trace) trace.push_back({a, q});
    report["diagnostics"]["criterion_trace"] = std::move(trace);
    emit_report(report, output_path);
    return kExitOk;
}

// ----------------------------------------------------------------- falsify

struct LevelGroup {
    double mu;
    std::vector<size_t> members;
};

std::vector<LevelGroup> group_by_share(const Observations& obs, const IndexSet& S) {
    std::vector<LevelGroup> groups;
    for (size_t i = 0; i < obs.regimes.size(); ++i) {
        const double share = obs.regimes[i].q.sum_over(S);
        bool placed = false;
        for (auto& g : groups) {
            if (std::abs(g.mu - share) <= 1e-9) {
                g.members.push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back({share, {i}});
    }
    return groups;
}

json check_to_json(const axioms::CheckReport& r) {
    return {{"name", r.name},
            {"pass", r.pass},
            {"worst_violation", r.worst_violation},
            {"location", r.location}};
}

int run_axiom_battery(const io::BoundDataset& bound, const Observations& obs, double tol,
                      json& checks, json& warnings, bool& hard_fail,
                      std::optional<axioms::PerMenuRecovery>* recovery_out) {
    const IndexSet& S = bound.menu.feasible();
    const auto groups = group_by_share(obs, S);

    // Intra-aspiration irrelevance: pairs sharing the whole feasible restriction.
    std::vector<std::pair<axioms::QPPoint, axioms::QPPoint>> same_restriction;
    for (size_t i = 0; i < obs.regimes.size(); ++i) {
        for (size_t j = i + 1; j < obs.regimes.size(); ++j) {
            const auto ri = obs.regimes[i].q.restrict_to(S);
            const auto rj = obs.regimes[j].q.restrict_to(S);
            double gap = 0.0;
            for (size_t c = 0; c < S.size(); ++c) gap = std::max(gap, std::abs(ri[c] - rj[c]));
            if (gap <= 1e-9) {
                same_restriction.push_back({{obs.regimes[i].q, obs.regimes[i].P},
                                            {obs.regimes[j].q, obs.regimes[j].P}});
            }
        }
    }
    if (!same_restriction.empty()) {
        const auto r = axioms::check_intra_aspiration(same_restriction, S, tol);
        checks.push_back(check_to_json(r));
        hard_fail = hard_fail || !r.pass;
    } else {
        checks.push_back({{"name", "intra_aspiration_irrelevance"}, {"skipped", true}});
    }

    // Proportional response within levels, and the level multipliers.
    std::vector<axioms::LevelSlice> slices;
    for (const auto& g : groups) {
        if (g.members.size() < 2) continue;
        axioms::LevelSlice slice{bound.menu, g.mu, {}};
        for (size_t idx : g.members) {
            slice.points.push_back({obs.regimes[idx].q, obs.regimes[idx].P});
        }
        for (size_t a = 0; a < g.members.size(); ++a) {
            for (size_t b = a + 1; b < g.members.size(); ++b) {
                const auto& ra = obs.regimes[g.members[a]];
                const auto& rb = obs.regimes[g.members[b]];
                const auto r = axioms::check_proportional_response(ra.q, ra.P, rb.q, rb.P, S, tol);
                checks.push_back(check_to_json(r));
                hard_fail = hard_fail || !r.pass;
            }
        }
        try {
            slices.push_back(slice);
            (void)axioms::estimate_lambda(slice);
        } catch (const DegenerateError&) {
            slices.pop_back();
            warnings.push_back("level " + std::to_string(g.mu) +
                               " has no exposure variation; lambda not estimated");
        }
    }
    if (slices.empty()) {
        checks.push_back({{"name", "proportional_response"}, {"skipped", true}});
    }

    // Radial consistency: pairs sharing a composition across different shares.
    int radial_checked = 0;
    for (size_t i = 0; i < obs.regimes.size(); ++i) {
        for (size_t j = i + 1; j < obs.regimes.size(); ++j) {
            const auto& a = obs.regimes[i];
            const auto& b = obs.regimes[j];
            const double sa = a.q.sum_over(S);
            const double sb = b.q.sum_over(S);
            if (!(sa > 0.0) || !(sb > 0.0) || std::abs(sa - sb) <= 1e-9) continue;
            const auto va = a.q.restrict_to(S);
            const auto vb = b.q.restrict_to(S);
            double gap = 0.0;
            for (size_t c = 0; c < S.size(); ++c) gap = std::max(gap, std::abs(va[c] / sa - vb[c] / sb));
            if (gap > 1e-9) continue;
            const auto r = axioms::check_radial_consistency(a.q, a.P, b.q, b.P, S, tol);
            checks.push_back(check_to_json(r));
            hard_fail = hard_fail || !r.pass;
            ++radial_checked;
        }
    }
    if (radial_checked == 0) {
        checks.push_back({{"name", "radial_consistency"}, {"skipped", true}});
    }

    // Leverage line plus per-menu recovery across levels.
    if (slices.size() >= 2) {
        try {
            const auto profile = axioms::build_leverage_profile(slices);
            const auto leverage = axioms::check_leverage_line(profile, tol);
            checks.push_back(check_to_json(leverage.report));
            hard_fail = hard_fail || !leverage.report.pass;
            if (S.size() >= 3) {
                const auto rec = axioms::recover_per_menu(profile, tol);
                json jr;
                jr["name"] = "per_menu_recovery";
                jr["alpha_S"] = rec.alpha_S;
                jr["kappa"] = rec.kappa;
                jr["p0_S"] = label_map(bound.universe, S, rec.p0_S.masses());
                jr["residuals"] = rec.residual_report;
                const bool stable = rec.residual_report.at("intercept_stability") <= tol;
                jr["pass"] = stable;
                checks.push_back(std::move(jr));
                hard_fail = hard_fail || !stable;
                if (recovery_out) *recovery_out = rec;
            } else {
                warnings.push_back("binary menu: per-menu recovery skipped (consistency checks only)");
            }
        } catch (const ModelViolationError& e) {
            checks.push_back({{"name", "leverage_line"}, {"pass", false}, {"error", e.what()}});
            hard_fail = true;
        }
    } else {
        checks.push_back({{"name", "leverage_line"}, {"skipped", true}});
    }
    return kExitOk;
}

int cmd_falsify(const std::string& input_path, const std::string& counts_csv,
                const std::string& output_path, double tol_override) {
    const io::DatasetFile dataset = load_input(input_path, counts_csv);
    const io::BoundDataset bound = io::bind_dataset(dataset);
    const Observations obs = to_observations(bound);
    const IndexSet& S = bound.menu.feasible();
    const double tol = tol_override > 0 ? tol_override : default_tolerance(obs, S);

    json report = report_skeleton("falsify", fnv1a_hex(io::serialize_dataset(dataset)));
    report["config"]["tol"] = tol;
    json checks = json::array();
    bool hard_fail = false;

    std::optional<axioms::PerMenuRecovery> recovery;
    run_axiom_battery(bound, obs, tol, checks, report["warnings"], hard_fail, &recovery);

    if (obs.regimes.size() >= 2) {
        const auto rat = ident::rationalizability_check(obs.regimes, S, tol);
        json jr;
        jr["name"] = "rationalizability";
        jr["pass"] = rat.rationalizable || rat.underdetermined;
        jr["underdetermined"] = rat.underdetermined;
        if (rat.alpha) jr["alpha"] = *rat.alpha;
        jr["violations"] = rat.violations;
        checks.push_back(std::move(jr));
        hard_fail = hard_fail || !(rat.rationalizable || rat.underdetermined);

        std::vector<Dist> exposures;
        for (const auto& r : obs.regimes) exposures.push_back(r.q);
        const auto gen = ident::design_genericity_check({bound.menu, exposures});
        report["diagnostics"]["genericity"] = {{"applicable", gen.applicable},
                                               {"generic", gen.generic},
                                               {"rank", gen.rank},
                                               {"note", gen.note}};
        if (gen.perturb_coordinate) {
            report["diagnostics"]["genericity"]["perturb_label"] =
                bound.universe.label(*gen.perturb_coordinate);
        }
        if (!gen.generic) {
            report["warnings"].push_back("exposure design is not generic: " + gen.note);
        }
    }

    report["results"]["checks"] = std::move(checks);
    report["results"]["falsified"] = hard_fail;
    emit_report(report, output_path);
    return hard_fail ? kExitFalsified : kExitOk;
}

// ------------------------------------------------------------------ axioms

int cmd_axioms(const std::vector<std::string>& input_paths, const std::string& output_path,
               double tol_override) {
    if (input_paths.empty()) throw ValidationError("axioms needs at least one --input");

    json report = report_skeleton("axioms", "");
    json menus = json::array();
    bool hard_fail = false;
    std::string digest_src;

    std::vector<Dist> family;
    std::vector<double> alphas;
    std::optional<Universe> universe;

    for (const auto& path : input_paths) {
        const io::DatasetFile dataset = io::load_dataset_file(path);
        digest_src += io::serialize_dataset(dataset);
        const io::BoundDataset bound = io::bind_dataset(dataset);
        if (universe && universe->labels() != bound.universe.labels()) {
            throw ValidationError("axioms: all inputs must share one universe");
        }
        if (!universe) universe = bound.universe;
        const Observations obs = to_observations(bound);
        const double tol = tol_override > 0 ? tol_override
                                            : default_tolerance(obs, bound.menu.feasible());
        json checks = json::array();
        std::optional<axioms::PerMenuRecovery> recovery;
        run_axiom_battery(bound, obs, tol, checks, report["warnings"], hard_fail, &recovery);
        json jm;
        jm["input"] = path;
        jm["tol"] = tol;
        jm["checks"] = std::move(checks);
        if (recovery) {
            family.push_back(recovery->p0_S);
            alphas.push_back(recovery->alpha_S);
        }
        menus.push_back(std::move(jm));
    }
    report["inputs_digest"] = fnv1a_hex(digest_src);
    report["results"]["menus"] = std::move(menus);

    if (family.size() >= 2) {
        const double tol = tol_override > 0 ? tol_override : 1e-9;
        double alpha_spread = 0.0;
        for (double a : alphas) alpha_spread = std::max(alpha_spread, std::abs(a - alphas[0]));
        report["results"]["alpha_S_spread"] = alpha_spread;
        hard_fail = hard_fail || alpha_spread > tol;

        const auto luce = axioms::check_luce_consistency(family, tol);
        report["results"]["luce_consistency"] = check_to_json(luce);
        hard_fail = hard_fail || !luce.pass;
        if (luce.pass) {
            try {
                const auto u = axioms::fit_global_weights(family, universe->size());
                json ju = json::object();
                for (int i = 0; i < universe->size(); ++i) ju[universe->label(i)] = u.weight(i);
                report["results"]["global_weights"] = std::move(ju);
            } catch (const DegenerateError& e) {
                report["warnings"].push_back(e.what());
            }
        }
    }
    report["results"]["falsified"] = hard_fail;
    emit_report(report, output_path);
    return hard_fail ? kExitFalsified : kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Aspiration-weighted Luce model toolkit"};
    app.require_subcommand(1);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Draw synthetic choice data from the model");
    std::string sim_design, sim_output, sim_report, sim_weights, sim_rule = "persist";
    double sim_alpha = 0.0, sim_retry = 1.0;
    std::uint64_t sim_seed = 0;
    std::int64_t sim_n = -1; // -1: take n from the design file
    sim_cmd->add_option("--design", sim_design, "design file: universe, menu, exposures")->required();
    sim_cmd->add_option("--output", sim_output, "dataset file to write")->required();
    sim_cmd->add_option("--report", sim_report, "report path (default stdout)");
    sim_cmd->add_option("--alpha", sim_alpha, "influence strength in (0,1)")->required();
    sim_cmd->add_option("--weights", sim_weights, "Luce weights as JSON map or a path")->required();
    sim_cmd->add_option("--seed", sim_seed, "RNG seed");
    sim_cmd->add_option("--n", sim_n, "draws per regime (overrides the design)");
    sim_cmd->add_option("--rule", sim_rule, "failure rule: persist|revert|retry");
    sim_cmd->add_option("--retry-prob", sim_retry, "retry probability for --rule retry");

    // identify
    auto* id_cmd = app.add_subcommand("identify", "Constructive recovery of alpha and p0");
    std::string id_input, id_csv, id_output;
    double id_tol = 0.0;
    id_cmd->add_option("--input", id_input, "dataset file")->required();
    id_cmd->add_option("--counts-csv", id_csv, "counts as CSV (header of labels, one row per regime)");
    id_cmd->add_option("--output", id_output, "report path (default stdout)");
    id_cmd->add_option("--tol", id_tol, "consistency tolerance (default: noise-scaled)");

    // estimate
    auto* est_cmd = app.add_subcommand("estimate", "Minimum-distance / GMM estimation");
    std::string est_input, est_csv, est_output, est_kind = "md";
    double est_tol = 0.0;
    bool est_mij = false;
    est_cmd->add_option("--input", est_input, "dataset file")->required();
    est_cmd->add_option("--counts-csv", est_csv, "counts as CSV");
    est_cmd->add_option("--output", est_output, "report path (default stdout)");
    est_cmd->add_option("--kind", est_kind, "md (identity weight) | gmm2 (two-step) | ls");
    est_cmd->add_option("--tol", est_tol, "tolerance for the ls kind");
    est_cmd->add_flag("--model-implied-jacobian", est_mij,
                      "evaluate the alpha block of G at the model-implied choice");

    // falsify
    auto* fal_cmd = app.add_subcommand("falsify", "Axiom checks, rationalizability, genericity");
    std::string fal_input, fal_csv, fal_output;
    double fal_tol = 0.0;
    fal_cmd->add_option("--input", fal_input, "dataset file")->required();
    fal_cmd->add_option("--counts-csv", fal_csv, "counts as CSV");
    fal_cmd->add_option("--output", fal_output, "report path (default stdout)");
    fal_cmd->add_option("--tol", fal_tol, "violation tolerance (default: noise-scaled)");

    // axioms
    auto* ax_cmd = app.add_subcommand("axioms", "Level-by-level diagnostics and cross-menu recovery");
    std::vector<std::string> ax_inputs;
    std::string ax_output;
    double ax_tol = 0.0;
    ax_cmd->add_option("--input", ax_inputs, "dataset file(s), repeatable")->required();
    ax_cmd->add_option("--output", ax_output, "report path (default stdout)");
    ax_cmd->add_option("--tol", ax_tol, "violation tolerance (default: noise-scaled)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim_cmd) {
            return cmd_simulate(sim_design, sim_output, sim_report, sim_alpha, sim_weights,
                                sim_seed, sim_n, sim_rule, sim_retry);
        }
        if (*id_cmd) return cmd_identify(id_input, id_csv, id_output, id_tol);
        if (*est_cmd) return cmd_estimate(est_input, est_csv, est_output, est_kind, est_tol, est_mij);
        if (*fal_cmd) return cmd_falsify(fal_input, fal_csv, fal_output, fal_tol);
        if (*ax_cmd) return cmd_axioms(ax_inputs, ax_output, ax_tol);
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const DegenerateError& e) {
        std::cerr << "degenerate input: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const ModelViolationError& e) {
        std::cerr << "model violation: " << e.what() << "\n";
        return kExitFalsified;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return kExitOk;
}
