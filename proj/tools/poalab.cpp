#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "poalab/equilibrium.hpp"
#include "poalab/generators.hpp"
#include "poalab/harness.hpp"
#include "poalab/json_io.hpp"

namespace {

using namespace poalab;

Instance read_instance_arg(const std::string& path) {
    if (path == "-") return read_instance(std::cin);
    return read_instance_file(path);
}

void emit(const nlohmann::json& doc, const std::string& out) {
    if (out.empty() || out == "-")
        std::cout << doc.dump(2) << "\n";
    else
        save_json_file(doc, out);
}

void emit_text(const std::string& text, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(out);
    if (!f) throw ValidationError("cannot write " + out);
    f << text;
}

std::string stem_of(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
    return path.substr(0, dot);
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

nlohmann::json witness_bundle(const NamedFamily& f) {
    nlohmann::json doc;
    doc["provenance"] = f.provenance;
    doc["canonical_ne"] = assignment_to_json(f.canonical_ne);
    if (f.canonical_payments) doc["canonical_payments"] = f.canonical_payments->payments;
    doc["reference_opt"] = assignment_to_json(f.reference_opt);
    doc["predicted_ne_cost"] = f.predicted_ne_cost;
    doc["predicted_opt_cost"] = f.predicted_opt_cost;
    return doc;
}

nlohmann::json nash_check_json(const NashCheck& check) {
    nlohmann::json violations = nlohmann::json::array();
    for (const NashViolation& v : check.violations)
        violations.push_back({{"job", v.job},
                              {"from_slot", v.from_slot},
                              {"to_slot", v.to_slot},
                              {"current_share", v.current_share},
                              {"deviation_share", v.deviation_share}});
    return {{"is_equilibrium", check.is_equilibrium}, {"violations", violations}};
}

nlohmann::json mech_check_json(const MechCheck& check) {
    nlohmann::json violations = nlohmann::json::array();
    for (const MechViolation& v : check.violations)
        violations.push_back({{"kind", mech_violation_name(v.kind)},
                              {"job", v.job},
                              {"slot", v.slot},
                              {"to_slot", v.to_slot},
                              {"value", v.value},
                              {"bound", v.bound}});
    return {{"is_equilibrium", check.is_equilibrium}, {"violations", violations}};
}

std::string brd_trace_csv(const BrdTrace& trace) {
    std::string csv = "step,job,from,to,potential\n";
    for (size_t i = 0; i < trace.steps.size(); ++i) {
        const BrdStep& s = trace.steps[i];
        csv += std::to_string(i) + "," + std::to_string(s.job) + "," + std::to_string(s.from_slot) +
               "," + std::to_string(s.to_slot) + "," + std::to_string(s.potential_after) + "\n";
    }
    return csv;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cost-sharing scheduling games: equilibria, optima, payment mechanism, "
                 "price-of-anarchy measurement"};
    app.set_help_flag("--help", "print help");  // frees -h for the valley parameter
    app.fallthrough();                          // global flags may follow the subcommand
    app.require_subcommand(1);

    double eps = kDefaultEps;
    std::uint64_t budget = 10000000;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out;
    bool no_timing = false;
    app.add_option("--eps", eps, "comparison tolerance")->capture_default_str();
    app.add_option("--budget", budget, "enumeration budget")->capture_default_str();
    app.add_option("--seed", seed, "random seed")->capture_default_str();
    app.add_option("--format", format, "report format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--out", out, "output path (default stdout)");
    app.add_flag("--no-timing", no_timing, "record runtime_ms as 0 for byte-stable reports");

    // ---- gen ----
    auto* gen = app.add_subcommand("gen", "construct an instance (with witnesses for named families)");
    std::string family;
    int gen_h = 2, gen_n = 16, gen_horizon = 6, gen_tstar = 1;
    double gen_d = 0.5;
    std::string gen_kind = "unit", gen_shape = "general";
    gen->add_option("--family", family, "valley | quadratic | two-job-unit | freeloader | random")
        ->required()
        ->check(CLI::IsMember({"valley", "quadratic", "two-job-unit", "freeloader", "random"}));
    gen->add_option("--h", gen_h, "valley parameter h");
    gen->add_option("--d", gen_d, "monomial degree");
    gen->add_option("--n", gen_n, "job count (freeloader, random)");
    gen->add_option("--horizon", gen_horizon, "slot count (random)");
    gen->add_option("--kind", gen_kind, "cost kind for random instances")
        ->check(CLI::IsMember({"unit", "monomial"}));
    gen->add_option("--shape", gen_shape, "random window shape")
        ->check(CLI::IsMember({"general", "common-slot"}));
    gen->add_option("--t-star", gen_tstar, "slot forced into every window (common-slot shape)");

    // ---- opt ----
    auto* opt_cmd = app.add_subcommand("opt", "compute a minimum-cost assignment");
    std::string opt_in, opt_method = "auto";
    opt_cmd->add_option("--in", opt_in, "instance file (- for stdin)")->required();
    opt_cmd->add_option("--method", opt_method, "auto | brute | unit-greedy | flow | concave")
        ->check(CLI::IsMember({"auto", "brute", "unit-greedy", "flow", "concave"}));

    // ---- ne ----
    auto* ne = app.add_subcommand("ne", "base-game equilibrium operations");
    std::string ne_in, ne_check, ne_brd, ne_order = "rr";
    bool ne_worst = false, ne_enum = false, ne_dedup = false;
    int ne_max_steps = 100000;
    ne->add_option("--in", ne_in, "instance file (- for stdin)")->required();
    ne->add_option("--check", ne_check, "verify an assignment file");
    ne->add_option("--brd", ne_brd, "run best-response dynamics from an assignment file");
    ne->add_option("--order", ne_order, "dynamics order: rr | random")
        ->check(CLI::IsMember({"rr", "random"}));
    ne->add_option("--max-steps", ne_max_steps, "improving-step budget for the dynamics");
    ne->add_flag("--worst", ne_worst, "enumerate the maximum-cost equilibrium");
    ne->add_flag("--enumerate", ne_enum, "list all equilibria");
    ne->add_flag("--dedup-loads", ne_dedup, "deduplicate enumerated equilibria by load profile");

    // ---- mech ----
    auto* mech = app.add_subcommand("mech", "payment-mechanism operations");
    std::string mech_in, mech_check, mech_support, mech_caps, mech_pay_unit, mech_pay_common;
    std::string mech_pricing = "marginal";
    bool mech_worst = false;
    mech->add_option("--in", mech_in, "instance file (- for stdin)")->required();
    mech->add_option("--check", mech_check, "verify a {slots, payments} profile file");
    mech->add_option("--pricing", mech_pricing, "deviation pricing: marginal | residual")
        ->check(CLI::IsMember({"marginal", "residual"}));
    mech->add_option("--support", mech_support, "supporting payments for an assignment file");
    mech->add_option("--caps", mech_caps, "per-job deviation caps for an assignment file");
    mech->add_option("--pay-unit", mech_pay_unit, "single-payer payments over a unit optimum");
    mech->add_option("--pay-common", mech_pay_common, "fair-share payments over a one-slot optimum");
    mech->add_flag("--worst", mech_worst, "worst supportable outcome");

    // ---- poa ----
    auto* poa = app.add_subcommand("poa", "price-of-anarchy report with witnesses");
    std::string poa_in, poa_mode = "both", poa_id, poa_audit;
    poa->add_option("--in", poa_in, "instance file (- for stdin)");
    poa->add_option("--mode", poa_mode, "base | mech | both")
        ->check(CLI::IsMember({"base", "mech", "both"}));
    poa->add_option("--id", poa_id, "instance id recorded in the report");
    poa->add_option("--audit", poa_audit, "recompute a written JSON report from its witnesses");

    // ---- sweep ----
    auto* sweep = app.add_subcommand("sweep", "one report row per grid point");
    std::string sweep_family, sweep_kind = "unit", sweep_mode = "both";
    std::vector<int> sweep_h, sweep_n;
    double sweep_d = 0.5;
    int sweep_count = 0, sweep_jobs = 5, sweep_horizon = 5;
    bool sweep_no_witnesses = false;
    sweep->add_option("--family", sweep_family, "valley | freeloader | random | common-slot")
        ->required()
        ->check(CLI::IsMember({"valley", "freeloader", "random", "common-slot"}));
    sweep->add_option("--h-values", sweep_h, "valley h grid");
    sweep->add_option("--n-values", sweep_n, "freeloader n grid");
    sweep->add_option("--d", sweep_d, "monomial degree");
    sweep->add_option("--count", sweep_count, "number of random instances");
    sweep->add_option("--n", sweep_jobs, "jobs per random instance");
    sweep->add_option("--horizon", sweep_horizon, "slots per random instance");
    sweep->add_option("--kind", sweep_kind, "cost kind for random sweeps")
        ->check(CLI::IsMember({"unit", "monomial"}));
    sweep->add_option("--mode", sweep_mode, "base | mech | both")
        ->check(CLI::IsMember({"base", "mech", "both"}));
    sweep->add_flag("--no-witnesses", sweep_no_witnesses, "skip per-row witness files");

    // ---- reproduce ----
    auto* reproduce = app.add_subcommand("reproduce", "run the full reproduction suite");
    std::string repro_out = "reproduction";
    bool inject_fault = false;
    reproduce->add_option("--out-dir", repro_out, "directory for summary.csv and witnesses")
        ->capture_default_str();
    reproduce->add_flag("--inject-fault", inject_fault, "test hook: corrupt one expected value");

    CLI11_PARSE(app, argc, argv);

    const auto poa_mode_of = [](const std::string& m) {
        if (m == "base") return PoaMode::Base;
        if (m == "mech") return PoaMode::Mechanism;
        return PoaMode::Both;
    };

    try {
        if (gen->parsed()) {
            if (family == "quadratic" || family == "two-job-unit" || family == "valley" ||
                family == "freeloader") {
                NamedFamily f;
                if (family == "quadratic") f = gen_quadratic();
                else if (family == "two-job-unit") f = gen_two_job_unit();
                else if (family == "valley") f = gen_valley(gen_h, gen_d);
                else f = gen_freeloader(gen_n, gen_d);
                emit(instance_to_json(f.instance), out);
                if (!out.empty() && out != "-")
                    save_json_file(witness_bundle(f), stem_of(out) + ".witness.json");
            } else {
                const CostFunction cost = gen_kind == "unit" ? CostFunction::unit()
                                                             : CostFunction::monomial(gen_d);
                const RandomShape shape =
                    gen_shape == "common-slot" ? RandomShape::CommonSlot : RandomShape::General;
                emit(instance_to_json(gen_random(gen_n, gen_horizon, cost, seed, shape, gen_tstar)),
                     out);
            }
        } else if (opt_cmd->parsed()) {
            const Instance inst = read_instance_arg(opt_in);
            OptResult result;
            if (opt_method == "auto") result = solve_optimal(inst, budget);
            else if (opt_method == "brute") result = opt_bruteforce(inst, budget);
            else if (opt_method == "unit-greedy") result = opt_unit_greedy(inst);
            else if (opt_method == "flow") result = opt_flow_convex(inst);
            else result = opt_concave_search(inst, budget);
            emit(result.to_json(), out);
        } else if (ne->parsed()) {
            const Instance inst = read_instance_arg(ne_in);
            if (!ne_check.empty()) {
                emit(nash_check_json(is_nash(inst, read_assignment_file(ne_check), eps)), out);
            } else if (!ne_brd.empty()) {
                const BrdOrder order = ne_order == "rr" ? BrdOrder::RoundRobin : BrdOrder::Random;
                const BrdResult r =
                    run_brd(inst, read_assignment_file(ne_brd), order, seed, ne_max_steps, eps);
                if (format == "csv") {
                    emit_text(brd_trace_csv(r.trace), out);
                } else {
                    nlohmann::json doc = {{"converged", r.trace.converged},
                                          {"steps", r.trace.steps.size()},
                                          {"assignment", assignment_to_json(r.assignment)},
                                          {"cost", total_cost(inst, r.assignment)}};
                    emit(doc, out);
                }
            } else if (ne_worst) {
                const NashOutcome w = worst_nash(inst, budget, eps);
                emit({{"cost", w.cost}, {"slots", w.assignment.slots}}, out);
            } else if (ne_enum) {
                nlohmann::json rows = nlohmann::json::array();
                for (const NashOutcome& o : enumerate_nash(inst, budget, eps, true, ne_dedup))
                    rows.push_back({{"cost", o.cost}, {"slots", o.assignment.slots}});
                emit(rows, out);
            } else {
                throw ValidationError("ne: pass one of --check/--brd/--worst/--enumerate");
            }
        } else if (mech->parsed()) {
            const Instance inst = read_instance_arg(mech_in);
            const DeviationPricing pricing = mech_pricing == "residual" ? DeviationPricing::Residual
                                                                        : DeviationPricing::Marginal;
            if (!mech_check.empty()) {
                const MechProfile p = MechProfile::from_json(load_json_file(mech_check));
                emit(mech_check_json(is_mechanism_nash(inst, p, eps, pricing)), out);
            } else if (!mech_support.empty()) {
                emit(support_payments(inst, read_assignment_file(mech_support), eps).to_json(), out);
            } else if (!mech_caps.empty()) {
                const Assignment a = read_assignment_file(mech_caps);
                nlohmann::json caps = nlohmann::json::array();
                for (int j = 0; j < inst.job_count(); ++j) {
                    const auto cap = deviation_cap(inst, a, j);
                    caps.push_back(cap ? nlohmann::json(*cap) : nlohmann::json(nullptr));
                }
                emit(caps, out);
            } else if (!mech_pay_unit.empty()) {
                const Assignment a = read_assignment_file(mech_pay_unit);
                emit({{"payments", payments_unit_optimal(inst, a).payments}}, out);
            } else if (!mech_pay_common.empty()) {
                const Assignment a = read_assignment_file(mech_pay_common);
                emit({{"payments", payments_common_slot(inst, a).payments}}, out);
            } else if (mech_worst) {
                const auto w = worst_supportable(inst, budget, eps);
                if (!w) throw ValidationError("no supportable outcome exists");
                nlohmann::json doc = w->profile.to_json();
                doc["cost"] = w->cost;
                emit(doc, out);
            } else {
                throw ValidationError(
                    "mech: pass one of --check/--support/--caps/--pay-unit/--pay-common/--worst");
            }
        } else if (poa->parsed()) {
            if (!poa_audit.empty()) {
                const auto issues = audit_poa_report(poa_audit);
                for (const std::string& issue : issues) std::cerr << "audit: " << issue << "\n";
                if (!issues.empty()) return 1;
                std::cout << "audit clean: every reported cost recomputes from its witnesses\n";
                return 0;
            }
            if (poa_in.empty()) throw ValidationError("poa: --in required");
            const Instance inst = read_instance_arg(poa_in);
            PoaOptions opts;
            opts.mode = poa_mode_of(poa_mode);
            opts.budget = budget;
            opts.eps = eps;
            opts.seed = seed;
            opts.record_runtime = !no_timing;
            opts.instance_id = poa_id;
            const PoaResult result = poa_exact(inst, opts);
            if (!out.empty() && out != "-") {
                const std::string path =
                    (format == "csv" && !ends_with(out, ".csv")) ? out + ".csv" : out;
                write_poa_result(result, path);
                for (const std::string& note : result.notes) std::cerr << "note: " << note << "\n";
            } else if (format == "csv") {
                emit_text(std::string(kReportCsvHeader) + "\n" + result.report.csv_row() + "\n", out);
            } else {
                nlohmann::json doc = result.report.to_json();
                doc["exact"] = result.exact;
                if (result.opt_assignment) doc["opt_witness"] = assignment_to_json(*result.opt_assignment);
                if (result.worst_ne) doc["worst_ne_witness"] = assignment_to_json(*result.worst_ne);
                if (result.worst_mech) doc["worst_mech_witness"] = result.worst_mech->to_json();
                if (!result.notes.empty()) doc["notes"] = result.notes;
                emit(doc, out);
            }
        } else if (sweep->parsed()) {
            std::vector<SweepPoint> points;
            if (sweep_family == "valley") {
                points = valley_sweep_points(sweep_h, sweep_d);
            } else if (sweep_family == "freeloader") {
                points = freeloader_sweep_points(sweep_n, sweep_d);
            } else {
                if (sweep_count < 1) throw ValidationError("sweep: --count must be >= 1");
                const CostFunction cost = sweep_kind == "unit" ? CostFunction::unit()
                                                               : CostFunction::monomial(sweep_d);
                points = random_sweep_points(sweep_count, sweep_jobs, sweep_horizon, cost,
                                             sweep_family == "common-slot", seed);
            }
            PoaOptions opts;
            opts.mode = poa_mode_of(sweep_mode);
            opts.budget = budget;
            opts.eps = eps;
            opts.record_runtime = !no_timing;
            const auto rows = run_sweep(points, opts);
            emit_text(sweep_csv(rows), out);
            bool any_failed = false;
            for (const SweepRow& row : rows)
                if (row.error) {
                    any_failed = true;
                    std::cerr << row.result.report.instance_id << ": " << *row.error << "\n";
                }
            if (!out.empty() && out != "-" && !sweep_no_witnesses) {
                const std::string dir = stem_of(out) + ".witnesses";
                std::filesystem::create_directories(dir);
                for (const SweepRow& row : rows)
                    if (!row.error)
                        write_poa_result(row.result, dir + "/" + row.result.report.instance_id + ".json");
            }
            if (any_failed) return 1;
        } else if (reproduce->parsed()) {
            AcceptanceOptions opts;
            opts.eps = eps;
            opts.budget = budget;
            opts.record_runtime = !no_timing;
            opts.inject_fault = inject_fault;
            opts.out_dir = repro_out;
            return report_acceptance(run_acceptance(opts));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
