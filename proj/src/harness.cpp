#include "poalab/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "poalab/equilibrium.hpp"
#include "poalab/generators.hpp"
#include "poalab/json_io.hpp"

namespace poalab {

namespace {

std::string fmt(double v) {
    char buf[48];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : std::string(); }

class Stopwatch {
public:
    explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}
    long long elapsed_ms() const {
        if (!enabled_) return 0;
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start_)
            .count();
    }

private:
    bool enabled_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace

std::string PoaReport::csv_row() const {
    std::ostringstream row;
    row << instance_id << ',' << n << ',' << cost_kind << ',' << fmt(degree) << ','
        << fmt(base_worst_ne_cost) << ',' << fmt(mech_worst_cost) << ',' << fmt(opt_cost) << ','
        << opt_method << ',' << fmt(base_poa) << ',' << fmt(mech_poa) << ','
        << fmt(predicted_ne_cost) << ',' << fmt(predicted_opt_cost) << ',' << runtime_ms << ','
        << seed << ',' << fmt(epsilon);
    return row.str();
}

nlohmann::json PoaReport::to_json() const {
    auto opt_or_null = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    nlohmann::json doc;
    doc["instance_id"] = instance_id;
    doc["n"] = n;
    doc["cost_kind"] = cost_kind;
    doc["degree"] = opt_or_null(degree);
    doc["base_worst_ne_cost"] = opt_or_null(base_worst_ne_cost);
    doc["mech_worst_cost"] = opt_or_null(mech_worst_cost);
    doc["opt_cost"] = opt_or_null(opt_cost);
    doc["opt_method"] = opt_method;
    doc["base_poa"] = opt_or_null(base_poa);
    doc["mech_poa"] = opt_or_null(mech_poa);
    doc["predicted_ne_cost"] = opt_or_null(predicted_ne_cost);
    doc["predicted_opt_cost"] = opt_or_null(predicted_opt_cost);
    doc["runtime_ms"] = runtime_ms;
    doc["seed"] = seed;
    doc["epsilon"] = epsilon;
    return doc;
}

std::string derive_instance_id(const Instance& inst) {
    if (inst.meta.contains("family")) {
        std::string id = inst.meta.at("family").get<std::string>();
        for (const char* key : {"h", "n", "d", "seed", "t_star"})
            if (inst.meta.contains(key)) {
                const auto& v = inst.meta.at(key);
                id += std::string("_") + key + "=" +
                      (v.is_number_float() ? fmt(v.get<double>()) : v.dump());
            }
        return id;
    }
    // FNV-1a over the canonical serialization
    const std::string text = instance_to_json(inst).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "inst_%016llx", static_cast<unsigned long long>(h));
    return buf;
}

PoaResult poa_exact(const Instance& inst, const PoaOptions& opts) {
    inst.validate();
    const Stopwatch timer(opts.record_runtime);

    PoaResult result;
    result.instance = inst;
    PoaReport& rep = result.report;
    rep.instance_id = opts.instance_id.empty() ? derive_instance_id(inst) : opts.instance_id;
    rep.n = inst.job_count();
    rep.cost_kind = inst.cost.is_unit() ? "unit" : "monomial";
    if (!inst.cost.is_unit()) rep.degree = inst.cost.degree();
    rep.seed = opts.seed;
    rep.epsilon = opts.eps;
    rep.predicted_ne_cost = opts.predicted_ne_cost;
    rep.predicted_opt_cost = opts.predicted_opt_cost;

    const OptResult opt = solve_optimal(inst, opts.budget);
    rep.opt_cost = opt.cost;
    rep.opt_method = opt_method_name(opt.method);
    result.opt_assignment = opt.assignment;
    if (!opt.exact) {
        result.exact = false;
        result.notes.push_back("optimal solver returned a heuristic result; ratios omitted");
    }

    if (opts.mode == PoaMode::Base || opts.mode == PoaMode::Both) {
        try {
            NashOutcome worst = worst_nash(inst, opts.budget, opts.eps);
            rep.base_worst_ne_cost = worst.cost;
            if (opt.exact) rep.base_poa = worst.cost / opt.cost;
            result.worst_ne = std::move(worst.assignment);
        } catch (const BudgetExceeded& e) {
            result.exact = false;
            result.notes.push_back(std::string("base enumeration skipped: ") + e.what());
        }
    }
    if (opts.mode == PoaMode::Mechanism || opts.mode == PoaMode::Both) {
        try {
            auto worst = worst_supportable(inst, opts.budget, opts.eps);
            if (worst) {
                rep.mech_worst_cost = worst->cost;
                if (opt.exact) rep.mech_poa = worst->cost / opt.cost;
                result.worst_mech = std::move(worst->profile);
            } else {
                result.notes.push_back("no supportable mechanism outcome exists");
            }
        } catch (const BudgetExceeded& e) {
            result.exact = false;
            result.notes.push_back(std::string("mechanism enumeration skipped: ") + e.what());
        }
    }

    rep.runtime_ms = timer.elapsed_ms();
    return result;
}

namespace {

std::string path_stem(const std::string& path) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path;
    return path.substr(0, dot);
}

std::string file_name(const std::string& path) {
    return std::filesystem::path(path).filename().string();
}

}  // namespace

std::string write_poa_result(const PoaResult& result, const std::string& out_path) {
    const std::string stem = path_stem(out_path);
    const bool csv = out_path.size() > 4 && out_path.substr(out_path.size() - 4) == ".csv";

    nlohmann::json witnesses = nlohmann::json::object();
    save_json_file(instance_to_json(result.instance), stem + ".instance.json");
    witnesses["instance"] = file_name(stem + ".instance.json");
    if (result.opt_assignment) {
        save_json_file(assignment_to_json(*result.opt_assignment), stem + ".opt.json");
        witnesses["opt"] = file_name(stem + ".opt.json");
    }
    if (result.worst_ne) {
        save_json_file(assignment_to_json(*result.worst_ne), stem + ".worst_ne.json");
        witnesses["worst_ne"] = file_name(stem + ".worst_ne.json");
    }
    if (result.worst_mech) {
        save_json_file(result.worst_mech->to_json(), stem + ".worst_mech.json");
        witnesses["worst_mech"] = file_name(stem + ".worst_mech.json");
    }

    if (csv) {
        std::ofstream out(out_path);
        if (!out) throw ValidationError("cannot write " + out_path);
        out << kReportCsvHeader << "\n" << result.report.csv_row() << "\n";
    } else {
        nlohmann::json doc = result.report.to_json();
        doc["exact"] = result.exact;
        doc["witnesses"] = witnesses;
        if (!result.notes.empty()) doc["notes"] = result.notes;
        save_json_file(doc, out_path);
    }
    return out_path;
}

std::vector<std::string> audit_poa_report(const std::string& report_path) {
    std::vector<std::string> issues;
    const nlohmann::json doc = load_json_file(report_path);
    const std::filesystem::path dir = std::filesystem::path(report_path).parent_path();
    if (!doc.contains("witnesses") || !doc.at("witnesses").contains("instance")) {
        issues.push_back("report lacks an instance witness");
        return issues;
    }
    auto witness_path = [&](const std::string& key) {
        return (dir / doc.at("witnesses").at(key).get<std::string>()).string();
    };
    const Instance inst = read_instance_file(witness_path("instance"));
    const double eps = doc.value("epsilon", kDefaultEps);

    auto check_cost = [&](const char* field, double observed) {
        if (!doc.contains(field) || doc.at(field).is_null()) {
            issues.push_back(std::string(field) + " missing while its witness exists");
            return;
        }
        const double reported = doc.at(field).get<double>();
        if (std::abs(reported - observed) > 1e-9)
            issues.push_back(std::string(field) + " reported " + fmt(reported) +
                             " but witness recomputes to " + fmt(observed));
    };

    if (doc.at("witnesses").contains("opt"))
        check_cost("opt_cost", total_cost(inst, read_assignment_file(witness_path("opt"))));
    if (doc.at("witnesses").contains("worst_ne")) {
        const Assignment a = read_assignment_file(witness_path("worst_ne"));
        check_cost("base_worst_ne_cost", total_cost(inst, a));
        if (!is_nash(inst, a, eps).is_equilibrium)
            issues.push_back("worst_ne witness is not an equilibrium");
    }
    if (doc.at("witnesses").contains("worst_mech")) {
        const MechProfile p = MechProfile::from_json(load_json_file(witness_path("worst_mech")));
        check_cost("mech_worst_cost", total_cost(inst, p.assignment));
        if (!is_mechanism_nash(inst, p, eps).is_equilibrium)
            issues.push_back("worst_mech witness is not a mechanism equilibrium");
    }

    auto check_ratio = [&](const char* field, const char* num_field) {
        if (!doc.contains(field) || doc.at(field).is_null()) return;
        if (doc.at(num_field).is_null() || doc.at("opt_cost").is_null()) return;
        const double expect = doc.at(num_field).get<double>() / doc.at("opt_cost").get<double>();
        if (std::abs(doc.at(field).get<double>() - expect) > 1e-9)
            issues.push_back(std::string(field) + " is not the ratio of its recorded parts");
    };
    check_ratio("base_poa", "base_worst_ne_cost");
    check_ratio("mech_poa", "mech_worst_cost");
    return issues;
}

std::vector<SweepPoint> valley_sweep_points(const std::vector<int>& h_values, double d) {
    if (h_values.empty()) throw ValidationError("empty sweep grid");
    std::vector<SweepPoint> points;
    for (int h : h_values) {
        NamedFamily f = gen_valley(h, d);
        SweepPoint p;
        p.instance = std::move(f.instance);
        p.instance_id = derive_instance_id(p.instance);
        p.predicted_ne_cost = f.predicted_ne_cost;
        p.predicted_opt_cost = f.predicted_opt_cost;
        points.push_back(std::move(p));
    }
    return points;
}

std::vector<SweepPoint> freeloader_sweep_points(const std::vector<int>& n_values, double d) {
    if (n_values.empty()) throw ValidationError("empty sweep grid");
    std::vector<SweepPoint> points;
    for (int n : n_values) {
        NamedFamily f = gen_freeloader(n, d);
        SweepPoint p;
        p.instance = std::move(f.instance);
        p.instance_id = derive_instance_id(p.instance);
        p.predicted_ne_cost = f.predicted_ne_cost;
        p.predicted_opt_cost = f.predicted_opt_cost;
        points.push_back(std::move(p));
    }
    return points;
}

std::vector<SweepPoint> random_sweep_points(int count, int n, int horizon, const CostFunction& cost,
                                            bool common_slot, std::uint64_t base_seed) {
    if (count < 1) throw ValidationError("empty sweep grid");
    std::vector<SweepPoint> points;
    for (int i = 0; i < count; ++i) {
        SweepPoint p;
        p.seed = base_seed + static_cast<std::uint64_t>(i);
        const int t_star = common_slot ? 1 + static_cast<int>(p.seed % static_cast<std::uint64_t>(horizon)) : 1;
        p.instance = gen_random(n, horizon, cost, p.seed,
                                common_slot ? RandomShape::CommonSlot : RandomShape::General, t_star);
        p.instance_id = derive_instance_id(p.instance);
        points.push_back(std::move(p));
    }
    return points;
}

std::vector<SweepRow> run_sweep(const std::vector<SweepPoint>& points, const PoaOptions& opts) {
    if (points.empty()) throw ValidationError("empty sweep grid");
    std::vector<SweepRow> rows(points.size());

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            const SweepPoint& point = points[i];
            PoaOptions row_opts = opts;
            row_opts.seed = point.seed;
            row_opts.instance_id = point.instance_id;
            row_opts.predicted_ne_cost = point.predicted_ne_cost;
            row_opts.predicted_opt_cost = point.predicted_opt_cost;
            try {
                rows[i].result = poa_exact(point.instance, row_opts);
            } catch (const std::exception& e) {
                rows[i].error = e.what();
                PoaReport& rep = rows[i].result.report;
                rep.instance_id = point.instance_id;
                rep.n = point.instance.job_count();
                rep.cost_kind = point.instance.cost.is_unit() ? "unit" : "monomial";
                if (!point.instance.cost.is_unit()) rep.degree = point.instance.cost.degree();
                rep.seed = point.seed;
                rep.epsilon = opts.eps;
                rep.predicted_ne_cost = point.predicted_ne_cost;
                rep.predicted_opt_cost = point.predicted_opt_cost;
            }
        }
    };

    const size_t thread_count =
        std::min<size_t>(points.size(), std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::thread> threads;
    for (size_t i = 0; i < thread_count; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << kReportCsvHeader << "\n";
    for (const SweepRow& row : rows) out << row.result.report.csv_row() << "\n";
    return out.str();
}

}  // namespace poalab
