#ifndef POALAB_HARNESS_HPP
#define POALAB_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "poalab/mechanism.hpp"
#include "poalab/model.hpp"
#include "poalab/optimal.hpp"

namespace poalab {

inline constexpr const char* kReportCsvHeader =
    "instance_id,n,cost_kind,degree,base_worst_ne_cost,mech_worst_cost,opt_cost,opt_method,"
    "base_poa,mech_poa,predicted_ne_cost,predicted_opt_cost,runtime_ms,seed,epsilon";

struct PoaReport {
    std::string instance_id;
    int n = 0;
    std::string cost_kind;
    std::optional<double> degree;
    std::optional<double> base_worst_ne_cost;
    std::optional<double> mech_worst_cost;
    std::optional<double> opt_cost;
    std::string opt_method;
    std::optional<double> base_poa;
    std::optional<double> mech_poa;
    std::optional<double> predicted_ne_cost;
    std::optional<double> predicted_opt_cost;
    long long runtime_ms = 0;
    std::uint64_t seed = 0;
    double epsilon = kDefaultEps;

    std::string csv_row() const;
    nlohmann::json to_json() const;
};

enum class PoaMode { Base, Mechanism, Both };

struct PoaOptions {
    PoaMode mode = PoaMode::Both;
    std::uint64_t budget = 10000000;
    double eps = kDefaultEps;
    std::uint64_t seed = 0;
    bool record_runtime = true;  // false pins runtime_ms to 0 for byte-stable reports
    std::string instance_id;     // derived from meta when empty
    std::optional<double> predicted_ne_cost;
    std::optional<double> predicted_opt_cost;
};

struct PoaResult {
    PoaReport report;
    Instance instance;
    bool exact = true;  // false when a side was cut short by budget or heuristic fallback
    std::optional<Assignment> opt_assignment;
    std::optional<Assignment> worst_ne;
    std::optional<MechProfile> worst_mech;
    std::vector<std::string> notes;  // per-side budget/error messages
};

/// Stable identifier derived from generator metadata, else a content hash.
std::string derive_instance_id(const Instance& inst);

/// Worst equilibrium (base and/or mechanism) over exact optimum, with
/// witnesses. Budget overruns on one side leave that side's fields empty and
/// mark the result inexact rather than failing the whole computation.
PoaResult poa_exact(const Instance& inst, const PoaOptions& opts = {});

/// Writes the report (csv or json inferred from extension, default json) and
/// witness documents next to it; the JSON report references the witness files
/// by relative path. Returns the written report path.
std::string write_poa_result(const PoaResult& result, const std::string& out_path);

/// Recomputes every cost in a written JSON report from its witness files.
/// Returns a list of discrepancies (empty = audit clean).
std::vector<std::string> audit_poa_report(const std::string& report_path);

struct SweepPoint {
    Instance instance;
    std::string instance_id;
    std::uint64_t seed = 0;
    std::optional<double> predicted_ne_cost;
    std::optional<double> predicted_opt_cost;
};

struct SweepRow {
    PoaResult result;
    std::optional<std::string> error;
};

std::vector<SweepPoint> valley_sweep_points(const std::vector<int>& h_values, double d);
std::vector<SweepPoint> freeloader_sweep_points(const std::vector<int>& n_values, double d);
std::vector<SweepPoint> random_sweep_points(int count, int n, int horizon, const CostFunction& cost,
                                            bool common_slot, std::uint64_t base_seed);

/// One report row per point, evaluated concurrently, emitted in input order.
/// Per-row failures are recorded in the row and do not stop the sweep.
std::vector<SweepRow> run_sweep(const std::vector<SweepPoint>& points, const PoaOptions& opts);

std::string sweep_csv(const std::vector<SweepRow>& rows);

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;  // observed vs expected, with tolerance
    long long runtime_ms = 0;
};

struct AcceptanceOptions {
    double eps = kDefaultEps;
    std::uint64_t budget = 10000000;
    bool record_runtime = true;
    bool inject_fault = false;  // test hook: corrupts one expectation to force a failure
    std::string out_dir;        // when set, writes summary.csv and witness files there
};

/// Runs the full reproduction suite; one result per criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts = {});

/// Prints one PASS/FAIL line per criterion to stdout; returns a process exit
/// status (0 iff all passed).
int report_acceptance(const std::vector<CriterionResult>& results);

}  // namespace poalab

#endif
