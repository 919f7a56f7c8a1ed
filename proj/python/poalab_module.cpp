#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "poalab/equilibrium.hpp"
#include "poalab/generators.hpp"
#include "poalab/harness.hpp"
#include "poalab/json_io.hpp"

namespace py = pybind11;
using namespace poalab;

namespace {

std::optional<double> cap_or_none(const Instance& inst, const Assignment& a, int job) {
    return deviation_cap(inst, a, job);
}

}  // namespace

PYBIND11_MODULE(poalab, m) {
    m.doc() = "cost-sharing scheduling games: equilibria, optimal assignments, the "
              "payment-declaring coordination mechanism, and price-of-anarchy measurement";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);

    py::class_<CostFunction>(m, "CostFunction")
        .def_static("unit", &CostFunction::unit)
        .def_static("monomial", &CostFunction::monomial, py::arg("degree"))
        .def("eval", &CostFunction::eval, py::arg("load"))
        .def("share", &CostFunction::share, py::arg("load"))
        .def("marginal", &CostFunction::marginal, py::arg("load"))
        .def_property_readonly("is_unit", &CostFunction::is_unit)
        .def_property_readonly("degree", &CostFunction::degree);

    py::class_<Job>(m, "Job")
        .def(py::init([](int release, int deadline) { return Job{release, deadline}; }),
             py::arg("release"), py::arg("deadline"))
        .def_readwrite("release", &Job::release)
        .def_readwrite("deadline", &Job::deadline)
        .def("contains", &Job::contains, py::arg("slot"))
        .def("__repr__", [](const Job& j) {
            return "Job(release=" + std::to_string(j.release) +
                   ", deadline=" + std::to_string(j.deadline) + ")";
        });

    py::class_<Instance>(m, "Instance")
        .def(py::init([](const CostFunction& cost, int horizon,
                         const std::vector<std::pair<int, int>>& jobs) {
                 Instance inst;
                 inst.cost = cost;
                 inst.horizon = horizon;
                 for (const auto& [r, d] : jobs) inst.jobs.push_back({r, d});
                 inst.validate();
                 return inst;
             }),
             py::arg("cost"), py::arg("horizon"), py::arg("jobs"))
        .def_readonly("cost", &Instance::cost)
        .def_readonly("horizon", &Instance::horizon)
        .def_readonly("jobs", &Instance::jobs)
        .def_property_readonly("n", &Instance::job_count)
        .def("to_json", [](const Instance& inst) { return instance_to_json(inst).dump(2); })
        .def_static("from_json", [](const std::string& text) { return read_instance(text); })
        .def("__repr__", [](const Instance& inst) {
            return "Instance(n=" + std::to_string(inst.job_count()) +
                   ", horizon=" + std::to_string(inst.horizon) + ")";
        });

    py::class_<Assignment>(m, "Assignment")
        .def(py::init([](const std::vector<int>& slots) { return Assignment{slots}; }),
             py::arg("slots"))
        .def_readonly("slots", &Assignment::slots);

    m.def("load_profile",
          [](const Instance& inst, const Assignment& a) {
              const LoadProfile loads = load_profile(inst, a);
              std::map<int, int> out;
              for (int t : loads.occupied()) out[t] = loads[t];
              return out;
          },
          py::arg("instance"), py::arg("assignment"), "occupied-slot load counts");
    m.def("total_cost", py::overload_cast<const Instance&, const Assignment&>(&total_cost),
          py::arg("instance"), py::arg("assignment"));

    py::class_<NashViolation>(m, "NashViolation")
        .def_readonly("job", &NashViolation::job)
        .def_readonly("from_slot", &NashViolation::from_slot)
        .def_readonly("to_slot", &NashViolation::to_slot)
        .def_readonly("current_share", &NashViolation::current_share)
        .def_readonly("deviation_share", &NashViolation::deviation_share);
    py::class_<NashCheck>(m, "NashCheck")
        .def_readonly("is_equilibrium", &NashCheck::is_equilibrium)
        .def_readonly("violations", &NashCheck::violations)
        .def("__bool__", [](const NashCheck& c) { return c.is_equilibrium; });

    m.def("is_nash", &is_nash, py::arg("instance"), py::arg("assignment"),
          py::arg("eps") = kDefaultEps);
    m.def("best_response", &best_response, py::arg("instance"), py::arg("assignment"),
          py::arg("job"));
    m.def("rosenthal_potential", &rosenthal_potential, py::arg("instance"), py::arg("assignment"));

    py::enum_<BrdOrder>(m, "BrdOrder")
        .value("RoundRobin", BrdOrder::RoundRobin)
        .value("Random", BrdOrder::Random);
    py::class_<BrdStep>(m, "BrdStep")
        .def_readonly("job", &BrdStep::job)
        .def_readonly("from_slot", &BrdStep::from_slot)
        .def_readonly("to_slot", &BrdStep::to_slot)
        .def_readonly("potential_before", &BrdStep::potential_before)
        .def_readonly("potential_after", &BrdStep::potential_after);
    py::class_<BrdTrace>(m, "BrdTrace")
        .def_readonly("steps", &BrdTrace::steps)
        .def_readonly("converged", &BrdTrace::converged);
    py::class_<BrdResult>(m, "BrdResult")
        .def_readonly("assignment", &BrdResult::assignment)
        .def_readonly("trace", &BrdResult::trace);
    m.def("run_brd", &run_brd, py::arg("instance"), py::arg("start"),
          py::arg("order") = BrdOrder::RoundRobin, py::arg("seed") = 0,
          py::arg("max_steps") = 100000, py::arg("eps") = kDefaultEps);

    py::class_<NashOutcome>(m, "NashOutcome")
        .def_readonly("assignment", &NashOutcome::assignment)
        .def_readonly("cost", &NashOutcome::cost);
    m.def("worst_nash", &worst_nash, py::arg("instance"), py::arg("budget") = 10000000,
          py::arg("eps") = kDefaultEps, py::arg("prune_symmetry") = true);
    m.def("enumerate_nash", &enumerate_nash, py::arg("instance"), py::arg("budget") = 10000000,
          py::arg("eps") = kDefaultEps, py::arg("prune_symmetry") = true,
          py::arg("dedup_by_loads") = false);

    py::enum_<OptMethod>(m, "OptMethod")
        .value("BruteForce", OptMethod::BruteForce)
        .value("UnitGreedy", OptMethod::UnitGreedy)
        .value("ConvexFlow", OptMethod::ConvexFlow)
        .value("ConcaveBnB", OptMethod::ConcaveBnB)
        .value("Heuristic", OptMethod::Heuristic);
    py::class_<OptResult>(m, "OptResult")
        .def_readonly("assignment", &OptResult::assignment)
        .def_readonly("cost", &OptResult::cost)
        .def_readonly("method", &OptResult::method)
        .def_readonly("exact", &OptResult::exact)
        .def_readonly("lower_bound", &OptResult::lower_bound)
        .def("to_json", [](const OptResult& r) { return r.to_json().dump(2); });
    m.def("opt_bruteforce", &opt_bruteforce, py::arg("instance"), py::arg("budget") = 10000000);
    m.def("opt_unit_greedy", &opt_unit_greedy, py::arg("instance"));
    m.def("opt_flow_convex", &opt_flow_convex, py::arg("instance"));
    m.def("opt_concave_search", &opt_concave_search, py::arg("instance"),
          py::arg("budget") = 10000000);
    m.def("solve_optimal", &solve_optimal, py::arg("instance"), py::arg("budget") = 10000000);

    py::class_<PaymentProfile>(m, "PaymentProfile")
        .def(py::init([](const std::vector<double>& p) { return PaymentProfile{p}; }),
             py::arg("payments"))
        .def_readonly("payments", &PaymentProfile::payments);
    py::class_<MechProfile>(m, "MechProfile")
        .def(py::init([](const Assignment& a, const PaymentProfile& p) {
                 return MechProfile{a, p};
             }),
             py::arg("assignment"), py::arg("payments"))
        .def_readonly("assignment", &MechProfile::assignment)
        .def_readonly("payments", &MechProfile::payments)
        .def("to_json", [](const MechProfile& p) { return p.to_json().dump(2); });

    py::enum_<DeviationPricing>(m, "DeviationPricing")
        .value("Marginal", DeviationPricing::Marginal)
        .value("Residual", DeviationPricing::Residual);
    py::class_<MechViolation>(m, "MechViolation")
        .def_property_readonly("kind",
                               [](const MechViolation& v) { return mech_violation_name(v.kind); })
        .def_readonly("job", &MechViolation::job)
        .def_readonly("slot", &MechViolation::slot)
        .def_readonly("to_slot", &MechViolation::to_slot)
        .def_readonly("value", &MechViolation::value)
        .def_readonly("bound", &MechViolation::bound);
    py::class_<MechCheck>(m, "MechCheck")
        .def_readonly("is_equilibrium", &MechCheck::is_equilibrium)
        .def_readonly("violations", &MechCheck::violations)
        .def("__bool__", [](const MechCheck& c) { return c.is_equilibrium; });

    m.def("open_slots", &open_slots, py::arg("instance"), py::arg("profile"),
          py::arg("eps") = kDefaultEps);
    m.def("deviation_cap", &cap_or_none, py::arg("instance"), py::arg("assignment"), py::arg("job"),
          "cheapest marginal move elsewhere in the window; None when unbounded");
    m.def("is_mechanism_nash", &is_mechanism_nash, py::arg("instance"), py::arg("profile"),
          py::arg("eps") = kDefaultEps, py::arg("pricing") = DeviationPricing::Marginal);

    py::class_<SupportCertificate>(m, "SupportCertificate")
        .def_readonly("feasible", &SupportCertificate::feasible)
        .def_readonly("caps", &SupportCertificate::caps)
        .def_readonly("payments", &SupportCertificate::payments)
        .def_readonly("blocking_slot", &SupportCertificate::blocking_slot)
        .def("to_json", [](const SupportCertificate& c) { return c.to_json().dump(2); });
    m.def("support_payments", &support_payments, py::arg("instance"), py::arg("assignment"),
          py::arg("eps") = kDefaultEps);

    py::class_<MechOutcome>(m, "MechOutcome")
        .def_readonly("profile", &MechOutcome::profile)
        .def_readonly("cost", &MechOutcome::cost);
    m.def("worst_supportable", &worst_supportable, py::arg("instance"),
          py::arg("budget") = 10000000, py::arg("eps") = kDefaultEps,
          py::arg("prune_symmetry") = true);
    m.def("payments_unit_optimal", &payments_unit_optimal, py::arg("instance"), py::arg("optimum"));
    m.def("payments_common_slot", &payments_common_slot, py::arg("instance"), py::arg("optimum"));
    m.def("mechanism_poa", &mechanism_poa, py::arg("instance"), py::arg("budget") = 10000000,
          py::arg("eps") = kDefaultEps);

    py::class_<NamedFamily>(m, "NamedFamily")
        .def_readonly("instance", &NamedFamily::instance)
        .def_readonly("canonical_ne", &NamedFamily::canonical_ne)
        .def_readonly("canonical_payments", &NamedFamily::canonical_payments)
        .def_readonly("reference_opt", &NamedFamily::reference_opt)
        .def_readonly("provenance", &NamedFamily::provenance)
        .def_readonly("predicted_ne_cost", &NamedFamily::predicted_ne_cost)
        .def_readonly("predicted_opt_cost", &NamedFamily::predicted_opt_cost);
    m.def("gen_valley", &gen_valley, py::arg("h"), py::arg("d"));
    m.def("gen_quadratic", &gen_quadratic);
    m.def("gen_two_job_unit", &gen_two_job_unit);
    m.def("gen_freeloader", &gen_freeloader, py::arg("n"), py::arg("d"));
    py::enum_<RandomShape>(m, "RandomShape")
        .value("General", RandomShape::General)
        .value("CommonSlot", RandomShape::CommonSlot);
    m.def("gen_random", &gen_random, py::arg("n"), py::arg("horizon"), py::arg("cost"),
          py::arg("seed"), py::arg("shape") = RandomShape::General, py::arg("t_star") = 1);

    py::enum_<PoaMode>(m, "PoaMode")
        .value("Base", PoaMode::Base)
        .value("Mechanism", PoaMode::Mechanism)
        .value("Both", PoaMode::Both);
    m.def(
        "poa_exact",
        [](const Instance& inst, PoaMode mode, std::uint64_t budget, double eps) {
            PoaOptions opts;
            opts.mode = mode;
            opts.budget = budget;
            opts.eps = eps;
            const PoaResult r = poa_exact(inst, opts);
            nlohmann::json doc = r.report.to_json();
            doc["exact"] = r.exact;
            py::dict out;
            for (const auto& [key, value] : doc.items()) {
                if (value.is_null()) out[key.c_str()] = py::none();
                else if (value.is_boolean()) out[key.c_str()] = value.get<bool>();
                else if (value.is_number_integer()) out[key.c_str()] = value.get<long long>();
                else if (value.is_number_unsigned()) out[key.c_str()] = value.get<std::uint64_t>();
                else if (value.is_number_float()) out[key.c_str()] = value.get<double>();
                else out[key.c_str()] = value.get<std::string>();
            }
            return out;
        },
        py::arg("instance"), py::arg("mode") = PoaMode::Both, py::arg("budget") = 10000000,
        py::arg("eps") = kDefaultEps,
        "worst equilibrium / optimum ratios as a report dict");
}
