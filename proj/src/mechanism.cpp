#include "poalab/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poalab/enumerate.hpp"
#include "poalab/optimal.hpp"

namespace poalab {

std::string mech_violation_name(MechViolationKind kind) {
    switch (kind) {
        case MechViolationKind::NegativePayment: return "negative_payment";
        case MechViolationKind::SlotNotCovered: return "slot_not_covered";
        case MechViolationKind::Overpayment: return "overpayment";
        case MechViolationKind::ImprovingDeviation: return "improving_deviation";
    }
    return "unknown";
}

nlohmann::json MechProfile::to_json() const {
    return nlohmann::json{{"slots", assignment.slots}, {"payments", payments.payments}};
}

MechProfile MechProfile::from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("slots") || !doc.contains("payments"))
        throw ValidationError("mechanism profile must be {\"slots\": [...], \"payments\": [...]}");
    MechProfile p;
    for (const auto& v : doc.at("slots")) p.assignment.slots.push_back(v.get<int>());
    for (const auto& v : doc.at("payments")) p.payments.payments.push_back(v.get<double>());
    if (p.assignment.size() != p.payments.size())
        throw ValidationError("mechanism profile slots/payments length mismatch");
    return p;
}

nlohmann::json SupportCertificate::to_json() const {
    nlohmann::json caps_doc = nlohmann::json::array();
    for (const auto& c : caps) {
        if (c)
            caps_doc.push_back(*c);
        else
            caps_doc.push_back(nullptr);
    }
    nlohmann::json doc = {{"feasible", feasible}, {"caps", caps_doc}};
    if (feasible) doc["payments"] = payments.payments;
    if (blocking_slot) doc["blocking_slot"] = *blocking_slot;
    return doc;
}

std::set<int> open_slots(const Instance& inst, const MechProfile& p, double eps) {
    const LoadProfile loads = load_profile(inst, p.assignment);
    if (p.payments.size() != inst.job_count())
        throw ValidationError("payment vector length does not match job count");
    std::vector<double> paid(static_cast<size_t>(inst.horizon) + 1, 0.0);
    for (int j = 0; j < inst.job_count(); ++j)
        paid[static_cast<size_t>(p.assignment.slots[static_cast<size_t>(j)])] +=
            p.payments.payments[static_cast<size_t>(j)];
    std::set<int> open;
    for (int t = 1; t <= inst.horizon; ++t)
        if (loads[t] > 0 && paid[static_cast<size_t>(t)] >= inst.cost.eval(loads[t]) - eps)
            open.insert(t);
    return open;
}

std::optional<double> deviation_cap(const Instance& inst, const Assignment& a, int job) {
    const LoadProfile loads = load_profile(inst, a);
    if (job < 0 || job >= inst.job_count())
        throw ValidationError("job index " + std::to_string(job) + " out of range");
    const Job& j = inst.jobs[static_cast<size_t>(job)];
    const int cur = a.slots[static_cast<size_t>(job)];
    std::optional<double> cap;
    for (int t = j.release; t < j.deadline; ++t) {
        if (t == cur) continue;
        const double m = inst.cost.marginal(loads[t]);
        if (!cap || m < *cap) cap = m;
    }
    return cap;
}

MechCheck is_mechanism_nash(const Instance& inst, const MechProfile& p, double eps,
                            DeviationPricing pricing) {
    const LoadProfile loads = load_profile(inst, p.assignment);
    if (p.payments.size() != inst.job_count())
        throw ValidationError("payment vector length does not match job count");
    const int n = inst.job_count();
    const std::vector<double>& pay = p.payments.payments;

    MechCheck check;
    auto flag = [&](MechViolation v) { check.violations.push_back(v); };

    for (int j = 0; j < n; ++j)
        if (pay[static_cast<size_t>(j)] < -eps)
            flag({MechViolationKind::NegativePayment, j, p.assignment.slots[static_cast<size_t>(j)],
                  -1, pay[static_cast<size_t>(j)], 0.0});

    std::vector<double> paid(static_cast<size_t>(inst.horizon) + 1, 0.0);
    for (int j = 0; j < n; ++j)
        paid[static_cast<size_t>(p.assignment.slots[static_cast<size_t>(j)])] += pay[static_cast<size_t>(j)];

    // occupied slots must be paid for, and paid exactly: anyone overpaying
    // could lower their declaration and keep the slot open
    for (int t = 1; t <= inst.horizon; ++t) {
        if (loads[t] == 0) continue;
        const double need = inst.cost.eval(loads[t]);
        const double got = paid[static_cast<size_t>(t)];
        if (got < need - eps) flag({MechViolationKind::SlotNotCovered, -1, t, -1, got, need});
        if (pricing == DeviationPricing::Marginal) {
            if (got > need + eps) flag({MechViolationKind::Overpayment, -1, t, -1, got, need});
        }
    }
    if (pricing == DeviationPricing::Residual) {
        for (int j = 0; j < n; ++j) {
            const int s = p.assignment.slots[static_cast<size_t>(j)];
            const double others = paid[static_cast<size_t>(s)] - pay[static_cast<size_t>(j)];
            const double needed = std::max(0.0, inst.cost.eval(loads[s]) - others);
            if (pay[static_cast<size_t>(j)] > needed + eps)
                flag({MechViolationKind::Overpayment, j, s, -1, pay[static_cast<size_t>(j)], needed});
        }
    }

    for (int j = 0; j < n; ++j) {
        const Job& job = inst.jobs[static_cast<size_t>(j)];
        const int s = p.assignment.slots[static_cast<size_t>(j)];
        for (int t = job.release; t < job.deadline; ++t) {
            if (t == s) continue;
            const double price =
                pricing == DeviationPricing::Marginal
                    ? inst.cost.marginal(loads[t])
                    : std::max(0.0, inst.cost.eval(loads[t] + 1) - paid[static_cast<size_t>(t)]);
            if (pay[static_cast<size_t>(j)] > price + eps)
                flag({MechViolationKind::ImprovingDeviation, j, s, t, pay[static_cast<size_t>(j)], price});
        }
    }

    check.is_equilibrium = check.violations.empty();
    return check;
}

SupportCertificate support_payments(const Instance& inst, const Assignment& a, double eps) {
    const LoadProfile loads = load_profile(inst, a);
    const int n = inst.job_count();

    SupportCertificate cert;
    cert.caps.resize(static_cast<size_t>(n));

    std::vector<double> finite_sum(static_cast<size_t>(inst.horizon) + 1, 0.0);
    std::vector<char> has_unbounded(static_cast<size_t>(inst.horizon) + 1, 0);
    for (int j = 0; j < n; ++j) {
        const Job& job = inst.jobs[static_cast<size_t>(j)];
        const int s = a.slots[static_cast<size_t>(j)];
        std::optional<double> cap;
        for (int t = job.release; t < job.deadline; ++t) {
            if (t == s) continue;
            const double m = inst.cost.marginal(loads[t]);
            if (!cap || m < *cap) cap = m;
        }
        cert.caps[static_cast<size_t>(j)] = cap;
        if (cap)
            finite_sum[static_cast<size_t>(s)] += *cap;
        else
            has_unbounded[static_cast<size_t>(s)] = 1;
    }

    for (int t = 1; t <= inst.horizon; ++t) {
        if (loads[t] == 0 || has_unbounded[static_cast<size_t>(t)]) continue;
        if (finite_sum[static_cast<size_t>(t)] < inst.cost.eval(loads[t]) - eps) {
            cert.feasible = false;
            cert.blocking_slot = t;
            return cert;
        }
    }

    // fill each slot: finite caps scaled proportionally, unbounded-cap jobs
    // split any residual equally
    cert.feasible = true;
    cert.payments.payments.assign(static_cast<size_t>(n), 0.0);
    for (int t = 1; t <= inst.horizon; ++t) {
        if (loads[t] == 0) continue;
        const double need = inst.cost.eval(loads[t]);
        const double finite = finite_sum[static_cast<size_t>(t)];
        const double scale = finite > 0.0 ? std::min(1.0, need / finite) : 0.0;
        double residual = need - scale * finite;
        if (residual < 0.0) residual = 0.0;

        int unbounded_here = 0;
        for (int j = 0; j < n; ++j)
            if (a.slots[static_cast<size_t>(j)] == t && !cert.caps[static_cast<size_t>(j)])
                ++unbounded_here;
        for (int j = 0; j < n; ++j) {
            if (a.slots[static_cast<size_t>(j)] != t) continue;
            if (cert.caps[static_cast<size_t>(j)])
                cert.payments.payments[static_cast<size_t>(j)] = scale * *cert.caps[static_cast<size_t>(j)];
            else
                cert.payments.payments[static_cast<size_t>(j)] = residual / unbounded_here;
        }
    }
    return cert;
}

std::optional<MechOutcome> worst_supportable(const Instance& inst, std::uint64_t budget, double eps,
                                             bool prune_symmetry) {
    const CostTable table(inst.cost, inst.job_count());
    const int n = inst.job_count();

    Assignment best;
    double best_cost = 0.0;
    bool found = false;

    std::vector<double> finite_sum(static_cast<size_t>(inst.horizon) + 1, 0.0);
    std::vector<char> has_unbounded(static_cast<size_t>(inst.horizon) + 1, 0);

    for_each_assignment(
        inst, budget, prune_symmetry, [&](const std::vector<int>& slots, const LoadProfile& loads) {
            for (int t = 1; t <= inst.horizon; ++t) {
                finite_sum[static_cast<size_t>(t)] = 0.0;
                has_unbounded[static_cast<size_t>(t)] = 0;
            }
            for (int j = 0; j < n; ++j) {
                const Job& job = inst.jobs[static_cast<size_t>(j)];
                const int s = slots[static_cast<size_t>(j)];
                double cap = std::numeric_limits<double>::infinity();
                bool finite = false;
                for (int t = job.release; t < job.deadline; ++t) {
                    if (t == s) continue;
                    const double m = table.marginal(loads[t]);
                    if (m < cap) cap = m;
                    finite = true;
                }
                if (finite)
                    finite_sum[static_cast<size_t>(s)] += cap;
                else
                    has_unbounded[static_cast<size_t>(s)] = 1;
            }
            double cost = 0.0;
            for (int t = 1; t <= inst.horizon; ++t) {
                if (loads[t] == 0) continue;
                if (!has_unbounded[static_cast<size_t>(t)] &&
                    finite_sum[static_cast<size_t>(t)] < table.eval(loads[t]) - eps)
                    return;  // blocking slot: not supportable
                cost += table.eval(loads[t]);
            }
            if (!found || cost > best_cost) {
                best.slots = slots;
                best_cost = cost;
                found = true;
            }
        });

    if (!found) return std::nullopt;
    SupportCertificate cert = support_payments(inst, best, eps);
    MechOutcome outcome;
    outcome.profile.assignment = std::move(best);
    outcome.profile.payments = cert.payments;
    outcome.cost = best_cost;
    return outcome;
}

PaymentProfile payments_unit_optimal(const Instance& inst, const Assignment& opt) {
    if (!inst.cost.is_unit())
        throw ValidationError("payments_unit_optimal requires a unit cost function");
    const LoadProfile loads = load_profile(inst, opt);
    const int n = inst.job_count();

    PaymentProfile xi;
    xi.payments.assign(static_cast<size_t>(n), 0.0);
    for (int t = 1; t <= inst.horizon; ++t) {
        if (loads[t] == 0) continue;
        int payer = -1;
        for (int j = 0; j < n && payer < 0; ++j) {
            if (opt.slots[static_cast<size_t>(j)] != t) continue;
            const Job& job = inst.jobs[static_cast<size_t>(j)];
            bool sees_other_occupied = false;
            for (int u = job.release; u < job.deadline; ++u)
                if (u != t && loads[u] > 0) sees_other_occupied = true;
            if (!sees_other_occupied) payer = j;
        }
        if (payer < 0)
            throw ValidationError(
                "assignment is not optimal: every job on slot " + std::to_string(t) +
                " has another occupied slot in its window, so merging slot " + std::to_string(t) +
                " away would be cheaper");
        xi.payments[static_cast<size_t>(payer)] = 1.0;
    }
    return xi;
}

PaymentProfile payments_common_slot(const Instance& inst, const Assignment& opt) {
    if (inst.cost.is_unit() || inst.cost.degree() >= 1.0)
        throw ValidationError("payments_common_slot requires monomial cost with degree < 1");
    const LoadProfile loads = load_profile(inst, opt);
    const auto occupied = loads.occupied();
    if (occupied.size() != 1)
        throw ValidationError("payments_common_slot requires a single-slot assignment, found " +
                              std::to_string(occupied.size()) + " occupied slots");
    const int n = inst.job_count();
    PaymentProfile xi;
    xi.payments.assign(static_cast<size_t>(n), inst.cost.share(n));  // n^(d-1) each
    return xi;
}

double mechanism_poa(const Instance& inst, std::uint64_t budget, double eps) {
    const OptResult opt = solve_optimal(inst, budget);
    if (!opt.exact)
        throw ValidationError("mechanism_poa requires an exact optimum; solver returned heuristic");
    const auto worst = worst_supportable(inst, budget, eps);
    if (!worst)
        throw ValidationError("no supportable outcome exists for this instance");
    return worst->cost / opt.cost;
}

}  // namespace poalab
