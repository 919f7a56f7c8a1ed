#ifndef POALAB_MECHANISM_HPP
#define POALAB_MECHANISM_HPP

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "poalab/model.hpp"

namespace poalab {

/// One nonnegative declared payment per job.
struct PaymentProfile {
    std::vector<double> payments;

    int size() const { return static_cast<int>(payments.size()); }
};

/// A strategy profile of the payment-declaring game: slot + payment per job.
struct MechProfile {
    Assignment assignment;
    PaymentProfile payments;

    nlohmann::json to_json() const;
    static MechProfile from_json(const nlohmann::json& doc);
};

/// How a contemplated deviation to slot t is priced. Residual reads the
/// opening rule literally: the mover pays max{0, c(l_t+1) - sum of payments
/// declared on t}. Marginal prices the move at c(l_t+1) - c(l_t), i.e. the
/// incumbents keep covering what the slot cost before the move. The two agree
/// on any profile whose occupied slots are paid exactly (which both modes
/// require), so the switch is documentary.
enum class DeviationPricing { Marginal, Residual };

enum class MechViolationKind {
    NegativePayment,     // job: payment < 0
    SlotNotCovered,      // slot: payments sum below activation cost
    Overpayment,         // slot (Marginal) or job (Residual): paying above what is needed
    ImprovingDeviation,  // job could move to to_slot and pay less
};

std::string mech_violation_name(MechViolationKind kind);

struct MechViolation {
    MechViolationKind kind = MechViolationKind::ImprovingDeviation;
    int job = -1;   // -1 for slot-level conditions
    int slot = -1;
    int to_slot = -1;
    double value = 0.0;
    double bound = 0.0;
};

struct MechCheck {
    bool is_equilibrium = false;
    std::vector<MechViolation> violations;
};

/// Slots whose declared payments cover their activation cost (within eps).
std::set<int> open_slots(const Instance& inst, const MechProfile& p, double eps = kDefaultEps);

/// Largest payment job j can sustain at equilibrium: the cheapest marginal
/// move elsewhere in its window (c(l_t+1) - c(l_t); c(1) on empty slots).
/// nullopt when the window has no other slot (unbounded).
std::optional<double> deviation_cap(const Instance& inst, const Assignment& a, int job);

/// Equilibrium test for the mechanism game: every occupied slot is paid
/// exactly its cost, and no job pays more than its cheapest deviation price.
MechCheck is_mechanism_nash(const Instance& inst, const MechProfile& p, double eps = kDefaultEps,
                            DeviationPricing pricing = DeviationPricing::Marginal);

struct SupportCertificate {
    bool feasible = false;
    std::vector<std::optional<double>> caps;  // nullopt = unbounded
    PaymentProfile payments;                  // set when feasible
    std::optional<int> blocking_slot;         // set when infeasible

    nlohmann::json to_json() const;
};

/// Decides whether `a` extends to a mechanism equilibrium: feasible iff every
/// occupied slot's deviation caps sum to at least its cost. Payments fill
/// each slot proportionally to the finite caps, with unbounded-cap jobs
/// absorbing any residual.
SupportCertificate support_payments(const Instance& inst, const Assignment& a,
                                    double eps = kDefaultEps);

struct MechOutcome {
    MechProfile profile;
    double cost = 0.0;
};

/// Maximum-cost assignment admitting supporting payments, with its certificate
/// profile. nullopt when no assignment is supportable.
std::optional<MechOutcome> worst_supportable(const Instance& inst, std::uint64_t budget = 10000000,
                                             double eps = kDefaultEps, bool prune_symmetry = true);

/// Unit-cost equilibrium payments over an optimal assignment: on every
/// occupied slot some job sees no other occupied slot in its window
/// (otherwise the assignment was not optimal); that job pays the full unit
/// cost, everyone else freeloads.
PaymentProfile payments_unit_optimal(const Instance& inst, const Assignment& opt);

/// Fair-share payments n^(d-1) over a single-slot optimum, monomial d < 1.
PaymentProfile payments_common_slot(const Instance& inst, const Assignment& opt);

/// worst_supportable cost over the exact optimal cost.
double mechanism_poa(const Instance& inst, std::uint64_t budget = 10000000,
                     double eps = kDefaultEps);

}  // namespace poalab

#endif
