#ifndef POALAB_OPTIMAL_HPP
#define POALAB_OPTIMAL_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "poalab/model.hpp"

namespace poalab {

enum class OptMethod { BruteForce, UnitGreedy, ConvexFlow, ConcaveBnB, Heuristic };

std::string opt_method_name(OptMethod m);

struct OptResult {
    Assignment assignment;
    double cost = 0.0;
    OptMethod method = OptMethod::BruteForce;
    bool exact = false;
    /// Only set on inexact results: a cost no optimum can beat.
    std::optional<double> lower_bound;

    nlohmann::json to_json() const;
};

/// Exhaustive minimum over the (symmetry-pruned) assignment space.
OptResult opt_bruteforce(const Instance& inst, std::uint64_t budget = 10000000);

/// Unit cost only: minimum number of occupied slots via the earliest-deadline
/// stabbing greedy (open slot deadline-1 for the first unserved job, assign
/// every job whose window covers it).
OptResult opt_unit_greedy(const Instance& inst);

/// Monomial d >= 1: exact min-cost assignment by successive shortest
/// augmentations. Each insertion takes the relocation chain ending at the
/// reachable slot of minimum marginal cost; validity rests on marginals
/// c(k)-c(k-1) being nondecreasing, so d < 1 and unit costs are refused.
OptResult opt_flow_convex(const Instance& inst);

/// Monomial d < 1: slot-ordered branch over per-slot placement counts of
/// identical-window job groups, memoized; exact when the search completes
/// within `budget` transitions, otherwise a consolidation heuristic result
/// flagged exact=false with the trivial lower bound c(n).
OptResult opt_concave_search(const Instance& inst, std::uint64_t budget = 10000000);

/// Dispatch by cost shape: Unit -> greedy, d >= 1 -> flow, d < 1 -> concave.
OptResult solve_optimal(const Instance& inst, std::uint64_t budget = 10000000);

}  // namespace poalab

#endif
