#ifndef POALAB_EQUILIBRIUM_HPP
#define POALAB_EQUILIBRIUM_HPP

#include <cstdint>
#include <vector>

#include "poalab/model.hpp"

namespace poalab {

/// One profitable unilateral deviation: moving `job` from `from_slot` to
/// `to_slot` drops its share from current_share to deviation_share.
struct NashViolation {
    int job = 0;
    int from_slot = 0;
    int to_slot = 0;
    double current_share = 0.0;
    double deviation_share = 0.0;
};

struct NashCheck {
    bool is_equilibrium = false;
    std::vector<NashViolation> violations;
};

/// Equilibrium test for the base game: every job's share is at most the share
/// it would get on any other slot of its window (within eps). Returns all
/// violations when the test fails.
NashCheck is_nash(const Instance& inst, const Assignment& a, double eps = kDefaultEps);

/// Slot of j's cheapest share given everyone else stays put. Ties keep the
/// current slot, otherwise the smallest slot index wins.
int best_response(const Instance& inst, const Assignment& a, int job);

/// Rosenthal potential sum_t sum_{k<=l_t} c(k)/k; strictly decreases under any
/// strictly improving unilateral move by exactly the mover's share delta.
double rosenthal_potential(const Instance& inst, const Assignment& a);

enum class BrdOrder { RoundRobin, Random };

struct BrdStep {
    int job = 0;
    int from_slot = 0;
    int to_slot = 0;
    double potential_before = 0.0;
    double potential_after = 0.0;
};

struct BrdTrace {
    std::vector<BrdStep> steps;
    bool converged = false;
};

struct BrdResult {
    Assignment assignment;
    BrdTrace trace;
};

/// Best-response dynamics from `start`. A move is taken only when it improves
/// the mover's share by more than eps, so the potential strictly decreases
/// step over step and the dynamics terminate. Throws BudgetExceeded when more
/// than max_steps improving moves occur. `seed` drives BrdOrder::Random,
/// which picks uniformly among the jobs that currently have improving moves.
BrdResult run_brd(const Instance& inst, const Assignment& start, BrdOrder order,
                  std::uint64_t seed = 0, int max_steps = 100000, double eps = kDefaultEps);

struct NashOutcome {
    Assignment assignment;
    double cost = 0.0;
};

/// Exhaustive worst (maximum-cost) equilibrium of the base game.
NashOutcome worst_nash(const Instance& inst, std::uint64_t budget = 10000000,
                       double eps = kDefaultEps, bool prune_symmetry = true);

/// All equilibria of the base game, one representative per identical-window
/// symmetry orbit (pass dedup_by_loads to collapse further to load profiles).
std::vector<NashOutcome> enumerate_nash(const Instance& inst, std::uint64_t budget = 10000000,
                                        double eps = kDefaultEps, bool prune_symmetry = true,
                                        bool dedup_by_loads = false);

}  // namespace poalab

#endif
