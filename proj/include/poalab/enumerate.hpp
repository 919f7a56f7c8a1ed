#ifndef POALAB_ENUMERATE_HPP
#define POALAB_ENUMERATE_HPP

#include <cstdint>
#include <functional>

#include "poalab/model.hpp"

namespace poalab {

/// Memoized cost lookups for loads 0..n (loads never exceed the job count).
/// Keeps pow() out of enumeration inner loops.
struct CostTable {
    CostTable(const CostFunction& cost, int max_load);

    double eval(int load) const { return eval_[static_cast<size_t>(load)]; }
    double share(int load) const { return share_[static_cast<size_t>(load)]; }
    double marginal(int load) const { return eval(load + 1) - eval(load); }
    /// Rosenthal slot term: sum_{k<=load} c(k)/k.
    double share_prefix(int load) const { return phi_[static_cast<size_t>(load)]; }

private:
    std::vector<double> eval_;   // index 0..max_load+1
    std::vector<double> share_;  // index 1..max_load+1 (index 0 unused)
    std::vector<double> phi_;    // prefix sums of share_
};

/// Product of window sizes, saturating at 2^63.
std::uint64_t raw_assignment_count(const Instance& inst);

/// Assignment count after identical-window symmetry pruning: product over
/// identical-window groups of multiset combinations C(w+g-1, g), saturating.
std::uint64_t pruned_assignment_count(const Instance& inst);

/// Visits every assignment (one representative per identical-window-group
/// orbit when prune_symmetry is set) in lexicographic order, maintaining the
/// load profile incrementally. Throws BudgetExceeded up front when the space
/// exceeds `budget`.
void for_each_assignment(const Instance& inst, std::uint64_t budget, bool prune_symmetry,
                         const std::function<void(const std::vector<int>&, const LoadProfile&)>& visit);

}  // namespace poalab

#endif
