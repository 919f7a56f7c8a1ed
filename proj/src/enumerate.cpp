#include "poalab/enumerate.hpp"

#include <algorithm>
#include <limits>
#include <map>

namespace poalab {

namespace {

constexpr std::uint64_t kCountCap = std::uint64_t{1} << 63;

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a >= kCountCap / b) return kCountCap;
    return a * b;
}

// C(w+g-1, g) saturating: multiset choices for g identical-window jobs.
std::uint64_t multiset_count(std::uint64_t w, std::uint64_t g) {
    std::uint64_t num = 1;
    for (std::uint64_t i = 1; i <= g; ++i) {
        // (w-1+i)/i is not integral termwise; build product then divide stepwise
        num = mul_sat(num, w - 1 + i);
        if (num == kCountCap) return kCountCap;
        num /= i;
    }
    return num;
}

}  // namespace

CostTable::CostTable(const CostFunction& cost, int max_load) {
    eval_.resize(static_cast<size_t>(max_load) + 2);
    share_.resize(static_cast<size_t>(max_load) + 2);
    phi_.resize(static_cast<size_t>(max_load) + 2);
    eval_[0] = 0.0;
    share_[0] = 0.0;
    phi_[0] = 0.0;
    for (int k = 1; k <= max_load + 1; ++k) {
        eval_[static_cast<size_t>(k)] = cost.eval(k);
        share_[static_cast<size_t>(k)] = eval_[static_cast<size_t>(k)] / k;
        phi_[static_cast<size_t>(k)] = phi_[static_cast<size_t>(k) - 1] + share_[static_cast<size_t>(k)];
    }
}

std::uint64_t raw_assignment_count(const Instance& inst) {
    std::uint64_t total = 1;
    for (const Job& j : inst.jobs) total = mul_sat(total, static_cast<std::uint64_t>(j.window_size()));
    return total;
}

std::uint64_t pruned_assignment_count(const Instance& inst) {
    std::map<std::pair<int, int>, std::uint64_t> groups;
    for (const Job& j : inst.jobs) ++groups[{j.release, j.deadline}];
    std::uint64_t total = 1;
    for (const auto& [window, g] : groups) {
        const auto w = static_cast<std::uint64_t>(window.second - window.first);
        total = mul_sat(total, multiset_count(w, g));
    }
    return total;
}

void for_each_assignment(const Instance& inst, std::uint64_t budget, bool prune_symmetry,
                         const std::function<void(const std::vector<int>&, const LoadProfile&)>& visit) {
    inst.validate();
    const std::uint64_t count = prune_symmetry ? pruned_assignment_count(inst) : raw_assignment_count(inst);
    if (count > budget) {
        throw BudgetExceeded("assignment space of " + std::to_string(count) + " (" +
                                 std::to_string(raw_assignment_count(inst)) +
                                 " before symmetry pruning) exceeds budget " + std::to_string(budget),
                             count);
    }

    const int n = inst.job_count();
    // prev_in_group[j] = latest j' < j with an identical window, or -1
    std::vector<int> prev_in_group(static_cast<size_t>(n), -1);
    std::map<std::pair<int, int>, int> last_seen;
    for (int j = 0; j < n; ++j) {
        const Job& job = inst.jobs[static_cast<size_t>(j)];
        auto key = std::make_pair(job.release, job.deadline);
        auto it = last_seen.find(key);
        if (it != last_seen.end()) prev_in_group[static_cast<size_t>(j)] = it->second;
        last_seen[key] = j;
    }

    std::vector<int> slots(static_cast<size_t>(n), 0);
    LoadProfile loads(inst.horizon);

    // lexicographic DFS; within a group, slots are nondecreasing
    auto rec = [&](auto&& self, int j) -> void {
        if (j == n) {
            visit(slots, loads);
            return;
        }
        const Job& job = inst.jobs[static_cast<size_t>(j)];
        int lo = job.release;
        const int prev = prev_in_group[static_cast<size_t>(j)];
        if (prune_symmetry && prev >= 0) lo = std::max(lo, slots[static_cast<size_t>(prev)]);
        for (int s = lo; s < job.deadline; ++s) {
            slots[static_cast<size_t>(j)] = s;
            ++loads.at(s);
            self(self, j + 1);
            --loads.at(s);
        }
    };
    rec(rec, 0);
}

}  // namespace poalab
