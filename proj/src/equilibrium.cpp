#include "poalab/equilibrium.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "poalab/enumerate.hpp"

namespace poalab {

namespace {

// Fast early-exit equilibrium test against precomputed share tables.
bool is_nash_fast(const Instance& inst, const CostTable& table, const std::vector<int>& slots,
                  const LoadProfile& loads, double eps) {
    for (int j = 0; j < inst.job_count(); ++j) {
        const Job& job = inst.jobs[static_cast<size_t>(j)];
        const int cur_slot = slots[static_cast<size_t>(j)];
        const double cur = table.share(loads[cur_slot]);
        for (int t = job.release; t < job.deadline; ++t) {
            if (t == cur_slot) continue;
            if (table.share(loads[t] + 1) < cur - eps) return false;
        }
    }
    return true;
}

}  // namespace

NashCheck is_nash(const Instance& inst, const Assignment& a, double eps) {
    const LoadProfile loads = load_profile(inst, a);
    NashCheck result;
    result.is_equilibrium = true;
    for (int j = 0; j < inst.job_count(); ++j) {
        const Job& job = inst.jobs[static_cast<size_t>(j)];
        const int cur_slot = a.slots[static_cast<size_t>(j)];
        const double cur = inst.cost.share(loads[cur_slot]);
        for (int t = job.release; t < job.deadline; ++t) {
            if (t == cur_slot) continue;
            const double dev = inst.cost.share(loads[t] + 1);
            if (dev < cur - eps) {
                result.is_equilibrium = false;
                result.violations.push_back({j, cur_slot, t, cur, dev});
            }
        }
    }
    return result;
}

int best_response(const Instance& inst, const Assignment& a, int job) {
    if (job < 0 || job >= inst.job_count())
        throw ValidationError("job index " + std::to_string(job) + " out of range");
    const LoadProfile loads = load_profile(inst, a);
    const Job& j = inst.jobs[static_cast<size_t>(job)];
    const int cur_slot = a.slots[static_cast<size_t>(job)];
    int best_slot = cur_slot;
    double best_share = inst.cost.share(loads[cur_slot]);
    for (int t = j.release; t < j.deadline; ++t) {
        if (t == cur_slot) continue;
        const double dev = inst.cost.share(loads[t] + 1);
        if (dev < best_share) {  // strict: stay on ties, smallest index among alternatives
            best_share = dev;
            best_slot = t;
        }
    }
    return best_slot;
}

double rosenthal_potential(const Instance& inst, const Assignment& a) {
    const LoadProfile loads = load_profile(inst, a);
    const CostTable table(inst.cost, inst.job_count());
    double phi = 0.0;
    for (int t = 1; t <= inst.horizon; ++t) phi += table.share_prefix(loads[t]);
    return phi;
}

BrdResult run_brd(const Instance& inst, const Assignment& start, BrdOrder order,
                  std::uint64_t seed, int max_steps, double eps) {
    LoadProfile loads = load_profile(inst, start);
    const CostTable table(inst.cost, inst.job_count());
    const int n = inst.job_count();

    auto potential = [&]() {
        double phi = 0.0;
        for (int t = 1; t <= inst.horizon; ++t) phi += table.share_prefix(loads[t]);
        return phi;
    };

    BrdResult result;
    result.assignment = start;
    std::vector<int>& slots = result.assignment.slots;

    // best improving move for one job, or from_slot when none improves by > eps
    auto improving_move = [&](int j) {
        const Job& job = inst.jobs[static_cast<size_t>(j)];
        const int cur_slot = slots[static_cast<size_t>(j)];
        const double cur = table.share(loads[cur_slot]);
        int best_slot = cur_slot;
        double best_share = cur;
        for (int t = job.release; t < job.deadline; ++t) {
            if (t == cur_slot) continue;
            const double dev = table.share(loads[t] + 1);
            if (dev < best_share) {
                best_share = dev;
                best_slot = t;
            }
        }
        if (best_slot != cur_slot && best_share < cur - eps) return best_slot;
        return cur_slot;
    };

    auto apply = [&](int j, int to) {
        const int from = slots[static_cast<size_t>(j)];
        BrdStep step;
        step.job = j;
        step.from_slot = from;
        step.to_slot = to;
        step.potential_before = potential();
        --loads.at(from);
        ++loads.at(to);
        slots[static_cast<size_t>(j)] = to;
        step.potential_after = potential();
        result.trace.steps.push_back(step);
        if (static_cast<int>(result.trace.steps.size()) > max_steps)
            throw BudgetExceeded("best-response dynamics exceeded " + std::to_string(max_steps) +
                                     " improving steps (eps likely mis-tuned)",
                                 static_cast<std::uint64_t>(max_steps));
    };

    if (order == BrdOrder::RoundRobin) {
        int idx = 0, quiet = 0;
        while (quiet < n) {
            const int j = idx % n;
            const int to = improving_move(j);
            if (to != slots[static_cast<size_t>(j)]) {
                apply(j, to);
                quiet = 0;
            } else {
                ++quiet;
            }
            ++idx;
        }
    } else {
        std::mt19937_64 rng(seed);
        while (true) {
            std::vector<std::pair<int, int>> movers;  // (job, target)
            for (int j = 0; j < n; ++j) {
                const int to = improving_move(j);
                if (to != slots[static_cast<size_t>(j)]) movers.emplace_back(j, to);
            }
            if (movers.empty()) break;
            const auto pick = static_cast<size_t>(rng() % movers.size());
            apply(movers[pick].first, movers[pick].second);
        }
    }

    result.trace.converged = true;
    return result;
}

NashOutcome worst_nash(const Instance& inst, std::uint64_t budget, double eps, bool prune_symmetry) {
    const CostTable table(inst.cost, inst.job_count());
    NashOutcome best;
    bool found = false;
    for_each_assignment(inst, budget, prune_symmetry,
                        [&](const std::vector<int>& slots, const LoadProfile& loads) {
                            if (!is_nash_fast(inst, table, slots, loads, eps)) return;
                            double cost = 0.0;
                            for (int t = 1; t <= inst.horizon; ++t) cost += table.eval(loads[t]);
                            if (!found || cost > best.cost) {
                                best.assignment.slots = slots;
                                best.cost = cost;
                                found = true;
                            }
                        });
    if (!found)
        throw std::logic_error("no equilibrium found by exhaustive enumeration; "
                               "the base game always has one, so this is an internal error");
    return best;
}

std::vector<NashOutcome> enumerate_nash(const Instance& inst, std::uint64_t budget, double eps,
                                        bool prune_symmetry, bool dedup_by_loads) {
    const CostTable table(inst.cost, inst.job_count());
    std::vector<NashOutcome> out;
    std::set<std::vector<int>> seen_loads;
    for_each_assignment(inst, budget, prune_symmetry,
                        [&](const std::vector<int>& slots, const LoadProfile& loads) {
                            if (!is_nash_fast(inst, table, slots, loads, eps)) return;
                            if (dedup_by_loads) {
                                std::vector<int> key(static_cast<size_t>(inst.horizon) + 1, 0);
                                for (int t = 1; t <= inst.horizon; ++t)
                                    key[static_cast<size_t>(t)] = loads[t];
                                if (!seen_loads.insert(std::move(key)).second) return;
                            }
                            double cost = 0.0;
                            for (int t = 1; t <= inst.horizon; ++t) cost += table.eval(loads[t]);
                            out.push_back({Assignment{slots}, cost});
                        });
    return out;
}

}  // namespace poalab
