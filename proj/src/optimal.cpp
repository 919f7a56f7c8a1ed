#include "poalab/optimal.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

#include "poalab/enumerate.hpp"

namespace poalab {

std::string opt_method_name(OptMethod m) {
    switch (m) {
        case OptMethod::BruteForce: return "brute_force";
        case OptMethod::UnitGreedy: return "unit_greedy";
        case OptMethod::ConvexFlow: return "convex_flow";
        case OptMethod::ConcaveBnB: return "concave_bnb";
        case OptMethod::Heuristic: return "heuristic";
    }
    return "unknown";
}

nlohmann::json OptResult::to_json() const {
    nlohmann::json doc = {{"cost", cost},
                          {"method", opt_method_name(method)},
                          {"exact", exact},
                          {"slots", assignment.slots}};
    if (lower_bound) doc["lower_bound"] = *lower_bound;
    return doc;
}

OptResult opt_bruteforce(const Instance& inst, std::uint64_t budget) {
    const CostTable table(inst.cost, inst.job_count());
    OptResult best;
    bool found = false;
    for_each_assignment(inst, budget, true,
                        [&](const std::vector<int>& slots, const LoadProfile& loads) {
                            double cost = 0.0;
                            for (int t = 1; t <= inst.horizon; ++t) cost += table.eval(loads[t]);
                            if (!found || cost < best.cost) {
                                best.assignment.slots = slots;
                                best.cost = cost;
                                found = true;
                            }
                        });
    best.method = OptMethod::BruteForce;
    best.exact = true;
    return best;
}

OptResult opt_unit_greedy(const Instance& inst) {
    inst.validate();
    if (!inst.cost.is_unit())
        throw ValidationError("opt_unit_greedy requires a unit cost function");

    const int n = inst.job_count();
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Job& ja = inst.jobs[static_cast<size_t>(a)];
        const Job& jb = inst.jobs[static_cast<size_t>(b)];
        if (ja.deadline != jb.deadline) return ja.deadline < jb.deadline;
        if (ja.release != jb.release) return ja.release < jb.release;
        return a < b;
    });

    OptResult result;
    result.assignment.slots.assign(static_cast<size_t>(n), 0);
    std::vector<bool> served(static_cast<size_t>(n), false);
    int opened = 0;
    for (int idx : order) {
        if (served[static_cast<size_t>(idx)]) continue;
        const int slot = inst.jobs[static_cast<size_t>(idx)].deadline - 1;
        ++opened;
        for (int j = 0; j < n; ++j) {
            if (!served[static_cast<size_t>(j)] && inst.jobs[static_cast<size_t>(j)].contains(slot)) {
                result.assignment.slots[static_cast<size_t>(j)] = slot;
                served[static_cast<size_t>(j)] = true;
            }
        }
    }
    result.cost = static_cast<double>(opened);
    result.method = OptMethod::UnitGreedy;
    result.exact = true;
    return result;
}

OptResult opt_flow_convex(const Instance& inst) {
    inst.validate();
    if (inst.cost.is_unit() || inst.cost.degree() < 1.0)
        throw ValidationError("opt_flow_convex requires monomial cost with degree >= 1 "
                              "(marginals must be nondecreasing)");

    const int n = inst.job_count();
    const int T = inst.horizon;
    const CostTable table(inst.cost, n);

    LoadProfile loads(T);
    std::vector<std::vector<int>> slot_jobs(static_cast<size_t>(T) + 1);
    std::vector<int> slots(static_cast<size_t>(n), 0);

    std::vector<int> parent_slot(static_cast<size_t>(T) + 1);
    std::vector<int> parent_job(static_cast<size_t>(T) + 1);
    std::vector<char> visited(static_cast<size_t>(T) + 1);

    for (int j = 0; j < n; ++j) {
        // BFS over "some job on u can relocate to v". A relocation chain leaves
        // intermediate loads unchanged, so its net cost is the marginal at the
        // final slot; the cheapest augmentation ends at the reachable slot of
        // minimum marginal.
        std::fill(visited.begin(), visited.end(), 0);
        std::deque<int> queue;
        const Job& job = inst.jobs[static_cast<size_t>(j)];
        for (int t = job.release; t < job.deadline; ++t) {
            visited[static_cast<size_t>(t)] = 1;
            parent_slot[static_cast<size_t>(t)] = -1;
            queue.push_back(t);
        }
        while (!queue.empty()) {
            const int u = queue.front();
            queue.pop_front();
            for (int k : slot_jobs[static_cast<size_t>(u)]) {
                const Job& jk = inst.jobs[static_cast<size_t>(k)];
                for (int v = jk.release; v < jk.deadline; ++v) {
                    if (visited[static_cast<size_t>(v)]) continue;
                    visited[static_cast<size_t>(v)] = 1;
                    parent_slot[static_cast<size_t>(v)] = u;
                    parent_job[static_cast<size_t>(v)] = k;
                    queue.push_back(v);
                }
            }
        }

        int target = -1;
        double best_marginal = std::numeric_limits<double>::infinity();
        for (int t = 1; t <= T; ++t) {
            if (!visited[static_cast<size_t>(t)]) continue;
            const double m = table.marginal(loads[t]);
            if (m < best_marginal) {
                best_marginal = m;
                target = t;
            }
        }

        // relocate along the chain, then place j at the chain's window end.
        // Each chain edge moves a distinct job (one per distinct tail slot).
        int v = target;
        while (parent_slot[static_cast<size_t>(v)] != -1) {
            const int u = parent_slot[static_cast<size_t>(v)];
            const int mover = parent_job[static_cast<size_t>(v)];
            auto& bucket = slot_jobs[static_cast<size_t>(u)];
            bucket.erase(std::find(bucket.begin(), bucket.end(), mover));
            slot_jobs[static_cast<size_t>(v)].push_back(mover);
            --loads.at(u);
            ++loads.at(v);
            slots[static_cast<size_t>(mover)] = v;
            v = u;
        }
        slot_jobs[static_cast<size_t>(v)].push_back(j);
        ++loads.at(v);
        slots[static_cast<size_t>(j)] = v;
    }

    OptResult result;
    result.assignment.slots = std::move(slots);
    result.cost = total_cost(inst, result.assignment);
    result.method = OptMethod::ConvexFlow;
    result.exact = true;
    return result;
}

namespace {

struct JobGroup {
    int release = 0;
    int deadline = 0;
    std::vector<int> members;
};

// Deadline-order consolidation used when the concave search exhausts budget.
Assignment consolidation_heuristic(const Instance& inst) {
    const int n = inst.job_count();
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const Job& ja = inst.jobs[static_cast<size_t>(a)];
        const Job& jb = inst.jobs[static_cast<size_t>(b)];
        if (ja.deadline != jb.deadline) return ja.deadline < jb.deadline;
        return a < b;
    });
    LoadProfile loads(inst.horizon);
    Assignment a;
    a.slots.assign(static_cast<size_t>(n), 0);
    for (int j : order) {
        const Job& job = inst.jobs[static_cast<size_t>(j)];
        // latest slot among the most loaded: later jobs' windows overlap there
        int best = job.release;
        for (int t = job.release; t < job.deadline; ++t)
            if (loads[t] >= loads[best]) best = t;
        a.slots[static_cast<size_t>(j)] = best;
        ++loads.at(best);
    }
    return a;
}

// Slot-ordered search over per-slot placement counts of identical-window job
// groups, memoized on (slot, remaining counts). Jobs of a group are
// interchangeable, so the count matrix determines the assignment cost.
class ConcaveSearch {
public:
    ConcaveSearch(const Instance& inst, std::uint64_t budget)
        : inst_(inst), table_(inst.cost, inst.job_count()), budget_(budget) {
        std::map<std::pair<int, int>, int> index;
        for (int j = 0; j < inst.job_count(); ++j) {
            const Job& job = inst.jobs[static_cast<size_t>(j)];
            auto key = std::make_pair(job.release, job.deadline);
            auto it = index.find(key);
            if (it == index.end()) {
                index.emplace(key, static_cast<int>(groups_.size()));
                groups_.push_back({job.release, job.deadline, {j}});
            } else {
                groups_[static_cast<size_t>(it->second)].members.push_back(j);
            }
        }
        radix_.reserve(groups_.size());
        std::uint64_t states = static_cast<std::uint64_t>(inst.horizon) + 2;
        for (const auto& g : groups_) {
            const auto r = static_cast<std::uint64_t>(g.members.size()) + 1;
            radix_.push_back(r);
            if (states > std::numeric_limits<std::uint64_t>::max() / r)
                throw BudgetExceeded("concave search state space overflows", budget_);
            states *= r;
        }
    }

    double solve() {
        std::vector<int> remaining(groups_.size());
        for (size_t g = 0; g < groups_.size(); ++g)
            remaining[g] = static_cast<int>(groups_[g].members.size());
        return solve(1, remaining);
    }

    Assignment reconstruct() {
        Assignment a;
        a.slots.assign(static_cast<size_t>(inst_.job_count()), 0);
        std::vector<int> remaining(groups_.size());
        std::vector<size_t> cursor(groups_.size(), 0);
        for (size_t g = 0; g < groups_.size(); ++g)
            remaining[g] = static_cast<int>(groups_[g].members.size());

        for (int t = 1; t <= inst_.horizon; ++t) {
            std::vector<int> active, forced;
            classify(t, remaining, active, forced);
            const auto it = memo_.find(encode(t, remaining));
            if (it == memo_.end()) throw std::logic_error("concave search memo miss on replay");
            const std::vector<int>& choice = it->second.choice;
            auto place = [&](int g, int count) {
                for (int i = 0; i < count; ++i) {
                    const int j = groups_[static_cast<size_t>(g)].members[cursor[static_cast<size_t>(g)]++];
                    a.slots[static_cast<size_t>(j)] = t;
                }
                remaining[static_cast<size_t>(g)] -= count;
            };
            for (size_t i = 0; i < active.size(); ++i) place(active[i], choice[i]);
            for (int g : forced) place(g, remaining[static_cast<size_t>(g)]);
        }
        return a;
    }

private:
    struct Entry {
        double cost;
        std::vector<int> choice;  // placement counts, one per active group in order
    };

    void classify(int t, const std::vector<int>& remaining, std::vector<int>& active,
                  std::vector<int>& forced) const {
        for (size_t g = 0; g < groups_.size(); ++g) {
            if (remaining[g] == 0) continue;
            if (groups_[g].release <= t && t < groups_[g].deadline) {
                if (groups_[g].deadline == t + 1)
                    forced.push_back(static_cast<int>(g));  // last window slot: place the rest
                else
                    active.push_back(static_cast<int>(g));
            }
        }
    }

    double solve(int t, std::vector<int>& remaining) {
        if (t > inst_.horizon) return 0.0;  // forced placement exhausted every group
        const std::uint64_t key = encode(t, remaining);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second.cost;

        std::vector<int> active, forced;
        classify(t, remaining, active, forced);

        int forced_total = 0;
        std::vector<int> forced_saved;
        forced_saved.reserve(forced.size());
        for (int g : forced) {
            forced_saved.push_back(remaining[static_cast<size_t>(g)]);
            forced_total += remaining[static_cast<size_t>(g)];
            remaining[static_cast<size_t>(g)] = 0;
        }

        double best = std::numeric_limits<double>::infinity();
        std::vector<int> best_choice;
        std::vector<int> placed(active.size(), 0);
        while (true) {
            if (++visited_ > budget_) throw BudgetExceeded("concave search budget exceeded", visited_);

            int placed_total = forced_total;
            for (size_t i = 0; i < active.size(); ++i) {
                placed_total += placed[i];
                remaining[static_cast<size_t>(active[i])] -= placed[i];
            }
            const double cost = table_.eval(placed_total) + solve(t + 1, remaining);
            for (size_t i = 0; i < active.size(); ++i)
                remaining[static_cast<size_t>(active[i])] += placed[i];

            if (cost < best) {
                best = cost;
                best_choice = placed;
            }

            size_t i = 0;
            for (; i < active.size(); ++i) {
                if (placed[i] < remaining[static_cast<size_t>(active[i])]) {
                    ++placed[i];
                    break;
                }
                placed[i] = 0;
            }
            if (i == active.size()) break;
        }

        for (size_t i = 0; i < forced.size(); ++i)
            remaining[static_cast<size_t>(forced[i])] = forced_saved[i];

        memo_.emplace(key, Entry{best, std::move(best_choice)});
        return best;
    }

    std::uint64_t encode(int t, const std::vector<int>& remaining) const {
        std::uint64_t key = static_cast<std::uint64_t>(t);
        for (size_t g = 0; g < remaining.size(); ++g)
            key = key * radix_[g] + static_cast<std::uint64_t>(remaining[g]);
        return key;
    }

    const Instance& inst_;
    CostTable table_;
    std::uint64_t budget_;
    std::uint64_t visited_ = 0;
    std::vector<JobGroup> groups_;
    std::vector<std::uint64_t> radix_;
    std::unordered_map<std::uint64_t, Entry> memo_;
};

}  // namespace

OptResult opt_concave_search(const Instance& inst, std::uint64_t budget) {
    inst.validate();
    if (inst.cost.is_unit() || inst.cost.degree() >= 1.0)
        throw ValidationError("opt_concave_search requires monomial cost with degree < 1");

    try {
        ConcaveSearch search(inst, budget);
        OptResult result;
        result.cost = search.solve();
        result.assignment = search.reconstruct();
        result.method = OptMethod::ConcaveBnB;
        result.exact = true;
        // replayed assignment must reproduce the optimal value
        const double recomputed = total_cost(inst, result.assignment);
        if (std::abs(recomputed - result.cost) > 1e-6)
            throw std::logic_error("concave search reconstruction mismatch");
        result.cost = recomputed;
        return result;
    } catch (const BudgetExceeded&) {
        // fall through to the heuristic result below
    }

    OptResult result;
    result.assignment = consolidation_heuristic(inst);
    result.cost = total_cost(inst, result.assignment);
    result.method = OptMethod::Heuristic;
    result.exact = false;
    result.lower_bound = inst.cost.eval(inst.job_count());  // subadditivity: sum c(l_t) >= c(n)
    return result;
}

OptResult solve_optimal(const Instance& inst, std::uint64_t budget) {
    if (inst.cost.is_unit()) return opt_unit_greedy(inst);
    if (inst.cost.degree() >= 1.0) return opt_flow_convex(inst);
    return opt_concave_search(inst, budget);
}

}  // namespace poalab
