#include "poalab/model.hpp"

namespace poalab {

void Instance::validate() const {
    if (horizon < 1) throw ValidationError("horizon must be >= 1, got " + std::to_string(horizon));
    if (jobs.empty()) throw ValidationError("instance must have at least one job");
    for (size_t j = 0; j < jobs.size(); ++j) {
        const Job& job = jobs[j];
        const std::string where = "jobs[" + std::to_string(j) + "]";
        if (job.release < 1)
            throw ValidationError(where + ".release must be >= 1, got " + std::to_string(job.release));
        if (job.release >= job.deadline)
            throw ValidationError(where + ": empty window, release " + std::to_string(job.release) +
                                  " >= deadline " + std::to_string(job.deadline));
        if (job.deadline > horizon + 1)
            throw ValidationError(where + ".deadline " + std::to_string(job.deadline) +
                                  " exceeds horizon+1 = " + std::to_string(horizon + 1));
    }
}

void validate_assignment(const Instance& inst, const Assignment& a) {
    if (a.size() != inst.job_count())
        throw ValidationError("assignment has " + std::to_string(a.size()) + " slots for " +
                              std::to_string(inst.job_count()) + " jobs");
    for (int j = 0; j < inst.job_count(); ++j) {
        if (!inst.jobs[static_cast<size_t>(j)].contains(a.slots[static_cast<size_t>(j)]))
            throw ValidationError("job " + std::to_string(j) + " assigned slot " +
                                  std::to_string(a.slots[static_cast<size_t>(j)]) +
                                  " outside its window [" +
                                  std::to_string(inst.jobs[static_cast<size_t>(j)].release) + ", " +
                                  std::to_string(inst.jobs[static_cast<size_t>(j)].deadline) + ")");
    }
}

LoadProfile load_profile(const Instance& inst, const Assignment& a) {
    validate_assignment(inst, a);
    LoadProfile loads(inst.horizon);
    for (int slot : a.slots) ++loads.at(slot);
    return loads;
}

double total_cost(const Instance& inst, const LoadProfile& loads) {
    double sum = 0.0;
    for (int t = 1; t <= loads.horizon(); ++t) sum += inst.cost.eval(loads[t]);
    return sum;
}

double total_cost(const Instance& inst, const Assignment& a) {
    return total_cost(inst, load_profile(inst, a));
}

}  // namespace poalab
