#ifndef POALAB_MODEL_HPP
#define POALAB_MODEL_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace poalab {

/// Absolute tolerance used by every real-valued comparison downstream.
inline constexpr double kDefaultEps = 1e-9;

/// Raised when a document or argument violates a model invariant.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an exhaustive operation would exceed its enumeration budget.
class BudgetExceeded : public std::runtime_error {
public:
    BudgetExceeded(const std::string& what, std::uint64_t size)
        : std::runtime_error(what), search_size(size) {}
    std::uint64_t search_size;
};

/// Per-slot activation cost: unit step (0/1) or monomial load^d with d > 0.
class CostFunction {
public:
    enum class Kind { Unit, Monomial };

    static CostFunction unit() { return CostFunction(Kind::Unit, 0.0); }

    static CostFunction monomial(double degree) {
        if (!(degree > 0.0))
            throw ValidationError("monomial degree must be > 0, got " + std::to_string(degree));
        return CostFunction(Kind::Monomial, degree);
    }

    Kind kind() const { return kind_; }
    bool is_unit() const { return kind_ == Kind::Unit; }
    double degree() const { return degree_; }

    /// Cost of a slot holding `load` jobs. Total function; eval(0) == 0.
    double eval(int load) const {
        if (load < 0) throw ValidationError("negative load");
        if (load == 0) return 0.0;
        if (kind_ == Kind::Unit) return 1.0;
        if (integral_degree_) {
            // keep small-integer powers exact (706, 352, ... stay integers)
            double base = static_cast<double>(load), acc = 1.0;
            for (int e = static_cast<int>(degree_); e > 0; e >>= 1) {
                if (e & 1) acc *= base;
                base *= base;
            }
            return acc;
        }
        return std::pow(static_cast<double>(load), degree_);
    }

    /// Equal cost share eval(load)/load of one of `load` jobs; load >= 1.
    double share(int load) const {
        if (load < 1) throw ValidationError("cost share undefined on empty slot");
        return eval(load) / static_cast<double>(load);
    }

    /// Marginal cost of one more job on a slot currently holding `load`.
    double marginal(int load) const { return eval(load + 1) - eval(load); }

    bool operator==(const CostFunction& o) const {
        return kind_ == o.kind_ && (kind_ == Kind::Unit || degree_ == o.degree_);
    }

private:
    CostFunction(Kind kind, double degree)
        : kind_(kind), degree_(degree),
          integral_degree_(kind == Kind::Monomial && degree > 0 && degree <= 60 &&
                           degree == std::floor(degree)) {}

    Kind kind_;
    double degree_;
    bool integral_degree_;
};

/// One job: may be scheduled on any slot in the half-open window [release, deadline).
struct Job {
    int release = 0;
    int deadline = 0;

    bool contains(int slot) const { return release <= slot && slot < deadline; }
    int window_size() const { return deadline - release; }

    bool operator==(const Job& o) const { return release == o.release && deadline == o.deadline; }
};

/// A game instance: cost function, slots 1..horizon, and the job list.
struct Instance {
    CostFunction cost = CostFunction::unit();
    int horizon = 0;
    std::vector<Job> jobs;
    nlohmann::json meta = nlohmann::json::object();  // free-form (e.g. coordinate shift)

    int job_count() const { return static_cast<int>(jobs.size()); }

    /// Throws ValidationError naming the first offending field.
    void validate() const;

    bool operator==(const Instance& o) const {
        return cost == o.cost && horizon == o.horizon && jobs == o.jobs && meta == o.meta;
    }
};

/// One declared slot per job, aligned with Instance::jobs.
struct Assignment {
    std::vector<int> slots;

    int size() const { return static_cast<int>(slots.size()); }
    bool operator==(const Assignment& o) const { return slots == o.slots; }
};

/// Jobs-per-slot counts for slots 1..horizon.
class LoadProfile {
public:
    explicit LoadProfile(int horizon) : counts_(static_cast<size_t>(horizon) + 1, 0) {}

    int horizon() const { return static_cast<int>(counts_.size()) - 1; }
    int operator[](int slot) const { return counts_[static_cast<size_t>(slot)]; }
    int& at(int slot) { return counts_[static_cast<size_t>(slot)]; }

    int total() const {
        int n = 0;
        for (int c : counts_) n += c;
        return n;
    }

    /// Occupied slots in ascending order.
    std::vector<int> occupied() const {
        std::vector<int> out;
        for (int t = 1; t <= horizon(); ++t)
            if (counts_[static_cast<size_t>(t)] > 0) out.push_back(t);
        return out;
    }

private:
    std::vector<int> counts_;
};

/// Validates `a` against the jobs' windows; throws naming the offending job.
void validate_assignment(const Instance& inst, const Assignment& a);

/// Counts jobs per slot. Rejects window violations.
LoadProfile load_profile(const Instance& inst, const Assignment& a);

/// Sum of slot costs c(l_t) over the horizon.
double total_cost(const Instance& inst, const Assignment& a);
double total_cost(const Instance& inst, const LoadProfile& loads);

}  // namespace poalab

#endif
