#include "poalab/generators.hpp"

#include <cmath>
#include <random>

#include "poalab/equilibrium.hpp"

namespace poalab {

namespace {

// deterministic across standard libraries, unlike uniform_int_distribution
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t k) { return rng() % k; }

void self_validate(const NamedFamily& f) {
    f.instance.validate();
    const double ne_cost = total_cost(f.instance, f.canonical_ne);
    const double opt_cost = total_cost(f.instance, f.reference_opt);
    if (std::abs(ne_cost - f.predicted_ne_cost) > kDefaultEps)
        throw std::logic_error(f.provenance + ": canonical equilibrium cost " +
                               std::to_string(ne_cost) + " != predicted " +
                               std::to_string(f.predicted_ne_cost));
    if (std::abs(opt_cost - f.predicted_opt_cost) > kDefaultEps)
        throw std::logic_error(f.provenance + ": reference optimum cost " + std::to_string(opt_cost) +
                               " != predicted " + std::to_string(f.predicted_opt_cost));
    if (f.canonical_payments) {
        MechProfile p{f.canonical_ne, *f.canonical_payments};
        if (!is_mechanism_nash(f.instance, p).is_equilibrium)
            throw std::logic_error(f.provenance + ": canonical mechanism profile is not an equilibrium");
    } else {
        if (!is_nash(f.instance, f.canonical_ne).is_equilibrium)
            throw std::logic_error(f.provenance + ": canonical assignment is not an equilibrium");
    }
}

}  // namespace

NamedFamily gen_valley(int h, double d) {
    if (h < 1) throw ValidationError("valley requires h >= 1");
    if (!(d > 0.0 && d < 1.0)) throw ValidationError("valley requires 0 < d < 1");

    const int shift = h + 1;  // centered slot x is stored at index x + shift
    NamedFamily f;
    f.instance.cost = CostFunction::monomial(d);
    f.instance.horizon = 2 * h + 1;
    f.instance.meta = {{"family", "valley"}, {"h", h}, {"d", d}, {"shift", shift}};

    for (int j = 1; j <= h; ++j) {
        for (int k = 0; k < j; ++k) {  // window [-j, 0]
            f.instance.jobs.push_back({shift - j, shift + 1});
            f.canonical_ne.slots.push_back(shift - j);
        }
        for (int k = 0; k < j; ++k) {  // window [0, j]
            f.instance.jobs.push_back({shift, shift + j + 1});
            f.canonical_ne.slots.push_back(shift + j);
        }
    }
    f.reference_opt.slots.assign(f.instance.jobs.size(), shift);

    f.predicted_ne_cost = 0.0;
    for (int j = 1; j <= h; ++j) f.predicted_ne_cost += 2.0 * std::pow(j, d);
    f.predicted_opt_cost = std::pow(static_cast<double>(h) * h + h, d);
    f.provenance = "valley(h=" + std::to_string(h) + ", d=" + std::to_string(d) + ")";
    self_validate(f);
    return f;
}

NamedFamily gen_quadratic() {
    const std::vector<std::pair<int, int>> regions = {
        {6, 1}, {5, 2}, {4, 5}, {3, 20}, {2, 60}, {1, 120}, {0, 120}};  // (label, slot count)

    std::vector<int> label_of_slot;
    std::vector<int> region_end(7, 0);  // last slot index carrying each label
    for (const auto& [label, count] : regions) {
        for (int i = 0; i < count; ++i) label_of_slot.push_back(label);
        region_end[static_cast<size_t>(label)] = static_cast<int>(label_of_slot.size());
    }
    const int T = static_cast<int>(label_of_slot.size());

    NamedFamily f;
    f.instance.cost = CostFunction::monomial(2.0);
    f.instance.horizon = T;
    f.instance.meta = {{"family", "quadratic"}};

    for (int s = 1; s <= T; ++s) {
        const int label = label_of_slot[static_cast<size_t>(s - 1)];
        if (label == 0) continue;
        // a job on a label-x slot may use everything through the label-(x-1) region
        const int deadline = region_end[static_cast<size_t>(label - 1)] + 1;
        for (int k = 0; k < label; ++k) {
            f.instance.jobs.push_back({1, deadline});
            f.canonical_ne.slots.push_back(s);
        }
    }

    // optimum: the 16 jobs of the top three-label slots go two-per-slot over
    // slots 1..8 (label-6 jobs fit only in 1..3), everyone else goes singly
    // into the next region down
    f.reference_opt.slots.reserve(f.instance.jobs.size());
    for (int i = 0; i < 6; ++i) f.reference_opt.slots.push_back(1 + i / 2);        // slots 1,2,3
    for (int i = 0; i < 10; ++i) f.reference_opt.slots.push_back(4 + i / 2);       // slots 4..8
    for (int i = 0; i < 20; ++i) f.reference_opt.slots.push_back(9 + i);           // label-3 region
    for (int i = 0; i < 60; ++i) f.reference_opt.slots.push_back(29 + i);          // label-2 region
    for (int i = 0; i < 120; ++i) f.reference_opt.slots.push_back(89 + i);         // label-1 region
    for (int i = 0; i < 120; ++i) f.reference_opt.slots.push_back(209 + i);        // label-0 region

    f.predicted_ne_cost = 706.0;
    f.predicted_opt_cost = 352.0;
    f.provenance = "quadratic()";
    self_validate(f);
    return f;
}

NamedFamily gen_two_job_unit() {
    NamedFamily f;
    f.instance.cost = CostFunction::unit();
    f.instance.horizon = 3;
    f.instance.jobs = {{1, 3}, {2, 4}};
    f.instance.meta = {{"family", "two_job_unit"}};
    f.canonical_ne.slots = {1, 3};
    f.canonical_payments = PaymentProfile{{1.0, 1.0}};
    f.reference_opt.slots = {2, 2};
    f.predicted_ne_cost = 2.0;
    f.predicted_opt_cost = 1.0;
    f.provenance = "two_job_unit()";
    self_validate(f);
    return f;
}

NamedFamily gen_freeloader(int n, double d) {
    if (n < 1) throw ValidationError("freeloader requires n >= 1");
    if (!(d > 0.0 && d < 1.0)) throw ValidationError("freeloader requires 0 < d < 1");
    const double md = std::pow(n, d);
    const double qd = std::pow(n, 1.0 - d);
    const int m = static_cast<int>(std::llround(md));
    const int q = static_cast<int>(std::llround(qd));
    if (std::abs(md - m) > 1e-7 || std::abs(qd - q) > 1e-7 || m * q != n)
        throw ValidationError("freeloader requires n^d and n^(1-d) integral; n=" + std::to_string(n) +
                              ", d=" + std::to_string(d) + " gives " + std::to_string(md) + " and " +
                              std::to_string(qd));

    NamedFamily f;
    f.instance.cost = CostFunction::monomial(d);
    f.instance.horizon = m;
    f.instance.meta = {{"family", "freeloader"}, {"n", n}, {"d", d}};
    f.canonical_payments = PaymentProfile{};

    const double slot_cost = std::pow(q, d);
    for (int j = 1; j <= m; ++j) {  // restricted: window = own slot, pays the full slot cost
        f.instance.jobs.push_back({j, j + 1});
        f.canonical_ne.slots.push_back(j);
        f.canonical_payments->payments.push_back(slot_cost);
        f.reference_opt.slots.push_back(j);
    }
    for (int i = 0; i < n - m; ++i) {  // unrestricted: q-1 per slot, freeloading
        f.instance.jobs.push_back({1, m + 1});
        f.canonical_ne.slots.push_back(1 + i / (q - 1));
        f.canonical_payments->payments.push_back(0.0);
        f.reference_opt.slots.push_back(1);
    }

    f.predicted_ne_cost = m * slot_cost;                              // n^d * (n^(1-d))^d
    f.predicted_opt_cost = std::pow(n - m + 1, d) + (m - 1);
    f.provenance = "freeloader(n=" + std::to_string(n) + ", d=" + std::to_string(d) + ")";
    self_validate(f);
    return f;
}

Instance gen_random(int n, int horizon, const CostFunction& cost, std::uint64_t seed,
                    RandomShape shape, int t_star) {
    if (n < 1 || horizon < 1) throw ValidationError("gen_random requires n >= 1 and horizon >= 1");
    if (shape == RandomShape::CommonSlot && (t_star < 1 || t_star > horizon))
        throw ValidationError("common slot " + std::to_string(t_star) + " outside horizon");

    std::mt19937_64 rng(seed);
    Instance inst;
    inst.cost = cost;
    inst.horizon = horizon;
    inst.meta = {{"family", "random"},
                 {"seed", seed},
                 {"shape", shape == RandomShape::CommonSlot ? "common_slot" : "general"}};
    if (shape == RandomShape::CommonSlot) inst.meta["t_star"] = t_star;

    for (int j = 0; j < n; ++j) {
        int r = 0, dl = 0;
        if (shape == RandomShape::CommonSlot) {
            r = 1 + static_cast<int>(bounded(rng, static_cast<std::uint64_t>(t_star)));
            dl = t_star + 1 + static_cast<int>(bounded(rng, static_cast<std::uint64_t>(horizon + 1 - t_star)));
        } else {
            // uniform over all T(T+1)/2 nonempty windows
            const auto total = static_cast<std::uint64_t>(horizon) * (horizon + 1) / 2;
            auto idx = bounded(rng, total);
            r = 1;
            while (idx >= static_cast<std::uint64_t>(horizon + 1 - r)) {
                idx -= static_cast<std::uint64_t>(horizon + 1 - r);
                ++r;
            }
            dl = r + 1 + static_cast<int>(idx);
        }
        inst.jobs.push_back({r, dl});
    }
    inst.validate();
    return inst;
}

}  // namespace poalab
