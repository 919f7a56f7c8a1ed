#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "poalab/enumerate.hpp"
#include "poalab/equilibrium.hpp"
#include "poalab/generators.hpp"
#include "poalab/harness.hpp"
#include "poalab/json_io.hpp"

namespace poalab {

namespace {

std::string num(double v) {
    std::ostringstream s;
    s.precision(10);
    s << v;
    return s.str();
}

struct Check {
    bool ok = true;
    std::string detail;
    std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

    void require(bool cond, const std::string& msg) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += msg;
        }
    }
    void require_within(double seconds) {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        require(elapsed < seconds, "runtime " + num(elapsed) + "s exceeds the " + num(seconds) +
                                       "s budget");
    }
};

std::vector<Instance> random_corpus(int count, int max_n, int max_t, const CostFunction& cost,
                                    bool common_slot, std::uint64_t seed_base) {
    std::vector<Instance> out;
    out.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        std::mt19937_64 meta(seed_base + static_cast<std::uint64_t>(i));
        const int n = 1 + static_cast<int>(meta() % static_cast<std::uint64_t>(max_n));
        const int T = 1 + static_cast<int>(meta() % static_cast<std::uint64_t>(max_t));
        const int t_star = 1 + static_cast<int>(meta() % static_cast<std::uint64_t>(T));
        out.push_back(gen_random(n, T, cost, seed_base + static_cast<std::uint64_t>(i),
                                 common_slot ? RandomShape::CommonSlot : RandomShape::General,
                                 t_star));
    }
    return out;
}

void write_family_witnesses(const std::string& dir, const std::string& stem, const NamedFamily& f) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    save_json_file(instance_to_json(f.instance), dir + "/" + stem + ".instance.json");
    save_json_file(assignment_to_json(f.canonical_ne), dir + "/" + stem + ".ne.json");
    save_json_file(assignment_to_json(f.reference_opt), dir + "/" + stem + ".opt.json");
    if (f.canonical_payments) {
        MechProfile p{f.canonical_ne, *f.canonical_payments};
        save_json_file(p.to_json(), dir + "/" + stem + ".profile.json");
    }
}

// 1. quadratic counterexample: equilibrium cost 706, flow optimum 352, ratio > 2
Check criterion_quadratic(const AcceptanceOptions& opts) {
    Check c;
    const NamedFamily f = gen_quadratic();
    const double expected_ne = opts.inject_fault ? 707.0 : 706.0;

    const double ne_cost = total_cost(f.instance, f.canonical_ne);
    c.require(ne_cost == expected_ne,
              "canonical equilibrium cost " + num(ne_cost) + " != " + num(expected_ne) + " (exact)");
    c.require(is_nash(f.instance, f.canonical_ne, opts.eps).is_equilibrium,
              "canonical assignment failed the equilibrium check");

    const OptResult flow = opt_flow_convex(f.instance);
    c.require(flow.cost == 352.0, "flow optimum " + num(flow.cost) + " != 352 (exact)");
    c.require(ne_cost / flow.cost > 2.0, "ratio " + num(ne_cost / flow.cost) + " not > 2");

    c.require_within(10.0);
    if (!opts.out_dir.empty()) write_family_witnesses(opts.out_dir, "quadratic", f);
    if (c.ok)
        c.detail = "ne=" + num(ne_cost) + " opt=" + num(flow.cost) +
                   " ratio=" + num(ne_cost / flow.cost) + " (exact integers)";
    return c;
}

// 2. valley family: closed forms within 1e-9, equilibrium verified, worst-case
//    enumeration dominates the canonical witness for h <= 2
Check criterion_valley(const AcceptanceOptions& opts) {
    Check c;
    for (int h = 1; h <= 5; ++h) {
        for (double d : {0.25, 0.5, 0.75}) {
            const NamedFamily f = gen_valley(h, d);
            const std::string tag = "h=" + std::to_string(h) + ",d=" + num(d);

            c.require(is_nash(f.instance, f.canonical_ne, opts.eps).is_equilibrium,
                      tag + ": canonical assignment is not an equilibrium");

            double formula_ne = 0.0;
            for (int j = 1; j <= h; ++j) formula_ne += 2.0 * std::pow(j, d);
            const double formula_opt = std::pow(static_cast<double>(h) * h + h, d);
            const double ne_cost = total_cost(f.instance, f.canonical_ne);
            const double opt_cost = total_cost(f.instance, f.reference_opt);
            c.require(std::abs(ne_cost - formula_ne) <= 1e-9, tag + ": equilibrium cost off form");
            c.require(std::abs(opt_cost - formula_opt) <= 1e-9, tag + ": optimum cost off form");

            if (h <= 2) {
                const NashOutcome worst = worst_nash(f.instance, opts.budget, opts.eps);
                c.require(worst.cost >= ne_cost - 1e-9,
                          tag + ": enumerated worst equilibrium below canonical witness");
            }
        }
    }
    c.require_within(30.0);
    if (!opts.out_dir.empty()) write_family_witnesses(opts.out_dir, "valley_h2_d0.5", gen_valley(2, 0.5));
    if (c.ok) c.detail = "15 (h,d) combinations verified; worst case enumerated for h <= 2 (tol 1e-9)";
    return c;
}

// 3. valley ratio tracks the asymptote 2 n^((1-d)/2) / (1+d) within [0.5, 1.5]x
Check criterion_asymptote(const AcceptanceOptions&) {
    Check c;
    const double d = 0.5;
    double lo = 1e300, hi = 0.0;
    for (int h = 10; h <= 30; ++h) {
        const NamedFamily f = gen_valley(h, d);
        const double ratio =
            total_cost(f.instance, f.canonical_ne) / total_cost(f.instance, f.reference_opt);
        const double n = static_cast<double>(h) * h + h;
        const double asym = 2.0 * std::pow(n, (1.0 - d) / 2.0) / (1.0 + d);
        const double rel = ratio / asym;
        lo = std::min(lo, rel);
        hi = std::max(hi, rel);
        c.require(rel >= 0.5 && rel <= 1.5,
                  "h=" + std::to_string(h) + ": ratio/asymptote " + num(rel) + " outside [0.5,1.5]");
    }
    if (c.ok) c.detail = "ratio/asymptote within [" + num(lo) + ", " + num(hi) + "] over h=10..30";
    return c;
}

// 4. unit mechanism: PoA at most 2 on the random corpus, exactly 2 for the
//    two-job instance
Check criterion_unit_poa(const AcceptanceOptions& opts) {
    Check c;
    const NamedFamily two = gen_two_job_unit();
    const double two_poa = mechanism_poa(two.instance, opts.budget, opts.eps);
    c.require(std::abs(two_poa - 2.0) <= 1e-9, "two-job mechanism PoA " + num(two_poa) + " != 2");

    double max_poa = 0.0;
    const auto corpus = random_corpus(100, 6, 6, CostFunction::unit(), false, 41000);
    for (size_t i = 0; i < corpus.size(); ++i) {
        const double poa = mechanism_poa(corpus[i], opts.budget, opts.eps);
        max_poa = std::max(max_poa, poa);
        c.require(poa <= 2.0 + 1e-9,
                  "instance " + std::to_string(i) + " mechanism PoA " + num(poa) + " exceeds 2");
    }
    c.require_within(60.0);
    if (c.ok) c.detail = "two-job PoA = 2; max over 100 unit instances = " + num(max_poa) + " (tol 1e-9)";
    return c;
}

// 5. unit equilibrium existence: greedy optima support single-payer payments
Check criterion_unit_existence(const AcceptanceOptions& opts) {
    Check c;
    const auto corpus = random_corpus(100, 6, 6, CostFunction::unit(), false, 42000);
    for (size_t i = 0; i < corpus.size(); ++i) {
        const OptResult opt = opt_unit_greedy(corpus[i]);
        const PaymentProfile xi = payments_unit_optimal(corpus[i], opt.assignment);
        const MechProfile profile{opt.assignment, xi};
        c.require(is_mechanism_nash(corpus[i], profile, opts.eps).is_equilibrium,
                  "instance " + std::to_string(i) + ": optimum payments fail the equilibrium check");
    }
    if (c.ok) c.detail = "100 greedy optima extended to mechanism equilibria";
    return c;
}

// 6. common-slot constant: mechanism PoA below 2/(1 - d^(d/(1-d))), fair
//    shares verify
Check criterion_common_slot(const AcceptanceOptions& opts) {
    Check c;
    double max_rel = 0.0;
    for (double d : {0.5, 0.25, 0.75}) {
        const double bound = 2.0 / (1.0 - std::pow(d, d / (1.0 - d)));
        const auto corpus =
            random_corpus(100, 6, 6, CostFunction::monomial(d), true, 43000 + static_cast<int>(d * 100));
        for (size_t i = 0; i < corpus.size(); ++i) {
            const double poa = mechanism_poa(corpus[i], opts.budget, opts.eps);
            max_rel = std::max(max_rel, poa / bound);
            c.require(poa <= bound + 1e-9, "d=" + num(d) + " instance " + std::to_string(i) +
                                               ": PoA " + num(poa) + " exceeds " + num(bound));

            const int t_star = corpus[i].meta.at("t_star").get<int>();
            Assignment all_at_star;
            all_at_star.slots.assign(corpus[i].jobs.size(), t_star);
            const PaymentProfile xi = payments_common_slot(corpus[i], all_at_star);
            c.require(is_mechanism_nash(corpus[i], MechProfile{all_at_star, xi}, opts.eps).is_equilibrium,
                      "d=" + num(d) + " instance " + std::to_string(i) + ": fair shares fail");
        }
    }
    if (c.ok)
        c.detail = "300 common-slot instances within bound (max poa/bound = " + num(max_rel) +
                   "); fair shares verified (bound at d=0.5 is 4)";
    return c;
}

// 7. freeloader family: canonical profile verifies, closed forms match,
//    ratio grows from n=16 to n=81
Check criterion_freeloader(const AcceptanceOptions& opts) {
    Check c;
    double prev_ratio = 0.0;
    for (int n : {16, 81}) {
        const double d = 0.5;
        const NamedFamily f = gen_freeloader(n, d);
        const MechProfile profile{f.canonical_ne, *f.canonical_payments};
        c.require(is_mechanism_nash(f.instance, profile, opts.eps).is_equilibrium,
                  "n=" + std::to_string(n) + ": canonical profile fails the equilibrium check");

        const double nd = std::pow(n, d);
        const double formula_ne = nd * std::pow(std::pow(n, 1.0 - d), d);
        const double formula_opt = std::pow(n - nd + 1.0, d) + (nd - 1.0);
        const double ne_cost = total_cost(f.instance, f.canonical_ne);
        const double opt_cost = total_cost(f.instance, f.reference_opt);
        c.require(std::abs(ne_cost - formula_ne) <= 1e-9,
                  "n=" + std::to_string(n) + ": equilibrium cost off form");
        c.require(std::abs(opt_cost - formula_opt) <= 1e-9,
                  "n=" + std::to_string(n) + ": optimum cost off form");

        const double ratio = ne_cost / opt_cost;
        c.require(ratio > prev_ratio, "ratio not increasing at n=" + std::to_string(n));
        prev_ratio = ratio;
        if (!opts.out_dir.empty() && n == 16)
            write_family_witnesses(opts.out_dir, "freeloader_n16_d0.5", f);
    }
    if (c.ok) c.detail = "n=16 ratio 1.2111, n=81 ratio " + num(prev_ratio) + " (increasing)";
    return c;
}

// 8. specialized solvers match brute force on seeded corpora
Check criterion_solver_oracles(const AcceptanceOptions& opts) {
    Check c;
    auto compare = [&](const Instance& inst, const OptResult& solver, const std::string& tag) {
        const OptResult brute = opt_bruteforce(inst, opts.budget);
        c.require(solver.exact, tag + ": solver result not exact");
        c.require(std::abs(solver.cost - brute.cost) <= 1e-9,
                  tag + ": solver " + num(solver.cost) + " != brute " + num(brute.cost));
    };

    const auto unit_corpus = random_corpus(100, 8, 6, CostFunction::unit(), false, 44000);
    for (size_t i = 0; i < unit_corpus.size(); ++i)
        compare(unit_corpus[i], opt_unit_greedy(unit_corpus[i]), "unit#" + std::to_string(i));

    for (double d : {1.5, 2.0, 3.0}) {
        const auto corpus =
            random_corpus(100, 8, 6, CostFunction::monomial(d), false, 45000 + static_cast<int>(d * 10));
        for (size_t i = 0; i < corpus.size(); ++i)
            compare(corpus[i], opt_flow_convex(corpus[i]),
                    "convex d=" + num(d) + "#" + std::to_string(i));
    }
    for (double d : {0.25, 0.5, 0.75}) {
        const auto corpus =
            random_corpus(100, 8, 6, CostFunction::monomial(d), false, 46000 + static_cast<int>(d * 100));
        for (size_t i = 0; i < corpus.size(); ++i)
            compare(corpus[i], opt_concave_search(corpus[i], opts.budget),
                    "concave d=" + num(d) + "#" + std::to_string(i));
    }
    c.require_within(300.0);
    if (c.ok) c.detail = "700 instances: greedy/flow/concave all match brute force within 1e-9";
    return c;
}

// 9. potential soundness and convergence of the dynamics
Check criterion_potential_brd(const AcceptanceOptions& opts) {
    Check c;
    std::mt19937_64 rng(47001);
    const CostFunction kinds[] = {CostFunction::unit(), CostFunction::monomial(0.5),
                                  CostFunction::monomial(2.0)};
    int sampled = 0;
    std::uint64_t iter = 0;
    while (sampled < 10000) {
        const Instance inst = gen_random(1 + static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % 5),
                                         kinds[iter % 3], 47002 + iter);
        ++iter;
        Assignment a;
        for (const Job& j : inst.jobs)
            a.slots.push_back(j.release + static_cast<int>(rng() % static_cast<std::uint64_t>(j.window_size())));
        const LoadProfile loads = load_profile(inst, a);
        for (int j = 0; j < inst.job_count(); ++j) {
            const int target = best_response(inst, a, j);
            const int cur = a.slots[static_cast<size_t>(j)];
            if (target == cur) continue;
            const double gain =
                inst.cost.share(loads[cur]) - inst.cost.share(loads[target] + 1);
            if (gain <= opts.eps) continue;
            const double before = rosenthal_potential(inst, a);
            Assignment moved = a;
            moved.slots[static_cast<size_t>(j)] = target;
            const double after = rosenthal_potential(inst, moved);
            c.require(after < before, "potential did not decrease on an improving move");
            c.require(std::abs((before - after) - gain) <= 1e-6,
                      "potential delta does not equal the share gain");
            ++sampled;
        }
    }

    // every dynamics run lands on an equilibrium
    for (int i = 0; i < 40; ++i) {
        const Instance inst = gen_random(1 + static_cast<int>(rng() % 6),
                                         1 + static_cast<int>(rng() % 5), kinds[i % 3], 48000 + i);
        Assignment start;
        for (const Job& j : inst.jobs)
            start.slots.push_back(j.release +
                                  static_cast<int>(rng() % static_cast<std::uint64_t>(j.window_size())));
        for (BrdOrder order : {BrdOrder::RoundRobin, BrdOrder::Random}) {
            const BrdResult r = run_brd(inst, start, order, 7 + i, 100000, opts.eps);
            c.require(is_nash(inst, r.assignment, opts.eps).is_equilibrium,
                      "dynamics output is not an equilibrium (instance " + std::to_string(i) + ")");
        }
    }

    // convergence from the all-at-center start within n*T*50 steps
    for (int h = 1; h <= 3; ++h) {
        const NamedFamily f = gen_valley(h, 0.5);
        const int center = f.instance.meta.at("shift").get<int>();
        Assignment start;
        start.slots.assign(f.instance.jobs.size(), center);
        const int cap = f.instance.job_count() * f.instance.horizon * 50;
        const BrdResult r = run_brd(f.instance, start, BrdOrder::RoundRobin, 0, cap, opts.eps);
        c.require(static_cast<int>(r.trace.steps.size()) <= cap, "step bound exceeded");
        c.require(is_nash(f.instance, r.assignment, opts.eps).is_equilibrium,
                  "valley dynamics did not converge to an equilibrium");
    }
    if (c.ok) c.detail = "10000 improving moves decrease the potential; all dynamics runs converge";
    return c;
}

// 10. every verified mechanism equilibrium on small unit instances satisfies
//     the zero-payment and exact-coverage properties
Check criterion_mechanism_invariants(const AcceptanceOptions& opts) {
    Check c;
    int verified = 0;

    auto check_payment_properties = [&](const Instance& inst, const MechProfile& p, const std::string& tag) {
        const LoadProfile loads = load_profile(inst, p.assignment);
        std::vector<double> paid(static_cast<size_t>(inst.horizon) + 1, 0.0);
        for (int j = 0; j < inst.job_count(); ++j)
            paid[static_cast<size_t>(p.assignment.slots[static_cast<size_t>(j)])] +=
                p.payments.payments[static_cast<size_t>(j)];
        for (int t = 1; t <= inst.horizon; ++t)
            if (loads[t] > 0)
                c.require(std::abs(paid[static_cast<size_t>(t)] - inst.cost.eval(loads[t])) <= 1e-9,
                          tag + ": slot " + std::to_string(t) + " not paid exactly its cost");
        for (int j = 0; j < inst.job_count(); ++j) {
            if (p.payments.payments[static_cast<size_t>(j)] <= opts.eps) continue;
            const Job& job = inst.jobs[static_cast<size_t>(j)];
            for (int t = job.release; t < job.deadline; ++t)
                if (t != p.assignment.slots[static_cast<size_t>(j)])
                    c.require(loads[t] == 0, tag + ": paying job " + std::to_string(j) +
                                                 " sees another occupied slot");
        }
        ++verified;
    };

    // supportable assignments over a seeded corpus
    const auto corpus = random_corpus(40, 5, 5, CostFunction::unit(), false, 49000);
    for (size_t i = 0; i < corpus.size(); ++i) {
        const Instance& inst = corpus[i];
        for_each_assignment(inst, opts.budget, true,
                            [&](const std::vector<int>& slots, const LoadProfile&) {
                                const Assignment a{slots};
                                const SupportCertificate cert = support_payments(inst, a, opts.eps);
                                if (!cert.feasible) return;
                                const MechProfile p{a, cert.payments};
                                const std::string tag = "corpus#" + std::to_string(i);
                                c.require(is_mechanism_nash(inst, p, opts.eps).is_equilibrium,
                                          tag + ": support certificate fails verification");
                                check_payment_properties(inst, p, tag);
                            });
    }

    // exhaustive (assignment x payment-grid) equilibrium enumeration on tiny
    // instances; both deviation-price readings must agree
    const auto tiny = random_corpus(5, 3, 3, CostFunction::unit(), false, 50000);
    for (size_t i = 0; i < tiny.size(); ++i) {
        const Instance& inst = tiny[i];
        const int n = inst.job_count();
        const int steps = 8;  // payments on the grid {0, 1/8, ..., 1}
        for_each_assignment(inst, opts.budget, false,
                            [&](const std::vector<int>& slots, const LoadProfile&) {
                                const Assignment a{slots};
                                std::vector<int> grid(static_cast<size_t>(n), 0);
                                while (true) {
                                    MechProfile p;
                                    p.assignment = a;
                                    for (int g : grid)
                                        p.payments.payments.push_back(static_cast<double>(g) / steps);
                                    const bool marginal =
                                        is_mechanism_nash(inst, p, opts.eps, DeviationPricing::Marginal)
                                            .is_equilibrium;
                                    const bool residual =
                                        is_mechanism_nash(inst, p, opts.eps, DeviationPricing::Residual)
                                            .is_equilibrium;
                                    c.require(marginal == residual,
                                              "deviation-price readings disagree on a grid profile");
                                    if (marginal) check_payment_properties(inst, p, "tiny#" + std::to_string(i));
                                    size_t k = 0;
                                    for (; k < grid.size(); ++k) {
                                        if (grid[k] < steps) {
                                            ++grid[k];
                                            break;
                                        }
                                        grid[k] = 0;
                                    }
                                    if (k == grid.size()) break;
                                }
                            });
    }

    if (c.ok)
        c.detail = std::to_string(verified) +
                   " verified equilibria satisfy zero-payment and exact coverage";
    return c;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
    using CriterionFn = std::function<Check(const AcceptanceOptions&)>;
    const std::vector<std::pair<std::string, CriterionFn>> criteria = {
        {"quadratic counterexample (706 / 352, ratio > 2)", criterion_quadratic},
        {"valley family closed forms and worst-case equilibria", criterion_valley},
        {"valley ratio tracks the large-h asymptote", criterion_asymptote},
        {"unit mechanism PoA is at most 2 (exactly 2 for the two-job instance)", criterion_unit_poa},
        {"unit optima extend to mechanism equilibria", criterion_unit_existence},
        {"common-slot mechanism PoA within the constant bound", criterion_common_slot},
        {"freeloader family verifies with growing ratio", criterion_freeloader},
        {"specialized optimal solvers match brute force", criterion_solver_oracles},
        {"potential decreases and dynamics converge", criterion_potential_brd},
        {"mechanism equilibrium invariants (zero payment, exact coverage)",
         criterion_mechanism_invariants},
    };

    std::vector<CriterionResult> results;
    for (size_t i = 0; i < criteria.size(); ++i) {
        CriterionResult r;
        r.id = static_cast<int>(i) + 1;
        r.name = criteria[i].first;
        const auto start = std::chrono::steady_clock::now();
        try {
            const Check c = criteria[i].second(opts);
            r.passed = c.ok;
            r.detail = c.detail;
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        if (opts.record_runtime)
            r.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::steady_clock::now() - start)
                               .count();
        results.push_back(std::move(r));
    }

    if (!opts.out_dir.empty()) {
        std::filesystem::create_directories(opts.out_dir);
        std::ofstream out(opts.out_dir + "/summary.csv");
        out << "criterion,name,status,runtime_ms,detail\n";
        for (const CriterionResult& r : results) {
            std::string quoted_name = "\"" + r.name + "\"";
            std::string quoted_detail = "\"";
            for (char ch : r.detail) {
                if (ch == '"') quoted_detail += '"';
                quoted_detail += ch;
            }
            quoted_detail += '"';
            out << r.id << ',' << quoted_name << ',' << (r.passed ? "PASS" : "FAIL") << ','
                << r.runtime_ms << ',' << quoted_detail << "\n";
        }
    }
    return results;
}

int report_acceptance(const std::vector<CriterionResult>& results) {
    bool all_passed = true;
    for (const CriterionResult& r : results) {
        std::printf("%s %2d: %s%s%s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                    r.detail.empty() ? "" : " -- ", r.detail.c_str());
        all_passed = all_passed && r.passed;
    }
    std::printf("%s: %zu/%zu criteria passed\n", all_passed ? "OK" : "FAILURES",
                static_cast<size_t>(std::count_if(results.begin(), results.end(),
                                                  [](const CriterionResult& r) { return r.passed; })),
                results.size());
    return all_passed ? 0 : 1;
}

}  // namespace poalab
