#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "poalab/equilibrium.hpp"
#include "poalab/generators.hpp"

using namespace poalab;

namespace {

// independent oracle: recompute the equilibrium condition from scratch with
// no shared tables or incremental state
bool naive_is_nash(const Instance& inst, const Assignment& a, double eps) {
    std::vector<int> loads(static_cast<size_t>(inst.horizon) + 1, 0);
    for (int s : a.slots) ++loads[static_cast<size_t>(s)];
    for (int j = 0; j < inst.job_count(); ++j) {
        const int s = a.slots[static_cast<size_t>(j)];
        const double cur =
            inst.cost.eval(loads[static_cast<size_t>(s)]) / loads[static_cast<size_t>(s)];
        for (int t = inst.jobs[static_cast<size_t>(j)].release;
             t < inst.jobs[static_cast<size_t>(j)].deadline; ++t) {
            if (t == s) continue;
            const double dev = inst.cost.eval(loads[static_cast<size_t>(t)] + 1) /
                               (loads[static_cast<size_t>(t)] + 1);
            if (dev < cur - eps) return false;
        }
    }
    return true;
}

Assignment random_assignment(const Instance& inst, std::mt19937_64& rng) {
    Assignment a;
    for (const Job& j : inst.jobs)
        a.slots.push_back(j.release +
                          static_cast<int>(rng() % static_cast<std::uint64_t>(j.window_size())));
    return a;
}

}  // namespace

TEST_CASE("canonical family assignments are equilibria") {
    for (int h = 1; h <= 5; ++h)
        for (double d : {0.25, 0.5})
            CHECK(is_nash(gen_valley(h, d).instance, gen_valley(h, d).canonical_ne).is_equilibrium);
    const NamedFamily quad = gen_quadratic();
    const NashCheck check = is_nash(quad.instance, quad.canonical_ne);
    CHECK(check.is_equilibrium);
    CHECK(check.violations.empty());
}

TEST_CASE("a displaced valley job breaks the equilibrium") {
    const NamedFamily f = gen_valley(2, 0.5);
    const int center = f.instance.meta.at("shift").get<int>();
    Assignment moved = f.canonical_ne;
    // job 2 is the first of the two jobs stacked at the far left slot
    REQUIRE(moved.slots[2] == center - 2);
    moved.slots[2] = center;

    const NashCheck check = is_nash(f.instance, moved);
    CHECK_FALSE(check.is_equilibrium);
    REQUIRE_FALSE(check.violations.empty());
    for (const NashViolation& v : check.violations)
        CHECK(v.deviation_share < v.current_share - kDefaultEps);
}

TEST_CASE("best response") {
    // a window of one slot leaves no choice
    Instance solo;
    solo.cost = CostFunction::unit();
    solo.horizon = 2;
    solo.jobs = {{2, 3}};
    CHECK(best_response(solo, Assignment{{2}}, 0) == 2);

    // unit cost: joining three jobs (share 1/4) beats opening an empty slot
    Instance unit;
    unit.cost = CostFunction::unit();
    unit.horizon = 2;
    unit.jobs = {{1, 2}, {1, 2}, {1, 2}, {1, 3}};
    CHECK(best_response(unit, Assignment{{1, 1, 1, 2}}, 3) == 1);

    // d=2: join shares are 2^2/2=2 at the load-1 slot vs 4^2/4=4 at load 3
    Instance square;
    square.cost = CostFunction::monomial(2.0);
    square.horizon = 3;
    square.jobs = {{1, 2}, {2, 3}, {2, 3}, {2, 3}, {3, 4}, {3, 4}, {1, 4}};
    CHECK(best_response(square, Assignment{{1, 2, 2, 2, 3, 3, 3}}, 6) == 1);

    // ties keep the current slot
    Instance tied;
    tied.cost = CostFunction::unit();
    tied.horizon = 2;
    tied.jobs = {{1, 3}};
    CHECK(best_response(tied, Assignment{{2}}, 0) == 2);
    CHECK_THROWS_AS(best_response(tied, Assignment{{2}}, 5), ValidationError);
}

TEST_CASE("rosenthal potential values") {
    Instance one;
    one.cost = CostFunction::unit();
    one.horizon = 3;
    one.jobs = {{1, 4}};
    CHECK(rosenthal_potential(one, Assignment{{2}}) == doctest::Approx(1.0));

    Instance two;
    two.cost = CostFunction::unit();
    two.horizon = 2;
    two.jobs = {{1, 3}, {1, 3}};
    CHECK(rosenthal_potential(two, Assignment{{1, 1}}) == doctest::Approx(1.5));

    two.cost = CostFunction::monomial(2.0);
    CHECK(rosenthal_potential(two, Assignment{{1, 1}}) == doctest::Approx(3.0));
}

TEST_CASE("potential decreases by exactly the mover's share gain") {
    std::mt19937_64 rng(91001);
    const CostFunction kinds[] = {CostFunction::unit(), CostFunction::monomial(0.5),
                                  CostFunction::monomial(2.0)};
    int sampled = 0;
    std::uint64_t iter = 0;
    while (sampled < 2000) {
        const Instance inst =
            gen_random(1 + static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % 5),
                       kinds[iter % 3], 91100 + iter);
        ++iter;
        const Assignment a = random_assignment(inst, rng);
        const LoadProfile loads = load_profile(inst, a);
        for (int j = 0; j < inst.job_count(); ++j) {
            const int target = best_response(inst, a, j);
            const int cur = a.slots[static_cast<size_t>(j)];
            if (target == cur) continue;
            const double gain = inst.cost.share(loads[cur]) - inst.cost.share(loads[target] + 1);
            if (gain <= kDefaultEps) continue;
            Assignment moved = a;
            moved.slots[static_cast<size_t>(j)] = target;
            const double delta = rosenthal_potential(inst, a) - rosenthal_potential(inst, moved);
            CHECK(delta > 0.0);
            CHECK(delta == doctest::Approx(gain).epsilon(1e-9));
            ++sampled;
        }
    }
}

TEST_CASE("best-response dynamics") {
    // an equilibrium start is a fixed point
    const NamedFamily valley = gen_valley(2, 0.5);
    const BrdResult fixed = run_brd(valley.instance, valley.canonical_ne, BrdOrder::RoundRobin);
    CHECK(fixed.trace.steps.empty());
    CHECK(fixed.assignment == valley.canonical_ne);

    // from everything-at-the-center the dynamics settle on an equilibrium
    const int center = valley.instance.meta.at("shift").get<int>();
    Assignment start;
    start.slots.assign(valley.instance.jobs.size(), center);
    const BrdResult r = run_brd(valley.instance, start, BrdOrder::RoundRobin);
    CHECK(r.trace.converged);
    CHECK(is_nash(valley.instance, r.assignment).is_equilibrium);
    for (const BrdStep& step : r.trace.steps)
        CHECK(step.potential_after < step.potential_before - kDefaultEps);

    // two-job unit instance: both starts settle at cost 1 or 2
    const NamedFamily two = gen_two_job_unit();
    for (const Assignment& s : {Assignment{{1, 3}}, Assignment{{1, 2}}}) {
        const BrdResult out = run_brd(two.instance, s, BrdOrder::RoundRobin);
        CHECK(is_nash(two.instance, out.assignment).is_equilibrium);
        const double cost = total_cost(two.instance, out.assignment);
        CHECK((cost == 1.0 || cost == 2.0));
    }

    // exhausting the step budget surfaces as an error
    CHECK_THROWS_AS(run_brd(two.instance, Assignment{{1, 2}}, BrdOrder::RoundRobin, 0, 0),
                    BudgetExceeded);
}

TEST_CASE("dynamics land on equilibria for every order and seed") {
    std::mt19937_64 rng(92001);
    const CostFunction kinds[] = {CostFunction::unit(), CostFunction::monomial(0.5),
                                  CostFunction::monomial(2.0)};
    for (int i = 0; i < 30; ++i) {
        const Instance inst =
            gen_random(1 + static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % 5), kinds[i % 3],
                       92100 + static_cast<std::uint64_t>(i));
        const Assignment start = random_assignment(inst, rng);
        for (BrdOrder order : {BrdOrder::RoundRobin, BrdOrder::Random})
            for (std::uint64_t seed : {0, 1, 2}) {
                const BrdResult r = run_brd(inst, start, order, seed);
                CHECK(is_nash(inst, r.assignment).is_equilibrium);
            }
    }
}

TEST_CASE("worst equilibrium by enumeration") {
    // both-flanks is a (weak) equilibrium of the two-job unit game: the only
    // alternative slot is empty and would cost the same full unit share
    const NamedFamily two = gen_two_job_unit();
    CHECK(worst_nash(two.instance).cost == 2.0);

    CHECK(worst_nash(gen_valley(1, 0.5).instance).cost == doctest::Approx(2.0));

    Instance solo;
    solo.cost = CostFunction::monomial(2.0);
    solo.horizon = 4;
    solo.jobs = {{1, 5}};
    CHECK(worst_nash(solo).cost == doctest::Approx(1.0));

    // the worst case dominates every constructed witness
    for (int h = 1; h <= 2; ++h)
        for (double d : {0.25, 0.5, 0.75}) {
            const NamedFamily f = gen_valley(h, d);
            CHECK(worst_nash(f.instance).cost >=
                  total_cost(f.instance, f.canonical_ne) - kDefaultEps);
        }
}

TEST_CASE("equilibrium enumeration") {
    Instance solo;
    solo.cost = CostFunction::unit();
    solo.horizon = 3;
    solo.jobs = {{1, 4}};
    const auto all = enumerate_nash(solo);
    CHECK(all.size() == 3);
    for (const NashOutcome& o : all) CHECK(o.cost == 1.0);

    // the half-split profiles (1,2)/(2,3) admit an improving move to join the
    // other job; only the flanks and the shared-center profiles survive
    const NamedFamily two = gen_two_job_unit();
    std::set<std::vector<int>> found;
    for (const NashOutcome& o : enumerate_nash(two.instance)) found.insert(o.assignment.slots);
    CHECK(found == std::set<std::vector<int>>{{1, 3}, {2, 2}});

    const NamedFamily valley = gen_valley(1, 0.5);
    std::set<std::vector<int>> valley_found;
    for (const NashOutcome& o : enumerate_nash(valley.instance))
        valley_found.insert(o.assignment.slots);
    CHECK(valley_found == std::set<std::vector<int>>{{1, 3}, {2, 2}});
}

TEST_CASE("enumeration respects its budget") {
    const NamedFamily big = gen_valley(4, 0.5);
    try {
        worst_nash(big.instance, 1000);
        FAIL("expected BudgetExceeded");
    } catch (const BudgetExceeded& e) {
        CHECK(e.search_size > 1000);
        CHECK(std::string(e.what()).find("budget") != std::string::npos);
    }
}

TEST_CASE("equilibrium check matches a from-scratch recomputation") {
    std::mt19937_64 rng(93001);
    const CostFunction kinds[] = {CostFunction::unit(), CostFunction::monomial(0.5),
                                  CostFunction::monomial(2.0), CostFunction::monomial(1.0)};
    for (int i = 0; i < 500; ++i) {
        const Instance inst =
            gen_random(1 + static_cast<int>(rng() % 6), 1 + static_cast<int>(rng() % 5), kinds[i % 4],
                       93100 + static_cast<std::uint64_t>(i));
        const Assignment a = random_assignment(inst, rng);
        CHECK(is_nash(inst, a).is_equilibrium == naive_is_nash(inst, a, kDefaultEps));
    }
}
