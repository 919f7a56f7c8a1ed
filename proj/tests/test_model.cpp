#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "poalab/generators.hpp"
#include "poalab/json_io.hpp"
#include "poalab/model.hpp"

using namespace poalab;

TEST_CASE("cost evaluation") {
    const CostFunction unit = CostFunction::unit();
    CHECK(unit.eval(0) == 0.0);
    CHECK(unit.eval(1) == 1.0);
    CHECK(unit.eval(17) == 1.0);

    const CostFunction square = CostFunction::monomial(2.0);
    CHECK(square.eval(6) == 36.0);  // integral degrees stay exact
    CHECK(square.eval(0) == 0.0);

    const CostFunction root = CostFunction::monomial(0.5);
    CHECK(root.eval(4) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(root.eval(0) == 0.0);

    CHECK_THROWS_AS(CostFunction::monomial(0.0), ValidationError);
    CHECK_THROWS_AS(CostFunction::monomial(-1.0), ValidationError);
}

TEST_CASE("cost shares") {
    CHECK(CostFunction::monomial(0.5).share(4) == doctest::Approx(0.5));
    CHECK(CostFunction::monomial(2.0).share(3) == doctest::Approx(3.0));
    CHECK(CostFunction::unit().share(2) == doctest::Approx(0.5));
    CHECK_THROWS_AS(CostFunction::unit().share(0), ValidationError);

    // monotone in the direction the degree dictates
    const CostFunction dec = CostFunction::monomial(0.5);
    const CostFunction inc = CostFunction::monomial(2.0);
    for (int l = 1; l < 1000; ++l) {
        CHECK(dec.share(l + 1) < dec.share(l));
        CHECK(inc.share(l + 1) > inc.share(l));
    }
}

TEST_CASE("load profiles") {
    // valley(1): canonical equilibrium holds one job on each flank of the
    // center (slots -1 and 1; stored at 1 and 3 after the shift)
    const NamedFamily valley = gen_valley(1, 0.5);
    const LoadProfile loads = load_profile(valley.instance, valley.canonical_ne);
    CHECK(valley.instance.meta.at("shift").get<int>() == 2);
    CHECK(loads[1] == 1);
    CHECK(loads[2] == 0);
    CHECK(loads[3] == 1);
    CHECK(loads.total() == 2);

    Instance shared;
    shared.cost = CostFunction::unit();
    shared.horizon = 4;
    shared.jobs = {{1, 5}, {1, 5}, {1, 5}};
    CHECK(load_profile(shared, Assignment{{2, 2, 2}})[2] == 3);

    shared.jobs[2] = {1, 3};
    CHECK_THROWS_WITH_AS(load_profile(shared, Assignment{{2, 2, 4}}), doctest::Contains("job 2"),
                         ValidationError);
}

TEST_CASE("quadratic family loads equal the slot labels") {
    const NamedFamily f = gen_quadratic();
    const LoadProfile loads = load_profile(f.instance, f.canonical_ne);
    std::map<int, int> histogram;
    for (int t = 1; t <= f.instance.horizon; ++t) ++histogram[loads[t]];
    CHECK(histogram[6] == 1);
    CHECK(histogram[5] == 2);
    CHECK(histogram[4] == 5);
    CHECK(histogram[3] == 20);
    CHECK(histogram[2] == 60);
    CHECK(histogram[1] == 120);
    CHECK(histogram[0] == 120);
}

TEST_CASE("total cost") {
    const NamedFamily quad = gen_quadratic();
    CHECK(total_cost(quad.instance, quad.canonical_ne) == 706.0);  // exact in integer arithmetic

    const NamedFamily valley = gen_valley(2, 0.5);
    CHECK(total_cost(valley.instance, valley.canonical_ne) ==
          doctest::Approx(2.0 * (1.0 + std::sqrt(2.0))).epsilon(1e-12));

    // unit cost with all loads <= 1 counts occupied slots
    Instance unit;
    unit.cost = CostFunction::unit();
    unit.horizon = 5;
    unit.jobs = {{1, 6}, {1, 6}, {1, 6}};
    CHECK(total_cost(unit, Assignment{{1, 3, 5}}) == 3.0);
}

TEST_CASE("instance documents round-trip") {
    const NamedFamily two = gen_two_job_unit();
    CHECK(read_instance(write_instance(two.instance)) == two.instance);

    const NamedFamily valley = gen_valley(3, 0.25);
    CHECK(read_instance(write_instance(valley.instance)) == valley.instance);
}

TEST_CASE("instance documents reject invariant violations with field diagnostics") {
    CHECK_THROWS_WITH_AS(
        read_instance(
            R"({"cost":{"kind":"unit"},"horizon":3,"jobs":[{"release":1,"deadline":3},{"release":2,"deadline":2}]})"),
        doctest::Contains("jobs[1]"), ValidationError);
    CHECK_THROWS_AS(
        read_instance(
            R"({"cost":{"kind":"monomial","degree":-1},"horizon":3,"jobs":[{"release":1,"deadline":2}]})"),
        ValidationError);
    CHECK_THROWS_AS(read_instance(R"({"cost":{"kind":"steps"},"horizon":3,"jobs":[]})"),
                    ValidationError);
    CHECK_THROWS_AS(read_instance("{"), ValidationError);
    CHECK_THROWS_WITH_AS(
        read_instance(R"({"cost":{"kind":"unit"},"horizon":3,"jobs":[{"release":1}]})"),
        doctest::Contains("deadline"), ValidationError);
}

TEST_CASE("assignment documents round-trip") {
    const Assignment a{{3, 1, 4, 1, 5}};
    CHECK(read_assignment(write_assignment(a)) == a);
    CHECK_THROWS_AS(read_assignment(R"({"slots":[1.5]})"), ValidationError);
}

TEST_CASE("load conservation and cost symmetry over random instances") {
    std::mt19937_64 rng(90001);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 8);
        const int T = 1 + static_cast<int>(rng() % 7);
        const CostFunction cost =
            trial % 2 == 0 ? CostFunction::unit() : CostFunction::monomial(0.3 + (trial % 5) * 0.5);
        const Instance inst = gen_random(n, T, cost, 90100 + static_cast<std::uint64_t>(trial));

        Assignment a;
        for (const Job& j : inst.jobs)
            a.slots.push_back(j.release +
                              static_cast<int>(rng() % static_cast<std::uint64_t>(j.window_size())));

        CHECK(load_profile(inst, a).total() == n);

        // permuting jobs together with their slots changes nothing
        std::vector<int> perm(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        Instance permuted = inst;
        Assignment permuted_a;
        permuted.jobs.clear();
        for (int i : perm) {
            permuted.jobs.push_back(inst.jobs[static_cast<size_t>(i)]);
            permuted_a.slots.push_back(a.slots[static_cast<size_t>(i)]);
        }
        CHECK(total_cost(permuted, permuted_a) == total_cost(inst, a));

        // embedding into a larger horizon relabels unused slots only
        Instance embedded = inst;
        embedded.horizon = T + 4;
        Assignment shifted;
        for (size_t i = 0; i < inst.jobs.size(); ++i) {
            embedded.jobs[i] = {inst.jobs[i].release + 2, inst.jobs[i].deadline + 2};
            shifted.slots.push_back(a.slots[i] + 2);
        }
        CHECK(total_cost(embedded, shifted) == total_cost(inst, a));
    }
}
