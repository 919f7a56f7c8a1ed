#include <doctest.h>

#include <cmath>
#include <random>

#include "poalab/generators.hpp"
#include "poalab/mechanism.hpp"
#include "poalab/optimal.hpp"

using namespace poalab;

TEST_CASE("slot opening rule") {
    Instance inst;
    inst.cost = CostFunction::unit();
    inst.horizon = 2;
    inst.jobs = {{1, 3}, {1, 3}};

    CHECK(open_slots(inst, {Assignment{{1, 1}}, PaymentProfile{{0.5, 0.5}}}).count(1) == 1);
    // tolerance keeps a payment one ulp short of the cost open
    Instance one;
    one.cost = CostFunction::unit();
    one.horizon = 1;
    one.jobs = {{1, 2}};
    CHECK(open_slots(one, {Assignment{{1}}, PaymentProfile{{0.999999999}}}).count(1) == 1);

    // sqrt costs: two halves do not cover c(2) = sqrt(2)
    inst.cost = CostFunction::monomial(0.5);
    CHECK(open_slots(inst, {Assignment{{1, 1}}, PaymentProfile{{0.5, 0.5}}}).empty());
}

TEST_CASE("deviation caps") {
    // unit cost: an occupied alternative prices the move at c(l+1)-c(l) = 0
    const NamedFamily two = gen_two_job_unit();
    const Assignment split{{1, 2}};
    CHECK(deviation_cap(two.instance, split, 0) == doctest::Approx(0.0));

    const NamedFamily fl = gen_freeloader(16, 0.5);
    // every alternative of an unrestricted job holds 4 jobs: cap sqrt(5)-2
    const auto unrestricted = deviation_cap(fl.instance, fl.canonical_ne, 4);
    REQUIRE(unrestricted.has_value());
    CHECK(*unrestricted == doctest::Approx(std::sqrt(5.0) - 2.0).epsilon(1e-12));
    // restricted jobs have no alternative at all
    CHECK_FALSE(deviation_cap(fl.instance, fl.canonical_ne, 0).has_value());
}

TEST_CASE("mechanism equilibrium verification on the two-job instance") {
    const NamedFamily two = gen_two_job_unit();

    // flanks with full payments: the only alternative slot is empty, so a
    // deviation costs the same full unit
    const MechProfile flanks{Assignment{{1, 3}}, PaymentProfile{{1.0, 1.0}}};
    CHECK(is_mechanism_nash(two.instance, flanks, kDefaultEps, DeviationPricing::Marginal)
              .is_equilibrium);
    CHECK(is_mechanism_nash(two.instance, flanks, kDefaultEps, DeviationPricing::Residual)
              .is_equilibrium);

    // adjacent occupancy does not survive: job 1 could move to the fully paid
    // slot 2 and pay nothing, under either deviation-price reading
    const MechProfile adjacent{Assignment{{1, 2}}, PaymentProfile{{1.0, 1.0}}};
    for (DeviationPricing pricing : {DeviationPricing::Marginal, DeviationPricing::Residual}) {
        const MechCheck check = is_mechanism_nash(two.instance, adjacent, kDefaultEps, pricing);
        CHECK_FALSE(check.is_equilibrium);
        bool found_deviation = false;
        for (const MechViolation& v : check.violations)
            found_deviation |= v.kind == MechViolationKind::ImprovingDeviation;
        CHECK(found_deviation);
    }
}

TEST_CASE("mechanism equilibrium verification on families") {
    const NamedFamily fl = gen_freeloader(16, 0.5);
    CHECK(is_mechanism_nash(fl.instance, {fl.canonical_ne, *fl.canonical_payments}).is_equilibrium);

    // four jobs sharing a slot at d=0.5 pay the fair share 0.5 each; any
    // empty alternative would cost c(1) = 1
    Instance common;
    common.cost = CostFunction::monomial(0.5);
    common.horizon = 3;
    common.jobs = {{1, 4}, {1, 4}, {1, 4}, {1, 4}};
    const MechProfile fair{Assignment{{2, 2, 2, 2}}, PaymentProfile{{0.5, 0.5, 0.5, 0.5}}};
    CHECK(is_mechanism_nash(common, fair).is_equilibrium);

    // overpaying a slot is rejected under both readings
    const NamedFamily two = gen_two_job_unit();
    const MechProfile overpaid{Assignment{{2, 2}}, PaymentProfile{{1.0, 1.0}}};
    CHECK_FALSE(is_mechanism_nash(two.instance, overpaid, kDefaultEps, DeviationPricing::Marginal)
                    .is_equilibrium);
    CHECK_FALSE(is_mechanism_nash(two.instance, overpaid, kDefaultEps, DeviationPricing::Residual)
                    .is_equilibrium);

    // uncovered slots and negative payments are rejected
    CHECK_FALSE(is_mechanism_nash(two.instance, {Assignment{{2, 2}}, PaymentProfile{{0.2, 0.3}}})
                    .is_equilibrium);
    CHECK_FALSE(is_mechanism_nash(two.instance, {Assignment{{2, 2}}, PaymentProfile{{1.5, -0.5}}})
                    .is_equilibrium);
}

TEST_CASE("tolerance boundary: one-ulp overpayment fails only at eps = 0") {
    Instance common;
    common.cost = CostFunction::monomial(0.5);
    common.horizon = 2;
    common.jobs = {{1, 3}, {1, 3}};
    const double half = std::sqrt(2.0) / 2.0;
    const MechProfile profile{Assignment{{1, 1}},
                              PaymentProfile{{half, std::nextafter(half, 1.0)}}};
    CHECK(is_mechanism_nash(common, profile, 1e-9).is_equilibrium);
    CHECK_FALSE(is_mechanism_nash(common, profile, 0.0).is_equilibrium);
}

TEST_CASE("supporting payments") {
    // a single stacked slot is supportable with fair shares: uniform caps
    // make the proportional fill exactly n^(d-1) per job
    Instance common;
    common.cost = CostFunction::monomial(0.5);
    common.horizon = 3;
    common.jobs = {{1, 4}, {1, 4}, {1, 4}, {1, 4}, {1, 4}};
    const SupportCertificate cert = support_payments(common, Assignment{{2, 2, 2, 2, 2}});
    REQUIRE(cert.feasible);
    for (double xi : cert.payments.payments)
        CHECK(xi == doctest::Approx(std::pow(5.0, -0.5)).epsilon(1e-12));
    CHECK(is_mechanism_nash(common, {Assignment{{2, 2, 2, 2, 2}}, cert.payments}).is_equilibrium);

    // unit cost, two occupied slots visible to each other: caps are all zero,
    // nothing can cover the first slot
    Instance unit;
    unit.cost = CostFunction::unit();
    unit.horizon = 2;
    unit.jobs = {{1, 3}, {1, 3}};
    const SupportCertificate blocked = support_payments(unit, Assignment{{1, 2}});
    CHECK_FALSE(blocked.feasible);
    REQUIRE(blocked.blocking_slot.has_value());
    CHECK(*blocked.blocking_slot == 1);

    // the two-job split (1,2) is likewise unsupportable, while (1,3) carries
    // the full-payment certificate
    const NamedFamily two = gen_two_job_unit();
    CHECK_FALSE(support_payments(two.instance, Assignment{{1, 2}}).feasible);
    const SupportCertificate flanks = support_payments(two.instance, Assignment{{1, 3}});
    REQUIRE(flanks.feasible);
    CHECK(flanks.payments.payments == std::vector<double>{1.0, 1.0});

    // freeloader: restricted jobs have unbounded caps and absorb the residual
    const NamedFamily fl = gen_freeloader(16, 0.5);
    const SupportCertificate flc = support_payments(fl.instance, fl.canonical_ne);
    REQUIRE(flc.feasible);
    CHECK(is_mechanism_nash(fl.instance, {fl.canonical_ne, flc.payments}).is_equilibrium);
}

TEST_CASE("infeasible assignments admit no payments on a fine grid") {
    // exhaustive falsification: no payment vector on the grid {0, 1/64, .., 1}
    // verifies the unsupportable two-job split
    const NamedFamily two = gen_two_job_unit();
    const Assignment split{{1, 2}};
    REQUIRE_FALSE(support_payments(two.instance, split).feasible);
    for (int a = 0; a <= 64; ++a)
        for (int b = 0; b <= 64; ++b) {
            const MechProfile p{split, PaymentProfile{{a / 64.0, b / 64.0}}};
            CHECK_FALSE(is_mechanism_nash(two.instance, p).is_equilibrium);
            CHECK_FALSE(is_mechanism_nash(two.instance, p, kDefaultEps, DeviationPricing::Residual)
                            .is_equilibrium);
        }
}

TEST_CASE("worst supportable outcome") {
    const NamedFamily two = gen_two_job_unit();
    const auto worst = worst_supportable(two.instance);
    REQUIRE(worst.has_value());
    CHECK(worst->cost == 2.0);
    CHECK(worst->profile.assignment.slots == std::vector<int>{1, 3});
    CHECK(is_mechanism_nash(two.instance, worst->profile).is_equilibrium);

    Instance solo;
    solo.cost = CostFunction::unit();
    solo.horizon = 3;
    solo.jobs = {{1, 4}};
    CHECK(worst_supportable(solo)->cost == 1.0);
}

TEST_CASE("single-payer payments over unit optima") {
    const NamedFamily two = gen_two_job_unit();
    const PaymentProfile xi = payments_unit_optimal(two.instance, two.reference_opt);
    CHECK(xi.payments == std::vector<double>{1.0, 0.0});  // lowest-index payer
    CHECK(is_mechanism_nash(two.instance, {two.reference_opt, xi}).is_equilibrium);

    Instance disjoint;
    disjoint.cost = CostFunction::unit();
    disjoint.horizon = 6;
    disjoint.jobs = {{1, 2}, {3, 4}, {5, 6}};
    CHECK(payments_unit_optimal(disjoint, Assignment{{1, 3, 5}}).payments ==
          std::vector<double>{1.0, 1.0, 1.0});

    // greedy stabbing of {[1,3), [2,4), [3,5)} opens slots 2 and 4; the
    // window-[1,3) job funds slot 2 and the window-[3,5) job funds slot 4
    Instance chain;
    chain.cost = CostFunction::unit();
    chain.horizon = 4;
    chain.jobs = {{1, 3}, {2, 4}, {3, 5}};
    const OptResult greedy = opt_unit_greedy(chain);
    CHECK(payments_unit_optimal(chain, greedy.assignment).payments ==
          std::vector<double>{1.0, 0.0, 1.0});

    // a suboptimal assignment is detected: both slots are mutually visible
    CHECK_THROWS_WITH_AS(payments_unit_optimal(two.instance, Assignment{{1, 2}}),
                         doctest::Contains("not optimal"), ValidationError);
}

TEST_CASE("fair-share payments over common-slot optima") {
    Instance common;
    common.cost = CostFunction::monomial(0.5);
    common.horizon = 3;
    common.jobs = {{1, 4}, {1, 4}, {1, 4}, {1, 4}};
    const PaymentProfile xi = payments_common_slot(common, Assignment{{2, 2, 2, 2}});
    for (double p : xi.payments) CHECK(p == doctest::Approx(0.5));
    CHECK(is_mechanism_nash(common, {Assignment{{2, 2, 2, 2}}, xi}).is_equilibrium);

    Instance one;
    one.cost = CostFunction::monomial(0.5);
    one.horizon = 2;
    one.jobs = {{1, 3}};
    CHECK(payments_common_slot(one, Assignment{{1}}).payments == std::vector<double>{1.0});

    Instance big;
    big.cost = CostFunction::monomial(0.5);
    big.horizon = 3;
    big.jobs.assign(100, {1, 4});
    Assignment stacked;
    stacked.slots.assign(100, 2);
    const PaymentProfile hundredth = payments_common_slot(big, stacked);
    for (double p : hundredth.payments) CHECK(p == doctest::Approx(0.1));
    CHECK(is_mechanism_nash(big, {stacked, hundredth}).is_equilibrium);

    CHECK_THROWS_AS(payments_common_slot(common, Assignment{{1, 2, 2, 2}}), ValidationError);
    Instance unit = common;
    unit.cost = CostFunction::unit();
    CHECK_THROWS_AS(payments_common_slot(unit, Assignment{{2, 2, 2, 2}}), ValidationError);
}

TEST_CASE("mechanism price of anarchy") {
    CHECK(mechanism_poa(gen_two_job_unit().instance) == 2.0);

    Instance solo;
    solo.cost = CostFunction::unit();
    solo.horizon = 3;
    solo.jobs = {{1, 4}};
    CHECK(mechanism_poa(solo) == 1.0);

    const NamedFamily fl = gen_freeloader(16, 0.5);
    const double poa = mechanism_poa(fl.instance);
    CHECK(poa >= 8.0 / (std::sqrt(13.0) + 3.0) - kDefaultEps);
}

TEST_CASE("verified equilibria pay slots exactly and freeload where possible") {
    std::mt19937_64 rng(98001);
    int verified = 0;
    for (int i = 0; i < 25; ++i) {
        const Instance inst =
            gen_random(1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 5),
                       CostFunction::unit(), 98100 + static_cast<std::uint64_t>(i));
        const auto worst = worst_supportable(inst);
        if (!worst) continue;
        ++verified;
        const LoadProfile loads = load_profile(inst, worst->profile.assignment);
        std::vector<double> paid(static_cast<size_t>(inst.horizon) + 1, 0.0);
        for (int j = 0; j < inst.job_count(); ++j)
            paid[static_cast<size_t>(worst->profile.assignment.slots[static_cast<size_t>(j)])] +=
                worst->profile.payments.payments[static_cast<size_t>(j)];
        for (int t = 1; t <= inst.horizon; ++t)
            if (loads[t] > 0)
                CHECK(paid[static_cast<size_t>(t)] ==
                      doctest::Approx(inst.cost.eval(loads[t])).epsilon(1e-9));
        for (int j = 0; j < inst.job_count(); ++j) {
            if (worst->profile.payments.payments[static_cast<size_t>(j)] <= kDefaultEps) continue;
            const Job& job = inst.jobs[static_cast<size_t>(j)];
            for (int t = job.release; t < job.deadline; ++t)
                if (t != worst->profile.assignment.slots[static_cast<size_t>(j)])
                    CHECK(loads[t] == 0);
        }
    }
    CHECK(verified > 0);
}

TEST_CASE("occupied slots farther from the common slot grow geometrically") {
    // in any supportable outcome of a common-slot game, a slot t' beyond t
    // (same side of the common slot) holds y >= d^(1/(d-1)) * x jobs, because
    // one of its jobs pays the average share and could take the marginal at t
    std::mt19937_64 rng(99001);
    const double d = 0.5;
    const double alpha = std::pow(d, 1.0 / (d - 1.0));  // 4 at d = 0.5
    int pairs = 0;
    for (int i = 0; i < 120; ++i) {
        const int T = 4 + static_cast<int>(rng() % 3);
        const int t_star = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(T));
        const Instance inst =
            gen_random(5 + static_cast<int>(rng() % 4), T, CostFunction::monomial(d),
                       99100 + static_cast<std::uint64_t>(i), RandomShape::CommonSlot, t_star);
        const auto worst = worst_supportable(inst);
        if (!worst) continue;
        const LoadProfile loads = load_profile(inst, worst->profile.assignment);
        for (int side : {-1, 1}) {
            std::vector<int> occupied;  // ordered by distance from t_star
            for (int k = 1; k <= inst.horizon; ++k) {
                const int t = t_star + side * k;
                if (t < 1 || t > inst.horizon) break;
                if (loads[t] > 0) occupied.push_back(loads[t]);
            }
            for (size_t a = 0; a + 1 < occupied.size(); ++a)
                for (size_t b = a + 1; b < occupied.size(); ++b) {
                    const int x = occupied[a], y = occupied[b];
                    CHECK(inst.cost.marginal(x) >= inst.cost.share(y) - kDefaultEps);
                    CHECK(y >= alpha * x - 1e-6);
                    ++pairs;
                }
        }
    }
    CHECK(pairs > 0);  // the property was exercised, not vacuous
}
