#ifndef POALAB_GENERATORS_HPP
#define POALAB_GENERATORS_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "poalab/mechanism.hpp"
#include "poalab/model.hpp"

namespace poalab {

/// An instance bundled with its known equilibrium witness and reference
/// optimum. Constructors self-validate: the canonical profile passes the
/// applicable equilibrium check and the predicted costs match recomputation.
struct NamedFamily {
    Instance instance;
    Assignment canonical_ne;
    std::optional<PaymentProfile> canonical_payments;  // set for mechanism-game witnesses
    Assignment reference_opt;
    std::string provenance;
    double predicted_ne_cost = 0.0;
    double predicted_opt_cost = 0.0;
};

/// n = h^2+h jobs on slots -h..h (stored shifted to 1..2h+1, shift in meta):
/// for each j <= h, j jobs with window [-j, 0] and j with [0, j]. Canonical
/// equilibrium stacks group j at +-j (load |t| on slot t); the optimum stacks
/// everything on the center. Requires 0 < d < 1.
NamedFamily gen_valley(int h, double d);

/// Quadratic-cost instance of 336 jobs on 328 slots arranged in labeled
/// regions (1x"6", 2x"5", 5x"4", 20x"3", 60x"2", 120x"1", 120x"0"); a job on a
/// label-x slot may use the slot prefix through the label-(x-1) region. The
/// canonical equilibrium puts label-many jobs on each slot (cost 706); the
/// reference optimum pairs the sixteen top-region jobs two-per-slot and
/// spreads everyone else singly (cost 352).
NamedFamily gen_quadratic();

/// Unit cost, windows {1,2} and {2,3}. Canonical mechanism equilibrium: slots
/// (1,3), each paying 1 (the only alternative, slot 2, is empty and would cost
/// a full unit). Optimum: both on slot 2.
NamedFamily gen_two_job_unit();

/// n^d single-slot ("restricted") jobs plus n - n^d unrestricted jobs over
/// n^d slots; requires n^d and n^(1-d) integral. Canonical mechanism
/// equilibrium spreads the unrestricted jobs evenly paying zero while each
/// restricted job covers its slot's full cost.
NamedFamily gen_freeloader(int n, double d);

enum class RandomShape { General, CommonSlot };

/// Seed-deterministic random instance; windows uniform over valid [r, d)
/// pairs. CommonSlot forces t_star into every window.
Instance gen_random(int n, int horizon, const CostFunction& cost, std::uint64_t seed,
                    RandomShape shape = RandomShape::General, int t_star = 1);

}  // namespace poalab

#endif
