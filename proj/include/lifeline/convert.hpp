#pragma once

#include <utility>

#include "lifeline/families.hpp"

namespace lifeline {

// Conversions among the three equivalent descriptions of an identically
// distributed, minimally stable vector of r lifetimes:
//   (a) marginal survival Gbar plus diagonal sections delta_2..delta_r,
//   (b) order-statistic survival functions Gbar_{1:r}..Gbar_{r:r},
//   (c) failure-rate profile Lambda^[1]..Lambda^[r] of the minima.
// All outputs are validated against their family invariants; inputs that are
// not jointly realizable surface as ContractError, never as silent clamps.

// (a) -> (b).  Gbar_{l:r}(t) is an alternating binomial combination of the
// delta_h evaluated at Gbar(t).
OrderStatFamily orderstat_from_diagonals(const DiagonalFamily& diag,
                                         const MarginalSurvival& marg);

// (b) -> common marginal: Gbar = (1/r) sum_k Gbar_{k:r}.
MarginalSurvival marginal_from_orderstats(const OrderStatFamily& os);

// P(T_{1:A} > t) for any subset A of size d, computed by two independent
// summation forms over the order-statistic survivals; the forms must agree
// within 1e-10 or a ContractError is raised.
double min_survival_from_orderstats(const OrderStatFamily& os, int d, double t);

// P(T_{1:A} > t) for |A| = d straight from form (a): the defining relation
// P(T_{1:A} > t) = delta_d(Gbar(t)).  Unlike the order-statistic route this
// needs no joint realizability beyond what DiagonalFamily itself validates.
double min_survival_from_diagonals(const DiagonalFamily& diag, const MarginalSurvival& marg,
                                   int d, double t);

// (b) -> (a).  delta_d(u) is the d-minimum survival evaluated at Gbar^{-1}(u).
std::pair<DiagonalFamily, MarginalSurvival> diagonals_from_orderstats(const OrderStatFamily& os);

// P(exactly h of the r units are alive at t), h = 0..r, and the per-set
// variant P(the survivor set equals one fixed H with |H| = h).
double survivor_count_pmf(const OrderStatFamily& os, int h, double t);
double survivor_set_pmf(const OrderStatFamily& os, int h, double t);

// (a) -> (c).  Lambda^[l](t) = -d/dt log delta_l(Gbar(t)), by central finite
// differences (step max(1e-5, 1e-5 t)); the l = 1 component uses the analytic
// marginal density when one is attached.
RateProfile profile_from_diagonals(const DiagonalFamily& diag, const MarginalSurvival& marg);

// (c) -> (a).  Gbar = exp(-int Lambda^[1]), delta_d(u) = exp(-int_0^{Gbar^{-1}(u)}
// Lambda^[d]); cumulative integrals by adaptive Simpson to 1e-10.  If a
// cumulative rate exceeds the exp underflow threshold before the grid end, a
// truncation note is recorded on the returned family.
std::pair<DiagonalFamily, MarginalSurvival> diagonals_from_profile(const RateProfile& profile);

// (c) -> (b), with analytic densities attached to the output.
OrderStatFamily orderstats_from_profile(const RateProfile& profile);

// (b) -> (c).  Evaluates both the k-indexed and the h-indexed ratio forms and
// requires agreement within 1e-8; densities are taken from the family (finite
// differences when no analytic ones are attached).
RateProfile profile_from_orderstats(const OrderStatFamily& os);

} // namespace lifeline
