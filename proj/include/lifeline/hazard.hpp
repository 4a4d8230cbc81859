#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lifeline/errors.hpp"
#include "lifeline/loadsharing.hpp"

namespace lifeline {

// ---------------------------------------------------------------------------
// Multivariate conditional hazard rate specification: the failure rate of a
// surviving unit j given the observed dynamic history (which units failed,
// when), lambda_{j|j1..jk}(t | t1..tk).

struct FailureEvent {
    int unit;     // 1-based
    double time;
};
using History = std::vector<FailureEvent>;

struct HazardFlags {
    bool time_homogeneous = false;   // rates constant in t given the history
    bool order_independent = false;  // rates see the failed set, not the order
    bool exchangeable_form = false;  // rates see only (count, times, t)
    // Internal: rates depend on (count, t) alone -- history labels and times
    // are ignored -- which enables process-wide per-level hazard caches.
    bool count_only_history = false;
};

class HazardModel {
public:
    // Must be pure and re-entrant: the engine evaluates it concurrently.
    using RateFn = std::function<double(int j, const History& history, double t)>;
    // Optional exact Psi(t; j): installed by the load-sharing factories so
    // the quadrature engine can dispatch to closed forms.
    using ClosedPsiFn = std::function<double(const std::vector<int>& j, double t)>;

    HazardModel(int r, RateFn rate, HazardFlags flags = {}, ClosedPsiFn closed_psi = nullptr,
                double time_scale = 1.0);

    int r() const { return r_; }
    const HazardFlags& flags() const { return flags_; }
    const ClosedPsiFn& closed_form_psi() const { return closed_psi_; }
    // Characteristic time for probe sampling (roughly a mean failure time).
    double time_scale() const { return time_scale_; }

    // Validates the arguments (j alive and in range, history times strictly
    // increasing and <= t) before invoking the callable.
    double rate(int j, const History& history, double t) const;
    // Engine-internal fast path: the caller guarantees a valid configuration.
    double rate_unchecked(int j, const History& history, double t) const {
        return rate_(j, history, t);
    }

    // Cumulative per-level hazard integral int_0^t Lambda_k(u) du for
    // count-only models (null otherwise); shared across copies.
    double level_cumulative(int k, double t) const;

private:
    int r_;
    RateFn rate_;
    HazardFlags flags_;
    ClosedPsiFn closed_psi_;
    double time_scale_;
    struct LevelCaches;
    std::shared_ptr<LevelCaches> caches_;  // populated iff count_only_history
};

void validate_history(const HazardModel& model, const History& history, double t);

// Lambda_{history}(t): total failure rate over the surviving units.
double total_rate(const HazardModel& model, const History& history, double t);

// Joint density at x (all coordinates positive and distinct): sorts x into
// the induced failure order and multiplies stage rates by the exponential
// of minus the integrated total rate over each inter-failure interval.
double joint_density(const HazardModel& model, const std::vector<double>& x);

// ---------------------------------------------------------------------------
// Psi(t; j) = P(the first |j| failures are exactly j, in that order, by
// time t, and everyone else survives t).

// Nesting order of the simplex quadrature; the two orders integrate the
// same integrand and must agree (property-tested), giving an internal
// cross-check of the integration.
enum class PsiOrder {
    FirstFailureOuter,  // t_1 outermost, t_d innermost
    LastFailureOuter,   // t_d outermost, t_1 innermost
};

struct PsiOptions {
    bool force_generic = false;      // skip the closed-form dispatch
    PsiOrder order = PsiOrder::FirstFailureOuter;
    int qmc_log2_points = 16;        // 2^k Sobol points for |j| >= 4
};

struct PsiResult {
    double value = 0.0;
    double abs_error = 0.0;          // reported error estimate
    std::string method;              // "closed-form" | "nested-quadrature" | "qmc"
};

PsiResult psi_detail(const HazardModel& model, const std::vector<int>& j, double t,
                     const PsiOptions& options = {});
double psi(const HazardModel& model, const std::vector<int>& j, double t);

// P(exactly the units of A survive t) = sum over orderings of the
// complement of Psi.  Permutations are evaluated in parallel and reduced in
// a fixed order.
double survivor_set_prob(const HazardModel& model, std::vector<int> A, double t);

struct SurvivorSetReport {
    double t = 0.0;
    std::map<std::vector<int>, double> survivor_probs;  // sorted subset -> prob
    std::vector<double> pmf;            // pmf[m] = P(exactly m survivors)
    double total_probability = 0.0;     // sum over all subsets (~1)
};

// All 2^r survivor sets at once (r <= 8: the enumeration is factorial).
SurvivorSetReport survivor_report(const HazardModel& model, double t);

// P(min over A of T_j > t) = sum of survivor_set_prob over supersets of A.
// For A = [r] computes the direct exponential identity exp(-int Lambda) and
// asserts agreement with the Psi-engine value within 1e-7.
double min_survival(const HazardModel& model, std::vector<int> A, double t);

// ---------------------------------------------------------------------------
// Property probes.

struct ExchangeableReport {
    bool pass = true;
    std::string witness;   // offending configuration, empty on pass
    int probes_run = 0;
};

// Random-probe test of the exchangeable form: the rate must not change when
// the surviving label is swapped or the history labels are reassigned with
// times held fixed.  Probabilistic (a pass is evidence, not proof).
ExchangeableReport check_exchangeable(const HazardModel& model, int probe_budget = 10000,
                                      std::uint64_t seed = 20260814);

struct MinStableReport {
    bool pass = true;
    double tol = 0.0;
    double max_violation = 0.0;
    std::vector<int> witness_A, witness_B;  // failed sets with the widest gap
    double witness_t = 0.0;
    std::string summary;
};

// For every cardinality c = 1..r-1, every pair of failed sets A, B with
// |A| = |B| = c and every grid time: the order-summed Psi masses must agree
// within tol.
MinStableReport check_minimally_stable(const HazardModel& model,
                                       const std::vector<double>& time_grid, double tol);

// ---------------------------------------------------------------------------
// Factories bridging the load-sharing module.

// Constant order-dependent rates from an explicit table; installs the exact
// hyperexponential Psi as the closed form.
HazardModel hazard_from_odthls(const OdThlsSpec& spec);

// Exchangeable constant rates L(r-k)/(r-k); closed-form Psi
// ((r-d)!/r!) * [S_{d+1}(t) - S_d(t)] needs no rate table, so any r <= 12.
HazardModel hazard_from_exthls(const ExThlsModel& model);

// Exchangeable, possibly time-varying per-unit rate mu(k, t) where k is the
// number of failures so far (count-only history).
HazardModel hazard_exchangeable(int r, std::function<double(int k, double t)> mu,
                                bool time_homogeneous = false);

} // namespace lifeline
