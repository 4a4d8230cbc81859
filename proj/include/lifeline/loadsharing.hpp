#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lifeline/families.hpp"

namespace lifeline {

// ---------------------------------------------------------------------------
// Sums of independent exponentials with per-stage rates gamma_1..gamma_k
// (the law of the k-th order statistic in a time-homogeneous load-sharing
// model, conditionally on the failure order).

struct HyperexpParams {
    std::vector<double> gamma;  // stage rates, all > 0
};

// P(Y_1/gamma_1 + ... + Y_k/gamma_k > t), Y_j iid standard exponentials.
// Distinct rates use the product-coefficient closed form; rates with any
// pair closer than relative 1e-9 switch to the uniformization recursion on
// the bidiagonal phase-type generator.
double hyperexp_survival(const HyperexpParams& p, int k, double t);
double hyperexp_density(const HyperexpParams& p, int k, double t);

// ---------------------------------------------------------------------------
// Order-dependent time-homogeneous load-sharing specification: one constant
// failure rate lambda_{j|j_1..j_k} per (ordered prefix of failed units,
// surviving unit j).  Indices are 1-based.

class OdThlsSpec {
public:
    using RateTable = std::map<std::vector<int>, std::map<int, double>>;

    OdThlsSpec(int r, RateTable rates);

    int r() const { return r_; }
    const RateTable& rates() const { return rates_; }

    double rate(const std::vector<int>& prefix, int j) const;
    double total_rate(const std::vector<int>& prefix) const;  // Lambda_{prefix}

    // True when rates depend on the prefix only through its underlying set.
    bool order_independent(double rel_tol = 1e-12) const;
    // True when rates depend on the prefix only through its length.
    bool exchangeable_rates(double rel_tol = 1e-12) const;

    // Total-rate vector along an ordered tuple j: (Lambda_empty,
    // Lambda_{j1}, ..., Lambda_{j1..j_{d-1}}, [Lambda_{j1..jd} if d < r]).
    // Length min(|j|+1, r).
    std::vector<double> lambda_vector(const std::vector<int>& j) const;

    // Probability that the units fail exactly in the order j (full
    // permutation): product of lambda/Lambda along the prefix chain.
    double order_probability(const std::vector<int>& j) const;

private:
    int r_;
    RateTable rates_;
};

// Probability that the ordered failure history equals j by time t with all
// other units still alive:
//   Psi(t; j) = [prod_l lambda_{j_l|prefix}/Lambda_prefix] * [S_{d+1}(t) - S_d(t)],
// where S_k is the hyperexponential survival built from the total-rate
// vector along j (S_0 = 0; for d = r the bracket is 1 - S_r).
double thls_psi(const OdThlsSpec& spec, const std::vector<int>& j, double t);

// ---------------------------------------------------------------------------
// Partition of the r! failure orders by their total-rate vectors.

struct ThlsClass {
    std::vector<double> L;                    // (L(r), ..., L(1))
    std::vector<std::vector<int>> perms;      // orders sharing this vector
    double order_probability = 0.0;           // P(failure order falls in this class)
};

struct ThlsPartition {
    std::vector<ThlsClass> classes;           // sorted by L, lexicographically
    bool singleton() const { return classes.size() == 1; }
};

ThlsPartition lambda_partition(const OdThlsSpec& spec);

// ---------------------------------------------------------------------------
// Exchangeable time-homogeneous load-sharing model with per-stage total
// rates L = (L(r), L(r-1), ..., L(1)): every analytic quantity in closed
// form.

class ExThlsModel {
public:
    explicit ExThlsModel(std::vector<double> L);

    int r() const { return r_; }
    const std::vector<double>& L() const { return L_; }

    double stage_total(int failed) const;      // L(r - failed), failed = 0..r-1
    double mu(int failed) const;               // per-unit rate L(r-k)/(r-k)

    double orderstat_survival(int k, double t) const;   // Gbar_{k:r}
    double orderstat_density(int k, double t) const;
    double orderstat_mean(int k) const;                  // sum_{j<=k} 1/L(r-j+1)
    double marginal(double t) const;                     // (1/r) sum_k Gbar_{k:r}
    double marginal_density(double t) const;
    double min_survival(int d, double t) const;          // P(T_{1:A} > t), |A| = d
    double mu_profile(int d, double t) const;            // mu^[d](t|0)

    OrderStatFamily orderstat_family() const;
    MarginalSurvival marginal_family() const;
    DiagonalFamily diagonal_family() const;
    RateProfile rate_profile() const;
    OdThlsSpec as_odthls() const;

private:
    int r_;
    std::vector<double> L_;
    HyperexpParams stages_;
};

// ---------------------------------------------------------------------------
// Minimal-stability machinery.

struct NecessaryReport {
    bool pass = false;
    std::string witness;        // empty on pass
    double initial_total = 0;   // Lambda_empty
    double after_one = 0;       // common Lambda_i (when pass)
};

// Fast necessary conditions: all lambda_{i|empty} equal and all Lambda_i
// equal.  Failure certifies the spec is not minimally stable.
NecessaryReport necessary_min_stable(const OdThlsSpec& spec);

enum class R3Verdict { ExchangeableA3, StrictOrderA3Prime, NotMinStable };

inline const char* to_string(R3Verdict v) {
    switch (v) {
        case R3Verdict::ExchangeableA3: return "exchangeable-A3";
        case R3Verdict::StrictOrderA3Prime: return "strict-order-A3'";
        default: return "not-min-stable";
    }
}

struct R3Report {
    R3Verdict verdict = R3Verdict::NotMinStable;
    std::string detail;
    // Extracted parameters (populated as far as the checks got).
    double L3 = 0, L2 = 0;
    double L1 = 0;                     // common third-stage rate (A3)
    double L1_lo = 0, L1_hi = 0;       // the two third-stage values (A3')
    // Pair-rate values.  A3: gamma1 <= gamma2.  A3': gamma1 is the pair rate
    // coupled to L1_lo and gamma2 the one coupled to L1_hi.
    double gamma1 = 0, gamma2 = 0;
};

// Complete characterization of minimal stability for r = 3 (constant rates):
// (A1) equal initial rates; (A2) equal post-first-failure totals; then
// either (A3) a single third-stage rate with common pair multiset
// {gamma1, gamma2}, gamma1 + gamma2 = L(2), or (A3') two third-stage values
// consistently coupled to the pair rates.  Equality means relative 1e-12.
R3Report check_min_stable_r3(const OdThlsSpec& spec);

struct GeneratedModel {
    std::optional<OdThlsSpec> spec;
    bool degenerate_to_exchangeable = false;
    std::vector<std::string> notes;
    const OdThlsSpec& get() const { return *spec; }
};

// Random minimally stable spec whose per-stage total rates all equal the
// given L (every failure order sees the same total-rate vector).  Stage-by-
// stage: the exchangeable rates plus a seeded null-space perturbation of the
// linear system {row sums fixed, permutation-product sums fixed}.  With
// uniform_frailty, rates are pinned to Lambda_prefix/(r-k) and only the
// freedom the frailty condition leaves (the r = 3 third stage) is
// randomized.
GeneratedModel generate_singleton_min_stable(const std::vector<double>& L, std::uint64_t seed,
                                             bool uniform_frailty = false);

// Conditional law of the order statistics given a full failure order:
// the total-rate vector (Lambda_empty, Lambda_{j1}, ..., Lambda_{j1..j_{r-1}}),
// i.e. T_{k:r} | order is hyperexponential with the first k entries.
std::vector<double> conditional_orderstat_law(const OdThlsSpec& spec,
                                              const std::vector<int>& ordering);

// Order-statistic family of a (minimally stable) spec as a mixture of the
// per-class hyperexponential families.  Class weights are the order
// probabilities P(failure order in class), which reduce to |class|/r! when
// every order is equally likely and make the mixture exact for all specs.
// When `require_min_stable` and the spec fails the r-free necessary check,
// a ContractError is thrown; pass false to override (recorded in notes).
OrderStatFamily mixture_orderstats(const OdThlsSpec& spec, bool require_min_stable = true);

} // namespace lifeline
