#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lifeline/numerics.hpp"

namespace lifeline {

// Dimension bounds: permutation enumeration must stay tractable.
inline constexpr int kMinR = 2;
inline constexpr int kMaxR = 12;

inline void check_dimension(int r) {
    if (r < kMinR || r > kMaxR)
        throw DomainError("dimension r=" + std::to_string(r) + " outside [" +
                          std::to_string(kMinR) + ", " + std::to_string(kMaxR) + "]");
}

std::vector<double> make_uniform_grid(double a, double b, int n);

// Smallest t with surv(t) <= target, located by doubling + bisection.
// Used to pick the working horizon T* with G_{r:r}(T*) = 1e-3.
double find_tail_time(const RealFn& surv, double target = 1e-3, double cap = 1e12);

// Number of points of the default working grid on [0, T*].
inline constexpr int kDefaultGridN = 512;

// Common one-dimensional marginal survival function Gbar.  Requirements
// (checked on the working grid at construction): Gbar(0) = 1, strictly
// decreasing, strictly positive.  An optional density g is cross-checked
// against -dGbar/dt at a few interior points.
class MarginalSurvival {
public:
    explicit MarginalSurvival(RealFn gbar, RealFn density = nullptr,
                              std::optional<double> horizon = std::nullopt);

    double operator()(double t) const;
    double density(double t) const;  // analytic if supplied, else central differences
    bool has_density() const { return has_density_; }

    // Gbar^{-1}(u) for u in (0, 1]; |Gbar(x) - u| <= 1e-10 on return.
    double invert(double u) const;

    double tstar() const { return grid_.back(); }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<std::string>& notes() const { return notes_; }
    void add_note(std::string n) { notes_.push_back(std::move(n)); }

private:
    RealFn gbar_;
    RealFn density_;
    bool has_density_;
    std::vector<double> grid_;
    std::vector<double> grid_vals_;  // Gbar on grid_, for inversion brackets
    std::vector<std::string> notes_;
    // Inversions repeat heavily when diagonal closures are composed, so they
    // are memoized; copies share the memo (same function, same roots).
    struct InvertMemo {
        std::mutex mu;
        std::map<double, double> roots;
    };
    std::shared_ptr<InvertMemo> invert_memo_ = std::make_shared<InvertMemo>();
};

// Diagonal sections delta_1..delta_r of the survival copula, with
// delta_1(u) = u.  Checked on a unit-interval grid: endpoints, weak
// monotonicity, and the ordering delta_2 >= delta_3 >= ... >= delta_r.
class DiagonalFamily {
public:
    // deltas[i] is delta_{i+2}, i = 0..r-2.
    DiagonalFamily(int r, std::vector<RealFn> deltas, int check_grid_n = 257,
                   double order_slack = 1e-9);

    int r() const { return r_; }
    double operator()(int ell, double u) const;

    const std::vector<std::string>& notes() const { return notes_; }
    void add_note(std::string n) { notes_.push_back(std::move(n)); }

private:
    int r_;
    std::vector<RealFn> deltas_;
    std::vector<std::string> notes_;
};

// Survival functions Gbar_{1:r}..Gbar_{r:r} of the order statistics, with
// optional densities.  Checked on the working grid: start at 1, weakly
// decreasing, and pointwise sorted Gbar_{1:r} <= ... <= Gbar_{r:r}.
class OrderStatFamily {
public:
    OrderStatFamily(int r, std::vector<RealFn> gbar, std::vector<RealFn> densities = {},
                    std::optional<double> horizon = std::nullopt, double order_slack = 1e-9);

    int r() const { return r_; }
    double survival(int k, double t) const;
    double density(int k, double t) const;
    bool has_densities() const { return has_densities_; }

    double tstar() const { return grid_.back(); }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<std::string>& notes() const { return notes_; }
    void add_note(std::string n) { notes_.push_back(std::move(n)); }

private:
    int r_;
    std::vector<RealFn> gbar_;
    std::vector<RealFn> densities_;
    bool has_densities_;
    std::vector<double> grid_;
    std::vector<std::string> notes_;
};

// Failure rates Lambda^[1]..Lambda^[r] of the minima over sets of each size
// (conditionally on no failures yet).  Checked on the supplied time grid:
// nonnegative (up to finite-difference noise at the left endpoint) and
// cumulative integrals increasing in d.
class RateProfile {
public:
    RateProfile(int r, std::vector<RealFn> lambdas, std::vector<double> grid,
                bool exchangeable_form = true);

    int r() const { return r_; }
    bool exchangeable_form() const { return exchangeable_; }

    // Lambda^[d](t); tiny negative finite-difference noise is clamped to 0.
    double rate(int d, double t) const;

    // mu^[d](t|0) = Lambda^[d](t)/d, the per-unit hazard reading available
    // in the exchangeable form.
    double mu(int d, double t) const;

    const std::vector<double>& grid() const { return grid_; }
    const std::vector<std::string>& notes() const { return notes_; }
    void add_note(std::string n) { notes_.push_back(std::move(n)); }

private:
    int r_;
    std::vector<RealFn> lambdas_;
    std::vector<double> grid_;
    bool exchangeable_;
    std::vector<std::string> notes_;
};

} // namespace lifeline
