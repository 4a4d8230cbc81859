#include "lifeline/families.hpp"

#include <algorithm>
#include <cmath>

namespace lifeline {

std::vector<double> make_uniform_grid(double a, double b, int n) {
    if (n < 2 || !(b > a)) throw DomainError("make_uniform_grid: need n >= 2 and b > a");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / (n - 1);
    g.back() = b;
    return g;
}

double find_tail_time(const RealFn& surv, double target, double cap) {
    if (!(surv(0.0) > target))
        throw DomainError("find_tail_time: survival already at or below target at t=0");
    double lo = 0.0, hi = 1.0;
    while (surv(hi) > target) {
        lo = hi;
        hi *= 2.0;
        if (hi > cap)
            throw ContractError("find_tail_time: survival does not reach " +
                                std::to_string(target) + " by t=" + std::to_string(cap) +
                                " (tail too heavy for the working grid)");
    }
    return bisect_monotone(surv, target, lo, hi, /*increasing=*/false);
}

// ---------------------------------------------------------------------------
// MarginalSurvival

MarginalSurvival::MarginalSurvival(RealFn gbar, RealFn density, std::optional<double> horizon)
    : gbar_(std::move(gbar)), density_(std::move(density)), has_density_(density_ != nullptr) {
    if (!gbar_) throw ContractError("MarginalSurvival: survival callable is empty");
    const double g0 = gbar_(0.0);
    if (std::abs(g0 - 1.0) > 1e-9)
        throw ContractError("MarginalSurvival: Gbar(0) = " + std::to_string(g0) +
                            ", expected 1");
    const double t_end = horizon ? *horizon : find_tail_time(gbar_);
    grid_ = make_uniform_grid(0.0, t_end, kDefaultGridN);
    grid_vals_.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) grid_vals_[i] = gbar_(grid_[i]);
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
        if (!(grid_vals_[i + 1] > 0.0))
            throw ContractError("MarginalSurvival: Gbar not strictly positive at grid index " +
                                std::to_string(i + 1));
        if (!(grid_vals_[i + 1] < grid_vals_[i]))
            throw ContractError("MarginalSurvival: Gbar not strictly decreasing at grid index " +
                                std::to_string(i));
    }
    if (has_density_) {
        // Spot-check -dGbar/dt against the supplied density at interior points.
        for (int j = 1; j <= 16; ++j) {
            const double t = t_end * j / 17.0;
            const double fd = -derivative_fd(gbar_, t);
            const double an = density_(t);
            if (std::abs(fd - an) > 1e-3 * std::max(1.0, std::abs(an)) + 1e-8)
                throw ContractError("MarginalSurvival: supplied density disagrees with -dGbar/dt at t=" +
                                    std::to_string(t) + " (finite difference " + std::to_string(fd) +
                                    ", supplied " + std::to_string(an) + ")");
        }
    }
}

double MarginalSurvival::operator()(double t) const {
    if (t < 0.0) throw DomainError("MarginalSurvival: t must be >= 0");
    return clamp_probability(gbar_(t), "MarginalSurvival");
}

double MarginalSurvival::density(double t) const {
    if (t < 0.0) throw DomainError("MarginalSurvival::density: t must be >= 0");
    if (has_density_) return density_(t);
    return -derivative_fd(gbar_, t);
}

double MarginalSurvival::invert(double u) const {
    if (!(u > 0.0) || u > 1.0 + kProbSlack)
        throw DomainError("MarginalSurvival::invert: u must be in (0, 1], got " +
                          std::to_string(u));
    if (u >= 1.0) return 0.0;
    {
        std::lock_guard<std::mutex> lock(invert_memo_->mu);
        auto it = invert_memo_->roots.find(u);
        if (it != invert_memo_->roots.end()) return it->second;
    }
    // Initial bracket from the tabulated grid values (descending), expanding
    // beyond the working grid when the target lies in the deep tail.
    double lo = 0.0, hi = tstar();
    if (grid_vals_.back() > u) {
        lo = hi;
        while (gbar_(hi) > u) {
            hi *= 2.0;
            if (hi > 1e12)
                throw DomainError("MarginalSurvival::invert: u=" + std::to_string(u) +
                                  " not reached by t=1e12");
        }
    } else {
        const auto it = std::lower_bound(grid_vals_.begin(), grid_vals_.end(), u,
                                         [](double v, double target) { return v > target; });
        const std::size_t j = static_cast<std::size_t>(it - grid_vals_.begin());
        if (j > 0) lo = grid_[j - 1];
        if (j < grid_.size()) hi = grid_[j];
    }
    // Safeguarded Newton (bisection fallback) down to a machine-width bracket,
    // so the root is jitter-free for downstream finite differences.
    double x = 0.5 * (lo + hi);
    for (int i = 0; i < 200; ++i) {
        const double fx = gbar_(x);
        if (fx == u) break;
        if (fx > u) lo = x; else hi = x;
        if (hi - lo <= std::numeric_limits<double>::epsilon() * (std::abs(lo) + std::abs(hi) + 1.0)) {
            x = 0.5 * (lo + hi);
            break;
        }
        double next = 0.5 * (lo + hi);
        if (has_density_) {
            const double g = density_(x);
            if (g > 0.0) {
                const double newton = x + (fx - u) / g;
                if (newton > lo && newton < hi) next = newton;
            }
        }
        if (std::abs(next - x) <= std::numeric_limits<double>::epsilon() * (std::abs(x) + 1.0)) {
            x = next;
            break;
        }
        x = next;
    }
    {
        std::lock_guard<std::mutex> lock(invert_memo_->mu);
        invert_memo_->roots.emplace(u, x);
    }
    return x;
}

// ---------------------------------------------------------------------------
// DiagonalFamily

DiagonalFamily::DiagonalFamily(int r, std::vector<RealFn> deltas, int check_grid_n,
                               double order_slack) : r_(r), deltas_(std::move(deltas)) {
    check_dimension(r_);
    if (deltas_.size() != static_cast<std::size_t>(r_ - 1))
        throw ContractError("DiagonalFamily: expected " + std::to_string(r_ - 1) +
                            " diagonals (orders 2.." + std::to_string(r_) + "), got " +
                            std::to_string(deltas_.size()));
    const auto u_grid = make_uniform_grid(0.0, 1.0, check_grid_n);
    std::vector<double> prev;  // values of delta_{ell-1} on the grid
    for (int ell = 2; ell <= r_; ++ell) {
        const auto& f = deltas_[static_cast<std::size_t>(ell - 2)];
        if (!f) throw ContractError("DiagonalFamily: delta_" + std::to_string(ell) + " is empty");
        std::vector<double> vals(u_grid.size());
        for (std::size_t i = 0; i < u_grid.size(); ++i)
            vals[i] = clamp_probability(f(u_grid[i]), "DiagonalFamily");
        if (std::abs(vals.front()) > 1e-9)
            throw ContractError("DiagonalFamily: delta_" + std::to_string(ell) +
                                "(0) = " + std::to_string(vals.front()) + ", expected 0");
        if (std::abs(vals.back() - 1.0) > 1e-9)
            throw ContractError("DiagonalFamily: delta_" + std::to_string(ell) +
                                "(1) = " + std::to_string(vals.back()) + ", expected 1");
        for (std::size_t i = 0; i + 1 < vals.size(); ++i)
            if (vals[i + 1] < vals[i] - order_slack)
                throw ContractError("DiagonalFamily: delta_" + std::to_string(ell) +
                                    " decreases at grid index " + std::to_string(i));
        if (ell > 2) {
            for (std::size_t i = 0; i < vals.size(); ++i)
                if (vals[i] > prev[i] + order_slack)
                    throw ContractError("DiagonalFamily: delta_" + std::to_string(ell) +
                                        " exceeds delta_" + std::to_string(ell - 1) +
                                        " at grid index " + std::to_string(i) +
                                        " (family not sorted in the diagonal order)");
        }
        prev = std::move(vals);
    }
}

double DiagonalFamily::operator()(int ell, double u) const {
    if (ell < 1 || ell > r_)
        throw DomainError("DiagonalFamily: order " + std::to_string(ell) + " outside [1, " +
                          std::to_string(r_) + "]");
    if (u < -kProbSlack || u > 1.0 + kProbSlack)
        throw DomainError("DiagonalFamily: u=" + std::to_string(u) + " outside [0, 1]");
    u = std::clamp(u, 0.0, 1.0);
    if (ell == 1) return u;
    return clamp_probability(deltas_[static_cast<std::size_t>(ell - 2)](u), "DiagonalFamily");
}

// ---------------------------------------------------------------------------
// OrderStatFamily

OrderStatFamily::OrderStatFamily(int r, std::vector<RealFn> gbar, std::vector<RealFn> densities,
                                 std::optional<double> horizon, double order_slack)
    : r_(r), gbar_(std::move(gbar)), densities_(std::move(densities)),
      has_densities_(!densities_.empty()) {
    check_dimension(r_);
    if (gbar_.size() != static_cast<std::size_t>(r_))
        throw ContractError("OrderStatFamily: expected " + std::to_string(r_) +
                            " survival functions, got " + std::to_string(gbar_.size()));
    if (has_densities_ && densities_.size() != static_cast<std::size_t>(r_))
        throw ContractError("OrderStatFamily: expected " + std::to_string(r_) +
                            " densities, got " + std::to_string(densities_.size()));
    for (int k = 1; k <= r_; ++k)
        if (!gbar_[static_cast<std::size_t>(k - 1)])
            throw ContractError("OrderStatFamily: survival of order statistic " +
                                std::to_string(k) + " is empty");
    // The longest-lived curve Gbar_{r:r} fixes the working horizon.
    const double t_end = horizon ? *horizon : find_tail_time(gbar_.back());
    grid_ = make_uniform_grid(0.0, t_end, kDefaultGridN);
    std::vector<double> prev;
    for (int k = 1; k <= r_; ++k) {
        const auto& f = gbar_[static_cast<std::size_t>(k - 1)];
        std::vector<double> vals(grid_.size());
        for (std::size_t i = 0; i < grid_.size(); ++i)
            vals[i] = clamp_probability(f(grid_[i]), "OrderStatFamily");
        if (std::abs(vals.front() - 1.0) > 1e-9)
            throw ContractError("OrderStatFamily: Gbar_{" + std::to_string(k) + ":" +
                                std::to_string(r_) + "}(0) = " + std::to_string(vals.front()) +
                                ", expected 1");
        for (std::size_t i = 0; i + 1 < vals.size(); ++i)
            if (vals[i + 1] > vals[i] + order_slack)
                throw ContractError("OrderStatFamily: Gbar_{" + std::to_string(k) + ":" +
                                    std::to_string(r_) + "} increases at grid index " +
                                    std::to_string(i));
        if (k > 1) {
            for (std::size_t i = 0; i < vals.size(); ++i)
                if (vals[i] < prev[i] - order_slack)
                    throw ContractError(
                        "OrderStatFamily: Gbar_{" + std::to_string(k) + ":" + std::to_string(r_) +
                        "} < Gbar_{" + std::to_string(k - 1) + ":" + std::to_string(r_) +
                        "} at grid index " + std::to_string(i) +
                        " (order statistics must be pointwise sorted; family not jointly realizable)");
        }
        prev = std::move(vals);
    }
}

double OrderStatFamily::survival(int k, double t) const {
    if (k < 1 || k > r_)
        throw DomainError("OrderStatFamily::survival: k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(r_) + "]");
    if (t < 0.0) throw DomainError("OrderStatFamily::survival: t must be >= 0");
    return clamp_probability(gbar_[static_cast<std::size_t>(k - 1)](t), "OrderStatFamily");
}

double OrderStatFamily::density(int k, double t) const {
    if (k < 1 || k > r_)
        throw DomainError("OrderStatFamily::density: k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(r_) + "]");
    if (t < 0.0) throw DomainError("OrderStatFamily::density: t must be >= 0");
    if (has_densities_) return densities_[static_cast<std::size_t>(k - 1)](t);
    return -derivative_fd(gbar_[static_cast<std::size_t>(k - 1)], t);
}

// ---------------------------------------------------------------------------
// RateProfile

namespace {
// Absolute slack for rate nonnegativity: one-sided finite differences at the
// left endpoint are only first-order accurate, so profiles built from
// tabulations can dip a hair below zero there.
constexpr double kRateSlack = 1e-4;
} // namespace

RateProfile::RateProfile(int r, std::vector<RealFn> lambdas, std::vector<double> grid,
                         bool exchangeable_form)
    : r_(r), lambdas_(std::move(lambdas)), grid_(std::move(grid)), exchangeable_(exchangeable_form) {
    check_dimension(r_);
    if (lambdas_.size() != static_cast<std::size_t>(r_))
        throw ContractError("RateProfile: expected " + std::to_string(r_) +
                            " rate functions, got " + std::to_string(lambdas_.size()));
    if (grid_.size() < 3) throw ContractError("RateProfile: grid needs at least 3 points");
    for (int d = 1; d <= r_; ++d)
        if (!lambdas_[static_cast<std::size_t>(d - 1)])
            throw ContractError("RateProfile: Lambda^[" + std::to_string(d) + "] is empty");
    // Nonnegativity plus monotonicity in d of the cumulative integrals
    // (minima over larger sets must fail faster), both on the check grid.
    std::vector<double> prev_cum;
    for (int d = 1; d <= r_; ++d) {
        const auto& lam = lambdas_[static_cast<std::size_t>(d - 1)];
        std::vector<double> cum(grid_.size(), 0.0);
        double prev_v = lam(grid_[0]);
        if (prev_v < -kRateSlack)
            throw ContractError("RateProfile: Lambda^[" + std::to_string(d) + "](" +
                                std::to_string(grid_[0]) + ") = " + std::to_string(prev_v) +
                                " is negative");
        for (std::size_t i = 1; i < grid_.size(); ++i) {
            const double v = lam(grid_[i]);
            if (v < -kRateSlack)
                throw ContractError("RateProfile: Lambda^[" + std::to_string(d) + "](" +
                                    std::to_string(grid_[i]) + ") = " + std::to_string(v) +
                                    " is negative (grid index " + std::to_string(i) + ")");
            cum[i] = cum[i - 1] + 0.5 * (std::max(prev_v, 0.0) + std::max(v, 0.0)) *
                                      (grid_[i] - grid_[i - 1]);
            prev_v = v;
        }
        if (d > 1) {
            for (std::size_t i = 0; i < grid_.size(); ++i)
                if (cum[i] < prev_cum[i] - 1e-6 * (1.0 + prev_cum[i]))
                    throw ContractError(
                        "RateProfile: cumulative Lambda^[" + std::to_string(d) +
                        "] smaller than cumulative Lambda^[" + std::to_string(d - 1) +
                        "] at grid index " + std::to_string(i) +
                        " (minima over larger sets cannot fail slower)");
        }
        prev_cum = std::move(cum);
    }
}

double RateProfile::rate(int d, double t) const {
    if (d < 1 || d > r_)
        throw DomainError("RateProfile::rate: d=" + std::to_string(d) + " outside [1, " +
                          std::to_string(r_) + "]");
    if (t < 0.0) throw DomainError("RateProfile::rate: t must be >= 0");
    const double v = lambdas_[static_cast<std::size_t>(d - 1)](t);
    if (v < -kRateSlack)
        throw ContractError("RateProfile::rate: Lambda^[" + std::to_string(d) + "](" +
                            std::to_string(t) + ") = " + std::to_string(v) + " is negative");
    return std::max(v, 0.0);
}

double RateProfile::mu(int d, double t) const { return rate(d, t) / d; }

} // namespace lifeline
