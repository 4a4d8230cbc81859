#include "lifeline/archimedean.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "lifeline/errors.hpp"
#include "lifeline/tabulated.hpp"

namespace lifeline {

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

GeneratorSpec::GeneratorSpec(RealFn psi, RealFn psi_inv, RealFn psi_prime, GeneratorTraits traits)
    : psi_(std::move(psi)),
      psi_inv_(std::move(psi_inv)),
      psi_prime_(std::move(psi_prime)),
      strict_(traits.strict),
      involutive_(traits.involutive),
      zero_cap_(kInf) {
    if (!psi_ || !psi_inv_) throw DomainError("GeneratorSpec: psi and psi_inv are required");

    const int n = 64;
    std::vector<double> u(n), v(n);
    for (int i = 0; i < n; ++i) {
        u[i] = static_cast<double>(i + 1) / n;
        v[i] = psi_(u[i]);
        if (!std::isfinite(v[i]) || v[i] < -1e-12)
            throw ContractError("GeneratorSpec: psi(" + fmt(u[i]) + ") = " + fmt(v[i]) +
                                " is not a finite nonnegative value");
    }
    if (std::abs(v[n - 1]) > 1e-9)
        throw ContractError("GeneratorSpec: psi(1) = " + fmt(v[n - 1]) + ", expected 0");
    for (int i = 0; i + 1 < n; ++i) {
        if (v[i + 1] > v[i] + 1e-9 * (1.0 + std::abs(v[i])))
            throw ContractError("GeneratorSpec: psi is not decreasing near u = " + fmt(u[i]));
    }
    if (traits.check_convexity) {
        for (int i = 1; i + 1 < n; ++i) {
            const double second = v[i - 1] - 2.0 * v[i] + v[i + 1];
            if (second < -1e-6 * std::max(1.0, std::abs(v[i - 1])))
                throw ContractError("GeneratorSpec: psi is not convex near u = " + fmt(u[i]));
        }
    } else {
        notes_.push_back("convexity spot-check waived (pseudo-generator: psi is not convex but "
                         "its composite diagonals are valid sections)");
    }

    const double inv_at_zero = psi_inv_(0.0);
    if (std::abs(inv_at_zero - 1.0) > 1e-9)
        throw ContractError("GeneratorSpec: psi_inv(0) = " + fmt(inv_at_zero) + ", expected 1");

    if (strict_) {
        // Divergence probe.  The multiple-of-psi(1/4) threshold admits
        // grid-clamped tabulated generators while rejecting bounded ones
        // (convexity caps a bounded generator's ratio psi(0)/psi(1/4) well
        // below it in the cases that matter).
        const double probe = psi_(1e-8);
        const double ref = psi_(0.25);
        if (!(probe >= 2.5 * ref) || !(probe > 0.0))
            throw ContractError("GeneratorSpec: declared strict but psi(1e-8) = " + fmt(probe) +
                                " does not dwarf psi(1/4) = " + fmt(ref));
    } else {
        zero_cap_ = psi_(0.0);
        if (!std::isfinite(zero_cap_) || zero_cap_ <= 0.0)
            throw ContractError("GeneratorSpec: non-strict generator needs a finite cap psi(0) "
                                "> 0, got " +
                                fmt(zero_cap_));
    }

    if (involutive_) {
        for (int i = 0; i < n; ++i) {
            const double back = psi_inv_(v[i]);
            if (std::abs(back - u[i]) > 1e-9)
                throw ContractError("GeneratorSpec: psi_inv(psi(" + fmt(u[i]) + ")) = " +
                                    fmt(back) + " deviates by more than 1e-9");
        }
    } else {
        notes_.push_back("pseudo-inverse pair (psi_inv is not the functional inverse of psi); "
                         "delta_1 is pinned to the identity");
    }

    if (psi_prime_) {
        for (double p : {0.2, 0.4, 0.6, 0.8}) {
            const double ana = psi_prime_(p);
            if (ana > 1e-12)
                throw ContractError("GeneratorSpec: psi'(" + fmt(p) + ") = " + fmt(ana) +
                                    " is positive; psi must decrease");
            const double num = derivative_fd(psi_, p);
            if (std::abs(ana - num) > 1e-3 * std::max(1.0, std::abs(num)))
                throw ContractError("GeneratorSpec: psi'(" + fmt(p) + ") = " + fmt(ana) +
                                    " disagrees with finite differences (" + fmt(num) + ")");
        }
    }
}

double GeneratorSpec::psi(double u) const {
    const double lo = strict_ ? 0.0 : -1e-12;
    if (!(u > lo) || u > 1.0 + 1e-12)
        throw DomainError("GeneratorSpec::psi: u = " + fmt(u) + " outside " +
                          (strict_ ? std::string("(0, 1]") : std::string("[0, 1]")));
    return psi_(std::min(u, 1.0));
}

double GeneratorSpec::psi_inv(double x) const {
    if (!(x >= -1e-12)) throw DomainError("GeneratorSpec::psi_inv: x = " + fmt(x) + " negative");
    return psi_inv_(std::max(x, 0.0));
}

double GeneratorSpec::psi_prime(double u) const {
    if (!psi_prime_) throw ContractError("GeneratorSpec::psi_prime: no derivative supplied");
    if (!(u > 0.0) || u > 1.0 + 1e-12)
        throw DomainError("GeneratorSpec::psi_prime: u = " + fmt(u) + " outside (0, 1]");
    return psi_prime_(std::min(u, 1.0));
}

GeneratorSpec log_generator() {
    return GeneratorSpec([](double u) { return -std::log(u); },
                         [](double x) { return std::exp(-x); },
                         [](double u) { return -1.0 / u; });
}

GeneratorSpec clayton_generator(double theta) {
    if (!(theta > 0.0))
        throw DomainError("clayton_generator: theta = " + fmt(theta) + " must be positive");
    return GeneratorSpec([theta](double u) { return std::pow(u, -theta) - 1.0; },
                         [theta](double x) { return std::pow(1.0 + x, -1.0 / theta); },
                         [theta](double u) { return -theta * std::pow(u, -theta - 1.0); });
}

GeneratorSpec power_ratio_generator(const PowerRatioParams& p) {
    if (!(p.alpha > 0.0))
        throw DomainError("power_ratio_generator: alpha = " + fmt(p.alpha) + " must be positive");
    if (!(p.beta >= 1.0))
        throw DomainError("power_ratio_generator: beta = " + fmt(p.beta) + " must be >= 1");
    const double a = p.alpha, b = p.beta;
    auto psi = [a, b](double u) { return std::pow(std::pow(u, -a) - 1.0, 1.0 / b); };
    auto psi_inv = [a, b](double x) { return std::pow(std::pow(x, b) + 1.0, -a); };
    auto psi_prime = [a, b](double u) {
        const double core = std::pow(u, -a) - 1.0;
        if (core <= 0.0) {
            // At u = 1 the derivative is -(a/b) * core^{1/b - 1} * u^{-a-1}
            // with core = 0: zero for b < 1 is impossible here (b >= 1);
            // for b > 1 the factor diverges, for b = 1 it is -a.
            return b == 1.0 ? -a : -kInf;
        }
        return -(a / b) * std::pow(core, 1.0 / b - 1.0) * std::pow(u, -a - 1.0);
    };
    // The printed pair is mutually inverse only for alpha = 1 and convex
    // only for beta = 1; the corresponding checks are waived elsewhere.
    return GeneratorSpec(psi, psi_inv, psi_prime,
                         GeneratorTraits{/*strict=*/true, /*involutive=*/a == 1.0,
                                         /*check_convexity=*/b == 1.0});
}

double arch_diagonal(const GeneratorSpec& gen, int ell, double u) {
    if (ell < 1 || ell > kMaxR)
        throw DomainError("arch_diagonal: ell = " + std::to_string(ell) + " outside [1, " +
                          std::to_string(kMaxR) + "]");
    if (!(u >= -1e-12) || u > 1.0 + 1e-12)
        throw DomainError("arch_diagonal: u = " + fmt(u) + " outside [0, 1]");
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    if (ell == 1) return u;
    const double x = ell * gen.psi(u);
    if (!gen.strict() && x >= gen.zero_cap()) return 0.0;
    return clamp_probability(gen.psi_inv(x), "arch_diagonal");
}

DiagonalFamily arch_diagonal_family(const GeneratorSpec& gen, int r) {
    check_dimension(r);
    std::vector<RealFn> deltas;
    deltas.reserve(static_cast<std::size_t>(r - 1));
    for (int ell = 2; ell <= r; ++ell)
        deltas.push_back([gen, ell](double u) { return arch_diagonal(gen, ell, u); });
    DiagonalFamily fam(r, std::move(deltas));
    if (!gen.strict())
        fam.add_note("non-strict generator: diagonal values at or beyond the cap psi(0) are "
                     "clamped to 0");
    for (const auto& n : gen.notes()) fam.add_note(n);
    return fam;
}

double arch_mu(const GeneratorSpec& gen, const MarginalSurvival& marg, int ell, double t) {
    if (ell < 1 || ell > kMaxR)
        throw DomainError("arch_mu: ell = " + std::to_string(ell) + " outside [1, " +
                          std::to_string(kMaxR) + "]");
    if (!(t >= 0.0)) throw DomainError("arch_mu: t = " + fmt(t) + " negative");
    if (!gen.strict())
        throw ContractError("arch_mu: requires a strict generator (non-strict generators are "
                            "supported only for diagonal sections)");
    if (!gen.has_prime()) throw ContractError("arch_mu: generator derivative psi' is required");
    if (!marg.has_density()) throw ContractError("arch_mu: marginal density is required");

    const double u = marg(t);
    const double delta = arch_diagonal(gen, ell, u);
    if (!(delta > 0.0))
        throw ContractError("arch_mu: delta_" + std::to_string(ell) + "(Gbar(" + fmt(t) +
                            ")) = 0; outside the support");

    // Defining route: the chain-rule log-derivative of the min-survival.
    auto log_delta = [&](double s) {
        const double d = arch_diagonal(gen, ell, marg(s));
        if (!(d > 0.0))
            throw ContractError("arch_mu: delta_ell(Gbar(s)) vanished inside the difference "
                                "stencil at s = " + fmt(s));
        return std::log(d);
    };
    const double mu_def = -derivative_fd(log_delta, t) / ell;

    // Independent cross-check route.
    const double g = marg.density(t);
    double mu_ratio;
    if (ell == 1) {
        mu_ratio = g / u;
    } else if (gen.involutive()) {
        const double dpsi_u = gen.psi_prime(u);
        const double dpsi_d = gen.psi_prime(delta);
        if (dpsi_d == 0.0 || !std::isfinite(dpsi_d) || dpsi_u == 0.0 || !std::isfinite(dpsi_u))
            throw ContractError("arch_mu: psi' vanishes or diverges at the evaluation point "
                                "(t = " + fmt(t) + "); the rate is singular there");
        mu_ratio = dpsi_u * g / (dpsi_d * delta);
    } else {
        // Pseudo-inverse pair: differentiate psi_inv numerically instead of
        // inverting the chain rule through a psi' that does not match it.
        const double x = ell * gen.psi(u);
        const double dpsi_u = gen.psi_prime(u);
        if (!std::isfinite(dpsi_u))
            throw ContractError("arch_mu: psi' diverges at Gbar(t) (t = " + fmt(t) + ")");
        const double dinv = derivative_fd([&gen](double s) { return gen.psi_inv(s); }, x);
        mu_ratio = dinv * dpsi_u * g / delta;
    }

    if (std::abs(mu_def - mu_ratio) > 1e-6 * std::max({1.0, std::abs(mu_def), std::abs(mu_ratio)}))
        throw ContractError("arch_mu: log-derivative and psi'-ratio routes disagree at t = " +
                            fmt(t) + " (" + fmt(mu_def) + " vs " + fmt(mu_ratio) + ")");
    return mu_def;
}

namespace {

void check_schur_args(int ell, double t) {
    if (ell < 1 || ell > kMaxR)
        throw DomainError("schur: ell = " + std::to_string(ell) + " outside [1, " +
                          std::to_string(kMaxR) + "]");
    if (!(t >= 0.0)) throw DomainError("schur: t = " + fmt(t) + " negative");
}

} // namespace

double schur_min_survival(const MarginalSurvival& marg, int ell, double t) {
    check_schur_args(ell, t);
    return marg(ell * t);
}

double schur_mu(const MarginalSurvival& marg, int ell, double t) {
    check_schur_args(ell, t);
    const double surv = marg(ell * t);
    if (!(surv > 0.0))
        throw ContractError("schur_mu: Gbar(" + fmt(ell * t) + ") = 0; t is outside the support "
                            "of the minimum over " + std::to_string(ell) + " components");
    return marg.density(ell * t) / surv;
}

double schur_diagonal(const MarginalSurvival& marg, int ell, double u) {
    if (ell < 1 || ell > kMaxR)
        throw DomainError("schur_diagonal: ell = " + std::to_string(ell) + " outside [1, " +
                          std::to_string(kMaxR) + "]");
    if (!(u >= -1e-12) || u > 1.0 + 1e-12)
        throw DomainError("schur_diagonal: u = " + fmt(u) + " outside [0, 1]");
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    if (ell == 1) return u;
    return clamp_probability(marg(ell * marg.invert(u)), "schur_diagonal");
}

DiagonalFamily schur_diagonal_family(const MarginalSurvival& marg, int r) {
    check_dimension(r);
    // Copies of MarginalSurvival share the inversion memo, so the closures
    // stay cheap even when a family constructor probes them densely.
    auto shared = std::make_shared<MarginalSurvival>(marg);
    std::vector<RealFn> deltas;
    deltas.reserve(static_cast<std::size_t>(r - 1));
    for (int ell = 2; ell <= r; ++ell)
        deltas.push_back([shared, ell](double u) { return schur_diagonal(*shared, ell, u); });
    return DiagonalFamily(r, std::move(deltas));
}

RecoveredGenerator recover_generator(const RealFn& delta_r, int r, int m_max) {
    check_dimension(r);
    if (m_max < 1) throw DomainError("recover_generator: m_max must be >= 1");
    if (!delta_r) throw DomainError("recover_generator: delta_r is required");

    const int n = 4096;
    const std::vector<double> u = make_uniform_grid(1.0 / n, 1.0, n);
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        v[i] = delta_r(u[i]);
        if (!std::isfinite(v[i]) || v[i] < -1e-12 || v[i] > 1.0 + 1e-9)
            throw ContractError("recover_generator: delta_r(" + fmt(u[i]) + ") = " + fmt(v[i]) +
                                " is not a probability");
        if (v[i] > u[i] + 1e-9)
            throw ContractError("recover_generator: delta_r(" + fmt(u[i]) + ") = " + fmt(v[i]) +
                                " exceeds u; not a copula diagonal");
        if (i > 0 && !(v[i] > v[i - 1]))
            throw ContractError("recover_generator: delta_r is not strictly increasing at u = " +
                                fmt(u[i]));
    }
    if (std::abs(v.back() - 1.0) > 1e-8)
        throw ContractError("recover_generator: delta_r(1) = " + fmt(v.back()) + ", expected 1");
    v.back() = 1.0;

    // Boundary slope normalization: the recovered generator is the unique
    // one (up to scale) with delta_r'(1-) = r.
    const double h = 1e-4;
    const double slope = (1.0 - delta_r(1.0 - h)) / h;
    if (std::abs(slope - r) > 0.05 * r)
        throw ContractError("recover_generator: boundary slope delta_r'(1-) = " + fmt(slope) +
                            " deviates from r = " + std::to_string(r) +
                            " by more than 5%; the slope-r normalization does not apply");

    // Each iteration applies delta_r^{-1} pointwise to the running iterate,
    // by machine-width bisection of the caller's closure on [y, 1] (valid
    // since delta_r(y) <= y <= 1 = delta_r(1)).  Inverting the closure
    // itself, rather than an interpolated inverse table, matters: errors
    // introduced near the fixed point u = 1 at step j are amplified by
    // r^j in the final profile, so interpolation-level noise would not
    // survive the later iterations.
    auto dr = [&delta_r](double x) { return x >= 1.0 ? 1.0 : delta_r(x); };
    auto inv = [&dr](double w) {
        return std::min(1.0, bisect_monotone(dr, w, w, 1.0, /*increasing=*/true));
    };

    std::vector<double> y = u;                 // delta_r^{o -m} on the grid
    std::vector<double> profile(u.size()), prev;
    const std::size_t half = u.size() / 2 - 1; // u = 0.5 exactly
    std::size_t lo_cmp = 0;                    // first index with u >= 0.01
    while (lo_cmp < u.size() && u[lo_cmp] < 0.01) ++lo_cmp;

    int iterations = 0;
    bool converged = false;
    std::vector<std::string> notes;
    double scale = 1.0;
    double last_change = kInf;
    for (int m = 1; m <= m_max; ++m) {
        scale *= r;
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = inv(y[i]);
        const double p_half = scale * (1.0 - y[half]);
        if (!(p_half > 0.0))
            throw ContractError("recover_generator: iterate degenerated at m = " +
                                std::to_string(m) + " (psi_m(1/2) = 0)");
        for (std::size_t i = 0; i < y.size(); ++i)
            profile[i] = scale * (1.0 - y[i]) / p_half;
        iterations = m;
        if (!prev.empty()) {
            double change = 0.0;
            for (std::size_t i = lo_cmp; i < profile.size(); ++i)
                change = std::max(change, std::abs(profile[i] - prev[i]));
            last_change = change;
            if (change < 1e-4) {
                converged = true;
                break;
            }
        }
        prev = profile;
    }
    if (!converged)
        notes.push_back("did not converge within m_max = " + std::to_string(m_max) +
                        " iterations (last sup-norm change " + fmt(last_change) +
                        "); returning the best iterate");

    profile.back() = 0.0; // psi(1) = 0 exactly (y.back() saturates at 1)
    auto tab = std::make_shared<TabulatedFunction>(u, profile, DomainKind::UnitInterval,
                                                   Monotonicity::Decreasing);
    const double cap = tab->values().front();
    auto psi = [tab](double w) { return (*tab)(w); };
    auto psi_inv = [tab, cap](double x) {
        if (x <= 0.0) return 1.0;
        if (x >= cap) return tab->front_x();
        return tab->invert(x);
    };
    auto psi_prime = [tab](double w) { return tab->derivative(w); };
    RecoveredGenerator out{GeneratorSpec(psi, psi_inv, psi_prime), iterations, converged,
                           std::move(notes)};
    out.gen.add_note("recovered from the top diagonal on a 4096-point grid; normalized to "
                     "psi(1/2) = 1");
    for (const auto& nte : out.notes) out.gen.add_note(nte);
    return out;
}

} // namespace lifeline
