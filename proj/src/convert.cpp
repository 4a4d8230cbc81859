#include "lifeline/convert.hpp"

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "lifeline/combinatorics.hpp"

namespace lifeline {

namespace {

// Signed coefficient of delta_h in the expansion of Gbar_{l:r}:
//   Gbar_{l:r}(t) = sum_{h=r-l+1}^{r} (-1)^{h-r-1+l} C(r,h) C(h-1,r-l) delta_h(Gbar(t)).
double orderstat_coef(int r, int ell, int h) {
    const int parity = h - r - 1 + ell;  // >= 0 for h >= r - ell + 1
    const double sign = (parity % 2 == 0) ? 1.0 : -1.0;
    return sign * static_cast<double>(binomial(r, h)) *
           static_cast<double>(binomial(h - 1, r - ell));
}

// Order-statistic survival with the boundary conventions Gbar_{0:r} = 0 and
// Gbar_{r+1:r} = 1 used by the survivor-count expansions.
double os_survival_ext(const OrderStatFamily& os, int k, double t) {
    if (k <= 0) return 0.0;
    if (k > os.r()) return 1.0;
    return os.survival(k, t);
}

double os_density_ext(const OrderStatFamily& os, int k, double t) {
    if (k <= 0 || k > os.r()) return 0.0;
    return os.density(k, t);
}

// Working horizon for a derived time family: the natural tail time of the
// slowest member when it is reachable, otherwise the supplied fallback.
double derived_horizon(const RealFn& slowest, double fallback, std::string* note) {
    try {
        return find_tail_time(slowest, 1e-3, 1e9);
    } catch (const std::exception&) {
        if (note)
            *note = "working horizon clamped to " + std::to_string(fallback) +
                    ": the slowest survival curve does not reach 1e-3 along the input grid";
        return fallback;
    }
}

} // namespace

OrderStatFamily orderstat_from_diagonals(const DiagonalFamily& diag,
                                         const MarginalSurvival& marg) {
    const int r = diag.r();
    auto diag_p = std::make_shared<DiagonalFamily>(diag);
    auto marg_p = std::make_shared<MarginalSurvival>(marg);
    std::vector<RealFn> gbar;
    gbar.reserve(static_cast<std::size_t>(r));
    for (int ell = 1; ell <= r; ++ell) {
        std::vector<double> coef(static_cast<std::size_t>(r) + 1, 0.0);
        for (int h = r - ell + 1; h <= r; ++h)
            coef[static_cast<std::size_t>(h)] = orderstat_coef(r, ell, h);
        gbar.push_back([diag_p, marg_p, coef, r](double t) {
            const double u = (*marg_p)(t);
            double s = 0.0;
            for (int h = 1; h <= r; ++h)
                if (coef[static_cast<std::size_t>(h)] != 0.0)
                    s += coef[static_cast<std::size_t>(h)] * (*diag_p)(h, u);
            return s;
        });
    }
    std::string note;
    const double t_end = derived_horizon(gbar.back(), marg.tstar(), &note);
    try {
        OrderStatFamily out(r, std::move(gbar), {}, t_end);
        if (!note.empty()) out.add_note(note);
        return out;
    } catch (const ContractError& e) {
        throw ContractError(
            "orderstat_from_diagonals: input diagonals are not jointly realizable: " +
            std::string(e.what()));
    }
}

MarginalSurvival marginal_from_orderstats(const OrderStatFamily& os) {
    const int r = os.r();
    auto os_p = std::make_shared<OrderStatFamily>(os);
    RealFn gbar = [os_p, r](double t) {
        double s = 0.0;
        for (int k = 1; k <= r; ++k) s += os_p->survival(k, t);
        return s / r;
    };
    RealFn dens;
    if (os.has_densities())
        dens = [os_p, r](double t) {
            double s = 0.0;
            for (int k = 1; k <= r; ++k) s += os_p->density(k, t);
            return s / r;
        };
    try {
        return MarginalSurvival(std::move(gbar), std::move(dens), os.tstar());
    } catch (const ContractError& e) {
        throw ContractError("marginal_from_orderstats: inconsistent input family: " +
                            std::string(e.what()));
    }
}

double min_survival_from_orderstats(const OrderStatFamily& os, int d, double t) {
    const int r = os.r();
    if (d < 1 || d > r)
        throw DomainError("min_survival_from_orderstats: d=" + std::to_string(d) +
                          " outside [1, " + std::to_string(r) + "]");
    const double rd = falling_factorial(r, d);
    double form_k = 0.0;
    for (int k = 1; k <= r - d + 1; ++k)
        form_k += falling_factorial(r - k, d - 1) * os.survival(k, t);
    form_k *= static_cast<double>(d) / rd;
    double form_h = 0.0;  // h counts survivors; Gbar_{0:r} = 0 by convention
    for (int h = d; h <= r; ++h)
        form_h += falling_factorial(h, d) / rd *
                  (os_survival_ext(os, r - h + 1, t) - os_survival_ext(os, r - h, t));
    if (!close_abs_or_rel(form_k, form_h, 1e-10))
        throw ContractError("min_survival_from_orderstats: the two summation forms disagree at t=" +
                            std::to_string(t) + " (" + std::to_string(form_k) + " vs " +
                            std::to_string(form_h) + "); input family is not coherent");
    return clamp_probability(form_k, "min_survival_from_orderstats");
}

double min_survival_from_diagonals(const DiagonalFamily& diag, const MarginalSurvival& marg,
                                   int d, double t) {
    if (d < 1 || d > diag.r())
        throw DomainError("min_survival_from_diagonals: d=" + std::to_string(d) +
                          " outside [1, " + std::to_string(diag.r()) + "]");
    if (!(t >= 0.0))
        throw DomainError("min_survival_from_diagonals: t=" + std::to_string(t) + " negative");
    const double u = marg(t);
    return d == 1 ? u : diag(d, u);
}

std::pair<DiagonalFamily, MarginalSurvival> diagonals_from_orderstats(const OrderStatFamily& os) {
    const int r = os.r();
    auto os_p = std::make_shared<OrderStatFamily>(os);
    auto marg = std::make_shared<MarginalSurvival>(marginal_from_orderstats(os));
    std::vector<RealFn> deltas;
    deltas.reserve(static_cast<std::size_t>(r - 1));
    for (int d = 2; d <= r; ++d)
        deltas.push_back([os_p, marg, d](double u) {
            if (u <= 0.0) return 0.0;
            if (u >= 1.0) return 1.0;
            return min_survival_from_orderstats(*os_p, d, marg->invert(u));
        });
    return {DiagonalFamily(r, std::move(deltas)), *marg};
}

double survivor_count_pmf(const OrderStatFamily& os, int h, double t) {
    const int r = os.r();
    if (h < 0 || h > r)
        throw DomainError("survivor_count_pmf: h=" + std::to_string(h) + " outside [0, " +
                          std::to_string(r) + "]");
    const double v = os_survival_ext(os, r - h + 1, t) - os_survival_ext(os, r - h, t);
    return clamp_probability(v, "survivor_count_pmf");
}

double survivor_set_pmf(const OrderStatFamily& os, int h, double t) {
    return survivor_count_pmf(os, h, t) / static_cast<double>(binomial(os.r(), h));
}

RateProfile profile_from_diagonals(const DiagonalFamily& diag, const MarginalSurvival& marg) {
    const int r = diag.r();
    auto diag_p = std::make_shared<DiagonalFamily>(diag);
    auto marg_p = std::make_shared<MarginalSurvival>(marg);
    std::vector<RealFn> lambdas;
    lambdas.reserve(static_cast<std::size_t>(r));
    for (int ell = 1; ell <= r; ++ell) {
        if (ell == 1 && marg.has_density()) {
            lambdas.push_back(
                [marg_p](double t) { return marg_p->density(t) / (*marg_p)(t); });
            continue;
        }
        RealFn log_comp = [diag_p, marg_p, ell](double s) {
            const double v = (*diag_p)(ell, (*marg_p)(s));
            if (!(v > 0.0))
                throw ContractError("profile_from_diagonals: delta_" + std::to_string(ell) +
                                    "(Gbar(" + std::to_string(s) +
                                    ")) = 0; the rate is undefined outside the support");
            return std::log(v);
        };
        lambdas.push_back([log_comp](double t) { return -derivative_fd(log_comp, t); });
    }
    return RateProfile(r, std::move(lambdas), marg.grid(), /*exchangeable_form=*/true);
}

std::pair<DiagonalFamily, MarginalSurvival> diagonals_from_profile(const RateProfile& profile) {
    const int r = profile.r();
    auto prof = std::make_shared<RateProfile>(profile);
    std::vector<std::shared_ptr<IntegralCache>> cum;
    cum.reserve(static_cast<std::size_t>(r));
    for (int d = 1; d <= r; ++d)
        cum.push_back(std::make_shared<IntegralCache>(
            [prof, d](double s) { return prof->rate(d, s); }, 0.0, 1e-10));

    RealFn gbar = [c = cum.front()](double t) { return std::exp(-(*c)(t)); };
    RealFn dens = [prof, c = cum.front()](double t) {
        return prof->rate(1, t) * std::exp(-(*c)(t));
    };
    std::string note;
    const double t_end = derived_horizon(gbar, profile.grid().back(), &note);
    auto marg = std::make_shared<MarginalSurvival>(gbar, std::move(dens), t_end);
    if (!note.empty()) marg->add_note(note);

    std::vector<RealFn> deltas;
    deltas.reserve(static_cast<std::size_t>(r - 1));
    for (int d = 2; d <= r; ++d) {
        auto c = cum[static_cast<std::size_t>(d - 1)];
        deltas.push_back([c, marg](double u) {
            if (u <= 0.0) return 0.0;
            if (u >= 1.0) return 1.0;
            const double v = (*c)(marg->invert(u));
            if (std::isnan(v))
                throw ContractError("diagonals_from_profile: cumulative rate is NaN");
            return std::exp(-v);
        });
    }
    DiagonalFamily diag(r, std::move(deltas));
    // Flag exp-underflow truncation in the deep tail so downstream consumers
    // know the zeros are numerical, not structural.
    for (int d = 2; d <= r; ++d) {
        const double v_end = (*cum[static_cast<std::size_t>(d - 1)])(marg->tstar());
        if (!(v_end < 700.0)) {
            diag.add_note("delta_" + std::to_string(d) +
                          ": cumulative rate exceeds the exp underflow threshold before the "
                          "grid end; deep-tail values truncate to zero");
        }
    }
    return {std::move(diag), *marg};
}

OrderStatFamily orderstats_from_profile(const RateProfile& profile) {
    const int r = profile.r();
    auto prof = std::make_shared<RateProfile>(profile);
    std::vector<std::shared_ptr<IntegralCache>> cum;
    cum.reserve(static_cast<std::size_t>(r));
    for (int h = 1; h <= r; ++h)
        cum.push_back(std::make_shared<IntegralCache>(
            [prof, h](double s) { return prof->rate(h, s); }, 0.0, 1e-10));

    std::vector<RealFn> gbar, dens;
    for (int ell = 1; ell <= r; ++ell) {
        std::vector<double> coef(static_cast<std::size_t>(r) + 1, 0.0);
        for (int h = r - ell + 1; h <= r; ++h)
            coef[static_cast<std::size_t>(h)] = orderstat_coef(r, ell, h);
        gbar.push_back([cum, coef, r](double t) {
            double s = 0.0;
            for (int h = 1; h <= r; ++h) {
                const double c = coef[static_cast<std::size_t>(h)];
                if (c != 0.0) s += c * std::exp(-(*cum[static_cast<std::size_t>(h - 1)])(t));
            }
            return s;
        });
        dens.push_back([cum, coef, prof, r](double t) {
            double s = 0.0;
            for (int h = 1; h <= r; ++h) {
                const double c = coef[static_cast<std::size_t>(h)];
                if (c != 0.0)
                    s += c * prof->rate(h, t) *
                         std::exp(-(*cum[static_cast<std::size_t>(h - 1)])(t));
            }
            return s;
        });
    }
    std::string note;
    const double t_end = derived_horizon(gbar.back(), profile.grid().back(), &note);
    try {
        OrderStatFamily out(r, std::move(gbar), std::move(dens), t_end);
        if (!note.empty()) out.add_note(note);
        return out;
    } catch (const ContractError& e) {
        throw ContractError("orderstats_from_profile: profile yields a non-realizable family: " +
                            std::string(e.what()));
    }
}

RateProfile profile_from_orderstats(const OrderStatFamily& os) {
    const int r = os.r();
    auto os_p = std::make_shared<OrderStatFamily>(os);
    std::vector<RealFn> lambdas;
    lambdas.reserve(static_cast<std::size_t>(r));
    for (int ell = 1; ell <= r; ++ell) {
        lambdas.push_back([os_p, ell, r](double t) {
            double num_k = 0.0, den_k = 0.0;
            for (int k = 1; k <= r - ell + 1; ++k) {
                const double w = falling_factorial(r - k, ell - 1);
                num_k += w * os_p->density(k, t);
                den_k += w * os_p->survival(k, t);
            }
            if (!(den_k > 0.0))
                throw ContractError("profile_from_orderstats: surviving mass vanishes at t=" +
                                    std::to_string(t) +
                                    "; the rate is undefined beyond the working horizon");
            double num_h = 0.0, den_h = 0.0;
            for (int h = ell; h <= r; ++h) {
                const double w = falling_factorial(h, ell);
                num_h += w * (os_density_ext(*os_p, r - h + 1, t) -
                              os_density_ext(*os_p, r - h, t));
                den_h += w * (os_survival_ext(*os_p, r - h + 1, t) -
                              os_survival_ext(*os_p, r - h, t));
            }
            const double v_k = num_k / den_k;
            const double v_h = num_h / den_h;
            if (!close_abs_or_rel(v_k, v_h, 1e-8))
                throw ContractError(
                    "profile_from_orderstats: k-indexed and h-indexed rate forms disagree at t=" +
                    std::to_string(t) + " (" + std::to_string(v_k) + " vs " +
                    std::to_string(v_h) + ")");
            return v_k;
        });
    }
    return RateProfile(r, std::move(lambdas), os.grid(), /*exchangeable_form=*/true);
}

} // namespace lifeline
