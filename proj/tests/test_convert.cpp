#include <cmath>
#include <vector>

#include "doctest.h"
#include "lifeline/convert.hpp"
#include "lifeline/loadsharing.hpp"
#include "lifeline/rng.hpp"

using namespace lifeline;

namespace {

// Independent exponentials: delta_h(u) = u^h, Gbar = e^{-t}.
DiagonalFamily iid_diagonals(int r) {
    std::vector<RealFn> d;
    for (int h = 2; h <= r; ++h)
        d.push_back([h](double u) { return std::pow(u, h); });
    return DiagonalFamily(r, std::move(d));
}

MarginalSurvival exp_marginal() {
    return MarginalSurvival([](double t) { return std::exp(-t); },
                            [](double t) { return std::exp(-t); });
}

// Closed forms of the three-unit load-sharing example with stage totals
// (1, 1, 2): the k-th order statistic survivals and densities.
double ex54_gbar(int k, double t) {
    if (k == 1) return std::exp(-t);
    if (k == 2) return (1.0 + t) * std::exp(-t);
    return 2.0 * t * std::exp(-t) + std::exp(-2.0 * t);
}

double ex54_density(int k, double t) {
    if (k == 1) return std::exp(-t);
    if (k == 2) return t * std::exp(-t);
    return 2.0 * t * std::exp(-t) - 2.0 * std::exp(-t) + 2.0 * std::exp(-2.0 * t);
}

OrderStatFamily ex54_family(bool with_densities) {
    std::vector<RealFn> g, d;
    for (int k = 1; k <= 3; ++k) {
        g.push_back([k](double t) { return ex54_gbar(k, t); });
        if (with_densities) d.push_back([k](double t) { return ex54_density(k, t); });
    }
    return OrderStatFamily(3, std::move(g), std::move(d));
}

double ex54_marginal(double t) {
    return (2.0 / 3.0) * std::exp(-t) + t * std::exp(-t) + std::exp(-2.0 * t) / 3.0;
}

// Rate profile of the same model: Lambda^[1] is the marginal hazard,
// Lambda^[2](t) = 1 - 1/(3+t) (from the pair survival e^{-t}(1+t/3)),
// Lambda^[3] = 1.
RateProfile ex54_profile() {
    std::vector<RealFn> lam;
    lam.push_back([](double t) {
        const double g = t * std::exp(-t) - std::exp(-t) / 3.0 + (2.0 / 3.0) * std::exp(-2.0 * t);
        return g / ex54_marginal(t);
    });
    lam.push_back([](double t) { return 1.0 - 1.0 / (3.0 + t); });
    lam.push_back([](double) { return 1.0; });
    return RateProfile(3, std::move(lam), make_uniform_grid(0.0, 9.0, 301));
}

} // namespace

TEST_CASE("order statistics from diagonals") {
    SUBCASE("independent exponentials, r=2") {
        const auto os = orderstat_from_diagonals(iid_diagonals(2), exp_marginal());
        CHECK(os.survival(1, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
        CHECK(os.survival(2, std::log(2.0)) == doctest::Approx(0.75).epsilon(1e-12));
    }
    SUBCASE("independent exponentials, r=3 maximum") {
        const auto os = orderstat_from_diagonals(iid_diagonals(3), exp_marginal());
        CHECK(os.survival(3, std::log(2.0)) == doctest::Approx(0.875).epsilon(1e-12));
    }
    SUBCASE("load-sharing example diagonals reproduce the closed forms") {
        const ExThlsModel m({1.0, 1.0, 2.0});
        const auto os = orderstat_from_diagonals(m.diagonal_family(), m.marginal_family());
        for (double t : {0.25, 1.0, 2.5})
            for (int k = 1; k <= 3; ++k)
                CHECK(os.survival(k, t) == doctest::Approx(ex54_gbar(k, t)).epsilon(1e-9));
    }
    SUBCASE("non-realizable diagonals are rejected") {
        std::vector<RealFn> d;
        d.push_back([](double u) { return std::pow(u, 1.01); });
        d.push_back([](double u) { return u * u * u; });
        DiagonalFamily diag(3, std::move(d));
        CHECK_THROWS_WITH_AS(orderstat_from_diagonals(diag, exp_marginal()),
                             doctest::Contains("jointly realizable"), ContractError);
    }
}

TEST_CASE("marginal from order statistics") {
    SUBCASE("load-sharing example closed form") {
        const auto marg = marginal_from_orderstats(ex54_family(true));
        for (double t : {0.0, 0.4, 1.0, 3.0})
            CHECK(marg(t) == doctest::Approx(ex54_marginal(t)).epsilon(1e-12));
        CHECK(marg.has_density());
        CHECK(marg.density(1.0) ==
              doctest::Approx(std::exp(-1.0) * (1.0 - 1.0 / 3.0) + 2.0 / 3.0 * std::exp(-2.0))
                  .epsilon(1e-12));
    }
    SUBCASE("independence roundtrip recovers the marginal exactly") {
        const auto os = orderstat_from_diagonals(iid_diagonals(3), exp_marginal());
        const auto marg = marginal_from_orderstats(os);
        for (double t : {0.1, 0.9, 2.2})
            CHECK(marg(t) == doctest::Approx(std::exp(-t)).epsilon(1e-12));
        CHECK(marg(0.0) == doctest::Approx(1.0));
    }
}

TEST_CASE("minimum survival over subsets") {
    const auto os = ex54_family(true);
    SUBCASE("pair survival matches the closed form") {
        CHECK(min_survival_from_orderstats(os, 2, 1.0) ==
              doctest::Approx(std::exp(-1.0) * (1.0 + 1.0 / 3.0)).epsilon(1e-12));
        for (double t : {0.3, 1.7})
            CHECK(min_survival_from_orderstats(os, 2, t) ==
                  doctest::Approx(std::exp(-t) * (1.0 + t / 3.0)).epsilon(1e-12));
    }
    SUBCASE("d = r collapses to the minimum, d = 1 to the marginal") {
        for (double t : {0.5, 1.5}) {
            CHECK(min_survival_from_orderstats(os, 3, t) ==
                  doctest::Approx(ex54_gbar(1, t)).epsilon(1e-12));
            CHECK(min_survival_from_orderstats(os, 1, t) ==
                  doctest::Approx(ex54_marginal(t)).epsilon(1e-12));
        }
    }
    SUBCASE("d out of range") {
        CHECK_THROWS_AS(min_survival_from_orderstats(os, 0, 1.0), DomainError);
        CHECK_THROWS_AS(min_survival_from_orderstats(os, 4, 1.0), DomainError);
    }
}

TEST_CASE("survivor-count probabilities") {
    const auto os = ex54_family(true);
    SUBCASE("pmf sums to one") {
        for (double t : {0.3, 1.0, 2.7}) {
            double total = 0.0;
            for (int h = 0; h <= 3; ++h) total += survivor_count_pmf(os, h, t);
            CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("closed-form values") {
        CHECK(survivor_count_pmf(os, 2, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
        CHECK(survivor_count_pmf(os, 3, 0.0) == doctest::Approx(1.0));
        // P(exactly one named unit survives at t=1) = e^{-2}/3.
        CHECK(survivor_set_pmf(os, 1, 1.0) ==
              doctest::Approx(std::exp(-2.0) / 3.0).epsilon(1e-12));
    }
    SUBCASE("h out of range") {
        CHECK_THROWS_AS(survivor_count_pmf(os, -1, 1.0), DomainError);
        CHECK_THROWS_AS(survivor_count_pmf(os, 4, 1.0), DomainError);
    }
}

TEST_CASE("rate profile from diagonals") {
    SUBCASE("independent exponentials give constant rates") {
        const auto prof = profile_from_diagonals(iid_diagonals(3), exp_marginal());
        for (int ell = 1; ell <= 3; ++ell)
            for (double t : {0.0, 0.7, 2.0})
                CHECK(prof.rate(ell, t) == doctest::Approx(ell).epsilon(1e-8));
        CHECK(prof.exchangeable_form());
        CHECK(prof.mu(3, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
    }
    SUBCASE("additive-time dependence: rates read the common clock") {
        // Joint survival W(sum t_i) with W(t) = 1/(1+t): delta_l(u) reduces to
        // W(l W^{-1}(u)), so Lambda^[l](t) = l / (1 + l t).
        std::vector<RealFn> d;
        for (int h = 2; h <= 3; ++h)
            d.push_back([h](double u) { return u / (u + h * (1.0 - u)); });
        DiagonalFamily diag(3, std::move(d));
        MarginalSurvival marg([](double t) { return 1.0 / (1.0 + t); });
        const auto prof = profile_from_diagonals(diag, marg);
        for (int ell = 1; ell <= 3; ++ell)
            for (double t : {0.2, 1.0, 3.0})
                CHECK(prof.rate(ell, t) == doctest::Approx(ell / (1.0 + ell * t)).epsilon(1e-7));
    }
    SUBCASE("vanishing diagonal is a support error") {
        std::vector<RealFn> d;
        d.push_back([](double u) { return std::max(0.0, 2.0 * u - 1.0); });
        DiagonalFamily diag(2, std::move(d));
        CHECK_THROWS_WITH_AS(profile_from_diagonals(diag, exp_marginal()),
                             doctest::Contains("support"), ContractError);
    }
}

TEST_CASE("diagonals from rate profile") {
    SUBCASE("constant profile gives independence") {
        std::vector<RealFn> lam;
        for (int dd = 1; dd <= 3; ++dd) lam.push_back([dd](double) { return double(dd); });
        RateProfile prof(3, std::move(lam), make_uniform_grid(0.0, 7.0, 201));
        const auto [diag, marg] = diagonals_from_profile(prof);
        for (double t : {0.5, 1.0})
            CHECK(marg(t) == doctest::Approx(std::exp(-t)).epsilon(1e-9));
        for (int dd = 2; dd <= 3; ++dd)
            for (double u : {0.2, 0.5, 0.9})
                CHECK(diag(dd, u) == doctest::Approx(std::pow(u, dd)).epsilon(1e-9));
    }
    SUBCASE("load-sharing profile reproduces the minimum survival") {
        const auto [diag, marg] = diagonals_from_profile(ex54_profile());
        for (double t : {0.5, 1.0, 2.0}) {
            CHECK(marg(t) == doctest::Approx(ex54_marginal(t)).epsilon(1e-8));
            CHECK(diag(3, marg(t)) == doctest::Approx(std::exp(-t)).epsilon(1e-7));
            CHECK(diag(2, marg(t)) ==
                  doctest::Approx(std::exp(-t) * (1.0 + t / 3.0)).epsilon(1e-7));
        }
    }
    SUBCASE("roundtrip with profile_from_diagonals") {
        const auto [diag, marg] = diagonals_from_profile(ex54_profile());
        const auto back = profile_from_diagonals(diag, marg);
        const auto ref = ex54_profile();
        for (int ell = 1; ell <= 3; ++ell)
            for (double t : {0.3, 0.8, 1.6, 3.1})
                CHECK(back.rate(ell, t) == doctest::Approx(ref.rate(ell, t)).epsilon(1e-6));
    }
}

TEST_CASE("order statistics from rate profile") {
    SUBCASE("independent constant rates") {
        std::vector<RealFn> lam;
        for (int dd = 1; dd <= 2; ++dd) lam.push_back([dd](double) { return double(dd); });
        RateProfile prof(2, std::move(lam), make_uniform_grid(0.0, 7.0, 201));
        const auto os = orderstats_from_profile(prof);
        CHECK(os.survival(2, std::log(2.0)) == doctest::Approx(0.75).epsilon(1e-9));
        CHECK(os.survival(1, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-9));
    }
    SUBCASE("load-sharing profile reproduces the closed forms") {
        const auto os = orderstats_from_profile(ex54_profile());
        CHECK(os.has_densities());
        for (double t : {0.4, 1.0, 2.3})
            for (int k = 1; k <= 3; ++k) {
                CHECK(os.survival(k, t) == doctest::Approx(ex54_gbar(k, t)).epsilon(1e-8));
                CHECK(os.density(k, t) ==
                      doctest::Approx(ex54_density(k, t)).epsilon(1e-7).scale(1.0));
            }
    }
}

TEST_CASE("rate profile from order statistics") {
    SUBCASE("analytic densities reproduce the closed profile") {
        const auto prof = profile_from_orderstats(ex54_family(true));
        CHECK(prof.exchangeable_form());
        const auto ref = ex54_profile();
        for (int ell = 1; ell <= 3; ++ell)
            for (double t : {0.2, 1.0, 2.4})
                CHECK(prof.rate(ell, t) == doctest::Approx(ref.rate(ell, t)).epsilon(1e-10));
        CHECK(prof.rate(3, 1.7) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(prof.mu(2, 1.0) == doctest::Approx(ref.rate(2, 1.0) / 2.0).epsilon(1e-10));
    }
    SUBCASE("finite-difference fallback stays close") {
        const auto prof = profile_from_orderstats(ex54_family(false));
        const auto ref = ex54_profile();
        for (int ell = 1; ell <= 3; ++ell)
            for (double t : {0.2, 1.0, 2.4})
                CHECK(prof.rate(ell, t) == doctest::Approx(ref.rate(ell, t)).epsilon(1e-8));
    }
}

TEST_CASE("full conversion cycle closes on random exchangeable models") {
    for (std::uint64_t seed : {3ull, 23ull}) {
        Rng rng(seed);
        std::vector<double> L;
        for (int k = 0; k < 3; ++k) L.push_back(0.5 + 2.5 * rng.uniform01());
        const ExThlsModel m(L);

        const auto diag0 = m.diagonal_family();
        const auto marg0 = m.marginal_family();
        const auto os = orderstat_from_diagonals(diag0, marg0);
        const auto prof = profile_from_orderstats(os);
        const auto [diag1, marg1] = diagonals_from_profile(prof);

        double worst = 0.0;
        for (int i = 1; i < 20; ++i) {
            const double t = marg0.tstar() * i / 20.0;
            worst = std::max(worst, std::abs(marg1(t) - marg0(t)));
        }
        for (int d = 2; d <= 3; ++d)
            for (int i = 1; i < 20; ++i) {
                const double u = static_cast<double>(i) / 20.0;
                worst = std::max(worst, std::abs(diag1(d, u) - diag0(d, u)));
            }
        CHECK(worst <= 1e-6);
    }
}
