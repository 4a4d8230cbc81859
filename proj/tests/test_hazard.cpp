#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "lifeline/combinatorics.hpp"
#include "lifeline/hazard.hpp"

using namespace lifeline;

namespace {

OdThlsSpec cyclic3(double gamma) {
    OdThlsSpec::RateTable t;
    for (int j = 1; j <= 3; ++j) t[{}][j] = 1.0 / 3.0;
    t[{1}][3] = gamma;  t[{1}][2] = 1.0 - gamma;
    t[{2}][1] = gamma;  t[{2}][3] = 1.0 - gamma;
    t[{3}][2] = gamma;  t[{3}][1] = 1.0 - gamma;
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b)
            if (a != b) t[{a, b}][6 - a - b] = 2.0;
    return OdThlsSpec(3, std::move(t));
}

// Exchangeable, time-varying per-unit rates mu_k(t) = a_k (1 + t).
HazardModel linear_ramp_model(std::vector<double> a) {
    const int r = static_cast<int>(a.size());
    return hazard_exchangeable(
        r, [a](int k, double t) { return a[static_cast<std::size_t>(k)] * (1.0 + t); }, false);
}

} // namespace

TEST_CASE("total rate over histories") {
    const auto model = hazard_from_odthls(cyclic3(0.75));
    CHECK(total_rate(model, {}, 0.3) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(total_rate(model, {{1, 0.2}}, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(total_rate(model, {{1, 0.2}, {3, 0.4}}, 0.5) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(total_rate(model, {{1, 0.5}}, 0.2), DomainError);
    CHECK_THROWS_AS(total_rate(model, {{1, 0.2}, {1, 0.4}}, 0.5), DomainError);
    CHECK_THROWS_AS(total_rate(model, {{1, 0.4}, {3, 0.2}}, 0.5), DomainError);
    CHECK_THROWS_AS(model.rate(9, {}, 0.1), DomainError);
    CHECK_THROWS_AS(model.rate(1, {{1, 0.05}}, 0.1), DomainError);
}

TEST_CASE("joint density") {
    SUBCASE("independent unit exponentials") {
        OdThlsSpec::RateTable t;
        for (int j = 1; j <= 2; ++j) t[{}][j] = 1.0;
        t[{1}][2] = 1.0;
        t[{2}][1] = 1.0;
        const auto model = hazard_from_odthls(OdThlsSpec(2, t));
        CHECK(joint_density(model, {0.5, 1.5}) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
        CHECK(joint_density(model, {1.5, 0.5}) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    }
    SUBCASE("cyclic model closed form") {
        const auto model = hazard_from_odthls(cyclic3(0.75));
        // (1/3)e^{-0.2} * (1-gamma)e^{-0.3} * 2e^{-2*0.5}
        CHECK(joint_density(model, {0.2, 0.5, 1.0}) ==
              doctest::Approx(std::exp(-1.5) / 6.0).epsilon(1e-12));
    }
    SUBCASE("input validation") {
        const auto model = hazard_from_odthls(cyclic3(0.75));
        CHECK_THROWS_AS(joint_density(model, {0.2, 0.5}), DomainError);
        CHECK_THROWS_AS(joint_density(model, {0.2, 0.2, 0.5}), ContractError);
        CHECK_THROWS_AS(joint_density(model, {0.2, -0.1, 0.5}), DomainError);
    }
    SUBCASE("normalizes to one") {
        const auto model = hazard_from_odthls(cyclic3(0.75));
        // Integrate the density over [0, 14]^3 as a sum over the six ordered
        // regions.  Within each region the integrand is smooth (one fixed
        // failure order) and quadrature nodes stay strictly interior, clear
        // of the tied-coordinate boundaries.  Tail mass beyond 14 is ~2e-5.
        const double horizon = 14.0;
        std::vector<int> units{1, 2, 3};
        double total = 0.0;
        do {
            auto at = [&](double u, double v, double w) {
                std::vector<double> x(3);
                x[static_cast<std::size_t>(units[0] - 1)] = u;
                x[static_cast<std::size_t>(units[1] - 1)] = v;
                x[static_cast<std::size_t>(units[2] - 1)] = w;
                return joint_density(model, x);
            };
            auto mid = [&](double w) {
                return gk_integrate(
                    [&](double v) {
                        return gk_integrate([&](double u) { return at(u, v, w); }, 0.0, v, 1e-7,
                                            10);
                    },
                    0.0, w, 1e-7, 10);
            };
            total += gk_integrate(mid, 0.0, horizon, 1e-7, 10);
        } while (std::next_permutation(units.begin(), units.end()));
        CHECK(total == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("ordered-history probabilities via quadrature agree with closed forms") {
    const auto model = hazard_from_odthls(cyclic3(0.75));
    const auto spec = cyclic3(0.75);
    const double t = 1.0;

    for (const auto& j : std::vector<std::vector<int>>{{}, {1}, {2}, {1, 2}, {1, 3}, {1, 2, 3}}) {
        const double closed = psi(model, j, t);  // dispatches to the closed form
        CHECK(closed == doctest::Approx(thls_psi(spec, j, t)).epsilon(1e-12));

        PsiOptions first;
        first.force_generic = true;
        const double q1 = psi_detail(model, j, t, first).value;
        CHECK(q1 == doctest::Approx(closed).epsilon(1e-7));

        PsiOptions last;
        last.force_generic = true;
        last.order = PsiOrder::LastFailureOuter;
        const double q2 = psi_detail(model, j, t, last).value;
        CHECK(q2 == doctest::Approx(closed).epsilon(1e-7));
        CHECK(std::abs(q1 - q2) <= 1e-7 * std::max(1.0, std::abs(q1)));
    }

    CHECK(psi(model, {1}, 1e-12) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(psi(model, {1}, 0.0) == 0.0);
    CHECK(psi(model, {}, 0.0) == 1.0);
    CHECK_THROWS_AS(psi(model, {1, 1}, 0.5), DomainError);
    CHECK_THROWS_AS(psi(model, {0}, 0.5), DomainError);
    CHECK_THROWS_AS(psi(model, {1}, -0.5), DomainError);
}

TEST_CASE("time-varying exchangeable model against frozen oracle") {
    // mu_k(t) = a_k (1 + t), a = (0.5, 0.8, 1.4); reference values computed
    // independently with 30-digit arithmetic (tools/oracles/
    // timevarying_oracle.py) and frozen here.
    const auto model = linear_ramp_model({0.5, 0.8, 1.4});

    SUBCASE("psi masses per cardinality") {
        const double psis08[] = {0.18637397603940996651, 0.098736965069331543860,
                                 0.046806400727105537986, 0.039429454064993695665};
        const double psis20[] = {0.0024787521766663584230, 0.0040859745174621196198,
                                 0.0080383327264829694737, 0.15617222131867491098};
        const std::vector<std::vector<int>> tuples = {{}, {2}, {3, 1}, {2, 1, 3}};
        for (std::size_t d = 0; d < tuples.size(); ++d) {
            CHECK(psi(model, tuples[d], 0.8) == doctest::Approx(psis08[d]).epsilon(1e-7));
            CHECK(psi(model, tuples[d], 2.0) == doctest::Approx(psis20[d]).epsilon(1e-7));
        }
    }
    SUBCASE("failure-count pmf via survivor sets") {
        const double pmf08[] = {0.18637397603940996651, 0.29621089520799463158,
                                0.28083840436263322791, 0.23657672438996217399};
        const auto rep = survivor_report(model, 0.8);
        CHECK(rep.total_probability == doctest::Approx(1.0).epsilon(1e-7));
        // pmf[m] = P(m survivors) = P(r - m failures).
        for (int failed = 0; failed <= 3; ++failed)
            CHECK(rep.pmf[static_cast<std::size_t>(3 - failed)] ==
                  doctest::Approx(pmf08[failed]).epsilon(1e-6));
        CHECK(rep.survivor_probs.at({1, 2, 3}) ==
              doctest::Approx(pmf08[0]).epsilon(1e-7));
    }
    SUBCASE("joint density") {
        CHECK(joint_density(model, {0.3, 1.1, 0.6}) ==
              doctest::Approx(0.19908702131337590004).epsilon(1e-9));
        CHECK(joint_density(model, {0.2, 0.9, 1.7}) ==
              doctest::Approx(0.033227039915033842878).epsilon(1e-9));
    }
    SUBCASE("exchangeability probe passes") {
        const auto rep = check_exchangeable(model, 2000);
        CHECK(rep.pass);
        CHECK(rep.probes_run == 2000);
    }
}

TEST_CASE("five-unit time-varying model exercises the qmc path") {
    const auto model = linear_ramp_model({0.5, 0.8, 1.4, 2.2, 3.0});
    const double psis[] = {0.060810062625217964996, 0.023604031753178265130,
                           0.0067064974103940314070, 0.0025799377478253024230,
                           0.0017695609917128715652, 0.0026658020543828945668};
    // d <= 3 goes through nested quadrature.
    CHECK(psi(model, {}, 0.8) == doctest::Approx(psis[0]).epsilon(1e-7));
    CHECK(psi(model, {4}, 0.8) == doctest::Approx(psis[1]).epsilon(1e-7));
    CHECK(psi(model, {1, 5}, 0.8) == doctest::Approx(psis[2]).epsilon(1e-7));
    CHECK(psi(model, {2, 4, 1}, 0.8) == doctest::Approx(psis[3]).epsilon(1e-7));
    // d >= 4 switches to Sobol QMC: target 1e-3, with a reported estimate.
    const auto q4 = psi_detail(model, {1, 2, 3, 4}, 0.8);
    CHECK(q4.method == "qmc");
    CHECK(q4.value == doctest::Approx(psis[4]).epsilon(1e-3));
    CHECK(q4.abs_error < 1e-3);
    const auto q5 = psi_detail(model, {5, 4, 3, 2, 1}, 0.8);
    CHECK(q5.value == doctest::Approx(psis[5]).epsilon(1e-3));

    // Count pmf via the ordered-tuple multiplicity identity.
    const double pmf08[] = {0.060810062625217964996, 0.11802015876589132565,
                            0.13412994820788062814, 0.15479626486951814538};
    for (int f = 0; f <= 3; ++f) {
        const std::vector<std::vector<int>> reps = {{}, {3}, {2, 5}, {4, 1, 3}};
        const double mass = static_cast<double>(falling_factorial(5, f)) *
                            psi(model, reps[static_cast<std::size_t>(f)], 0.8);
        CHECK(mass == doctest::Approx(pmf08[f]).epsilon(2e-6));
    }
}

TEST_CASE("qmc agrees with the closed form on a five-unit load-sharing model") {
    ExThlsModel ex({5.0, 4.0, 3.0, 2.0, 1.0});
    const auto model = hazard_from_exthls(ex);
    const std::vector<int> j = {1, 2, 3, 4};
    const double closed = psi(model, j, 0.6);
    PsiOptions opt;
    opt.force_generic = true;
    const auto generic = psi_detail(model, j, 0.6, opt);
    CHECK(generic.method == "qmc");
    CHECK(generic.value == doctest::Approx(closed).epsilon(1e-3));
}

TEST_CASE("survivor sets and minima for the cyclic model") {
    const auto model = hazard_from_odthls(cyclic3(0.75));
    const double t = 1.0;
    const double bracket = t * std::exp(-t) - std::exp(-t) + std::exp(-2.0 * t);

    // P(exactly {j} survives) = (1/3)(t e^{-t} - e^{-t} + e^{-2t}).
    for (int j = 1; j <= 3; ++j)
        CHECK(survivor_set_prob(model, {j}, t) == doctest::Approx(bracket / 3.0).epsilon(1e-10));

    const auto rep = survivor_report(model, t);
    CHECK(rep.total_probability == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.pmf[3] == doctest::Approx(std::exp(-t)).epsilon(1e-10));

    CHECK(min_survival(model, {1, 2, 3}, t) == doctest::Approx(std::exp(-t)).epsilon(1e-9));
    CHECK(min_survival(model, {1, 2}, t) ==
          doctest::Approx(std::exp(-t) * (1.0 + t / 3.0)).epsilon(1e-9));
    CHECK(min_survival(model, {2}, t) ==
          doctest::Approx((2.0 / 3.0) * std::exp(-t) + t * std::exp(-t) +
                          std::exp(-2.0 * t) / 3.0)
              .epsilon(1e-9));
    CHECK_THROWS_AS(min_survival(model, {}, t), DomainError);
}

TEST_CASE("exchangeability probe verdicts") {
    const auto exch = hazard_from_exthls(ExThlsModel({1.0, 1.0, 2.0}));
    CHECK(check_exchangeable(exch, 3000).pass);

    const auto cyc = hazard_from_odthls(cyclic3(0.75));
    const auto rep = check_exchangeable(cyc, 3000);
    CHECK_FALSE(rep.pass);
    CHECK(rep.witness.find("0.25") != std::string::npos);
    CHECK(rep.witness.find("0.75") != std::string::npos);
}

TEST_CASE("minimal-stability probe verdicts") {
    const std::vector<double> grid = {0.3, 1.0, 2.5};

    const auto good = hazard_from_odthls(cyclic3(0.75));
    const auto rep = check_minimally_stable(good, grid, 1e-7);
    CHECK(rep.pass);
    CHECK(rep.max_violation < 1e-7);

    // lambda_{2|1} bumped without fixing Lambda_1: detectable in the masses.
    auto table = cyclic3(0.75).rates();
    table[{1}][2] = 0.35;
    const auto bad = hazard_from_odthls(OdThlsSpec(3, table));
    const auto rep2 = check_minimally_stable(bad, grid, 1e-6);
    CHECK_FALSE(rep2.pass);
    CHECK(rep2.max_violation > 1e-4);
    CHECK(!rep2.witness_A.empty());
    CHECK(rep2.summary.find("fail") != std::string::npos);

    // Exchangeable models pass by construction.
    const auto exch = hazard_from_exthls(ExThlsModel({2.0, 1.0}));
    CHECK(check_minimally_stable(exch, grid, 1e-8).pass);
}

TEST_CASE("generated specs are minimally stable by the hazard-engine check") {
    const auto gen = generate_singleton_min_stable({1.0, 1.0, 2.0}, 7);
    const auto model = hazard_from_odthls(*gen.spec);
    CHECK(check_minimally_stable(model, {0.4, 1.1}, 1e-6).pass);

    const auto gen4 = generate_singleton_min_stable({4.0, 3.0, 2.0, 1.0}, 11);
    const auto model4 = hazard_from_odthls(*gen4.spec);
    CHECK(check_minimally_stable(model4, {0.5, 1.5}, 1e-6).pass);
}

TEST_CASE("mixture order statistics agree with hazard-engine sums") {
    // Gbar_{k:r}(t) = P(fewer than k failures by t) from survivor masses.
    const auto spec = generate_singleton_min_stable({2.0, 1.5, 1.0}, 19).get();
    const auto model = hazard_from_odthls(spec);
    auto fam = mixture_orderstats(spec);
    for (double t : {0.4, 1.0, 2.3}) {
        const auto rep = survivor_report(model, t);
        double cum = 0.0;
        for (int k = 1; k <= 3; ++k) {
            // P(T_{k:r} > t) = P(at most k-1 failures) = P(at least r-k+1 survivors).
            cum += rep.pmf[static_cast<std::size_t>(3 - k + 1)];
            CHECK(fam.survival(k, t) == doctest::Approx(cum).epsilon(1e-9));
        }
    }
}
