#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "doctest.h"
#include "lifeline/loadsharing.hpp"
#include "lifeline/montecarlo.hpp"
#include "lifeline/threads.hpp"

using namespace lifeline;
using doctest::Approx;

namespace {

// Cyclic order-dependent rates: lambda_{j|empty} = 1/3, second-stage pair
// rates (gamma, 1-gamma) arranged cyclically, third stage rate 2.
OdThlsSpec cyclic_spec(double gamma) {
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

// z-score of an empirical proportion against its analytic value.
double prop_z(double emp, double p, int n) {
    return (emp - p) / std::sqrt(p * (1.0 - p) / n);
}

// Tiny handcrafted batch with known statistics.
SampleBatch toy_batch() {
    SampleBatch b;
    b.r = 3;
    b.seed = 0;
    b.rows = {{0.5, 1.5, 2.5},
              {1.0, 0.2, 3.0},
              {2.0, 2.2, 0.1},
              {0.3, 0.4, 4.0}};
    return b;
}

struct ThreadCountGuard {
    int saved = thread_count();
    ~ThreadCountGuard() { set_thread_count(saved); }
};

} // namespace

TEST_CASE("sampling reproduces known marginals and order probabilities") {
    // iid unit exponentials: stage totals (3, 2, 1).
    const auto iid = hazard_from_exthls(ExThlsModel({3.0, 2.0, 1.0}));
    const int n = 100000;
    const auto batch = sample(iid, n, 20260814u);
    REQUIRE(batch.n() == n);
    CHECK(batch.r == 3);
    CHECK(batch.ties_resampled == 0);

    long long alive1 = 0;
    double min_time = 1e300;
    for (const auto& row : batch.rows) {
        for (double x : row) min_time = std::min(min_time, x);
        if (row[0] > 1.0) ++alive1;
    }
    CHECK(min_time > 0.0);
    const double p_emp = static_cast<double>(alive1) / n;
    CHECK(std::fabs(prop_z(p_emp, std::exp(-1.0), n)) <= 3.0);

    // Cyclic model: P(T1 < T3 < T2) = gamma/3 = 0.25 at gamma = 0.75.
    const auto cyc = hazard_from_odthls(cyclic_spec(0.75));
    const auto cyc_batch = sample(cyc, n, 7u);
    long long hits_132 = 0, hits_123 = 0;
    for (const auto& row : cyc_batch.rows) {
        if (row[0] < row[2] && row[2] < row[1]) ++hits_132;
        if (row[0] < row[1] && row[1] < row[2]) ++hits_123;
    }
    CHECK(std::fabs(prop_z(static_cast<double>(hits_132) / n, 0.25, n)) <= 3.0);
    // and P(T1 < T2 < T3) = (1/3)(1 - gamma) = 1/12.
    CHECK(std::fabs(prop_z(static_cast<double>(hits_123) / n, 1.0 / 12.0, n)) <= 3.0);

    CHECK_THROWS_AS(sample(iid, 0, 1u), DomainError);
}

TEST_CASE("sampling is bit-identical across seeds, runs, and worker counts") {
    const auto model = hazard_from_odthls(cyclic_spec(0.75));
    const auto a = sample(model, 500, 42u);
    const auto b = sample(model, 500, 42u);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i)
        for (int u = 0; u < 3; ++u)
            CHECK(a.rows[i][static_cast<std::size_t>(u)] ==
                  b.rows[i][static_cast<std::size_t>(u)]);

    // Different seed, different batch.
    const auto c = sample(model, 500, 43u);
    bool any_diff = false;
    for (std::size_t i = 0; i < c.rows.size() && !any_diff; ++i)
        any_diff = c.rows[i] != a.rows[i];
    CHECK(any_diff);

    // Chunking independence: run the same batch under several worker counts.
    ThreadCountGuard guard;
    for (int workers : {2, 8}) {
        set_thread_count(workers);
        const auto d = sample(model, 500, 42u);
        for (std::size_t i = 0; i < d.rows.size(); ++i)
            for (int u = 0; u < 3; ++u)
                CHECK(d.rows[i][static_cast<std::size_t>(u)] ==
                      a.rows[i][static_cast<std::size_t>(u)]);
    }
}

TEST_CASE("time-varying models sample by thinning against stage bounds") {
    // Exchangeable decaying per-unit rate mu_k(t) = 0.5 e^{-t} + 1; the
    // total with k failures is (3-k)(0.5 e^{-t} + 1) <= (3-k) * 1.5.
    auto mu = [](int, double t) { return 0.5 * std::exp(-t) + 1.0; };
    const auto model = hazard_exchangeable(3, mu, false);
    SampleOptions opts;
    opts.stage_rate_bounds = {4.5, 3.0, 1.5};
    const int n = 20000;
    const auto batch = sample(model, n, 99u, opts);

    // Minimum survival has the exact form exp(-3 [0.5 (1 - e^{-t}) + t]).
    const double t0 = 0.5;
    const double p_min = std::exp(-3.0 * (0.5 * (1.0 - std::exp(-t0)) + t0));
    long long all_alive = 0;
    for (const auto& row : batch.rows)
        if (row[0] > t0 && row[1] > t0 && row[2] > t0) ++all_alive;
    CHECK(std::fabs(prop_z(static_cast<double>(all_alive) / n, p_min, n)) <= 4.0);

    // A constant-rate model pushed through the thinning path must agree with
    // its closed-form order-statistic law.
    const ExThlsModel ex({1.0, 1.0, 2.0});
    auto const_mu = [ex](int k, double) { return ex.mu(k); };
    const auto slow = hazard_exchangeable(3, const_mu, false);
    SampleOptions exact_bounds;
    exact_bounds.stage_rate_bounds = {1.0, 1.0, 2.0};
    const auto batch2 = sample(slow, n, 123u, exact_bounds);
    long long second_alive = 0;
    for (const auto& row : batch2.rows) {
        std::vector<double> s(row);
        std::sort(s.begin(), s.end());
        if (s[1] > 1.0) ++second_alive;
    }
    const double g23 = ex.orderstat_survival(2, 1.0);  // (1+t) e^{-t} at t = 1
    CHECK(g23 == Approx(2.0 * std::exp(-1.0)).epsilon(1e-12));
    CHECK(std::fabs(prop_z(static_cast<double>(second_alive) / n, g23, n)) <= 4.0);

    // Missing or undersized bounds are contract errors for time-varying
    // models; a bound the realized rate overshoots is detected loudly.
    CHECK_THROWS_AS(sample(model, 10, 1u), ContractError);
    SampleOptions bad;
    bad.stage_rate_bounds = {4.5, 3.0};
    CHECK_THROWS_AS(sample(model, 10, 1u, bad), ContractError);
    SampleOptions low;
    low.stage_rate_bounds = {2.0, 3.0, 1.5};  // stage-0 total is ~4.5 > 2
    CHECK_THROWS_WITH_AS(sample(model, 10, 1u, low), doctest::Contains("bound"),
                         ContractError);
    SampleOptions neg;
    neg.stage_rate_bounds = {4.5, -3.0, 1.5};
    CHECK_THROWS_AS(sample(model, 10, 1u, neg), DomainError);

    // Degenerate models that keep colliding in float are aborted, not
    // silently accepted: a huge second-stage rate makes the next failure
    // land on the same representable time.
    auto collapse = [](int k, double) { return k == 0 ? 1.0 : 1e20; };
    const auto degenerate = hazard_exchangeable(3, collapse, true);
    CHECK_THROWS_WITH_AS(sample(degenerate, 10, 5u), doctest::Contains("tie"),
                         ContractError);
}

TEST_CASE("empirical statistics on a handcrafted batch") {
    const auto batch = toy_batch();
    const std::vector<double> grid = {1.0, 2.0};
    const auto rep = empirical_stats(batch, grid, 2);
    CHECK(rep.n == 4);
    CHECK(rep.r == 3);

    // Order statistics by hand: first failures (0.5, 0.2, 0.1, 0.3), second
    // (1.5, 1.0, 2.0, 0.4), third (2.5, 3.0, 2.2, 4.0).
    CHECK(rep.orderstat[0].value[0] == Approx(0.0).scale(1.0));
    CHECK(rep.orderstat[1].value[0] == Approx(0.5));  // 1.5 and 2.0 exceed 1
    CHECK(rep.orderstat[2].value[0] == Approx(1.0));
    // Strict survival: 2.0 > 2 is false, so no second order statistic clears t=2.
    CHECK(rep.orderstat[1].value[1] == Approx(0.0).scale(1.0));
    CHECK(rep.orderstat[2].value[1] == Approx(1.0));   // all third failures exceed 2
    CHECK(rep.orderstat[0].half_width[0] == Approx(0.0).scale(1.0));
    CHECK(rep.orderstat[1].half_width[0] == Approx(0.49).epsilon(1e-12));

    // Survivor sets at t = 1: {2,3}, {3}, {1,2}, {3}.
    REQUIRE(rep.survivor_sets.count({3}) == 1);
    REQUIRE(rep.survivor_sets.count({2, 3}) == 1);
    REQUIRE(rep.survivor_sets.count({1, 2}) == 1);
    CHECK(rep.survivor_sets.at({3}).value[0] == Approx(0.5));
    CHECK(rep.survivor_sets.at({2, 3}).value[0] == Approx(0.25));
    CHECK(rep.survivor_sets.at({1, 2}).value[0] == Approx(0.25));

    // The survivor-set probabilities partition the sample at every t.
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double total = 0.0;
        for (const auto& [set, curve] : rep.survivor_sets) total += curve.value[g];
        CHECK(total == Approx(1.0).epsilon(1e-15));
    }

    // Ordered-prefix indicators at t = 1, worked by hand.
    REQUIRE(rep.psi.count({1}) == 1);
    REQUIRE(rep.psi.count({3}) == 1);
    REQUIRE(rep.psi.count({2, 1}) == 1);
    REQUIRE(rep.psi.count({1, 2}) == 1);
    CHECK(rep.psi.at({1}).value[0] == Approx(0.25));
    CHECK(rep.psi.at({3}).value[0] == Approx(0.25));
    CHECK(rep.psi.at({2, 1}).value[0] == Approx(0.25));
    CHECK(rep.psi.at({1, 2}).value[0] == Approx(0.25));
    CHECK(rep.psi.count({2}) == 0);  // no row has unit 2 failing first, alone, at t=1

    // Mean of the k-th order statistic via the deterministic reduction.
    CHECK(empirical_orderstat_mean(batch, 1) == Approx(0.275).epsilon(1e-15));
    CHECK(empirical_orderstat_mean(batch, 3) == Approx((2.5 + 3.0 + 2.2 + 4.0) / 4.0));
    CHECK_THROWS_AS(empirical_orderstat_mean(batch, 0), DomainError);

    // Guards.
    CHECK_THROWS_AS(empirical_stats(SampleBatch{}, grid), ContractError);
    CHECK_THROWS_AS(empirical_stats(batch, {}), DomainError);
    CHECK_THROWS_AS(empirical_stats(batch, {2.0, 1.0}), DomainError);
    CHECK_THROWS_AS(empirical_stats(batch, {-1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(empirical_stats(batch, grid, 7), DomainError);
}

TEST_CASE("empirical statistics validate closed forms at scale") {
    const auto spec = cyclic_spec(0.75);
    const auto model = hazard_from_odthls(spec);
    const int n = 100000;
    const auto batch = sample(model, n, 31u);
    const std::vector<double> grid = {0.5, 1.0, 2.0};
    const auto rep = empirical_stats(batch, grid, 2);

    // Gbar_{2:3}(1) = 2 e^{-1}.
    const double z2 = prop_z(rep.orderstat[1].value[1], 2.0 * std::exp(-1.0), n);
    CHECK(std::fabs(z2) <= 3.0);

    // Psi(1; (1,2)) = (1/3)(1-gamma)(t e^{-t} - e^{-t} + e^{-2t}) at t = 1.
    REQUIRE(rep.psi.count({1, 2}) == 1);
    const double psi_12 = thls_psi(spec, {1, 2}, 1.0);
    CHECK(psi_12 == Approx((1.0 / 3.0) * 0.25 * std::exp(-2.0)).epsilon(1e-12));
    CHECK(std::fabs(prop_z(rep.psi.at({1, 2}).value[1], psi_12, n)) <= 3.0);

    // Half-widths really are 95% binomial intervals around the estimate.
    const double p_hat = rep.orderstat[1].value[1];
    CHECK(rep.orderstat[1].half_width[1] ==
          Approx(1.96 * std::sqrt(p_hat * (1.0 - p_hat) / n)).epsilon(1e-12));

    // Estimates are reproducible across worker counts, bit for bit.
    ThreadCountGuard guard;
    set_thread_count(8);
    const auto rep8 = empirical_stats(batch, grid, 2);
    for (int k = 0; k < 3; ++k)
        for (std::size_t g = 0; g < grid.size(); ++g)
            CHECK(rep8.orderstat[static_cast<std::size_t>(k)].value[g] ==
                  rep.orderstat[static_cast<std::size_t>(k)].value[g]);
    for (const auto& [key, curve] : rep.psi) {
        REQUIRE(rep8.psi.count(key) == 1);
        for (std::size_t g = 0; g < grid.size(); ++g)
            CHECK(rep8.psi.at(key).value[g] == curve.value[g]);
    }
}

TEST_CASE("order-statistic means match the stage-sum identity") {
    // E[T_{k:r}] = sum_{j<=k} 1/L(r-j+1): consecutive exponential stages.
    const ExThlsModel ex({1.0, 1.0, 2.0});
    const auto model = hazard_from_exthls(ex);
    const int n = 100000;
    const auto batch = sample(model, n, 2026u);
    for (int k = 1; k <= 3; ++k) {
        double mean = 0.0, var = 0.0;
        for (int j = 0; j < k; ++j) {
            const double lam = ex.stage_total(j);
            mean += 1.0 / lam;
            var += 1.0 / (lam * lam);
        }
        CHECK(ex.orderstat_mean(k) == Approx(mean).epsilon(1e-12));
        const double emp = empirical_orderstat_mean(batch, k);
        CHECK(std::fabs(emp - mean) <= 4.0 * std::sqrt(var / n));
    }
}

TEST_CASE("generated singleton models balance equal-cardinality survivor sets") {
    const auto gen = generate_singleton_min_stable({1.0, 1.0, 2.0}, 17u);
    REQUIRE(gen.spec.has_value());
    const auto model = hazard_from_odthls(gen.get());
    const int n = 30000;
    const auto batch = sample(model, n, 55u);
    const std::vector<double> grid = {0.7};
    const auto rep = empirical_stats(batch, grid, 0);

    for (int card = 1; card <= 2; ++card) {
        std::vector<double> probs;
        for (const auto& [set, curve] : rep.survivor_sets)
            if (static_cast<int>(set.size()) == card) probs.push_back(curve.value[0]);
        REQUIRE(probs.size() == 3);
        for (std::size_t a = 0; a < probs.size(); ++a)
            for (std::size_t b = a + 1; b < probs.size(); ++b) {
                // Multinomial difference: Var = (pA + pB - (pA-pB)^2)/n.
                const double pa = probs[a], pb = probs[b];
                const double se =
                    std::sqrt((pa + pb - (pa - pb) * (pa - pb)) / n);
                CHECK(std::fabs(pa - pb) <= 4.0 * se);
            }
    }
}

TEST_CASE("pairwise summation is deterministic and accurate") {
    std::vector<double> v(100000, 0.1);
    CHECK(pairwise_sum(v) == Approx(10000.0).epsilon(1e-12));
    CHECK(pairwise_sum({}) == 0.0);
    CHECK(pairwise_sum({1.5}) == 1.5);
    // Exactly reproducible: same vector, same bracketing, same bits.
    CHECK(pairwise_sum(v) == pairwise_sum(v));
}

TEST_CASE("goodness-of-fit comparison") {
    // Self-consistency: a model against its own simulation.
    const ExThlsModel ex({1.0, 1.0, 2.0});
    const auto model = hazard_from_exthls(ex);
    const int n = 100000;
    const auto batch = sample(model, n, 404u);
    const std::vector<double> grid = {0.25, 0.5, 1.0, 1.5, 2.0, 3.0};
    const auto rep = empirical_stats(batch, grid, 1);

    std::vector<GofSeries> series;
    for (int k = 1; k <= 3; ++k) {
        GofSeries s;
        s.name = "orderstat:" + std::to_string(k);
        for (double t : grid) s.analytic.push_back(ex.orderstat_survival(k, t));
        s.empirical = rep.orderstat[static_cast<std::size_t>(k - 1)].value;
        series.push_back(std::move(s));
    }
    const auto verdict = gof_compare(series, n, 4.0);
    CHECK(verdict.pass);
    CHECK(verdict.points == 18);
    CHECK(verdict.max_abs_z <= 4.0);
    CHECK(!verdict.bonferroni.empty());

    // Power: a deliberately wrong last-stage rate (2 -> 2.5) must fail.
    const ExThlsModel sim({4.0, 3.0, 2.0});
    const ExThlsModel wrong({4.0, 3.0, 2.5});
    const auto batch2 = sample(hazard_from_exthls(sim), n, 505u);
    const auto rep2 = empirical_stats(batch2, grid, 0);
    GofSeries tail;
    tail.name = "orderstat:3";
    for (double t : grid) tail.analytic.push_back(wrong.orderstat_survival(3, t));
    tail.empirical = rep2.orderstat[2].value;
    const auto bad = gof_compare({tail}, n, 4.0);
    CHECK(!bad.pass);
    CHECK(bad.max_abs_z > 4.0);
    CHECK(!bad.failures.empty());
    CHECK(bad.worst.curve == "orderstat:3");
    // The same series against the true model passes.
    GofSeries truth;
    truth.name = "orderstat:3";
    for (double t : grid) truth.analytic.push_back(sim.orderstat_survival(3, t));
    truth.empirical = rep2.orderstat[2].value;
    CHECK(gof_compare({truth}, n, 4.0).pass);

    // z-score arithmetic near the threshold (a hair inside 4 sigma so float
    // rounding cannot flip the inclusive comparison).
    GofSeries edge;
    edge.name = "edge";
    edge.analytic = {0.5};
    edge.empirical = {0.5 + 3.999 * std::sqrt(0.25 / 10000.0)};
    CHECK(gof_compare({edge}, 10000, 4.0).pass);
    CHECK(!gof_compare({edge}, 10000, 3.9).pass);
    CHECK(gof_compare({edge}, 10000, 4.0).max_abs_z == Approx(3.999).epsilon(1e-9));

    // Degenerate analytic endpoints: exact match passes, mismatch fails.
    GofSeries ones;
    ones.name = "ones";
    ones.analytic = {1.0, 0.0};
    ones.empirical = {1.0, 0.0};
    CHECK(gof_compare({ones}, 100, 4.0).pass);
    ones.empirical = {0.999, 0.0};
    CHECK(!gof_compare({ones}, 100, 4.0).pass);

    // Contract guards.
    GofSeries mismatch;
    mismatch.name = "m";
    mismatch.analytic = {0.5, 0.5};
    mismatch.empirical = {0.5};
    CHECK_THROWS_WITH_AS(gof_compare({mismatch}, n, 4.0), doctest::Contains("grid"),
                         ContractError);
    CHECK_THROWS_AS(gof_compare({tail}, 0, 4.0), ContractError);
    CHECK_THROWS_AS(gof_compare({}, n, 4.0), ContractError);
    CHECK_THROWS_AS(gof_compare({tail}, n, 0.0), DomainError);
    GofSeries not_prob;
    not_prob.name = "p";
    not_prob.analytic = {1.5};
    not_prob.empirical = {0.5};
    CHECK_THROWS_AS(gof_compare({not_prob}, n, 4.0), ContractError);
}
