#include <cmath>

#include "doctest.h"
#include "smren/coding.hpp"
#include "smren/conditional.hpp"
#include "smren/dist.hpp"
#include "smren/guessing.hpp"
#include "smren/io.hpp"
#include "smren/oneshot.hpp"
#include "smren/smoothing.hpp"

using namespace smren;

TEST_CASE("k_moment basics") {
    JointDist j = bss(0.1);
    const std::size_t n = j.nx() * j.ny();
    CostProfile ones = make_cost_profile(j.nx(), j.ny(), std::vector<double>(n, 1.0),
                                         std::vector<double>(n, 0.0));
    CHECK(k_moment(j, ones, 1.0).value == doctest::Approx(1.0).epsilon(1e-12));
    CostProfile erased = make_cost_profile(j.nx(), j.ny(), std::vector<double>(n, 1.0),
                                           std::vector<double>(n, 1.0));
    CHECK(k_moment(j, erased, 1.0).value == doctest::Approx(0.0));
    CHECK(k_moment(j, erased, 1.0).log_scaled.is_neg_inf());
    CostProfile half = make_cost_profile(j.nx(), j.ny(), std::vector<double>(n, 2.0),
                                         std::vector<double>(n, 0.5));
    CHECK(k_moment(j, half, 1.0).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(k_moment(j, ones, -1.0), domain_error);
}

TEST_CASE("redundancy") {
    JointDist j = make_joint({{0.5}, {0.3}, {0.2}});
    // Kraft-tight lengths: kappa = 2^len with sum 2^-len = 1
    CostProfile kraft = make_cost_profile(3, 1, {2.0, 4.0, 4.0}, {0.0, 0.0, 0.0});
    CHECK(redundancy(kraft) == doctest::Approx(1.0).epsilon(1e-12));
    // ranks: harmonic sum bounded by 1 + log2 m
    CostProfile ranks = make_cost_profile(3, 1, {1.0, 2.0, 3.0}, {0.0, 0.0, 0.0});
    const double harmonic = 1.0 + 0.5 + 1.0 / 3.0;
    CHECK(redundancy(ranks) == doctest::Approx(harmonic).epsilon(1e-12));
    CHECK(harmonic <= 1.0 + std::log2(3.0));
    // the sum skips fully erased symbols
    CostProfile gated = make_cost_profile(3, 1, {5.0, 5.0, 5.0}, {1.0, 1.0, 0.0});
    CHECK(redundancy(gated) == doctest::Approx(0.2).epsilon(1e-12));
    (void)j;
}

TEST_CASE("converse bounds gate on the error budget") {
    JointDist j = bss(0.1);
    const std::size_t n = j.nx() * j.ny();
    CostProfile bad = make_cost_profile(j.nx(), j.ny(), std::vector<double>(n, 1.0),
                                        std::vector<double>(n, 0.9));
    CHECK_FALSE(converse_avg_bound(j, bad, 1.0, 0.2).applicable);
    CHECK_FALSE(converse_max_bound(j, bad, 1.0, 0.2).applicable);
}

TEST_CASE("converse bounds hold on optimal guessing profiles") {
    for (const JointDist& j : {bss(0.1), bes(0.2), make_joint({{0.5}, {0.3}, {0.2}})}) {
        const double rho = 1.0, eps = 0.2;
        OptimalStrategy avg = optimal_strategy_avg(j, eps, rho);
        // profile: kappa = guessing rank, err = per-(x,y) give-up probability
        std::vector<double> kappa(j.nx() * j.ny(), 1.0), err(j.nx() * j.ny(), 1.0);
        for (std::size_t y = 0; y < j.ny(); ++y) {
            double surv = 1.0;
            for (std::size_t k = 0; k < avg.strategy.order[y].size(); ++k) {
                surv *= 1.0 - avg.strategy.policy[y][k];
                const std::size_t x = avg.strategy.order[y][k];
                kappa[x * j.ny() + y] = double(k + 1);
                err[x * j.ny() + y] = 1.0 - surv;
            }
        }
        CostProfile c = make_cost_profile(j.nx(), j.ny(), kappa, err);
        ConverseReport r = converse_avg_bound(j, c, rho, eps);
        CHECK(r.applicable);
        CHECK(r.holds);
        CHECK(r.moment_log ==
              doctest::Approx(avg.limits.moment.log_scaled.value()).epsilon(1e-9));

        OptimalStrategy mx = optimal_strategy_max(j, eps, rho);
        std::vector<double> kappa2(j.nx() * j.ny(), 1.0), err2(j.nx() * j.ny(), 1.0);
        for (std::size_t y = 0; y < j.ny(); ++y) {
            double surv = 1.0;
            for (std::size_t k = 0; k < mx.strategy.order[y].size(); ++k) {
                surv *= 1.0 - mx.strategy.policy[y][k];
                const std::size_t x = mx.strategy.order[y][k];
                kappa2[x * j.ny() + y] = double(k + 1);
                err2[x * j.ny() + y] = 1.0 - surv;
            }
        }
        ConverseReport r2 =
            converse_max_bound(j, make_cost_profile(j.nx(), j.ny(), kappa2, err2), rho, eps);
        CHECK(r2.applicable);
        CHECK(r2.holds);
    }
}

TEST_CASE("threshold profile: no budget means no erasure") {
    JointDist j = bss(0.1);
    CondDist cd = condition_on_y(j);
    const double alpha = 0.5;
    // kappa aligned with the tilted masses keeps kappa * Q bounded by one
    TiltedCond q = tilted_conditional(cd, alpha, {0.0, 0.0});
    std::vector<std::vector<double>> kappa(j.nx(), std::vector<double>(j.ny(), 1.0));
    for (std::size_t x = 0; x < j.nx(); ++x)
        for (std::size_t y = 0; y < j.ny(); ++y)
            if (q.rows[y].q[x] > 0) kappa[x][y] = 1.0 / q.rows[y].q[x];
    ThresholdProfile tp =
        threshold_profile(j, alpha, kappa, constant_profile(0.0, cd.y_marginal), 1.0);
    for (std::size_t x = 0; x < j.nx(); ++x)
        for (std::size_t y = 0; y < j.ny(); ++y)
            if (cd.rows[y].p(x) > 0) CHECK(tp.profile.e(x, y) == doctest::Approx(0.0));
    CHECK(tp.moment_log <= tp.bound + 1e-9);
}

TEST_CASE("threshold profile reproduces the optimal guessing moment") {
    JointDist j = make_joint({{0.5}, {0.3}, {0.2}});
    const double rho = 1.0, eps = 0.2, alpha = 1.0 / (1.0 + rho);
    OptimalStrategy avg = optimal_strategy_avg(j, eps, rho);
    CondDist cd = condition_on_y(j);
    // per-y budgets realized by the optimal strategy
    std::vector<double> delta;
    for (std::size_t y = 0; y < j.ny(); ++y) {
        double succ = 0, surv = 1;
        for (std::size_t k = 0; k < avg.strategy.order[y].size(); ++k) {
            surv *= 1.0 - avg.strategy.policy[y][k];
            succ += cd.rows[y].p(avg.strategy.order[y][k]) * surv;
        }
        delta.push_back(1.0 - succ);
    }
    std::vector<std::vector<double>> kappa(j.nx(), std::vector<double>(j.ny()));
    for (std::size_t y = 0; y < j.ny(); ++y)
        for (std::size_t k = 0; k < avg.strategy.order[y].size(); ++k)
            kappa[avg.strategy.order[y][k]][y] = double(k + 1);
    ThresholdProfile tp = threshold_profile(
        j, alpha, kappa, make_delta_profile(delta, cd.y_marginal), 1.0);
    CHECK(tp.moment_log ==
          doctest::Approx(avg.limits.moment.log_scaled.value()).epsilon(1e-9));
    CHECK(tp.moment_log <= tp.bound + 1e-9);
    // conditional error equals the requested budget exactly
    for (std::size_t y = 0; y < j.ny(); ++y) {
        double e = 0;
        for (std::size_t x = 0; x < j.nx(); ++x)
            e += cd.rows[y].p(x) * tp.profile.e(x, y);
        CHECK(e == doctest::Approx(delta[y]).epsilon(1e-12));
    }
}

TEST_CASE("threshold profile rejects oversized kappa") {
    JointDist j = make_joint({{0.5}, {0.3}, {0.2}});
    CondDist cd = condition_on_y(j);
    std::vector<std::vector<double>> kappa(3, std::vector<double>(1, 100.0));
    CHECK_THROWS_AS(
        threshold_profile(j, 0.5, kappa, constant_profile(0.2, cd.y_marginal), 1.0),
        domain_error);
}

TEST_CASE("threshold profile hits the budget exactly on tied atoms") {
    // two symbols share the boundary cost value
    JointDist j = make_joint({{0.4}, {0.3}, {0.3}});
    CondDist cd = condition_on_y(j);
    std::vector<std::vector<double>> kappa = {{1.0}, {2.0}, {2.0}};
    const double alpha = 0.5;
    // c large enough to satisfy the precondition for any budget
    for (double d : {0.1, 0.3, 0.45, 0.6}) {
        ThresholdProfile tp = threshold_profile(
            j, alpha, kappa, make_delta_profile({d}, cd.y_marginal), 10.0);
        double e = 0;
        for (std::size_t x = 0; x < 3; ++x) e += cd.rows[0].p(x) * tp.profile.e(x, 0);
        CHECK(e == doctest::Approx(d).epsilon(1e-12));
    }
}

TEST_CASE("threshold profile with Shannon-length costs matches the code report") {
    JointDist j = make_joint({{0.5}, {0.3}, {0.2}});
    CondDist cd = condition_on_y(j);
    for (double rho : {0.5, 1.0, 2.0}) {
        for (double eps : {0.1, 0.2}) {
            const double alpha = 1.0 / (1.0 + rho);
            DeltaProfile prof = constant_profile(eps, cd.y_marginal);
            TiltedCond q = tilted_conditional(cd, alpha, prof.delta);
            // kappa = 2^len with the Shannon lengths of the tilted masses;
            // off-support symbols get a longer word than any kept one
            std::vector<std::vector<double>> kappa(j.nx(), std::vector<double>(1));
            int max_len = 0;
            for (std::size_t x = 0; x < j.nx(); ++x)
                if (q.rows[0].q[x] > 0)
                    max_len = std::max(
                        max_len, (int)std::ceil(-std::log2(q.rows[0].q[x]) - 1e-9));
            for (std::size_t x = 0; x < j.nx(); ++x)
                kappa[x][0] = q.rows[0].q[x] > 0
                                  ? std::exp2(std::ceil(-std::log2(q.rows[0].q[x]) - 1e-9))
                                  : std::exp2(max_len + 1);
            ThresholdProfile tp = threshold_profile(j, alpha, kappa, prof, 2.0);
            // bound carries the one-bit slack
            CHECK(tp.moment_log <= tp.bound + 1e-9);
            CHECK(tp.bound ==
                  doctest::Approx(bar_h(j, alpha, prof).value() + 1.0).epsilon(1e-12));
            // the surviving expectation is exactly the code's cutoff CGF
            Code code = smoothed_shannon_code(j, rho, prof);
            CodeReport rep = code_report(code, j, rho);
            CHECK(tp.moment_log == doctest::Approx(rep.cutoff_cgf).epsilon(1e-12));
        }
    }
}
