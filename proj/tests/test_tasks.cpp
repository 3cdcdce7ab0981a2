#include <cmath>

#include "doctest.h"
#include "smren/dist.hpp"
#include "smren/io.hpp"
#include "smren/measures.hpp"
#include "smren/rng.hpp"
#include "smren/tasks.hpp"

using namespace smren;

TEST_CASE("lambda profile gates on the message threshold") {
    JointDist j = make_joint({{0.5}, {0.3}, {0.2}});
    // H(X|Y) ~ 1.485; eps = 0.2 needs M > 9.43
    CHECK_THROWS_AS(lambda_profile_avg(j, 1.0, 0.2, 9), domain_error);
    CHECK_NOTHROW(lambda_profile_avg(j, 1.0, 0.2, 10));
}

TEST_CASE("lambda profile on the single-y hand instance") {
    JointDist j = make_joint({{0.5}, {0.3}, {0.2}});
    LambdaProfile lp = lambda_profile_avg(j, 1.0, 0.2, 20);
    // J = 1, upsilon = 1: kept ranks are symbols 0 and 1, rank 3 is dropped
    CHECK(lp.at(0, 0) != kLambdaInf);
    CHECK(lp.at(1, 0) != kLambdaInf);
    CHECK(lp.at(2, 0) == kLambdaInf);
    // hand evaluation: slack = 0.2*18 - H; caps land at 1
    const double H = cond_stats(j).H_cond;
    const double slack = 0.2 * 18.0 - H;
    const double q0 = std::sqrt(0.5) / (std::sqrt(0.5) + std::sqrt(0.3));
    CHECK(lp.at(0, 0) == (std::uint64_t)std::ceil(0.4 / (slack * q0)));
    // the inverse-cap sum respects the construction budget
    double inv = 0;
    for (std::size_t x = 0; x < 3; ++x)
        if (lp.at(x, 0) != kLambdaInf) inv += 1.0 / double(lp.at(x, 0));
    CHECK(inv <= slack / (2.0 * 0.2) + 1e-9);
}

TEST_CASE("greedy partition respects caps and counts") {
    // caps (1,2,2,4) pack into three cells
    auto cells = bl_partition({1, 2, 2, 4}, {0, 1, 2, 3}, 9);
    CHECK(cells.size() <= 4);
    for (const auto& c : cells)
        for (std::size_t s : c) CHECK(c.size() <= std::vector<std::uint64_t>{1, 2, 2, 4}[s]);
    // all-ones caps force singletons
    auto singles = bl_partition({1, 1, 1}, {0, 1, 2}, 3);
    CHECK(singles.size() == 3);
    CHECK_THROWS_AS(bl_partition({1, 1, 1, 1}, {0, 1, 2, 3}, 3), construction_error);
}

TEST_CASE("greedy partition on randomized caps at the existence threshold") {
    for (std::uint64_t t = 0; t < 100; ++t) {
        CounterRng rng(71, t);
        const std::size_t n = 12;
        std::vector<std::uint64_t> lam(n);
        std::vector<std::size_t> items(n);
        double inv = 0;
        for (std::size_t i = 0; i < n; ++i) {
            lam[i] = 1 + (std::uint64_t)(rng.uniform() * 8.0);
            inv += 1.0 / double(lam[i]);
            items[i] = i;
        }
        const std::uint64_t M =
            (std::uint64_t)std::ceil(2.0 * inv + std::log2(double(n)) + 2.0);
        auto cells = bl_partition(lam, items, M);
        CHECK(cells.size() <= M);
    }
}

TEST_CASE("average assignment: exact error and moment bound") {
    JointDist j = make_joint({{0.5}, {0.3}, {0.2}});
    TaskAssignment a = assignment_avg(j, 1.0, 0.2, 20);
    CHECK(a.error_avg == doctest::Approx(0.2).epsilon(1e-13));
    RhoMoment m = task_moment(a, j, 1.0);
    // enumeration oracle over symbols and the erasure layer
    CondDist cd = condition_on_y(j);
    double oracle = 0;
    for (std::size_t c = 0; c < a.cells[0].size(); ++c)
        for (std::size_t x : a.cells[0][c])
            oracle += cd.rows[0].p(x) * (1.0 - a.erase[0][c]) *
                      double(a.cells[0][c].size());
    CHECK(m.value == doctest::Approx(oracle).epsilon(1e-12));
    // achievability bound with the rank-truncated entropy
    const double H = cond_stats(j).H_cond;
    const double slack = 0.2 * 18.0 - H;
    const double tilde = tilde_h(j, 0.5, 0.2);
    const double rhs = std::max(0.0, tilde - std::log2(slack / (4.0 * 0.2))) + 1.0;
    CHECK(m.log_scaled.value() <= rhs + 1e-9);
}

TEST_CASE("huge message budgets give singleton cells") {
    JointDist j = make_joint({{0.5}, {0.3}, {0.2}});
    TaskAssignment a = assignment_avg(j, 1.0, 0.2, 1024);
    for (const auto& cell : a.cells[0]) CHECK(cell.size() == 1);
    // the moment equals the surviving mass with all-singleton cells
    RhoMoment m = task_moment(a, j, 1.0);
    CHECK(m.value == doctest::Approx(0.8).epsilon(1e-12));
}

TEST_CASE("zero conditional entropy keeps single-task cells") {
    JointDist diag = make_joint({{0.6, 0.0}, {0.0, 0.4}});
    TaskAssignment a = assignment_avg(diag, 1.0, 0.2, 8);
    for (std::size_t y = 0; y < 2; ++y)
        for (const auto& cell : a.cells[y]) CHECK(cell.size() == 1);
    CHECK(a.error_avg == doctest::Approx(0.2).epsilon(1e-13));
}

TEST_CASE("maximum-criterion assignment") {
    JointDist two = make_joint({{0.45, 0.3}, {0.05, 0.2}});
    const std::uint64_t M = task_threshold_max(two, 0.2) + 2;
    TaskAssignment a = assignment_max(two, 1.0, 0.2, M);
    CHECK(a.error_max == doctest::Approx(0.2).epsilon(1e-13));
    // independence: the per-y construction coincides with the average one
    JointDist indep = make_joint({{0.35, 0.35}, {0.15, 0.15}});
    const std::uint64_t M2 =
        std::max(task_threshold_avg(indep, 0.2), task_threshold_max(indep, 0.2)) + 1;
    TaskAssignment aa = assignment_avg(indep, 1.0, 0.2, M2);
    TaskAssignment am = assignment_max(indep, 1.0, 0.2, M2);
    CHECK(aa.error_avg == doctest::Approx(am.error_avg).epsilon(1e-12));
    CHECK(task_moment(aa, indep, 1.0).value ==
          doctest::Approx(task_moment(am, indep, 1.0).value).epsilon(1e-12));
}

TEST_CASE("one-shot task bounds") {
    for (const JointDist& j : {make_joint({{0.5}, {0.3}, {0.2}}), bss(0.1)}) {
        const double rho = 1.0, eps = 0.2;
        const std::uint64_t thr =
            std::max(task_threshold_avg(j, eps), task_threshold_max(j, eps));
        for (std::uint64_t M : {thr + 1, 4 * thr}) {
            TaskCheckReport r = one_shot_task_check(j, rho, eps, M);
            CHECK(r.avg_ok);
            CHECK(r.max_ok);
        }
    }
    // very large M: the converse clips to a vacuous negative bound
    JointDist j = make_joint({{0.5}, {0.3}, {0.2}});
    TaskCheckReport r = one_shot_task_check(j, 1.0, 0.2, 1 << 10);
    CHECK(r.converse_avg < 0);
    CHECK(r.moment_avg_log <= 1.0 + 1e-9);  // singleton cells: (1/rho) log 2 plus 0
}

TEST_CASE("ceiling power inequality") {
    for (std::uint64_t t = 0; t < 300; ++t) {
        CounterRng rng(17, t);
        const double u = rng.uniform() * 20.0;
        const double rho = 0.1 + rng.uniform() * 3.0;
        CHECK(std::pow(std::ceil(u), rho) < 1.0 + std::exp2(rho) * std::pow(u, rho));
    }
}

TEST_CASE("multi-item cells near the message threshold") {
    // six symbols, eps 0.1: five ranks survive and the caps let several head
    // symbols share a cell
    JointDist j = make_joint({{0.3}, {0.2}, {0.15}, {0.15}, {0.1}, {0.1}});
    const double rho = 1.0, eps = 0.1;
    const std::uint64_t M = task_threshold_avg(j, eps) + 1;
    TaskAssignment a = assignment_avg(j, rho, eps, M);
    CHECK(a.error_avg == doctest::Approx(eps).epsilon(1e-12));
    std::size_t largest = 0, total_cells = 0;
    for (const auto& cell : a.cells[0]) {
        largest = std::max(largest, cell.size());
        ++total_cells;
    }
    CHECK(largest >= 2);
    CHECK(total_cells <= M);
    // enumeration oracle for the moment
    CondDist cd = condition_on_y(j);
    double oracle = 0;
    for (std::size_t c = 0; c < a.cells[0].size(); ++c)
        for (std::size_t x : a.cells[0][c])
            oracle += cd.rows[0].p(x) * (1.0 - a.erase[0][c]) *
                      std::pow(double(a.cells[0][c].size()), rho);
    CHECK(task_moment(a, j, rho).value == doctest::Approx(oracle).epsilon(1e-12));
    // caps honored against the profile
    LambdaProfile lp = lambda_profile_avg(j, rho, eps, M);
    for (const auto& cell : a.cells[0])
        for (std::size_t x : cell) CHECK(cell.size() <= lp.at(x, 0));
    // the one-shot bounds still hold at this tight M
    TaskCheckReport rep = one_shot_task_check(j, rho, eps, M);
    CHECK(rep.avg_ok);
    CHECK(rep.max_ok);
}
