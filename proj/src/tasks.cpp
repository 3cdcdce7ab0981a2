#include "smren/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "smren/measures.hpp"
#include "smren/smoothing.hpp"

namespace smren {

namespace {

std::uint64_t cap_from(double raw) {
    if (!(raw > 0)) throw construction_error("lambda cap must be positive");
    if (raw > 1e18) return kLambdaInf;
    return (std::uint64_t)std::llround(std::ceil(raw - 1e-12));
}

// Sorted conditional masses and ranks shared by both constructions.
struct Ranked {
    CondDist cond;
    std::vector<std::vector<std::size_t>> order;
    std::vector<std::vector<double>> p;
};

Ranked ranked_rows(const JointDist& j) {
    Ranked r;
    r.cond = condition_on_y(j);
    for (const Dist& row : r.cond.rows) {
        auto perm = decreasing_rearrangement(row);
        std::vector<std::size_t> ord;
        std::vector<double> pr;
        for (std::size_t i : perm) {
            if (row.p(i) <= 0) continue;
            ord.push_back(i);
            pr.push_back(row.p(i));
        }
        r.order.push_back(std::move(ord));
        r.p.push_back(std::move(pr));
    }
    return r;
}

}  // namespace

std::uint64_t task_threshold_avg(const JointDist& j, double eps) {
    const double H = cond_stats(j).H_cond;
    return (std::uint64_t)std::floor(2.0 + H / eps) + 1;
}

std::uint64_t task_threshold_max(const JointDist& j, double eps) {
    CondStats cs = cond_stats(j);
    const double H = *std::max_element(cs.per_y_H.begin(), cs.per_y_H.end());
    return (std::uint64_t)std::floor(2.0 + H / eps) + 1;
}

LambdaProfile lambda_profile_avg(const JointDist& j, double rho, double eps,
                                 std::uint64_t M) {
    require(rho > 0, "rho must be positive");
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
    const double H = cond_stats(j).H_cond;
    if (!(double(M) > 2.0 + H / eps)) {
        std::ostringstream os;
        os << "lambda_profile_avg: M = " << M << " must exceed 2 + H(X|Y)/eps = "
           << 2.0 + H / eps;
        throw domain_error(os.str());
    }
    const double alpha = 1.0 / (1.0 + rho);
    Ranked r = ranked_rows(j);
    RankBudget rb = rank_budget(j, eps);
    const std::size_t J = (std::size_t)rb.J;
    const double slack = eps * (double(M) - 2.0) - H;

    LambdaProfile lp;
    lp.nx = j.nx();
    lp.ny = j.ny();
    lp.lambda.assign(j.nx() * j.ny(), kLambdaInf);
    for (std::size_t y = 0; y < r.order.size(); ++y) {
        // tilted masses over the kept ranks 1..J+1 with the boundary rank
        // weighted by upsilon
        double denom = 0;
        const std::size_t keep = std::min(J + 1, r.p[y].size());
        for (std::size_t k = 0; k < keep; ++k) {
            const double w = (k == J) ? rb.upsilon * r.p[y][k] : r.p[y][k];
            denom += std::pow(w, alpha);
        }
        for (std::size_t k = 0; k < keep; ++k) {
            const double w = (k == J) ? rb.upsilon * r.p[y][k] : r.p[y][k];
            const double q = std::pow(w, alpha) / denom;
            lp.at(r.order[y][k], y) = cap_from(2.0 * eps / (slack * q));
        }
    }
    return lp;
}

LambdaProfile lambda_profile_max(const JointDist& j, double rho, double eps,
                                 std::uint64_t M) {
    require(rho > 0, "rho must be positive");
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
    CondStats cs = cond_stats(j);
    const double supH = *std::max_element(cs.per_y_H.begin(), cs.per_y_H.end());
    if (!(double(M) > 2.0 + supH / eps)) {
        std::ostringstream os;
        os << "lambda_profile_max: M = " << M
           << " must exceed 2 + sup_y H(P_X|Y=y)/eps = " << 2.0 + supH / eps;
        throw domain_error(os.str());
    }
    const double alpha = 1.0 / (1.0 + rho);
    Ranked r = ranked_rows(j);
    const double slack = eps * (double(M) - 2.0) - supH;
    const double target = 1.0 - eps;

    LambdaProfile lp;
    lp.nx = j.nx();
    lp.ny = j.ny();
    lp.lambda.assign(j.nx() * j.ny(), kLambdaInf);
    for (std::size_t y = 0; y < r.order.size(); ++y) {
        double cum = 0;
        std::size_t Jy = 0;
        while (Jy < r.p[y].size() && below_target(cum + r.p[y][Jy], target))
            cum += r.p[y][Jy++];
        const double ups = std::min((target - cum) / r.p[y][Jy], 1.0);
        double denom = 0;
        for (std::size_t k = 0; k <= Jy; ++k) {
            const double w = (k == Jy) ? ups * r.p[y][k] : r.p[y][k];
            denom += std::pow(w, alpha);
        }
        for (std::size_t k = 0; k <= Jy; ++k) {
            const double w = (k == Jy) ? ups * r.p[y][k] : r.p[y][k];
            const double q = std::pow(w, alpha) / denom;
            lp.at(r.order[y][k], y) = cap_from(2.0 * eps / (slack * q));
        }
    }
    return lp;
}

std::vector<std::vector<std::size_t>> bl_partition(
    const std::vector<std::uint64_t>& lambda, const std::vector<std::size_t>& items,
    std::uint64_t M) {
    std::vector<std::size_t> order = items;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return lambda[a] < lambda[b];
    });
    std::vector<std::vector<std::size_t>> cells;
    std::vector<std::uint64_t> cap;  // lambda of a cell's first (smallest) item
    for (std::size_t s : order) {
        require(lambda[s] >= 1, "bl_partition: caps must be at least 1");
        bool placed = false;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (cells[c].size() < cap[c]) {
                cells[c].push_back(s);
                placed = true;
                break;
            }
        }
        if (!placed) {
            cells.push_back({s});
            cap.push_back(lambda[s]);
        }
    }
    if (cells.size() > M) {
        std::ostringstream os;
        os << "bl_partition: " << cells.size() << " cells exceed M = " << M;
        throw construction_error(os.str());
    }
    for (const auto& c : cells)
        for (std::size_t s : c)
            if (c.size() > lambda[s])
                throw construction_error("bl_partition: cell exceeds a member cap");
    return cells;
}

namespace {

TaskAssignment build_assignment(const JointDist& j, double rho, double eps,
                                std::uint64_t M, const LambdaProfile& lp,
                                const std::vector<std::size_t>& J_y,
                                const std::vector<double>& ups_y) {
    Ranked r = ranked_rows(j);
    TaskAssignment a;
    a.M = M;
    a.rho = rho;
    a.eps = eps;
    a.cells.resize(j.ny());
    a.erase.resize(j.ny());
    for (std::size_t y = 0; y < j.ny(); ++y) {
        const std::size_t J = J_y[y];
        const std::size_t keep = std::min(J + 1, r.p[y].size());
        std::vector<std::size_t> head_items;
        for (std::size_t k = 0; k < std::min(J, r.p[y].size()); ++k)
            head_items.push_back(r.order[y][k]);
        std::vector<std::uint64_t> lam(j.nx(), kLambdaInf);
        for (std::size_t x = 0; x < j.nx(); ++x) lam[x] = lp.at(x, y);
        // The boundary rank sits in its own cell so the erasure layer can
        // target it alone.
        const bool has_star = keep == J + 1;
        auto cells = bl_partition(lam, head_items, has_star && M > 0 ? M - 1 : M);
        for (auto& c : cells) {
            a.cells[y].push_back(std::move(c));
            a.erase[y].push_back(0.0);
        }
        if (has_star) {
            a.cells[y].push_back({r.order[y][J]});
            a.erase[y].push_back(1.0 - ups_y[y]);
        }
        if (a.cells[y].size() > M)
            throw construction_error("assignment: cell count exceeds M");
    }
    // Exact error probabilities over the erasure layer.
    double avg = 0, worst = 0;
    for (std::size_t y = 0; y < j.ny(); ++y) {
        const std::size_t J = J_y[y];
        double succ = 0;
        for (std::size_t k = 0; k < r.p[y].size(); ++k) {
            if (k < J)
                succ += r.p[y][k];
            else if (k == J)
                succ += ups_y[y] * r.p[y][k];
        }
        const double e = 1.0 - succ;
        avg += r.cond.y_marginal.p(y) * e;
        worst = std::max(worst, e);
    }
    a.error_avg = avg;
    a.error_max = worst;
    return a;
}

}  // namespace

TaskAssignment assignment_avg(const JointDist& j, double rho, double eps,
                              std::uint64_t M) {
    LambdaProfile lp = lambda_profile_avg(j, rho, eps, M);
    RankBudget rb = rank_budget(j, eps);
    std::vector<std::size_t> J_y(j.ny(), (std::size_t)rb.J);
    std::vector<double> ups_y(j.ny(), rb.upsilon);
    return build_assignment(j, rho, eps, M, lp, J_y, ups_y);
}

TaskAssignment assignment_max(const JointDist& j, double rho, double eps,
                              std::uint64_t M) {
    LambdaProfile lp = lambda_profile_max(j, rho, eps, M);
    Ranked r = ranked_rows(j);
    const double target = 1.0 - eps;
    std::vector<std::size_t> J_y;
    std::vector<double> ups_y;
    for (std::size_t y = 0; y < j.ny(); ++y) {
        double cum = 0;
        std::size_t Jy = 0;
        while (Jy < r.p[y].size() && below_target(cum + r.p[y][Jy], target))
            cum += r.p[y][Jy++];
        J_y.push_back(Jy);
        ups_y.push_back(std::min((target - cum) / r.p[y][Jy], 1.0));
    }
    return build_assignment(j, rho, eps, M, lp, J_y, ups_y);
}

RhoMoment task_moment(const TaskAssignment& a, const JointDist& j, double rho) {
    require(a.cells.size() == j.ny(), "task_moment: shape mismatch");
    CondDist cd = condition_on_y(j);
    double m = 0;
    for (std::size_t y = 0; y < j.ny(); ++y) {
        for (std::size_t c = 0; c < a.cells[y].size(); ++c) {
            const double keep = 1.0 - a.erase[y][c];
            if (keep <= 0) continue;
            const double size_pow = std::pow(double(a.cells[y][c].size()), rho);
            for (std::size_t x : a.cells[y][c])
                m += cd.y_marginal.p(y) * cd.rows[y].p(x) * keep * size_pow;
        }
    }
    return make_rho_moment(m, rho);
}

TaskCheckReport one_shot_task_check(const JointDist& j, double rho, double eps,
                                    std::uint64_t M) {
    const double alpha = 1.0 / (1.0 + rho);
    TaskCheckReport r{};
    r.h_smooth = kuzuoka_h(j, alpha, eps).value.value();
    r.h_check = check_h(j, alpha, eps).value();
    r.h_tilde = tilde_h(j, alpha, eps);
    CondStats cs = cond_stats(j);
    const double H = cs.H_cond;
    const double supH = *std::max_element(cs.per_y_H.begin(), cs.per_y_H.end());

    TaskAssignment av = assignment_avg(j, rho, eps, M);
    TaskAssignment mx = assignment_max(j, rho, eps, M);
    r.moment_avg_log = task_moment(av, j, rho).log_scaled.value_or_inf();
    r.moment_max_log = task_moment(mx, j, rho).log_scaled.value_or_inf();

    r.converse_avg = r.h_smooth - log2d(double(M));
    r.converse_max = r.h_check - log2d(double(M));
    const double plus = 1.0 / rho;  // (1/rho) log2 2
    r.direct_avg =
        std::max(0.0, r.h_smooth -
                          log2d(eps * (double(M) - 2.0) - H) + log2d(4.0 * (eps + H))) +
        plus;
    r.direct_max =
        std::max(0.0, r.h_check - log2d((eps * (double(M) - 2.0) - supH) / (4.0 * eps))) +
        plus;

    const double slack = 1e-9;
    r.avg_ok = r.moment_avg_log >= r.converse_avg - slack &&
               r.moment_avg_log <= r.direct_avg + slack;
    r.max_ok = r.moment_max_log >= r.converse_max - slack &&
               r.moment_max_log <= r.direct_max + slack;
    if (!r.avg_ok || !r.max_ok) {
        std::ostringstream os;
        os << "one_shot_task_check failed: avg " << r.moment_avg_log << " in ["
           << r.converse_avg << ", " << r.direct_avg << "]? max " << r.moment_max_log
           << " in [" << r.converse_max << ", " << r.direct_max << "]?";
        throw construction_error(os.str());
    }
    return r;
}

}  // namespace smren
