#include "smren/guessing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "smren/measures.hpp"
#include "smren/rng.hpp"

namespace smren {

namespace {

void require_eps_open(double eps) {
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
}

// Sorted positive conditional masses per y, in the fixed tie-break order.
struct SortedRows {
    CondDist cond;
    std::vector<std::vector<std::size_t>> order;   // rank -> symbol id
    std::vector<std::vector<double>> p;            // rank -> conditional mass
};

SortedRows sorted_rows(const JointDist& j) {
    SortedRows s;
    s.cond = condition_on_y(j);
    for (const Dist& row : s.cond.rows) {
        auto perm = decreasing_rearrangement(row);
        std::vector<std::size_t> ord;
        std::vector<double> pr;
        for (std::size_t i : perm) {
            if (row.p(i) <= 0) continue;
            ord.push_back(i);
            pr.push_back(row.p(i));
        }
        s.order.push_back(std::move(ord));
        s.p.push_back(std::move(pr));
    }
    return s;
}

// Sum of k^rho over 1..m (closed forms for integer rho, sweep otherwise).
double rank_power_prefix(double m, double rho) {
    if (m <= 0) return 0.0;
    if (rho == 1.0) return 0.5 * m * (m + 1.0);
    if (rho == 2.0) return m * (m + 1.0) * (2.0 * m + 1.0) / 6.0;
    long double acc = 0;
    const std::uint64_t mi = (std::uint64_t)std::llround(m);
    for (std::uint64_t k = 1; k <= mi; ++k) acc += std::pow((long double)k, (long double)rho);
    return (double)acc;
}

}  // namespace

RhoMoment make_rho_moment(double value, double rho) {
    RhoMoment m;
    m.value = value;
    m.log_scaled = value > 0 ? Ent(log2d(value) / rho) : Ent::neg_inf();
    return m;
}

OptimalStrategy optimal_strategy_avg(const JointDist& j, double eps, double rho,
                                     std::size_t rank_cap) {
    require_eps_open(eps);
    SortedRows s = sorted_rows(j);
    RankBudget rb = rank_budget(j, eps);
    const std::size_t J = (std::size_t)rb.J;

    OptimalStrategy out;
    out.strategy.order = s.order;
    for (std::size_t y = 0; y < s.p.size(); ++y) {
        std::vector<double> pol(s.p[y].size(), 1.0);
        for (std::size_t k = 0; k < s.p[y].size(); ++k) {
            if (k < J)
                pol[k] = 0.0;
            else if (k == J)
                pol[k] = 1.0 - rb.upsilon;
        }
        out.strategy.policy.push_back(std::move(pol));
    }
    out.limits.criterion = ErrorCriterion::average;
    out.limits.J = rb.J;
    out.limits.xi = rb.xi;
    out.limits.upsilon = rb.upsilon;
    out.limits.moment = guess_moment(out.strategy, j, rho, rank_cap);
    out.limits.error_avg = guess_error_avg(out.strategy, j);
    out.limits.error_max = guess_error_max(out.strategy, j);
    return out;
}

OptimalStrategy optimal_strategy_max(const JointDist& j, double eps, double rho,
                                     std::size_t rank_cap) {
    require_eps_open(eps);
    SortedRows s = sorted_rows(j);
    OptimalStrategy out;
    out.strategy.order = s.order;
    out.limits.criterion = ErrorCriterion::maximum;
    const double target = 1.0 - eps;
    for (std::size_t y = 0; y < s.p.size(); ++y) {
        const auto& p = s.p[y];
        double cum = 0;
        std::size_t Jy = 0;
        while (Jy < p.size() && below_target(cum + p[Jy], target)) cum += p[Jy++];
        const double xi = target - cum;
        const double ups = std::min(xi / p[Jy], 1.0);
        std::vector<double> pol(p.size(), 1.0);
        for (std::size_t k = 0; k < Jy; ++k) pol[k] = 0.0;
        pol[Jy] = 1.0 - ups;
        out.strategy.policy.push_back(std::move(pol));
        out.limits.J_y.push_back(double(Jy));
        out.limits.xi_y.push_back(xi);
        out.limits.upsilon_y.push_back(ups);
    }
    out.limits.moment = guess_moment(out.strategy, j, rho, rank_cap);
    out.limits.error_avg = guess_error_avg(out.strategy, j);
    out.limits.error_max = guess_error_max(out.strategy, j);
    return out;
}

RhoMoment guess_moment(const GuessStrategy& s, const JointDist& j, double rho,
                       std::size_t rank_cap) {
    require(rho > 0, "guess_moment: rho must be positive");
    SortedRows rows = sorted_rows(j);
    std::size_t total_ranks = 0;
    for (const auto& o : s.order) total_ranks += o.size();
    if (total_ranks > rank_cap) {
        std::ostringstream os;
        os << "guess_moment: " << total_ranks << " ranks exceed cap " << rank_cap;
        throw resource_error(os.str());
    }
    double m = 0;
    for (std::size_t y = 0; y < s.order.size(); ++y) {
        const double wy = rows.cond.y_marginal.p(y);
        const Dist& row = rows.cond.rows[y];
        double surv = 1.0;
        for (std::size_t k = 0; k < s.order[y].size(); ++k) {
            surv *= 1.0 - (k < s.policy[y].size() ? s.policy[y][k] : 1.0);
            if (surv <= 0) break;
            m += wy * row.p(s.order[y][k]) * surv * std::pow(double(k + 1), rho);
        }
    }
    return make_rho_moment(m, rho);
}

double guess_error_avg(const GuessStrategy& s, const JointDist& j) {
    SortedRows rows = sorted_rows(j);
    double succ = 0;
    for (std::size_t y = 0; y < s.order.size(); ++y) {
        const double wy = rows.cond.y_marginal.p(y);
        const Dist& row = rows.cond.rows[y];
        double surv = 1.0;
        for (std::size_t k = 0; k < s.order[y].size(); ++k) {
            surv *= 1.0 - (k < s.policy[y].size() ? s.policy[y][k] : 1.0);
            if (surv <= 0) break;
            succ += wy * row.p(s.order[y][k]) * surv;
        }
    }
    return 1.0 - succ;
}

double guess_error_max(const GuessStrategy& s, const JointDist& j) {
    SortedRows rows = sorted_rows(j);
    double worst = 0;
    for (std::size_t y = 0; y < s.order.size(); ++y) {
        const Dist& row = rows.cond.rows[y];
        double surv = 1.0, succ = 0;
        for (std::size_t k = 0; k < s.order[y].size(); ++k) {
            surv *= 1.0 - (k < s.policy[y].size() ? s.policy[y][k] : 1.0);
            if (surv <= 0) break;
            succ += row.p(s.order[y][k]) * surv;
        }
        worst = std::max(worst, 1.0 - succ);
    }
    return worst;
}

RhoMoment optimal_guess_moment_avg(const TypeFamily& tf, double eps, double rho,
                                   std::size_t rank_cap) {
    require_eps_open(eps);
    require(rho > 0, "rho must be positive");
    RankBudget rb = rank_budget_typefamily(tf, eps);
    if (rb.J + 1 > double(rank_cap)) {
        std::ostringstream os;
        os << "optimal_guess_moment_avg: rank budget " << rb.J + 1 << " exceeds cap "
           << rank_cap;
        throw resource_error(os.str());
    }
    double m = 0;
    for (const YType& t : tf.types) {
        const double mass = exp2d(t.log2_mass());
        double boundary = 0;
        double contrib = 0;
        for (const Level& l : t.cond_levels.levels()) {
            const double cnt = l.count();
            const double take = std::min(rb.J - boundary, cnt);
            if (take > 0.5) {
                // ranks boundary+1 .. boundary+take at per-item mass 2^log2_prob
                const double lo = boundary, hi = boundary + take;
                contrib += exp2d(l.log2_prob) *
                           (rank_power_prefix(hi, rho) - rank_power_prefix(lo, rho));
            }
            if (take < cnt - 0.5) break;
            boundary += cnt;
        }
        // partially surviving boundary rank J+1
        double bcount = 0;
        for (const Level& l : t.cond_levels.levels()) {
            bcount += l.count();
            if (rb.J + 1 <= bcount * (1.0 + 1e-12) + 1e-9) {
                contrib += rb.upsilon * exp2d(l.log2_prob) * std::pow(rb.J + 1.0, rho);
                break;
            }
        }
        m += mass * contrib;
    }
    return make_rho_moment(m, rho);
}

GuessCheckReport one_shot_guess_check(const JointDist& j, double rho, double eps) {
    require(rho > 0, "rho must be positive");
    require_eps_open(eps);
    const double alpha = 1.0 / (1.0 + rho);
    GuessCheckReport r{};

    CondSmoothReport ks = kuzuoka_h(j, alpha, eps);
    r.h_smooth = ks.value.value();
    r.h_check = check_h(j, alpha, eps).value();
    CondStats cs = cond_stats(j);
    r.H_cond = cs.H_cond;
    r.sup_y_H = *std::max_element(cs.per_y_H.begin(), cs.per_y_H.end());

    OptimalStrategy avg = optimal_strategy_avg(j, eps, rho);
    OptimalStrategy mx = optimal_strategy_max(j, eps, rho);
    r.moment_avg_log = avg.limits.moment.log_scaled.value();
    r.moment_max_log = mx.limits.moment.log_scaled.value();
    r.lower_avg = r.h_smooth - log2d(1.0 + r.H_cond / eps);
    r.lower_max = r.h_check - log2d(1.0 + r.sup_y_H / eps);

    const double slack = 1e-9;
    r.avg_ok = (r.moment_avg_log <= r.h_smooth + slack) &&
               (r.moment_avg_log >= r.lower_avg - slack);
    r.max_ok = (r.moment_max_log <= r.h_check + slack) &&
               (r.moment_max_log >= r.lower_max - slack);
    if (!r.avg_ok || !r.max_ok) {
        std::ostringstream os;
        os << "one_shot_guess_check failed: avg moment " << r.moment_avg_log << " in ["
           << r.lower_avg << ", " << r.h_smooth << "]? max moment " << r.moment_max_log
           << " in [" << r.lower_max << ", " << r.h_check << "]?";
        throw construction_error(os.str());
    }
    return r;
}

SimResult simulate(const GuessStrategy& s, const JointDist& j, double rho,
                   std::uint64_t trials, std::uint64_t seed) {
    require(trials >= 1, "simulate: trials must be positive");
    // Flattened joint CDF in (x, y) row-major order for inverse sampling.
    std::vector<double> cdf;
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    double acc = 0;
    for (std::size_t x = 0; x < j.nx(); ++x)
        for (std::size_t y = 0; y < j.ny(); ++y) {
            if (j.p(x, y) <= 0) continue;
            acc += j.p(x, y);
            cdf.push_back(acc);
            cells.emplace_back(x, y);
        }

    // rank_of[y][x]
    std::vector<std::vector<std::size_t>> rank_of(s.order.size());
    for (std::size_t y = 0; y < s.order.size(); ++y) {
        rank_of[y].assign(j.nx(), 0);
        for (std::size_t k = 0; k < s.order[y].size(); ++k) rank_of[y][s.order[y][k]] = k + 1;
    }

    double sum_m = 0, sum_m2 = 0, errs = 0;
    for (std::uint64_t t = 0; t < trials; ++t) {
        CounterRng rng(seed, t);
        const double u = rng.uniform();
        const std::size_t cell =
            std::lower_bound(cdf.begin(), cdf.end(), u * acc) - cdf.begin();
        const auto [x, y] = cells[std::min(cell, cells.size() - 1)];
        const std::size_t rank = rank_of[y][x];
        double g = 0;
        bool gave_up = false;
        for (std::size_t k = 1; k <= rank; ++k) {
            const double pk = (k - 1 < s.policy[y].size()) ? s.policy[y][k - 1] : 1.0;
            if (pk > 0 && rng.uniform() < pk) {
                gave_up = true;
                break;
            }
        }
        if (!gave_up) g = double(rank);
        const double gm = g > 0 ? std::pow(g, rho) : 0.0;
        sum_m += gm;
        sum_m2 += gm * gm;
        if (g == 0) errs += 1;
    }
    SimResult r;
    r.trials = trials;
    r.moment = sum_m / double(trials);
    r.error_rate = errs / double(trials);
    const double var_m =
        std::max(0.0, sum_m2 / double(trials) - r.moment * r.moment);
    r.stderr_moment = std::sqrt(var_m / double(trials));
    r.stderr_error = std::sqrt(r.error_rate * (1.0 - r.error_rate) / double(trials));
    return r;
}

double bruteforce_best_moment(const Dist& d, double rho, double eps, double step) {
    auto support = d.support();
    require(support.size() <= 3, "bruteforce_best_moment: support too large");
    std::vector<double> p;
    for (std::size_t i : support) p.push_back(d.p(i));
    std::sort(p.begin(), p.end());
    double best = std::numeric_limits<double>::infinity();
    const int steps = (int)std::llround(1.0 / step);
    std::vector<int> s(p.size());
    // all orderings x monotone survival grids
    std::vector<std::size_t> perm(p.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
        std::function<void(std::size_t, int)> rec = [&](std::size_t idx, int prev) {
            if (idx == p.size()) {
                double err = 1.0, mom = 0;
                for (std::size_t k = 0; k < p.size(); ++k) {
                    const double sv = s[k] * step;
                    err -= p[perm[k]] * sv;
                    mom += p[perm[k]] * sv * std::pow(double(k + 1), rho);
                }
                if (err <= eps + 1e-12 && mom < best) best = mom;
                return;
            }
            for (int v = 0; v <= prev; ++v) {
                s[idx] = v;
                rec(idx + 1, v);
            }
        };
        rec(0, steps);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace smren
