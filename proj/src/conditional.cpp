#include "smren/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "smren/smoothing.hpp"

namespace smren {

namespace {

void require_eps_open(double eps) {
    require(eps > 0.0 && eps < 1.0, "eps must lie in (0,1)");
}

// Per-y budget curve: sorted conditional masses, cumulative sums, partial
// power sums, and the value g(d) = S(d)^{1/alpha} entering the linear-domain
// objective sum_y P_Y(y) g_y(delta(y)).
struct RowCurve {
    std::vector<double> p;   // sorted descending, positive entries only
    std::vector<double> cum; // cum[k] = p[0] + ... + p[k-1]
    std::vector<double> sp;  // sp[k] = p[0]^a + ... + p[k-1]^a
    double alpha;

    explicit RowCurve(const Dist& row, double a) : alpha(a) {
        for (std::size_t i : row.support()) p.push_back(row.p(i));
        std::sort(p.begin(), p.end(), std::greater<double>());
        cum.resize(p.size() + 1, 0.0);
        sp.resize(p.size() + 1, 0.0);
        for (std::size_t k = 0; k < p.size(); ++k) {
            cum[k + 1] = cum[k] + p[k];
            sp[k + 1] = sp[k] + std::pow(p[k], alpha);
        }
    }

    // S(d) = sum over the head of p^alpha plus residual^alpha.
    double S(double d) const {
        if (d >= 1.0) return 0.0;
        const double target = 1.0 - d;
        std::size_t h = 0;
        while (h < p.size() && below_target(cum[h + 1], target)) ++h;
        const double residual = target - cum[h];
        return sp[h] + (residual > 0 ? std::pow(residual, alpha) : 0.0);
    }

    double g(double d) const { return std::pow(S(d), 1.0 / alpha); }

    // Candidate budgets where the head set changes: d = 1 - cum[k]. Between
    // consecutive candidates g is concave, so constrained minimizers sit at
    // candidates except for at most one y pinned by the mean constraint.
    std::vector<double> breakpoints() const {
        std::vector<double> bp;
        for (std::size_t k = 0; k <= p.size(); ++k) {
            double d = 1.0 - cum[k];
            if (d < 0) d = 0;
            if (d > 1) d = 1;
            bp.push_back(d);
        }
        std::sort(bp.begin(), bp.end());
        bp.erase(std::unique(bp.begin(), bp.end(),
                             [](double a, double b) { return std::fabs(a - b) < 1e-15; }),
                 bp.end());
        return bp;
    }
};

struct Objective {
    std::vector<RowCurve> rows;
    std::vector<double> w;  // P_Y
    double alpha;

    double eval(const std::vector<double>& d) const {
        double s = 0;
        for (std::size_t y = 0; y < rows.size(); ++y) s += w[y] * rows[y].g(d[y]);
        return s;
    }

    Ent to_bits(double obj) const {
        if (obj <= 0) return Ent::neg_inf();
        return Ent((alpha / (1.0 - alpha)) * log2d(obj));
    }
};

Objective make_objective(const JointDist& j, double alpha) {
    CondDist c = condition_on_y(j);
    Objective o;
    o.alpha = alpha;
    for (std::size_t y = 0; y < c.rows.size(); ++y) {
        o.rows.emplace_back(c.rows[y], alpha);
        o.w.push_back(c.y_marginal.p(y));
    }
    return o;
}

}  // namespace

DeltaProfile make_delta_profile(const std::vector<double>& delta, const Dist& y_marginal) {
    require(delta.size() == y_marginal.size(), "delta profile size mismatch");
    DeltaProfile p;
    p.delta = delta;
    p.mean = 0;
    for (std::size_t y = 0; y < delta.size(); ++y) {
        require(delta[y] >= 0.0 && delta[y] <= 1.0, "delta entries must lie in [0,1]");
        p.mean += y_marginal.p(y) * delta[y];
    }
    return p;
}

DeltaProfile constant_profile(double eps, const Dist& y_marginal) {
    return make_delta_profile(std::vector<double>(y_marginal.size(), eps), y_marginal);
}

Ent bar_h(const JointDist& j, double alpha, const DeltaProfile& delta) {
    require_alpha(alpha);
    CondDist c = condition_on_y(j);
    require(delta.delta.size() == c.rows.size(), "bar_h: profile size mismatch");
    std::vector<Ent> vals;
    for (std::size_t y = 0; y < c.rows.size(); ++y) {
        const double d = delta.delta[y];
        if (d == 1.0)
            vals.push_back(Ent::neg_inf());
        else
            vals.push_back(Ent(smooth_renyi(c.rows[y], alpha, d)));
    }
    return alpha_expectation(vals, c.y_marginal, alpha);
}

Ent check_h(const JointDist& j, double alpha, double eps) {
    require(eps >= 0.0 && eps < 1.0, "eps must lie in [0,1)");
    CondDist c = condition_on_y(j);
    return bar_h(j, alpha, constant_profile(eps, c.y_marginal));
}

Ent check_h_direct(const JointDist& j, double alpha, double eps) {
    require_alpha(alpha);
    require(eps >= 0.0 && eps < 1.0, "eps must lie in [0,1)");
    Objective o = make_objective(j, alpha);
    double s = 0;
    for (std::size_t y = 0; y < o.rows.size(); ++y) s += o.w[y] * o.rows[y].g(eps);
    return o.to_bits(s);
}

CondSmoothReport kuzuoka_h(const JointDist& j, double alpha, double eps,
                           std::size_t vertex_combo_cap) {
    require_alpha(alpha);
    require_eps_open(eps);
    Objective o = make_objective(j, alpha);
    const std::size_t ny = o.rows.size();

    std::vector<std::vector<double>> cand;
    std::size_t combos = 1;
    bool small = vertex_combo_cap > 0;
    for (const RowCurve& r : o.rows) {
        cand.push_back(r.breakpoints());
        if (combos > vertex_combo_cap / std::max<std::size_t>(cand.back().size(), 1))
            small = false;
        else
            combos *= cand.back().size();
    }

    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_d(ny, eps);
    auto consider = [&](const std::vector<double>& d) {
        const double v = o.eval(d);
        if (v < best) {
            best = v;
            best_d = d;
        }
    };

    // The constant profile is always feasible.
    consider(std::vector<double>(ny, eps));

    CondSmoothMethod method = CondSmoothMethod::lagrangian;
    if (small && ny >= 1) {
        // Exact enumeration: every y but one sits at a head-set breakpoint;
        // the free coordinate is pinned by the mean-eps constraint.
        std::vector<double> d(ny, 0.0);
        for (std::size_t free = 0; free < ny; ++free) {
            std::function<void(std::size_t, double)> rec = [&](std::size_t idx, double used) {
                if (used > eps + 1e-12) return;
                if (idx == ny) {
                    const double rem = eps - used;
                    const double df = rem / o.w[free];
                    if (df < -1e-12 || df > 1.0 + 1e-12) return;
                    d[free] = std::min(std::max(df, 0.0), 1.0);
                    consider(d);
                    return;
                }
                if (idx == free) {
                    rec(idx + 1, used);
                    return;
                }
                for (double b : cand[idx]) {
                    if (used + o.w[idx] * b > eps + 1e-12) break;
                    d[idx] = b;
                    rec(idx + 1, used + o.w[idx] * b);
                }
            };
            rec(0, 0.0);
        }
    } else {
        // Lagrangian sweep over the multiplier: per-y minimizers of
        // g_y(d) + lambda d sit at breakpoints; bisect lambda on the mean,
        // then repair the mean to exactly eps through one free coordinate.
        auto solve_lambda = [&](double lambda, std::vector<double>& d) {
            double mean = 0;
            for (std::size_t y = 0; y < ny; ++y) {
                double bv = std::numeric_limits<double>::infinity(), bd = 0;
                for (double b : cand[y]) {
                    const double v = o.rows[y].g(b) + lambda * b;
                    if (v < bv) {
                        bv = v;
                        bd = b;
                    }
                }
                d[y] = bd;
                mean += o.w[y] * bd;
            }
            return mean;
        };
        double lo = 0.0, hi = 1.0;
        std::vector<double> d(ny);
        while (solve_lambda(hi, d) > eps && hi < 1e18) hi *= 2;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (solve_lambda(mid, d) > eps)
                lo = mid;
            else
                hi = mid;
        }
        for (double lambda : {lo, hi}) {
            const double mean = solve_lambda(lambda, d);
            for (std::size_t free = 0; free < ny; ++free) {
                const double df = d[free] + (eps - mean) / o.w[free];
                if (df < -1e-12 || df > 1.0 + 1e-12) continue;
                std::vector<double> d2 = d;
                d2[free] = std::min(std::max(df, 0.0), 1.0);
                consider(d2);
            }
        }
    }

    // Grid arbiter for the sweep path only: the enumeration above is exact,
    // while the sweep can in principle land above the infimum.
    if (!small && ny <= 4) {
        const double dpv = kuzuoka_h_dp_grid(j, alpha, eps, 0.005);
        const Ent own = o.to_bits(best);
        if (own.is_finite() && own.value() > dpv + 0.02) method = CondSmoothMethod::dp_grid;
    }
    if (ny == 1) method = CondSmoothMethod::closed_form;  // budget pinned at eps

    CondSmoothReport rep;
    rep.value = o.to_bits(best);
    rep.profile = make_delta_profile(best_d, condition_on_y(j).y_marginal);
    rep.method = method;
    return rep;
}

double kuzuoka_h_dp_grid(const JointDist& j, double alpha, double eps, double step) {
    require_alpha(alpha);
    require_eps_open(eps);
    require(step > 0 && step <= 0.01, "dp_grid: step must lie in (0, 0.01]");
    Objective o = make_objective(j, alpha);
    const std::size_t ny = o.rows.size();
    require(ny <= 4, "dp_grid: |Y| too large");

    double wmin = 1.0;
    for (double w : o.w) wmin = std::min(wmin, w);
    const double unit = step * wmin;
    const std::size_t units = (std::size_t)std::ceil(1.0 / unit) + 1;
    require(units <= 2'000'000, "dp_grid: budget resolution too fine");

    std::vector<double> grid;
    for (int i = 0; i * step < 1.0 - 1e-12; ++i) grid.push_back(i * step);
    grid.push_back(1.0);

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(units + 1, inf), next(units + 1, inf);
    dp[0] = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
        std::fill(next.begin(), next.end(), inf);
        for (std::size_t b = 0; b <= units; ++b) {
            if (dp[b] == inf) continue;
            for (double d : grid) {
                const std::size_t db = (std::size_t)std::llround(o.w[y] * d / unit);
                if (b + db > units) continue;
                const double v = dp[b] + o.w[y] * o.rows[y].g(d);
                if (v < next[b + db]) next[b + db] = v;
            }
        }
        dp.swap(next);
    }
    double best = inf;
    for (std::size_t b = 0; b <= units; ++b) {
        const double mean = b * unit;
        if (std::fabs(mean - eps) <= step && dp[b] < best) best = dp[b];
    }
    require(best < inf, "dp_grid: no feasible budget in band");
    return (alpha / (1.0 - alpha)) * log2d(best);
}

double kuzuoka_h_joint_grid(const JointDist& j, double alpha, double eps, double step) {
    require_alpha(alpha);
    require(eps >= 0.0 && eps < 1.0, "eps must lie in [0,1)");
    require(j.nx() * j.ny() <= 6, "joint_grid: instance too large");
    require(step > 0, "joint_grid: step must be positive");

    struct Entry {
        std::size_t x, y;
        double p;
    };
    std::vector<Entry> ent;
    for (std::size_t x = 0; x < j.nx(); ++x)
        for (std::size_t y = 0; y < j.ny(); ++y)
            if (j.p(x, y) > 0) ent.push_back({x, y, j.p(x, y)});

    // Removal candidates per entry: multiples of step capped by p, plus the
    // exact cap so entries can be zeroed.
    std::vector<std::vector<double>> choices;
    for (const Entry& e : ent) {
        std::vector<double> c;
        for (double r = 0.0; r < e.p - 1e-15; r += step) c.push_back(r);
        c.push_back(e.p);
        choices.push_back(std::move(c));
    }

    std::vector<double> removal(ent.size(), 0.0);
    double best = std::numeric_limits<double>::infinity();
    std::function<void(std::size_t, double)> rec = [&](std::size_t idx, double removed) {
        if (removed > eps + 1e-12) return;
        if (idx == ent.size()) {
            if (eps > 0 && removed < eps - step - 1e-12) return;  // spend the budget
            double obj = 0;
            for (std::size_t y = 0; y < j.ny(); ++y) {
                double s = 0;
                for (std::size_t i = 0; i < ent.size(); ++i) {
                    if (ent[i].y != y) continue;
                    const double q = ent[i].p - removal[i];
                    if (q > 0) s += std::pow(q, alpha);
                }
                if (s > 0) obj += std::pow(s, 1.0 / alpha);
            }
            if (obj < best) best = obj;
            return;
        }
        for (double r : choices[idx]) {
            if (removed + r > eps + 1e-12) break;
            removal[idx] = r;
            rec(idx + 1, removed + r);
        }
        removal[idx] = 0;
    };
    rec(0, 0.0);
    require(best < std::numeric_limits<double>::infinity(), "joint_grid: no feasible point");
    return (alpha / (1.0 - alpha)) * log2d(best);
}

RankBudget rank_budget(const JointDist& j, double eps) {
    require(eps >= 0.0 && eps < 1.0, "eps must lie in [0,1)");
    CondDist c = condition_on_y(j);
    std::vector<std::vector<double>> sorted(c.rows.size());
    std::size_t max_m = 0;
    for (std::size_t y = 0; y < c.rows.size(); ++y) {
        for (std::size_t i : c.rows[y].support()) sorted[y].push_back(c.rows[y].p(i));
        std::sort(sorted[y].begin(), sorted[y].end(), std::greater<double>());
        max_m = std::max(max_m, sorted[y].size());
    }
    const double target = 1.0 - eps;
    auto avg_head = [&](std::size_t jj) {
        double a = 0;
        for (std::size_t y = 0; y < sorted.size(); ++y) {
            double cy = 0;
            for (std::size_t k = 0; k < std::min(jj, sorted[y].size()); ++k) cy += sorted[y][k];
            a += c.y_marginal.p(y) * cy;
        }
        return a;
    };
    std::size_t J = 0;
    while (J < max_m && below_target(avg_head(J + 1), target)) ++J;
    RankBudget rb;
    rb.J = double(J);
    rb.xi = target - avg_head(J);
    double denom = 0;
    for (std::size_t y = 0; y < sorted.size(); ++y)
        if (J < sorted[y].size()) denom += c.y_marginal.p(y) * sorted[y][J];
    if (denom <= 0) throw construction_error("rank_budget: empty boundary rank");
    rb.upsilon = std::min(rb.xi / denom, 1.0);
    return rb;
}

double tilde_h(const JointDist& j, double alpha, double eps) {
    require_alpha(alpha);
    require(eps >= 0.0 && eps < 1.0, "eps must lie in [0,1)");
    RankBudget rb = rank_budget(j, eps);
    const std::size_t J = (std::size_t)rb.J;
    CondDist c = condition_on_y(j);
    double outer = 0;
    for (std::size_t y = 0; y < c.rows.size(); ++y) {
        std::vector<double> s;
        for (std::size_t i : c.rows[y].support()) s.push_back(c.rows[y].p(i));
        std::sort(s.begin(), s.end(), std::greater<double>());
        double inner = 0;
        const double wy = c.y_marginal.p(y);
        for (std::size_t k = 0; k < std::min(J, s.size()); ++k)
            inner += std::pow(wy * s[k], alpha);
        if (J < s.size()) inner += std::pow(rb.upsilon * wy * s[J], alpha);
        if (inner > 0) outer += std::pow(inner, 1.0 / alpha);
    }
    return (alpha / (1.0 - alpha)) * log2d(outer);
}

double check_h_typefamily(const TypeFamily& tf, double alpha, double eps) {
    require_alpha(alpha);
    const double r = (1.0 - alpha) / alpha;
    Lse2Acc acc;
    for (const YType& t : tf.types) {
        const double h = smooth_renyi(t.cond_levels, alpha, eps);
        acc.add(t.log2_mass() + r * h);
    }
    return acc.total() / r;
}

namespace {

// Average cumulative mass of the top-j conditional ranks across y-types;
// piecewise linear and strictly increasing in j up to the full support.
double avg_head_mass_tf(const TypeFamily& tf, double jj) {
    double a = 0;
    for (const YType& t : tf.types) {
        double remaining = jj;
        double cy = 0;
        for (const Level& l : t.cond_levels.levels()) {
            const double cnt = l.count();
            const double take = std::min(remaining, cnt);
            if (take <= 0) break;
            cy += take * exp2d(l.log2_prob);
            remaining -= take;
        }
        a += exp2d(t.log2_mass()) * cy;
    }
    return a;
}

// Per-item log2 conditional probability at 1-based rank k inside a type, or
// NaN when the rank exceeds the support.
double rank_item_log2p(const YType& t, double k) {
    double boundary = 0;
    for (const Level& l : t.cond_levels.levels()) {
        boundary += l.count();
        if (k <= boundary * (1.0 + 1e-12) + 1e-9) return l.log2_prob;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

RankBudget rank_budget_typefamily(const TypeFamily& tf, double eps) {
    require(eps >= 0.0 && eps < 1.0, "eps must lie in [0,1)");
    const double target = 1.0 - eps;
    double max_m = 0;
    for (const YType& t : tf.types) {
        double m = 0;
        for (const Level& l : t.cond_levels.levels()) m += l.count();
        max_m = std::max(max_m, m);
    }
    // Largest integer J with average head mass below target, by bisection on
    // the increasing head-mass function (invariant: lo feasible, hi not).
    double lo = 0, hi = std::ceil(max_m);
    while (hi - lo > 1.0) {
        const double mid = std::floor(0.5 * (lo + hi));
        if (below_target(avg_head_mass_tf(tf, mid), target))
            lo = mid;
        else
            hi = mid;
    }
    const double J = lo;

    RankBudget rb;
    rb.J = J;
    rb.xi = target - avg_head_mass_tf(tf, J);
    double denom = 0;
    for (const YType& t : tf.types) {
        const double lp = rank_item_log2p(t, J + 1);
        if (!std::isnan(lp)) denom += exp2d(t.log2_mass() + lp);
    }
    if (denom <= 0) throw construction_error("rank_budget_typefamily: empty boundary rank");
    rb.upsilon = std::min(rb.xi / denom, 1.0);
    return rb;
}

double tilde_h_typefamily(const TypeFamily& tf, double alpha, double eps) {
    require_alpha(alpha);
    RankBudget rb = rank_budget_typefamily(tf, eps);
    Lse2Acc outer;
    for (const YType& t : tf.types) {
        // inner = sum over conditional ranks k <= J of p_k^alpha plus
        // (upsilon p_{J+1})^alpha, all in the log2 domain.
        Lse2Acc inner;
        double boundary = 0;
        for (const Level& l : t.cond_levels.levels()) {
            const double cnt = l.count();
            const double take = std::min(rb.J - boundary, cnt);
            // true takes are integers; 0.5 absorbs fp drift in the counts
            if (take > 0.5)
                inner.add(log2d(take) + alpha * l.log2_prob);
            if (take < cnt - 0.5) break;
            boundary += cnt;
        }
        const double lp = rank_item_log2p(t, rb.J + 1);
        if (!std::isnan(lp)) inner.add(alpha * (log2d(rb.upsilon) + lp));
        if (!inner.empty())
            outer.add(t.log2_count + t.log2_prob + inner.total() / alpha);
    }
    return (alpha / (1.0 - alpha)) * outer.total();
}

}  // namespace smren
