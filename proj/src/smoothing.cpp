#include "smren/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "smren/asymptotics.hpp"
#include "smren/measures.hpp"

namespace smren {

namespace {

void require_eps(double eps) {
    require(eps >= 0.0 && eps < 1.0, "eps must lie in [0,1)");
}

}  // namespace

HeadSet head_set(const std::vector<double>& probs, double eps) {
    require_eps(eps);
    const double target = 1.0 - eps;
    auto order = decreasing_rearrangement(probs);
    HeadSet h;
    h.head_mass = 0.0;
    std::size_t i = 0;
    for (; i < order.size(); ++i) {
        const double p = probs[order[i]];
        if (p <= 0) break;  // zero-probability symbols never enter
        if (below_target(h.head_mass + p, target)) {
            h.head.push_back(order[i]);
            h.head_mass += p;
        } else {
            break;
        }
    }
    if (i >= order.size() || probs[order[i]] <= 0) {
        // fp drift consumed the whole support (possible only near eps = 0);
        // the smallest included symbol is the excluded one.
        if (h.head.empty())
            throw construction_error("head_set: no excluded symbol with positive mass");
        h.star = h.head.back();
        h.head.pop_back();
        h.star_prob = probs[h.star];
        h.head_mass -= h.star_prob;
        h.residual = target - h.head_mass;
        return h;
    }
    h.star = order[i];
    h.star_prob = probs[order[i]];
    h.residual = target - h.head_mass;
    return h;
}

SmoothingResult smoothing_set(const Dist& d, double eps) {
    HeadSet h = head_set(d.probs(), eps);
    SmoothingResult r;
    r.head_mass = h.head_mass;
    r.head_count = double(h.head.size());
    r.log2_head_count =
        h.head.empty() ? -std::numeric_limits<double>::infinity() : log2d(r.head_count);
    r.residual = h.residual;
    r.star_prob = h.star_prob;
    r.entropy = Ent(0.0);
    return r;
}

namespace {

// Shared head walk over a level distribution: which levels (and how many items
// of the boundary level) fall inside the head at parameter eps.
struct LevelHead {
    // (level index, log2 of included item count); the boundary level appears
    // with its partial count. The residual is carried in the log2 domain so
    // products with per-item probabilities below double range stay usable.
    std::vector<std::pair<std::size_t, double>> included;
    double head_mass = 0.0;
    double log2_residual = 0.0;
    double log2_star = 0.0;  // log2 of the first excluded item probability
};

LevelHead level_head(const LevelDist& d, double eps) {
    const double target = 1.0 - eps;
    LevelHead h;
    bool stopped = false;
    for (std::size_t li = 0; li < d.levels().size(); ++li) {
        const Level& l = d.levels()[li];
        const double item = exp2d(l.log2_prob);
        const double level_mass = l.mass();
        if (below_target(h.head_mass + level_mass, target)) {
            h.head_mass += level_mass;
            h.included.emplace_back(li, l.log2_count);
            continue;
        }
        // Boundary level: include the largest j with head_mass + j*item < target.
        const double r = target - h.head_mass;
        if (!(r / item <= 0x1p52)) {
            // The partial count is beyond integer (or double) resolution; the
            // residual is unresolvable and at most one item, so pin it there.
            h.included.emplace_back(li, log2d(r) - l.log2_prob);
            h.head_mass = target;
            h.log2_residual = l.log2_prob;
        } else {
            double j = std::ceil((r - 1e-12) / item) - 1.0;
            if (j < 0) j = 0;
            while (j > 0 && !below_target(h.head_mass + j * item, target)) j -= 1.0;
            if (j > 0) {
                h.head_mass += j * item;
                h.included.emplace_back(li, log2d(j));
            }
            const double residual = target - h.head_mass;
            if (residual <= 0)
                throw construction_error("level_head: nonpositive residual");
            h.log2_residual = log2d(residual);
        }
        h.log2_star = l.log2_prob;
        stopped = true;
        break;
    }
    if (!stopped) {
        // Rounding pushed the full mass below target (only possible at eps ~ 0);
        // back one item out of the last level.
        const std::size_t li = d.levels().size() - 1;
        const Level& last = d.levels()[li];
        const double item = exp2d(last.log2_prob);
        if (!h.included.empty() && h.included.back().first == li) {
            const double c = last.count() - 1.0;
            h.head_mass -= item;
            if (c > 0)
                h.included.back().second = log2d(c);
            else
                h.included.pop_back();
        }
        h.log2_star = last.log2_prob;
        const double residual = target - h.head_mass;
        if (residual <= 0)
            throw construction_error("level_head: nonpositive residual");
        h.log2_residual = log2d(residual);
    }
    return h;
}

}  // namespace

SmoothingResult smoothing_set(const LevelDist& d, double eps) {
    require_eps(eps);
    LevelHead h = level_head(d, eps);
    SmoothingResult r;
    r.head_mass = h.head_mass;
    Lse2Acc count_acc;
    for (const auto& [li, lc] : h.included) {
        (void)li;
        count_acc.add(lc);
    }
    r.log2_head_count = count_acc.total();
    r.head_count = exp2d(r.log2_head_count);
    r.residual = exp2d(h.log2_residual);
    r.star_prob = exp2d(h.log2_star);
    r.entropy = Ent(0.0);
    return r;
}

double smooth_renyi(const LevelDist& d, double alpha, double eps) {
    require_alpha(alpha);
    require_eps(eps);
    LevelHead h = level_head(d, eps);
    Lse2Acc s;
    for (const auto& [li, lc] : h.included)
        s.add(lc + alpha * d.levels()[li].log2_prob);
    s.add(alpha * h.log2_residual);
    return s.total() / (1.0 - alpha);
}

double smooth_renyi(const Dist& d, double alpha, double eps) {
    require_alpha(alpha);
    require_eps(eps);
    HeadSet h = head_set(d.probs(), eps);
    Lse2Acc s;
    for (std::size_t i : h.head) s.add(alpha * log2d(d.p(i)));
    s.add(alpha * log2d(h.residual));
    return s.total() / (1.0 - alpha);
}

double smooth_renyi_bruteforce(const Dist& d, double alpha, double eps, double grid_step) {
    require_alpha(alpha);
    require_eps(eps);
    require(grid_step > 0 && grid_step <= 0.01, "grid_step must lie in (0, 0.01]");
    auto support = d.support();
    require(support.size() <= 6, "smooth_renyi_bruteforce: support too large");

    // Candidate removals per symbol: multiples of grid_step capped by p, plus
    // the exact cap (full removal of the symbol).
    std::vector<std::vector<double>> choices;
    for (std::size_t i : support) {
        const double p = d.p(i);
        std::vector<double> c;
        for (double r = 0.0; r < p - 1e-15; r += grid_step) c.push_back(r);
        c.push_back(p);
        choices.push_back(std::move(c));
    }

    double best_raw = std::numeric_limits<double>::infinity();
    double best_boundary = std::numeric_limits<double>::infinity();
    std::vector<double> probs, removal(choices.size(), 0.0);
    for (std::size_t i : support) probs.push_back(d.p(i));

    std::function<void(std::size_t, double, double)> rec =
        [&](std::size_t idx, double removed, double partial) {
            if (removed > eps + 1e-12) return;
            if (idx == choices.size()) {
                best_raw = std::min(best_raw, partial);
                // project the leftover budget onto each symbol in turn so the
                // evaluated point spends exactly eps
                const double slack = eps - removed;
                if (slack <= 1e-15) {
                    best_boundary = std::min(best_boundary, partial);
                    return;
                }
                for (std::size_t i = 0; i < probs.size(); ++i) {
                    const double q = probs[i] - removal[i];
                    if (q < slack - 1e-15) continue;
                    const double adjusted = partial - std::pow(q, alpha) +
                                            (q - slack > 0 ? std::pow(q - slack, alpha) : 0.0);
                    best_boundary = std::min(best_boundary, adjusted);
                }
                return;
            }
            for (double r : choices[idx]) {
                if (removed + r > eps + 1e-12) break;
                removal[idx] = r;
                const double q = probs[idx] - r;
                rec(idx + 1, removed + r, partial + (q > 0 ? std::pow(q, alpha) : 0.0));
            }
            removal[idx] = 0;
        };
    rec(0, 0.0, 0.0);

    // The ball infimum spends the whole removal budget: the boundary points
    // must do at least as well as every interior point.
    if (best_boundary > best_raw + 1e-12) {
        std::ostringstream os;
        os << "smooth_renyi_bruteforce: interior point " << best_raw
           << " beats the budget boundary " << best_boundary;
        throw construction_error(os.str());
    }
    return log2d(best_boundary) / (1.0 - alpha);
}

CutoffParams cutoff_params(const ValueDist& z, double eps) {
    require_eps(eps);
    const auto& atoms = z.atoms();
    // tail[i] = P{Z > atoms[i].value}, accumulated from the top.
    std::vector<double> tail(atoms.size(), 0.0);
    double acc = 0.0;
    for (std::size_t i = atoms.size(); i-- > 0;) {
        tail[i] = acc;
        acc += atoms[i].prob();
    }
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (tail[i] <= eps) {
            const double beta = (eps - tail[i]) / atoms[i].prob();
            return CutoffParams{atoms[i].value, beta};
        }
    }
    throw construction_error("cutoff_params: no feasible threshold");
}

Ent cutoff_exp_moment(const ValueDist& z, double s, double eps) {
    require(s > 0, "cutoff_exp_moment: s must be positive");
    require_eps(eps);
    CutoffParams cp = cutoff_params(z, eps);
    Lse2Acc acc;
    for (const ValueAtom& a : z.atoms()) {
        if (a.value < cp.eta) {
            acc.add(a.log2_prob + s * a.value);
        } else if (a.value == cp.eta && cp.beta < 1.0) {
            const double keep = 1.0 - cp.beta;
            if (keep > 0) acc.add(a.log2_prob + log2d(keep) + s * a.value);
        }
    }
    if (acc.empty()) return Ent::neg_inf();
    return Ent(acc.total() / s);
}

CutoffExpectation cutoff_expectation(const ValueDist& z, double eps) {
    require_eps(eps);
    CutoffParams cp = cutoff_params(z, eps);
    double e = 0.0;
    for (const ValueAtom& a : z.atoms()) {
        if (a.value < cp.eta)
            e += a.prob() * a.value;
        else if (a.value == cp.eta)
            e += (1.0 - cp.beta) * a.prob() * a.value;
    }
    CutoffExpectation r;
    r.exact = e;
    r.asymptotic = (1.0 - eps) * z.mean() - std::sqrt(z.variance()) * gaussian_fg(eps);
    return r;
}

TiltedRow tilted_row(const Dist& row, double alpha, double delta) {
    require_alpha(alpha);
    require(delta >= 0.0 && delta <= 1.0, "tilted_row: delta must lie in [0,1]");
    TiltedRow t;
    if (delta == 1.0) {
        t.empty = true;
        t.q.assign(row.size(), 0.0);
        return t;
    }
    HeadSet h = head_set(row.probs(), delta);
    t.q.assign(row.size(), 0.0);
    t.head = h.head;
    t.star = h.star;
    t.residual = h.residual;
    double denom = 0.0;
    for (std::size_t i : h.head) denom += std::pow(row.p(i), alpha);
    denom += std::pow(h.residual, alpha);
    for (std::size_t i : h.head) t.q[i] = std::pow(row.p(i), alpha) / denom;
    t.q[h.star] = std::pow(h.residual, alpha) / denom;
    return t;
}

TiltedCond tilted_conditional(const CondDist& c, double alpha,
                              const std::vector<double>& delta) {
    require(delta.size() == c.rows.size(), "tilted_conditional: delta size mismatch");
    TiltedCond out;
    out.rows.reserve(c.rows.size());
    for (std::size_t y = 0; y < c.rows.size(); ++y)
        out.rows.push_back(tilted_row(c.rows[y], alpha, delta[y]));
    return out;
}

}  // namespace smren
