#include "smren/measures.hpp"

#include <algorithm>
#include <cmath>

namespace smren {

void require_alpha(double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
}

SourceStats source_stats(const Dist& d) {
    return source_stats(LevelDist::from_dist(d));
}

SourceStats source_stats(const LevelDist& d) {
    SourceStats s{0, 0, 0, 0};
    for (const Level& l : d.levels()) s.H += l.mass() * (-l.log2_prob);
    for (const Level& l : d.levels()) {
        const double dev = -l.log2_prob - s.H;
        s.V += l.mass() * dev * dev;
        s.T += l.mass() * std::fabs(dev) * dev * dev;
    }
    s.T = std::fabs(s.T);
    // Guard tiny negative rounding on degenerate inputs.
    s.V = std::max(s.V, 0.0);
    s.H_inf = -d.levels().front().log2_prob;
    return s;
}

double renyi_entropy(const LevelDist& d, double alpha) {
    require_alpha(alpha);
    Lse2Acc acc;
    for (const Level& l : d.levels()) acc.add(l.log2_count + alpha * l.log2_prob);
    return acc.total() / (1.0 - alpha);
}

double renyi_entropy(const Dist& d, double alpha) {
    return renyi_entropy(LevelDist::from_dist(d), alpha);
}

Ent alpha_expectation(const std::vector<Ent>& values, const Dist& weights, double alpha) {
    require_alpha(alpha);
    require(values.size() == weights.size(), "alpha_expectation: size mismatch");
    const double r = (1.0 - alpha) / alpha;
    Lse2Acc acc;
    for (std::size_t y = 0; y < values.size(); ++y) {
        if (weights.p(y) == 0 || values[y].is_neg_inf()) continue;  // exp(-inf) = 0
        acc.add(log2d(weights.p(y)) + r * values[y].value());
    }
    if (acc.empty()) return Ent::neg_inf();
    return Ent(acc.total() / r);
}

double arimoto_conditional(const JointDist& j, double alpha) {
    require_alpha(alpha);
    CondDist c = condition_on_y(j);
    std::vector<Ent> vals;
    vals.reserve(c.rows.size());
    for (const Dist& row : c.rows) vals.push_back(Ent(renyi_entropy(row, alpha)));
    return alpha_expectation(vals, c.y_marginal, alpha).value();
}

double arimoto_conditional_direct(const JointDist& j, double alpha) {
    require_alpha(alpha);
    Lse2Acc outer;
    for (std::size_t y = 0; y < j.ny(); ++y) {
        Lse2Acc inner;
        for (std::size_t x = 0; x < j.nx(); ++x) {
            if (j.p(x, y) > 0) inner.add(alpha * log2d(j.p(x, y)));
        }
        outer.add(inner.total() / alpha);
    }
    return (alpha / (1.0 - alpha)) * outer.total();
}

double h_alpha_mixture(const JointDist& j, double alpha) {
    require_alpha(alpha);
    CondDist c = condition_on_y(j);
    std::vector<Ent> vals;
    vals.reserve(c.rows.size());
    for (const Dist& row : c.rows) vals.push_back(Ent(source_stats(row).H));
    return alpha_expectation(vals, c.y_marginal, alpha).value();
}

CondStats cond_stats(const JointDist& j) {
    CondDist c = condition_on_y(j);
    CondStats s{0, 0, 0, {}, {}};
    for (std::size_t y = 0; y < c.rows.size(); ++y) {
        SourceStats row = source_stats(c.rows[y]);
        s.per_y_H.push_back(row.H);
        s.per_y_V.push_back(row.V);
        s.H_cond += c.y_marginal.p(y) * row.H;
        s.V_cond += c.y_marginal.p(y) * row.V;
    }
    for (std::size_t y = 0; y < c.rows.size(); ++y) {
        const Dist& row = c.rows[y];
        for (std::size_t x = 0; x < row.size(); ++x) {
            if (row.p(x) == 0) continue;
            const double dev = -log2d(row.p(x)) - s.H_cond;
            s.U += c.y_marginal.p(y) * row.p(x) * dev * dev;
        }
    }
    return s;
}

}  // namespace smren
