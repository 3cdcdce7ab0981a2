#include <cmath>

#include "doctest.h"
#include "smren/dist.hpp"
#include "smren/io.hpp"
#include "smren/measures.hpp"
#include "smren/rng.hpp"

using namespace smren;

namespace {

// independent oracle: direct summation over explicit probabilities
double shannon_direct(const std::vector<double>& p) {
    double h = 0;
    for (double v : p)
        if (v > 0) h += v * std::log2(1.0 / v);
    return h;
}

JointDist random_joint(std::uint64_t t, std::size_t nx, std::size_t ny) {
    CounterRng rng(99, t);
    std::vector<std::vector<double>> rows(nx, std::vector<double>(ny));
    double s = 0;
    for (auto& r : rows)
        for (double& v : r) {
            v = rng.uniform() + 1e-3;
            s += v;
        }
    for (auto& r : rows)
        for (double& v : r) v /= s;
    // round-trip through the mass gate
    double total = 0;
    for (auto& r : rows)
        for (double v : r) total += v;
    rows[0][0] += 1.0 - total;
    return make_joint(rows);
}

}  // namespace

TEST_CASE("source stats on uniform and skewed inputs") {
    SourceStats u = source_stats(make_dist({0.25, 0.25, 0.25, 0.25}));
    CHECK(u.H == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(u.V == doctest::Approx(0.0));
    CHECK(u.T == doctest::Approx(0.0));
    CHECK(u.H_inf == doctest::Approx(2.0));

    std::vector<double> p = {0.5, 0.3, 0.2};
    SourceStats s = source_stats(make_dist(p));
    CHECK(s.H == doctest::Approx(shannon_direct(p)).epsilon(1e-12));
    CHECK(s.H == doctest::Approx(1.48548).epsilon(1e-5));
    CHECK(s.H_inf <= s.H);

    // Bernoulli varentropy closed form: p(1-p) log^2((1-p)/p)
    for (double q : {0.1, 0.3, 0.45}) {
        SourceStats b = source_stats(bernoulli(q));
        const double lr = std::log2((1 - q) / q);
        CHECK(b.V == doctest::Approx(q * (1 - q) * lr * lr).epsilon(1e-12));
    }
}

TEST_CASE("source stats agree between dist and level inputs") {
    Dist d = make_dist({0.4, 0.3, 0.2, 0.1});
    SourceStats a = source_stats(d);
    SourceStats b = source_stats(LevelDist::from_dist(d));
    CHECK(a.H == doctest::Approx(b.H).epsilon(1e-12));
    CHECK(a.V == doctest::Approx(b.V).epsilon(1e-12));
    CHECK(a.T == doctest::Approx(b.T).epsilon(1e-12));
    SourceStats n3 = source_stats(iid_power(d, 3));
    CHECK(n3.H == doctest::Approx(3 * a.H).epsilon(1e-9));
    CHECK(n3.V == doctest::Approx(3 * a.V).epsilon(1e-9));
}

TEST_CASE("Renyi entropy: uniform, direct sum, and the alpha->1 limit") {
    CHECK(renyi_entropy(make_dist({0.25, 0.25, 0.25, 0.25}), 0.5) ==
          doctest::Approx(2.0).epsilon(1e-12));
    const double expect =
        2.0 * std::log2(std::sqrt(0.5) + std::sqrt(0.3) + std::sqrt(0.2));
    CHECK(renyi_entropy(make_dist({0.5, 0.3, 0.2}), 0.5) ==
          doctest::Approx(expect).epsilon(1e-12));
    CHECK(expect == doctest::Approx(1.53454).epsilon(1e-5));
    Dist d = make_dist({0.5, 0.3, 0.2});
    CHECK(renyi_entropy(d, 0.9999) ==
          doctest::Approx(source_stats(d).H).epsilon(1e-4));
    CHECK_THROWS_AS(renyi_entropy(d, 1.2), domain_error);
    CHECK_THROWS_AS(renyi_entropy(d, 0.0), domain_error);
}

TEST_CASE("Renyi entropy nonincreasing in alpha, strictly iff V > 0") {
    Dist skew = make_dist({0.5, 0.3, 0.2});
    Dist flat = make_dist({0.25, 0.25, 0.25, 0.25});
    double prev_s = 1e9, prev_f = 1e9;
    for (double a : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        const double hs = renyi_entropy(skew, a);
        const double hf = renyi_entropy(flat, a);
        CHECK(hs <= prev_s + 1e-12);
        if (prev_s < 1e8) CHECK(hs < prev_s - 1e-9);  // strict: V > 0
        CHECK(hf == doctest::Approx(2.0).epsilon(1e-12));
        prev_s = hs;
        prev_f = hf;
    }
    (void)prev_f;
}

TEST_CASE("alpha-expectation: constants, -infinity, and a two-point case") {
    Dist w = make_dist({0.5, 0.5});
    CHECK(alpha_expectation({Ent(1.7), Ent(1.7)}, w, 0.37).value() ==
          doctest::Approx(1.7).epsilon(1e-12));
    CHECK(alpha_expectation({Ent::neg_inf(), Ent::neg_inf()}, w, 0.5).is_neg_inf());
    // hand evaluation: alpha = 1/2 makes both prefactors one, so the value is
    // log2(0.5 * 2^1 + 0.5 * 2^2) = log2(3)
    CHECK(alpha_expectation({Ent(1.0), Ent(2.0)}, w, 0.5).value() ==
          doctest::Approx(std::log2(3.0)).epsilon(1e-12));
    // one -infinity branch contributes zero weight
    CHECK(alpha_expectation({Ent(1.0), Ent::neg_inf()}, w, 0.5).value() ==
          doctest::Approx(std::log2(0.5 * 2.0)).epsilon(1e-12));
}

TEST_CASE("Arimoto conditional entropy: degenerate and dual-path forms") {
    // X independent of Y
    JointDist indep = make_joint({{0.35, 0.35}, {0.15, 0.15}});
    CHECK(arimoto_conditional(indep, 0.5) ==
          doctest::Approx(renyi_entropy(make_dist({0.7, 0.3}), 0.5)).epsilon(1e-12));
    // |Y| = 1
    JointDist single = make_joint({{0.5}, {0.3}, {0.2}});
    CHECK(arimoto_conditional(single, 0.4) ==
          doctest::Approx(renyi_entropy(make_dist({0.5, 0.3, 0.2}), 0.4)).epsilon(1e-12));
    // the alpha-expectation route equals the direct double sum
    for (double a : {0.3, 0.5, 0.8}) {
        CHECK(arimoto_conditional(bes(0.2), a) ==
              doctest::Approx(arimoto_conditional_direct(bes(0.2), a)).epsilon(1e-9));
        CHECK(arimoto_conditional(bss(0.1), a) ==
              doctest::Approx(arimoto_conditional_direct(bss(0.1), a)).epsilon(1e-9));
    }
}

TEST_CASE("first-order chain orderings on the three binary sources") {
    for (double a : {0.3, 0.5, 0.8}) {
        // binary symmetric: left equality, right strict
        {
            const double H = cond_stats(bss(0.1)).H_cond;
            const double mix = h_alpha_mixture(bss(0.1), a);
            const double ari = arimoto_conditional(bss(0.1), a);
            CHECK(mix == doctest::Approx(H).epsilon(1e-9));
            CHECK(ari - mix >= 1e-6);
        }
        // binary erasure: left strict, right equality
        {
            const double H = cond_stats(bes(0.2)).H_cond;
            const double mix = h_alpha_mixture(bes(0.2), a);
            const double ari = arimoto_conditional(bes(0.2), a);
            CHECK(mix - H >= 1e-6);
            CHECK(ari == doctest::Approx(mix).epsilon(1e-9));
        }
        // symmetric erasure: strict chain
        {
            const double H = cond_stats(bses(0.1, 0.2)).H_cond;
            const double mix = h_alpha_mixture(bses(0.1, 0.2), a);
            const double ari = arimoto_conditional(bses(0.1, 0.2), a);
            CHECK(mix - H >= 1e-6);
            CHECK(ari - mix >= 1e-6);
        }
    }
}

TEST_CASE("conditional stats and the law of total variance") {
    CondStats b = cond_stats(bes(0.2));
    CHECK(b.V_cond == doctest::Approx(0.0));
    CHECK(b.U > 0);
    CHECK(b.U == doctest::Approx(0.16).epsilon(1e-12));

    CondStats s = cond_stats(bss(0.1));
    CHECK(s.U == doctest::Approx(s.V_cond).epsilon(1e-12));
    CHECK(s.U > 0);

    JointDist indep = make_joint({{0.35, 0.35}, {0.15, 0.15}});
    CondStats i = cond_stats(indep);
    const double vx = source_stats(make_dist({0.7, 0.3})).V;
    CHECK(i.U == doctest::Approx(vx).epsilon(1e-12));
    CHECK(i.V_cond == doctest::Approx(vx).epsilon(1e-12));

    for (std::uint64_t t = 0; t < 25; ++t) {
        JointDist j = random_joint(t, 3, 3);
        CondStats c = cond_stats(j);
        double between = 0;
        for (std::size_t y = 0; y < c.per_y_H.size(); ++y) {
            const double w = condition_on_y(j).y_marginal.p(y);
            between += w * (c.H_cond - c.per_y_H[y]) * (c.H_cond - c.per_y_H[y]);
        }
        CHECK(c.U == doctest::Approx(c.V_cond + between).epsilon(1e-9));
        CHECK(c.U >= c.V_cond - 1e-12);
    }
}
