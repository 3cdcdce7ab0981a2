#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "smren/dist.hpp"
#include "smren/io.hpp"
#include "smren/rng.hpp"

using namespace smren;

TEST_CASE("make_dist validates mass and sign") {
    CHECK_NOTHROW(make_dist({0.5, 0.5}));
    CHECK_NOTHROW(make_dist({0.5, 0.3, 0.2}));
    CHECK_THROWS_AS(make_dist({0.5, 0.6}), domain_error);
    CHECK_THROWS_AS(make_dist({-0.1, 1.1}), domain_error);
    CHECK_THROWS_AS(make_dist({0.0, 0.0}), domain_error);
    Dist d = make_dist({0.5, 0.0, 0.5});
    CHECK(d.support() == std::vector<std::size_t>{0, 2});
}

TEST_CASE("decreasing rearrangement with index tie-break") {
    CHECK(decreasing_rearrangement(std::vector<double>{0.2, 0.5, 0.3}) ==
          std::vector<std::size_t>{1, 2, 0});
    CHECK(decreasing_rearrangement(std::vector<double>{0.5, 0.5}) ==
          std::vector<std::size_t>{0, 1});
    CHECK(decreasing_rearrangement(std::vector<double>{0.25, 0.25, 0.5}) ==
          std::vector<std::size_t>{2, 0, 1});
}

TEST_CASE("rearranged sequence is nonincreasing on random inputs") {
    for (int t = 0; t < 50; ++t) {
        CounterRng rng(7, t);
        std::vector<double> w(1 + (std::size_t)(rng.uniform() * 6));
        double s = 0;
        for (double& v : w) {
            v = rng.uniform();
            s += v;
        }
        for (double& v : w) v /= s;
        auto perm = decreasing_rearrangement(w);
        std::vector<bool> seen(w.size(), false);
        for (std::size_t i : perm) seen[i] = true;
        CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
        for (std::size_t i = 1; i < perm.size(); ++i)
            CHECK(w[perm[i - 1]] >= w[perm[i]]);
    }
}

TEST_CASE("iid_power on uniform and Bernoulli examples") {
    LevelDist u3 = iid_power(make_dist({0.5, 0.5}), 3);
    REQUIRE(u3.size() == 1);
    CHECK(u3.levels()[0].log2_prob == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(u3.levels()[0].count() == doctest::Approx(8.0).epsilon(1e-9));

    LevelDist b2 = iid_power(make_dist({0.75, 0.25}), 2);
    REQUIRE(b2.size() == 3);
    CHECK(b2.levels()[0].log2_prob == doctest::Approx(std::log2(0.5625)));
    CHECK(b2.levels()[0].count() == doctest::Approx(1.0));
    CHECK(b2.levels()[1].log2_prob == doctest::Approx(std::log2(0.1875)));
    CHECK(b2.levels()[1].count() == doctest::Approx(2.0));
    CHECK(b2.levels()[2].log2_prob == doctest::Approx(std::log2(0.0625)));
}

TEST_CASE("iid_power Bernoulli(0.3) n=50 against the binomial pmf") {
    LevelDist lv = iid_power(bernoulli(0.3), 50);
    REQUIRE(lv.size() == 51);
    CHECK(lv.total_mass() == doctest::Approx(1.0).epsilon(1e-7));
    // oracle: direct binomial coefficients
    double lc = 0;  // log2 C(50, k) built up incrementally
    std::map<double, double> expect;  // log2_prob -> count
    for (int k = 0; k <= 50; ++k) {
        const double lp = k * std::log2(0.3) + (50 - k) * std::log2(0.7);
        expect[lp] = std::exp2(lg2_binomial(50, k));
    }
    (void)lc;
    for (const Level& l : lv.levels()) {
        auto it = expect.lower_bound(l.log2_prob - 1e-9);
        REQUIRE(it != expect.end());
        CHECK(l.log2_prob == doctest::Approx(it->first).epsilon(1e-12));
        CHECK(l.count() == doctest::Approx(it->second).epsilon(1e-9));
    }
}

TEST_CASE("iid_power invariant under symbol permutation") {
    Dist a = make_dist({0.5, 0.3, 0.2});
    Dist b = make_dist({0.2, 0.5, 0.3});
    LevelDist la = iid_power(a, 6), lb = iid_power(b, 6);
    REQUIRE(la.size() == lb.size());
    for (std::size_t i = 0; i < la.size(); ++i) {
        CHECK(la.levels()[i].log2_prob ==
              doctest::Approx(lb.levels()[i].log2_prob).epsilon(1e-12));
        CHECK(la.levels()[i].log2_count ==
              doctest::Approx(lb.levels()[i].log2_count).epsilon(1e-9));
    }
}

TEST_CASE("iid_power respects the type cap") {
    CHECK_THROWS_AS(iid_power(make_dist({0.25, 0.25, 0.25, 0.25}), 100, 1000),
                    resource_error);
}

TEST_CASE("joint_iid_power: independence and base case") {
    // independent X,Y: every y-type carries the same conditional levels
    JointDist indep = make_joint({{0.35, 0.35}, {0.15, 0.15}});
    const int n = 4;
    TypeFamily tf = joint_iid_power(indep, n);
    LevelDist ref = iid_power(make_dist({0.7, 0.3}), n);
    CHECK(tf.total_mass() == doctest::Approx(1.0).epsilon(1e-6));
    for (const YType& t : tf.types) {
        REQUIRE(t.cond_levels.size() == ref.size());
        for (std::size_t i = 0; i < ref.size(); ++i) {
            CHECK(t.cond_levels.levels()[i].log2_prob ==
                  doctest::Approx(ref.levels()[i].log2_prob).epsilon(1e-9));
            CHECK(t.cond_levels.levels()[i].count() ==
                  doctest::Approx(ref.levels()[i].count()).epsilon(1e-9));
        }
    }

    TypeFamily tf1 = joint_iid_power(bss(0.1), 1);
    CHECK(tf1.types.size() == 2);
    for (const YType& t : tf1.types) CHECK(t.cond_levels.size() == 2);
}

TEST_CASE("joint_iid_power BSS(0.1) n=4 against sequence enumeration") {
    const double delta = 0.1;
    TypeFamily tf = joint_iid_power(bss(delta), 4);
    CHECK(tf.types.size() == 5);
    CHECK(tf.total_mass() == doctest::Approx(1.0).epsilon(1e-6));

    // oracle: walk all 2^4 x 2^4 sequence pairs and accumulate per y-weight
    // histograms of the conditional probabilities
    std::map<int, std::map<double, double>> hist;  // #ones(y) -> cond prob -> mass
    std::map<int, double> ymass;
    for (int ys = 0; ys < 16; ++ys) {
        int ones = __builtin_popcount((unsigned)ys);
        double py = std::pow(0.5, 4);
        ymass[ones] += py;
        for (int xs = 0; xs < 16; ++xs) {
            int agree = 4 - __builtin_popcount((unsigned)(xs ^ ys));
            double cond = std::pow(1 - delta, agree) * std::pow(delta, 4 - agree);
            hist[ones][cond] += cond;
        }
    }
    for (const YType& t : tf.types) {
        // match the type by its per-sequence probability (all y-types of BSS
        // share P_Y(y)=1/2, so every type has the same log2_prob)
        CHECK(t.log2_prob == doctest::Approx(-4.0).epsilon(1e-12));
        double mass = 0;
        for (const Level& l : t.cond_levels.levels()) mass += l.mass();
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        // conditional given a fixed y-sequence depends only on agreement count
        CHECK(t.cond_levels.size() == 5);
    }
}

TEST_CASE("value distributions: moments and iid sums") {
    ValueDist z = ValueDist::information_density(bernoulli(0.3));
    CHECK(z.mean() == doctest::Approx(0.3 * std::log2(1 / 0.3) + 0.7 * std::log2(1 / 0.7)));
    ValueDist z4 = iid_sum(z, 4);
    CHECK(z4.mean() == doctest::Approx(4 * z.mean()).epsilon(1e-12));
    CHECK(z4.variance() == doctest::Approx(4 * z.variance()).epsilon(1e-10));

    ValueDist c = ValueDist::from_atoms({ValueAtom{2.5, 0.0}});
    ValueDist c3 = iid_sum(c, 3);
    CHECK(c3.atoms().size() == 1);
    CHECK(c3.atoms()[0].value == doctest::Approx(7.5));
}

TEST_CASE("convolution matches a two-block product") {
    LevelDist a = iid_power(bernoulli(0.3), 2);
    LevelDist b = iid_power(bernoulli(0.3), 3);
    LevelDist ab = convolve(a, b);
    LevelDist ref = iid_power(bernoulli(0.3), 5);
    REQUIRE(ab.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
        CHECK(ab.levels()[i].log2_prob ==
              doctest::Approx(ref.levels()[i].log2_prob).epsilon(1e-10));
        CHECK(ab.levels()[i].count() ==
              doctest::Approx(ref.levels()[i].count()).epsilon(1e-9));
    }
}
