#include "smren/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "smren/asymptotics.hpp"
#include "smren/coding.hpp"
#include "smren/conditional.hpp"
#include "smren/dist.hpp"
#include "smren/guessing.hpp"
#include "smren/io.hpp"
#include "smren/measures.hpp"
#include "smren/oneshot.hpp"
#include "smren/rng.hpp"
#include "smren/smoothing.hpp"
#include "smren/tasks.hpp"

namespace smren {

namespace {

struct Ctx {
    SuiteResult* out;
    void add(const std::string& name, bool pass, const std::string& detail) {
        out->checks.push_back({name, pass, detail});
        out->pass = out->pass && pass;
    }
    template <typename F>
    void guarded(const std::string& name, F&& f) {
        try {
            f();
        } catch (const std::exception& e) {
            add(name, false, std::string("exception: ") + e.what());
        }
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

std::vector<Dist> koga_corpus() {
    return {
        make_dist({0.5, 0.5}),
        make_dist({0.7, 0.3}),
        make_dist({0.9, 0.1}),
        make_dist({0.5, 0.3, 0.2}),
        make_dist({0.6, 0.3, 0.1}),
        make_dist({1.0 / 3, 1.0 / 3, 1.0 / 3}),
        make_dist({0.4, 0.3, 0.2, 0.1}),
        make_dist({0.25, 0.25, 0.25, 0.25}),
        make_dist({0.7, 0.1, 0.1, 0.1}),
        make_dist({0.4, 0.4, 0.1, 0.1}),
        make_dist({0.55, 0.25, 0.15, 0.05}),
        make_dist({0.8, 0.1, 0.05, 0.05}),
    };
}

std::vector<JointDist> guess_corpus() {
    return {
        make_joint({{0.5}, {0.3}, {0.2}}),
        bss(0.1),
        bes(0.2),
        bses(0.1, 0.2),
        make_joint({{0.4, 0.1}, {0.2, 0.3}}),
    };
}

std::vector<int> n_grid(int lo, int hi, int step) {
    std::vector<int> g;
    for (int n = lo; n <= hi; n += step) g.push_back(n);
    return g;
}

// --- suite: koga (criterion 1) -------------------------------------------

void suite_koga(Ctx& c, bool) {
    const double step = 0.005;
    for (const Dist& d : koga_corpus()) {
        for (double eps : {0.1, 0.3, 0.6}) {
            for (double alpha : {0.3, 0.5, 0.8}) {
                std::ostringstream name;
                name << "C1 koga |X|=" << d.size() << " eps=" << eps << " alpha=" << alpha;
                c.guarded(name.str(), [&] {
                    const double closed = smooth_renyi(d, alpha, eps);
                    const double oracle = smooth_renyi_bruteforce(d, alpha, eps, step);
                    const bool ok = closed <= oracle + 1e-9 && closed >= oracle - 0.02;
                    c.add(name.str(), ok,
                          "closed=" + fmt(closed) + " oracle=" + fmt(oracle));
                });
            }
        }
    }
}

// --- suite: kuzuoka (criterion 2) -----------------------------------------

void suite_kuzuoka(Ctx& c, bool) {
    std::vector<JointDist> joints = {
        make_joint({{0.4, 0.1}, {0.2, 0.3}}),
        make_joint({{0.25, 0.25}, {0.25, 0.25}}),
        make_joint({{0.3, 0.1}, {0.2, 0.15}, {0.05, 0.2}}),
    };
    const std::vector<std::pair<double, double>> pairs = {
        {0.3, 0.1}, {0.5, 0.2}, {0.8, 0.3}};
    for (std::size_t ji = 0; ji < joints.size(); ++ji) {
        const JointDist& j = joints[ji];
        for (auto [alpha, eps] : pairs) {
            std::ostringstream name;
            name << "C2 kuzuoka joint#" << ji << " alpha=" << alpha << " eps=" << eps;
            c.guarded(name.str(), [&] {
                CondSmoothReport ks = kuzuoka_h(j, alpha, eps);
                const double kv = ks.value.value();
                const double dp = kuzuoka_h_dp_grid(j, alpha, eps, 0.001);
                const double grid_step = j.nx() * j.ny() <= 4 ? 0.005 : 0.01;
                const double jg = kuzuoka_h_joint_grid(j, alpha, eps, grid_step);
                const double ch = check_h(j, alpha, eps).value();
                const bool ok = std::fabs(kv - dp) <= 0.02 && jg >= kv - 1e-9 &&
                                kv <= ch + 1e-9;
                c.add(name.str(), ok,
                      "kuzuoka=" + fmt(kv) + " dp=" + fmt(dp) + " joint=" + fmt(jg) +
                          " check=" + fmt(ch));
            });
        }
    }
}

// --- suite: clt (criterion 3) ----------------------------------------------

void suite_clt(Ctx& c, bool quick) {
    const Dist d = bernoulli(0.3);
    const double alpha = 0.5;
    auto grid = n_grid(20, quick ? 200 : 400, 20);
    for (double eps : {0.1, 0.5, 0.9}) {
        std::ostringstream name;
        name << "C3 third-order fit eps=" << eps;
        c.guarded(name.str(), [&] {
            ResidualSweep sw = residual_sweep(d, alpha, eps, grid);
            Expansion e = expansion_smooth_renyi(source_stats(d), alpha, eps);
            const double ablated = sw.logn_slope + e.third;
            const bool ok =
                std::fabs(sw.logn_slope) <= 0.1 && std::fabs(ablated - (-1.0)) <= 0.1;
            c.add(name.str(), ok,
                  "slope=" + fmt(sw.logn_slope) + " full=" + fmt(sw.logn_slope_full) +
                      " ablated=" + fmt(ablated));
        });
    }
    // Extended-range verification: the empirical log2(n) coefficient of
    // (exact - n H + sqrt(n V) quantile) converges to -1/(2(1-alpha)) once the
    // O(1) term has equilibrated; the short window above carries its ~1/sqrt(n)
    // transient, which is what the C3 slopes measure.
    c.guarded("X3 third-order coefficient, extended range", [&] {
        SourceStats st = source_stats(d);
        std::vector<int> big;
        for (int n = quick ? 16384 : 65536; n <= (quick ? 262144 : 1048576); n *= 2)
            big.push_back(n);
        bool ok = true;
        std::ostringstream detail;
        for (double eps : {0.1, 0.5, 0.9}) {
            std::vector<double> logn, two_term_resid;
            for (int n : big) {
                const double ex = smooth_renyi(iid_power(d, n, 2'000'000), alpha, eps);
                const double two =
                    n * st.H - std::sqrt(n * st.V) * gaussian_quantile(eps);
                logn.push_back(std::log2(double(n)));
                two_term_resid.push_back(ex - two);
            }
            const double coeff = linear_fit(logn, two_term_resid).slope;
            detail << " eps=" << eps << ":" << fmt(coeff);
            ok = ok && std::fabs(coeff - (-1.0)) <= 0.06;
        }
        c.add("X3 third-order coefficient, extended range", ok,
              "target -1.0, fitted" + detail.str());
    });
}

// --- suite: cutoff (criterion 4) --------------------------------------------

void suite_cutoff(Ctx& c, bool quick) {
    const ValueDist z = ValueDist::information_density(bernoulli(0.3));
    c.guarded("C4 cutoff-cgf fit", [&] {
        ResidualSweep sw = clt_mgf_sweep(z, 0.5, 0.1, n_grid(20, quick ? 200 : 400, 20));
        const bool ok = std::fabs(sw.logn_slope) <= 0.1;
        c.add("C4 cutoff-cgf fit", ok,
              "slope=" + fmt(sw.logn_slope) + " full=" + fmt(sw.logn_slope_full));
    });
    c.guarded("X4 cutoff-cgf coefficient, extended range", [&] {
        const double s = 0.5, eps = 0.1;
        const double ez = z.mean(), vz = z.variance();
        std::vector<double> logn, two_term_resid;
        for (int n = quick ? 16384 : 65536; n <= (quick ? 262144 : 1048576); n *= 2) {
            const double ex = cutoff_exp_moment(iid_sum(z, n, 2'000'000), s, eps).value();
            const double two = n * ez - std::sqrt(n * vz) * gaussian_quantile(eps);
            logn.push_back(std::log2(double(n)));
            two_term_resid.push_back(ex - two);
        }
        const double coeff = linear_fit(logn, two_term_resid).slope;
        const bool ok = std::fabs(coeff - (-1.0)) <= 0.06;
        c.add("X4 cutoff-cgf coefficient, extended range", ok,
              "target -1.0, fitted " + fmt(coeff));
    });
}

// --- suite: guess (criteria 5 and 6) ----------------------------------------

void suite_guess(Ctx& c, bool quick) {
    for (std::size_t si = 0; si < guess_corpus().size(); ++si) {
        const JointDist j = guess_corpus()[si];
        for (double rho : {0.5, 1.0, 2.0}) {
            for (double eps : {0.1, 0.2, 0.4}) {
                std::ostringstream name;
                name << "C5 sandwich source#" << si << " rho=" << rho << " eps=" << eps;
                c.guarded(name.str(), [&] {
                    OptimalStrategy avg = optimal_strategy_avg(j, eps, rho);
                    OptimalStrategy mx = optimal_strategy_max(j, eps, rho);
                    const bool err_ok =
                        std::fabs(avg.limits.error_avg - eps) <= 1e-12 &&
                        std::fabs(mx.limits.error_max - eps) <= 1e-12;
                    GuessCheckReport rep = one_shot_guess_check(j, rho, eps);
                    c.add(name.str(), err_ok && rep.avg_ok && rep.max_ok,
                          "avg_moment=" + fmt(rep.moment_avg_log) +
                              " in [" + fmt(rep.lower_avg) + "," + fmt(rep.h_smooth) +
                              "] err_avg=" + fmt(avg.limits.error_avg) +
                              " err_max=" + fmt(mx.limits.error_max));
                });
            }
        }
    }
    c.guarded("C5 bruteforce optimality", [&] {
        const Dist d = make_dist({0.5, 0.3, 0.2});
        bool ok = true;
        std::ostringstream detail;
        for (double rho : {0.5, 1.0, 2.0}) {
            for (double eps : {0.1, 0.2, 0.4}) {
                JointDist j = make_joint({{0.5}, {0.3}, {0.2}});
                OptimalStrategy opt = optimal_strategy_avg(j, eps, rho);
                const double bf = bruteforce_best_moment(d, rho, eps, 0.01);
                if (opt.limits.moment.value > bf + 0.05) {
                    ok = false;
                    detail << " beat at rho=" << rho << " eps=" << eps;
                }
            }
        }
        c.add("C5 bruteforce optimality", ok, "grid slack 0.05" + detail.str());
    });

    // Criterion 6: first-order brackets on product sources.
    struct Src {
        const char* name;
        JointDist j;
    };
    std::vector<Src> sources;
    sources.push_back({"bss(0.1)", bss(0.1)});
    sources.push_back({"bes(0.2)", bes(0.2)});
    const double rho = 1.0, eps = 0.2, alpha = 1.0 / (1.0 + rho);
    for (const Src& s : sources) {
        std::ostringstream name;
        name << "C6 avg bracket " << s.name;
        c.guarded(name.str(), [&] {
            CondStats cs = cond_stats(s.j);
            std::vector<double> dev_scaled;
            std::vector<int> used;
            bool envelope_ok = true;
            for (int n = 4; n <= (quick ? 24 : 40); n += 4) {
                TypeFamily tf;
                RhoMoment m;
                try {
                    tf = joint_iid_power(s.j, n);
                    m = optimal_guess_moment_avg(tf, eps, rho);
                } catch (const resource_error&) {
                    break;
                }
                const double mlog = m.log_scaled.value();
                const double tilde = tilde_h_typefamily(tf, alpha, eps);
                const double logterm = log2d(1.0 + n * cs.H_cond / eps);
                envelope_ok = envelope_ok && mlog <= tilde + 1e-9 &&
                              mlog >= tilde - 2.0 * logterm - 1e-9;
                dev_scaled.push_back(std::sqrt(double(n)) *
                                     std::fabs(mlog / n - cs.H_cond));
                used.push_back(n);
            }
            const std::size_t half = dev_scaled.size() / 2;
            double c1 = 0, c2 = 0;
            for (std::size_t i = 0; i < dev_scaled.size(); ++i)
                (i < half ? c1 : c2) = std::max(i < half ? c1 : c2, dev_scaled[i]);
            const double C = std::max(c1, c2);
            const bool ok = used.size() >= 5 && envelope_ok && c2 <= 1.5 * c1 + 0.1;
            c.add(name.str(), ok,
                  "C=" + fmt(C) + " n_max=" + std::to_string(used.empty() ? 0 : used.back()) +
                      " envelope=" + (envelope_ok ? "ok" : "violated"));
        });
        std::ostringstream name2;
        name2 << "C6 max bracket " << s.name;
        c.guarded(name2.str(), [&] {
            const double target = h_alpha_mixture(s.j, alpha);
            std::vector<double> dev_scaled;
            for (int n = 4; n <= (quick ? 24 : 40); n += 4) {
                TypeFamily tf = joint_iid_power(s.j, n);
                const double hn = check_h_typefamily(tf, alpha, eps);
                dev_scaled.push_back(std::sqrt(double(n)) * std::fabs(hn / n - target));
            }
            const std::size_t half = dev_scaled.size() / 2;
            double c1 = 0, c2 = 0;
            for (std::size_t i = 0; i < dev_scaled.size(); ++i)
                (i < half ? c1 : c2) = std::max(i < half ? c1 : c2, dev_scaled[i]);
            const bool ok = c2 <= 1.5 * c1 + 0.1;
            c.add(name2.str(), ok, "C'=" + fmt(std::max(c1, c2)));
        });
    }
}

// --- suite: campbell (criteria 7 and 10) ------------------------------------

void suite_campbell(Ctx& c, bool quick) {
    for (std::size_t si = 0; si < guess_corpus().size(); ++si) {
        const JointDist j = guess_corpus()[si];
        for (double rho : {0.5, 1.0, 2.0}) {
            for (double eps : {0.1, 0.2, 0.4}) {
                std::ostringstream name;
                name << "C7 campbell source#" << si << " rho=" << rho << " eps=" << eps;
                c.guarded(name.str(), [&] {
                    CondDist cd = condition_on_y(j);
                    CampbellReport rep = one_shot_campbell_check(j, rho, eps);
                    // prefix-freeness and Kraft on both constructed codes
                    bool codes_ok = true;
                    for (const DeltaProfile& prof :
                         {kuzuoka_h(j, 1.0 / (1.0 + rho), eps).profile,
                          constant_profile(eps, cd.y_marginal)}) {
                        Code code = smoothed_shannon_code(j, rho, prof);
                        for (const CodeRow& row : code.rows) {
                            if (row.empty) continue;
                            std::vector<std::string> words = row.head_word;
                            words.push_back(row.star_word);
                            codes_ok = codes_ok && prefix_free(words) &&
                                       kraft_sum(words) <= 1.0 + 1e-12;
                        }
                    }
                    c.add(name.str(), rep.avg_ok && rep.max_ok && codes_ok,
                          "tilde_avg=" + fmt(rep.tilde_avg) + " h_avg=" + fmt(rep.h_avg) +
                              " tilde_max=" + fmt(rep.tilde_max) +
                              " h_max=" + fmt(rep.h_max));
                });
            }
        }
    }
    c.guarded("C7 weak-limit oracle", [&] {
        bool ok = true;
        std::ostringstream detail;
        for (const Dist& d : {make_dist({0.5, 0.3, 0.2}), make_dist({0.6, 0.3, 0.1})}) {
            for (double rho : {0.5, 1.0}) {
                for (double eps : {0.1, 0.2}) {
                    const double alpha = 1.0 / (1.0 + rho);
                    const double h = smooth_renyi(d, alpha, eps);
                    const double oracle = weak_limit_bruteforce(d, rho, eps, 5);
                    if (!(h <= oracle + 1e-9 && oracle <= h + 1.0 + 1e-9)) {
                        ok = false;
                        detail << " fail rho=" << rho << " eps=" << eps << " h=" << h
                               << " oracle=" << oracle;
                    }
                }
            }
        }
        c.add("C7 weak-limit oracle", ok, detail.str().empty() ? "in band" : detail.str());
    });
    c.guarded("C10 ff-vs-vl gap", [&] {
        const Dist d = bernoulli(0.3);
        const double rho = 1.0, eps = 0.1;
        std::vector<double> logn, gap;
        for (int n = 20; n <= (quick ? 200 : 400); n += 10) {
            LevelDist lv = iid_power(d, n);
            gap.push_back(ff_limit(lv, eps) - shannon_cutoff_cgf_levels(lv, rho, eps));
            logn.push_back(std::log2(double(n)));
        }
        // full-grid fit: the ceiling in the fixed-length limit puts a +-0.5
        // sawtooth on the series, which a short tail-only fit cannot average
        auto [half, slope] = sweep_slopes(logn, gap);
        (void)half;
        const bool ok = std::fabs(slope - 0.5) <= 0.15;
        c.add("C10 ff-vs-vl gap", ok, "slope_full=" + fmt(slope));
    });
}

// --- suite: tasks (criterion 8) ----------------------------------------------

void suite_tasks(Ctx& c, bool quick, std::uint64_t seed) {
    c.guarded("C8 bl-partition randomized", [&] {
        bool ok = true;
        const int trials = quick ? 30 : 100;
        for (int t = 0; t < trials; ++t) {
            CounterRng rng(seed, (std::uint64_t)t);
            const std::size_t n = 12;
            std::vector<std::uint64_t> lam(n);
            double inv = 0;
            for (std::size_t i = 0; i < n; ++i) {
                lam[i] = 1 + (std::uint64_t)(rng.uniform() * 8.0);
                inv += 1.0 / double(lam[i]);
            }
            const std::uint64_t M =
                (std::uint64_t)std::ceil(2.0 * inv + std::log2(double(n)) + 2.0);
            std::vector<std::size_t> items(n);
            for (std::size_t i = 0; i < n; ++i) items[i] = i;
            auto cells = bl_partition(lam, items, M);  // asserts internally
            ok = ok && cells.size() <= M;
        }
        c.add("C8 bl-partition randomized", ok, std::to_string(trials) + " instances");
    });
    for (std::size_t si = 0; si < guess_corpus().size(); ++si) {
        const JointDist j = guess_corpus()[si];
        const double rho = 1.0, eps = 0.2;
        const std::uint64_t thr =
            std::max(task_threshold_avg(j, eps), task_threshold_max(j, eps));
        for (std::uint64_t M : {thr + 1, 4 * thr}) {
            std::ostringstream name;
            name << "C8 task bounds source#" << si << " M=" << M;
            c.guarded(name.str(), [&] {
                TaskAssignment av = assignment_avg(j, rho, eps, M);
                TaskAssignment mx = assignment_max(j, rho, eps, M);
                const bool err_ok = std::fabs(av.error_avg - eps) <= 1e-12 &&
                                    std::fabs(mx.error_max - eps) <= 1e-12;
                TaskCheckReport rep = one_shot_task_check(j, rho, eps, M);
                c.add(name.str(), err_ok && rep.avg_ok && rep.max_ok,
                      "avg=" + fmt(rep.moment_avg_log) + " in [" +
                          fmt(rep.converse_avg) + "," + fmt(rep.direct_avg) +
                          "] err=" + fmt(av.error_avg));
            });
        }
    }
}

// --- suite: orderings (criterion 9) ------------------------------------------

void suite_orderings(Ctx& c, bool) {
    struct Case {
        const char* name;
        JointDist j;
        bool eq_left;   // H == H^(alpha)
        bool eq_right;  // H^(alpha) == H_alpha
    };
    std::vector<Case> cases;
    cases.push_back({"bss(0.1)", bss(0.1), true, false});
    cases.push_back({"bes(0.2)", bes(0.2), false, true});
    cases.push_back({"bses(0.1,0.2)", bses(0.1, 0.2), false, false});
    for (const Case& cs : cases) {
        for (double alpha : {0.3, 0.5, 0.8}) {
            std::ostringstream name;
            name << "C9 ordering " << cs.name << " alpha=" << alpha;
            c.guarded(name.str(), [&] {
                const double H = cond_stats(cs.j).H_cond;
                const double Hmix = h_alpha_mixture(cs.j, alpha);
                const double Ha = arimoto_conditional(cs.j, alpha);
                bool ok = Hmix >= H - 1e-12 && Ha >= Hmix - 1e-12;
                ok = ok && (cs.eq_left ? std::fabs(Hmix - H) <= 1e-9
                                       : Hmix - H >= 1e-6);
                ok = ok && (cs.eq_right ? std::fabs(Ha - Hmix) <= 1e-9
                                        : Ha - Hmix >= 1e-6);
                c.add(name.str(), ok,
                      "H=" + fmt(H) + " Hmix=" + fmt(Hmix) + " Halpha=" + fmt(Ha));
            });
        }
    }
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "koga", "kuzuoka", "clt", "cutoff", "guess", "campbell", "tasks", "orderings"};
    return names;
}

SuiteResult run_suite(const std::string& name, bool quick, std::uint64_t seed) {
    SuiteResult res;
    res.suite = name;
    Ctx c{&res};
    const auto t0 = std::chrono::steady_clock::now();
    if (name == "koga")
        suite_koga(c, quick);
    else if (name == "kuzuoka")
        suite_kuzuoka(c, quick);
    else if (name == "clt")
        suite_clt(c, quick);
    else if (name == "cutoff")
        suite_cutoff(c, quick);
    else if (name == "guess")
        suite_guess(c, quick);
    else if (name == "campbell")
        suite_campbell(c, quick);
    else if (name == "tasks")
        suite_tasks(c, quick, seed);
    else if (name == "orderings")
        suite_orderings(c, quick);
    else
        throw domain_error("unknown suite: " + name);
    res.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::vector<SuiteResult> run_all(bool quick, std::uint64_t seed) {
    std::vector<SuiteResult> out;
    for (const std::string& s : suite_names()) out.push_back(run_suite(s, quick, seed));
    return out;
}

}  // namespace smren
