// smren_cli.cpp -- command-line front end: JSON distributions in, entropy /
// guessing / coding / task computations and verification suites out.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "smren/asymptotics.hpp"
#include "smren/coding.hpp"
#include "smren/conditional.hpp"
#include "smren/dist.hpp"
#include "smren/guessing.hpp"
#include "smren/io.hpp"
#include "smren/measures.hpp"
#include "smren/smoothing.hpp"
#include "smren/tasks.hpp"
#include "smren/verify.hpp"

using nlohmann::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAssert = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw smren::domain_error("cannot open input file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

json ent_json(const smren::Ent& e) {
    if (e.is_neg_inf()) return json("-inf");
    return json(e.value());
}

void emit(const json& doc, bool table) {
    if (!table) {
        std::cout << doc.dump() << "\n";
        return;
    }
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        std::cout.width(24);
        std::cout << std::left << it.key() << " ";
        if (it.value().is_number())
            std::cout << it.value().get<double>();
        else
            std::cout << it.value().dump();
        std::cout << "\n";
    }
}

int cmd_entropy(const std::string& file, double alpha, double eps, bool table) {
    const std::string text = slurp(file);
    json out;
    out["alpha"] = alpha;
    out["eps"] = eps;
    out["unit"] = "bits";
    if (!smren::json_is_joint(text)) {
        smren::Dist d = smren::dist_from_json(text);
        smren::SourceStats s = smren::source_stats(d);
        out["H"] = s.H;
        out["V"] = s.V;
        out["T"] = s.T;
        out["H_inf"] = s.H_inf;
        out["H_alpha"] = smren::renyi_entropy(d, alpha);
        out["H_alpha_eps"] = smren::smooth_renyi(d, alpha, eps);
    } else {
        smren::JointDist j = smren::joint_from_json(text);
        smren::CondStats s = smren::cond_stats(j);
        out["H_cond"] = s.H_cond;
        out["U"] = s.U;
        out["V_cond"] = s.V_cond;
        out["H_mix_alpha"] = smren::h_alpha_mixture(j, alpha);
        out["H_alpha_cond"] = smren::arimoto_conditional(j, alpha);
        if (eps > 0) {
            smren::CondSmoothReport ks = smren::kuzuoka_h(j, alpha, eps);
            out["H_alpha_eps_cond"] = ent_json(ks.value);
            switch (ks.method) {
                case smren::CondSmoothMethod::closed_form: out["method"] = "closed_form"; break;
                case smren::CondSmoothMethod::lagrangian: out["method"] = "lagrangian"; break;
                case smren::CondSmoothMethod::dp_grid: out["method"] = "dp_grid"; break;
                case smren::CondSmoothMethod::joint_grid: out["method"] = "joint_grid"; break;
            }
        } else {
            out["H_alpha_eps_cond"] = smren::arimoto_conditional(j, alpha);
        }
        out["H_check"] = ent_json(smren::check_h(j, alpha, eps));
        out["H_tilde"] = smren::tilde_h(j, alpha, eps);
        // equality flags of the first-order chain
        const double gap_l = smren::h_alpha_mixture(j, alpha) - s.H_cond;
        const double gap_r =
            smren::arimoto_conditional(j, alpha) - smren::h_alpha_mixture(j, alpha);
        out["chain_left_equal"] = gap_l <= 1e-9;
        out["chain_right_equal"] = gap_r <= 1e-9;
    }
    emit(out, table);
    return kExitPass;
}

int cmd_guess(const std::string& file, double rho, double eps, const std::string& crit,
              std::uint64_t trials, std::uint64_t seed, std::size_t cap_ranks, bool table) {
    smren::JointDist j;
    const std::string text = slurp(file);
    if (smren::json_is_joint(text)) {
        j = smren::joint_from_json(text);
    } else {
        smren::Dist d = smren::dist_from_json(text);
        std::vector<std::vector<double>> rows;
        for (double p : d.probs()) rows.push_back({p});
        j = smren::make_joint(rows);
    }
    smren::OptimalStrategy s = crit == "max"
                                   ? smren::optimal_strategy_max(j, eps, rho, cap_ranks)
                                   : smren::optimal_strategy_avg(j, eps, rho, cap_ranks);
    json out;
    out["criterion"] = crit;
    out["rho"] = rho;
    out["eps"] = eps;
    out["unit"] = "bits";
    if (crit == "max") {
        out["J_y"] = s.limits.J_y;
        out["xi_y"] = s.limits.xi_y;
    } else {
        out["J"] = s.limits.J;
        out["xi"] = s.limits.xi;
        out["upsilon"] = s.limits.upsilon;
    }
    out["moment"] = s.limits.moment.value;
    out["moment_log_scaled"] = ent_json(s.limits.moment.log_scaled);
    out["error_avg"] = s.limits.error_avg;
    out["error_max"] = s.limits.error_max;
    if (trials > 0) {
        smren::SimResult sim = smren::simulate(s.strategy, j, rho, trials, seed);
        out["sim"] = {{"moment", sim.moment},
                      {"error", sim.error_rate},
                      {"stderr_moment", sim.stderr_moment},
                      {"stderr_error", sim.stderr_error},
                      {"trials", sim.trials},
                      {"seed", seed}};
    }
    emit(out, table);
    return kExitPass;
}

int cmd_code(const std::string& file, double rho, double eps, const std::string& crit,
             bool table) {
    const std::string text = slurp(file);
    smren::JointDist j;
    if (smren::json_is_joint(text)) {
        j = smren::joint_from_json(text);
    } else {
        smren::Dist d = smren::dist_from_json(text);
        std::vector<std::vector<double>> rows;
        for (double p : d.probs()) rows.push_back({p});
        j = smren::make_joint(rows);
    }
    const double alpha = 1.0 / (1.0 + rho);
    smren::CondDist cd = smren::condition_on_y(j);
    smren::DeltaProfile prof =
        (crit == "avg" && eps > 0)
            ? smren::kuzuoka_h(j, alpha, eps).profile
            : smren::constant_profile(eps, cd.y_marginal);
    smren::Code code = smren::smoothed_shannon_code(j, rho, prof);
    smren::CodeReport rep = smren::code_report(code, j, rho);
    json out;
    out["criterion"] = crit;
    out["rho"] = rho;
    out["eps"] = eps;
    out["unit"] = "bits";
    out["cgf"] = rep.cgf;
    out["cutoff_cgf"] = rep.cutoff_cgf;
    out["error_avg"] = rep.error_avg;
    out["error_max"] = rep.error_max;
    json rows = json::array();
    for (std::size_t y = 0; y < code.rows.size(); ++y) {
        const smren::CodeRow& r = code.rows[y];
        json row;
        row["y"] = y;
        if (r.empty) {
            row["empty"] = true;
            rows.push_back(row);
            continue;
        }
        json words = json::array();
        for (std::size_t i = 0; i < r.head.size(); ++i)
            words.push_back({{"symbol", r.head[i]},
                             {"codeword", r.head_word[i]},
                             {"erase_prob", 0.0}});
        words.push_back({{"symbol", r.star},
                         {"codeword", r.star_word},
                         {"erase_prob", 1.0 - r.star_keep}});
        for (std::size_t x : r.erased)
            words.push_back({{"symbol", x}, {"codeword", r.junk_word}, {"erase_prob", 1.0}});
        row["words"] = words;
        rows.push_back(row);
    }
    out["rows"] = rows;
    emit(out, table);
    return kExitPass;
}

int cmd_tasks(const std::string& file, double rho, double eps, std::uint64_t M,
              const std::string& crit, bool table) {
    const std::string text = slurp(file);
    smren::JointDist j;
    if (smren::json_is_joint(text)) {
        j = smren::joint_from_json(text);
    } else {
        smren::Dist d = smren::dist_from_json(text);
        std::vector<std::vector<double>> rows;
        for (double p : d.probs()) rows.push_back({p});
        j = smren::make_joint(rows);
    }
    if (M == 0) {
        M = crit == "max" ? smren::task_threshold_max(j, eps)
                          : smren::task_threshold_avg(j, eps);
        M = 4 * M;
    }
    smren::TaskAssignment a = crit == "max" ? smren::assignment_max(j, rho, eps, M)
                                            : smren::assignment_avg(j, rho, eps, M);
    smren::RhoMoment m = smren::task_moment(a, j, rho);
    json out;
    out["criterion"] = crit;
    out["M"] = M;
    out["rho"] = rho;
    out["eps"] = eps;
    out["unit"] = "bits";
    out["moment"] = m.value;
    out["moment_log_scaled"] = ent_json(m.log_scaled);
    out["error_avg"] = a.error_avg;
    out["error_max"] = a.error_max;
    json ys = json::array();
    for (std::size_t y = 0; y < a.cells.size(); ++y) {
        json row;
        row["y"] = y;
        row["cells"] = a.cells[y];
        row["erase"] = a.erase[y];
        ys.push_back(row);
    }
    out["assignment"] = ys;
    emit(out, table);
    return kExitPass;
}

int cmd_sweep(const std::string& file, double alpha, double eps, int n_min, int n_max,
              int n_step, const std::string& out_csv, std::size_t cap_types) {
    smren::Dist d = smren::dist_from_json(slurp(file));
    std::vector<int> grid;
    for (int n = n_min; n <= n_max; n += n_step) grid.push_back(n);
    if (grid.empty()) throw smren::domain_error("sweep: empty n range");

    // Run point by point so a cap hit still flushes partial results.
    smren::SourceStats stats = smren::source_stats(d);
    std::vector<int> done;
    std::vector<double> exact, pred, resid, logn;
    bool capped = false;
    std::string cap_msg;
    for (int n : grid) {
        try {
            const double ex =
                smren::smooth_renyi(smren::iid_power(d, n, cap_types), alpha, eps);
            const double pr = smren::predict_smooth_renyi(stats, alpha, eps, n);
            done.push_back(n);
            exact.push_back(ex);
            pred.push_back(pr);
            resid.push_back(ex - pr);
            logn.push_back(std::log2(double(n)));
        } catch (const smren::resource_error& e) {
            capped = true;
            cap_msg = e.what();
            break;
        }
    }
    std::ostream* os = &std::cout;
    std::ofstream fout;
    if (!out_csv.empty()) {
        fout.open(out_csv);
        if (!fout) throw smren::domain_error("cannot open output file: " + out_csv);
        os = &fout;
    }
    *os << "n,exact,predicted,residual\n";
    os->precision(12);
    for (std::size_t i = 0; i < done.size(); ++i)
        *os << done[i] << "," << exact[i] << "," << pred[i] << "," << resid[i] << "\n";

    json summary;
    summary["points"] = done.size();
    if (done.size() >= 2) {
        auto [tail, full] = smren::sweep_slopes(logn, resid);
        summary["logn_slope"] = tail;
        summary["logn_slope_full"] = full;
    } else {
        summary["logn_slope"] = "undefined";
        std::cerr << "warning: fit undefined with fewer than two points\n";
    }
    if (capped) {
        summary["capped"] = cap_msg;
        std::cerr << "warning: partial results, " << cap_msg << "\n";
    }
    std::cout << summary.dump() << "\n";
    return capped ? kExitResource : kExitPass;
}

int cmd_verify(const std::string& suite, bool quick, std::uint64_t seed) {
    std::vector<smren::SuiteResult> results;
    if (suite == "all") {
        results = smren::run_all(quick, seed);
    } else {
        bool known = false;
        for (const std::string& s : smren::suite_names()) known |= (s == suite);
        if (!known) {
            std::cerr << "unknown suite: " << suite << "\n";
            return kExitUsage;
        }
        results.push_back(smren::run_suite(suite, quick, seed));
    }
    bool all_pass = true;
    for (const smren::SuiteResult& r : results) {
        for (const smren::Check& c : r.checks) {
            json line;
            line["suite"] = r.suite;
            line["check"] = c.name;
            line["pass"] = c.pass;
            line["detail"] = c.detail;
            std::cout << line.dump() << "\n";
            all_pass = all_pass && c.pass;
        }
        json line;
        line["suite"] = r.suite;
        line["pass"] = r.pass;
        line["seconds"] = r.seconds;
        std::cout << line.dump() << "\n";
    }
    return all_pass ? kExitPass : kExitAssert;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"smooth Renyi entropy toolkit"};
    app.require_subcommand(1);

    std::string file, suite = "all", crit = "avg", out_csv, format = "json";
    double alpha = 0.5, eps = 0.1, rho = 1.0;
    int n_min = 20, n_max = 200, n_step = 20;
    std::uint64_t seed = 20240817, trials = 0, M = 0;
    std::size_t cap_types = smren::kDefaultTypeCap;
    std::size_t cap_ranks = smren::kDefaultRankCap;
    bool quick = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));
    };

    CLI::App* entropy = app.add_subcommand("entropy", "entropy measures of a distribution");
    entropy->add_option("file", file)->required();
    entropy->add_option("--alpha", alpha);
    entropy->add_option("--eps", eps);
    add_common(entropy);

    CLI::App* guess = app.add_subcommand("guess", "optimal giving-up guessing strategy");
    guess->add_option("file", file)->required();
    guess->add_option("--rho", rho);
    guess->add_option("--eps", eps);
    guess->add_option("--criterion", crit)->check(CLI::IsMember({"avg", "max"}));
    guess->add_option("--trials", trials);
    guess->add_option("--seed", seed);
    guess->add_option("--cap-ranks", cap_ranks);
    add_common(guess);

    CLI::App* code = app.add_subcommand("code", "smoothed Shannon code");
    code->add_option("file", file)->required();
    code->add_option("--rho", rho);
    code->add_option("--eps", eps);
    code->add_option("--criterion", crit)->check(CLI::IsMember({"avg", "max"}));
    add_common(code);

    CLI::App* tasks = app.add_subcommand("tasks", "error-tolerant task assignment");
    tasks->add_option("file", file)->required();
    tasks->add_option("--rho", rho);
    tasks->add_option("--eps", eps);
    tasks->add_option("--M", M);
    tasks->add_option("--criterion", crit)->check(CLI::IsMember({"avg", "max"}));
    add_common(tasks);

    CLI::App* sweep = app.add_subcommand("sweep", "product-source residual sweep (CSV)");
    sweep->add_option("file", file)->required();
    sweep->add_option("--alpha", alpha);
    sweep->add_option("--eps", eps);
    sweep->add_option("--n", n_min);
    sweep->add_option("--n-max", n_max);
    sweep->add_option("--n-step", n_step);
    sweep->add_option("--out", out_csv);
    sweep->add_option("--cap-types", cap_types);

    CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("suite", suite);
    verify->add_flag("--quick", quick);
    verify->add_option("--seed", seed);
    add_common(verify);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitPass : kExitUsage;
    }

    const bool table = format == "table";
    try {
        if (*entropy) return cmd_entropy(file, alpha, eps, table);
        if (*guess) return cmd_guess(file, rho, eps, crit, trials, seed, cap_ranks, table);
        if (*code) return cmd_code(file, rho, eps, crit, table);
        if (*tasks) return cmd_tasks(file, rho, eps, M, crit, table);
        if (*sweep) return cmd_sweep(file, alpha, eps, n_min, n_max, n_step, out_csv, cap_types);
        if (*verify) return cmd_verify(suite, quick, seed);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const smren::resource_error& e) {
        std::cerr << "resource cap: " << e.what() << "\n";
        return kExitResource;
    } catch (const smren::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAssert;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAssert;
    }
    return kExitUsage;
}
