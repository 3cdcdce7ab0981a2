// guessing.hpp -- optimal giving-up guessing strategies under the average and
// maximum error criteria, exact rho-th moments, one-shot sandwich checks, and
// a seeded Monte Carlo simulator.
#pragma once

#include <cstdint>
#include <vector>

#include "smren/common.hpp"
#include "smren/conditional.hpp"
#include "smren/dist.hpp"

namespace smren {

inline constexpr std::size_t kDefaultRankCap = 10'000'000;

struct RhoMoment {
    double value;    // E[K^rho]
    Ent log_scaled;  // (1/rho) log2 E[K^rho]
};

RhoMoment make_rho_moment(double value, double rho);

// A guessing order per y plus a per-rank giving-up policy. policy[y][k-1] is
// the probability of declaring an error at stage k; ranks beyond the stored
// vector give up with probability 1.
struct GuessStrategy {
    std::vector<std::vector<std::size_t>> order;  // order[y][k-1] = symbol at rank k
    std::vector<std::vector<double>> policy;
};

enum class ErrorCriterion { average, maximum };

struct StrategyLimits {
    ErrorCriterion criterion;
    double J = 0;                 // average criterion: global rank budget
    double xi = 0;
    double upsilon = 0;
    std::vector<double> J_y;      // maximum criterion: per-y budgets
    std::vector<double> xi_y;
    std::vector<double> upsilon_y;
    RhoMoment moment;
    double error_avg = 0;
    double error_max = 0;
};

struct OptimalStrategy {
    GuessStrategy strategy;
    StrategyLimits limits;
};

OptimalStrategy optimal_strategy_avg(const JointDist& j, double eps, double rho,
                                     std::size_t rank_cap = kDefaultRankCap);
OptimalStrategy optimal_strategy_max(const JointDist& j, double eps, double rho,
                                     std::size_t rank_cap = kDefaultRankCap);

// Exact rho-th moment of the giving-up guessing function induced by the
// strategy, summed over all ranks (capped), plus its exact error rates.
RhoMoment guess_moment(const GuessStrategy& s, const JointDist& j, double rho,
                       std::size_t rank_cap = kDefaultRankCap);
double guess_error_avg(const GuessStrategy& s, const JointDist& j);
double guess_error_max(const GuessStrategy& s, const JointDist& j);

// Exact optimal average-criterion moment on a product source given by its
// TypeFamily; rank counts above rank_cap raise resource_error.
RhoMoment optimal_guess_moment_avg(const TypeFamily& tf, double eps, double rho,
                                   std::size_t rank_cap = kDefaultRankCap);

struct GuessCheckReport {
    double h_smooth;        // optimized conditional smooth entropy
    double h_check;         // constant-budget conditional smooth entropy
    double H_cond;          // H(X|Y)
    double sup_y_H;         // sup_y H(P_{X|Y=y})
    double moment_avg_log;  // (1/rho) log2 E[G*_avg^rho]
    double moment_max_log;
    double lower_avg;       // h_smooth - log2(1 + H_cond/eps)
    double lower_max;
    bool avg_ok;
    bool max_ok;
};

// Evaluates both optimal strategies and checks the one-shot sandwiches at
// 1e-9 slack; throws construction_error with diagnostics on failure.
GuessCheckReport one_shot_guess_check(const JointDist& j, double rho, double eps);

struct SimResult {
    double moment;        // empirical mean of G^rho
    double error_rate;    // empirical P{G = 0}
    double stderr_moment;
    double stderr_error;
    std::uint64_t trials;
};

// Seeded, counter-based simulation of the giving-up chain; bit-reproducible
// for a fixed seed independent of batching.
SimResult simulate(const GuessStrategy& s, const JointDist& j, double rho,
                   std::uint64_t trials, std::uint64_t seed);

// Exhaustive competitor search on |Y| = 1 instances: all orderings of at most
// three support symbols times a grid over monotone survival probabilities.
// Returns the best feasible moment found.
double bruteforce_best_moment(const Dist& d, double rho, double eps, double step);

}  // namespace smren
