// conditional.hpp -- the three conditional smooth Renyi entropies: the
// per-budget average form bar-H, the constant-budget closed form (check-H),
// the optimized average form (Kuzuoka's quantity) with grid oracles, and the
// rank-truncated tilde variant with its sandwich.
#pragma once

#include <vector>

#include "smren/common.hpp"
#include "smren/dist.hpp"
#include "smren/measures.hpp"

namespace smren {

struct DeltaProfile {
    std::vector<double> delta;  // per-y budget in [0,1]
    double mean = 0.0;          // sum_y P_Y(y) delta(y)
};

DeltaProfile make_delta_profile(const std::vector<double>& delta, const Dist& y_marginal);
DeltaProfile constant_profile(double eps, const Dist& y_marginal);

enum class CondSmoothMethod { closed_form, lagrangian, dp_grid, joint_grid };

struct CondSmoothReport {
    Ent value;
    DeltaProfile profile;
    CondSmoothMethod method;
};

// alpha-expectation of per-y smooth Renyi entropies at budgets delta(y);
// delta(y) = 1 rows contribute weight zero.
Ent bar_h(const JointDist& j, double alpha, const DeltaProfile& delta);

// Constant-budget conditional smooth entropy. `check_h` evaluates through the
// alpha-expectation; `check_h_direct` evaluates the explicit per-y sum; the
// two agree to ~1e-9.
Ent check_h(const JointDist& j, double alpha, double eps);
Ent check_h_direct(const JointDist& j, double alpha, double eps);

// Minimum of bar_h over budget profiles with mean exactly eps. Small
// instances are solved exactly by enumerating head-set breakpoints (all but
// one y pinned to a breakpoint, the last pinned by the mean constraint);
// larger instances fall back to a Lagrangian sweep, cross-checked against the
// dp-grid oracle when that oracle is feasible. vertex_combo_cap bounds the
// enumeration size before the sweep takes over.
CondSmoothReport kuzuoka_h(const JointDist& j, double alpha, double eps,
                           std::size_t vertex_combo_cap = 500000);

// Grid oracle: per-y budgets on {0, step, ..., 1}, mean within step of eps,
// solved by dynamic programming over y.
double kuzuoka_h_dp_grid(const JointDist& j, double alpha, double eps, double step);

// Definition-level oracle: grid minimum over joint sub-distributions with
// entrywise 0 <= Q <= P and total removal within one step of eps.
double kuzuoka_h_joint_grid(const JointDist& j, double alpha, double eps, double step);

// Rank-truncated variant built from the global rank budget (J, xi, upsilon).
double tilde_h(const JointDist& j, double alpha, double eps);

// Global rank parameters shared by tilde_h, the average-criterion guessing
// optimum, and the average-criterion task construction.
struct RankBudget {
    double J;        // integer-valued; largest j with average head mass < 1 - eps
    double xi;       // 1 - eps - (average mass of the first J ranks)
    double upsilon;  // xi / sum_y P_XY(rank J+1, y), in (0, 1]
};

RankBudget rank_budget(const JointDist& j, double eps);

// TypeFamily evaluations for i.i.d. product sources.
double check_h_typefamily(const TypeFamily& tf, double alpha, double eps);
double tilde_h_typefamily(const TypeFamily& tf, double alpha, double eps);
RankBudget rank_budget_typefamily(const TypeFamily& tf, double eps);

}  // namespace smren
