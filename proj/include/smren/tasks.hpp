// tasks.hpp -- error-tolerant task encoding: per-symbol cell-size caps, the
// greedy sub-partition construction, the stochastic erasure layer, exact
// moments, and one-shot bound checks.
#pragma once

#include <cstdint>
#include <vector>

#include "smren/common.hpp"
#include "smren/conditional.hpp"
#include "smren/dist.hpp"
#include "smren/guessing.hpp"

namespace smren {

inline constexpr std::uint64_t kLambdaInf = UINT64_MAX;

// Per-(x,y) cell-size caps; kLambdaInf marks symbols outside the kept set.
struct LambdaProfile {
    std::size_t nx = 0, ny = 0;
    std::vector<std::uint64_t> lambda;  // row-major nx*ny
    std::uint64_t at(std::size_t x, std::size_t y) const { return lambda[x * ny + y]; }
    std::uint64_t& at(std::size_t x, std::size_t y) { return lambda[x * ny + y]; }
};

LambdaProfile lambda_profile_avg(const JointDist& j, double rho, double eps, std::uint64_t M);
LambdaProfile lambda_profile_max(const JointDist& j, double rho, double eps, std::uint64_t M);

// Partition of items into at most M cells with every item s in a cell of size
// at most lambda(s): greedy first-fit by ascending lambda. The postcondition
// is asserted, not trusted.
std::vector<std::vector<std::size_t>> bl_partition(
    const std::vector<std::uint64_t>& lambda, const std::vector<std::size_t>& items,
    std::uint64_t M);

struct TaskAssignment {
    std::uint64_t M = 0;
    double rho = 0, eps = 0;
    // Per y: cells of symbol ids plus each cell's erasure probability; symbols
    // outside every cell are ignored (assigned to message 0).
    std::vector<std::vector<std::vector<std::size_t>>> cells;
    std::vector<std::vector<double>> erase;
    double error_avg = 0;
    double error_max = 0;
};

TaskAssignment assignment_avg(const JointDist& j, double rho, double eps, std::uint64_t M);
TaskAssignment assignment_max(const JointDist& j, double rho, double eps, std::uint64_t M);

// E[|L|^rho] over source and erasure-layer randomness.
RhoMoment task_moment(const TaskAssignment& a, const JointDist& j, double rho);

struct TaskCheckReport {
    double moment_avg_log;
    double moment_max_log;
    double h_smooth;      // optimized conditional smooth entropy
    double h_check;
    double h_tilde;
    double converse_avg;  // h_smooth - log2 M
    double converse_max;
    double direct_avg;    // achievability right-hand side (average criterion)
    double direct_max;
    bool avg_ok;
    bool max_ok;
};

TaskCheckReport one_shot_task_check(const JointDist& j, double rho, double eps,
                                    std::uint64_t M);

// Smallest integer M admitted by the average-criterion construction.
std::uint64_t task_threshold_avg(const JointDist& j, double eps);
std::uint64_t task_threshold_max(const JointDist& j, double eps);

}  // namespace smren
