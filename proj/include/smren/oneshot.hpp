// oneshot.hpp -- the unified one-shot framework: cost/error profiles, the
// stochastic cost map K, the redundancy term, converse bound evaluators, and
// the threshold achievability construction.
#pragma once

#include <vector>

#include "smren/common.hpp"
#include "smren/conditional.hpp"
#include "smren/dist.hpp"
#include "smren/guessing.hpp"

namespace smren {

// Deterministic cost kappa(x,y) > 0 and erasure probability err(x,y) in [0,1];
// K(x,y) equals kappa with probability 1-err and 0 otherwise.
struct CostProfile {
    std::size_t nx = 0, ny = 0;
    std::vector<double> kappa;  // row-major nx*ny
    std::vector<double> err;

    double k(std::size_t x, std::size_t y) const { return kappa[x * ny + y]; }
    double e(std::size_t x, std::size_t y) const { return err[x * ny + y]; }
    double& k(std::size_t x, std::size_t y) { return kappa[x * ny + y]; }
    double& e(std::size_t x, std::size_t y) { return err[x * ny + y]; }
};

CostProfile make_cost_profile(std::size_t nx, std::size_t ny,
                              const std::vector<double>& kappa,
                              const std::vector<double>& err);

// E[K^rho] = sum P(x,y) (1-err) kappa^rho, exact over the Bernoulli layer.
RhoMoment k_moment(const JointDist& j, const CostProfile& c, double rho);

// sup_y sum_{x: err(x,y) < 1} 1/kappa(x,y).
double redundancy(const CostProfile& c);

struct ConverseReport {
    bool applicable;    // error budget respected
    double moment_log;  // (1/rho) log2 E[K^rho]
    double bound;       // entropy term minus log2 redundancy
    bool holds;         // moment_log >= bound - 1e-9
};

ConverseReport converse_avg_bound(const JointDist& j, const CostProfile& c, double rho,
                                  double eps);
ConverseReport converse_max_bound(const JointDist& j, const CostProfile& c, double rho,
                                  double eps);

struct ThresholdProfile {
    CostProfile profile;
    std::vector<double> eta;   // per-y threshold on kappa
    std::vector<double> beta;  // boundary randomization
    double moment_log;         // (1/rho) log2 E[K^rho]
    double bound;              // bar_h + log2 c_bound
};

// Achievability construction: per y, erase the largest kappa values with a
// randomized boundary atom so that E[err | Y=y] = delta(y) exactly. Requires
// kappa(x,y) Q^{(alpha,delta)}(x|y) <= c_bound wherever Q > 0; the resulting
// moment satisfies (1/rho) log E[K^rho] <= bar_h(delta) + log2 c_bound.
ThresholdProfile threshold_profile(const JointDist& j, double alpha,
                                   const std::vector<std::vector<double>>& kappa_xy,
                                   const DeltaProfile& delta, double c_bound);

}  // namespace smren
