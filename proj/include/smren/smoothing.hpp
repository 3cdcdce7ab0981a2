// smoothing.hpp -- the smoothing operator: head sets, the closed-form smooth
// Renyi entropy, a grid brute-force oracle over the sub-distribution ball,
// the eps-cutoff transform with its moments, and tilted conditionals.
#pragma once

#include <cstdint>
#include <vector>

#include "smren/common.hpp"
#include "smren/dist.hpp"

namespace smren {

// Outcome of the head-set construction at smoothing parameter eps.
struct SmoothingResult {
    double head_mass;       // mass of the head set
    double head_count;      // cardinality of the head set (possibly huge)
    double log2_head_count; // -infinity when the head is empty
    double residual;        // 1 - eps - head_mass, in (0, star_prob]
    double star_prob;       // per-item probability of the largest excluded symbol
    Ent entropy;            // filled when computed via smooth_renyi
};

// Head set over explicit symbols: indices of head members in the fixed
// index-ascending tie-break order, plus the star symbol.
struct HeadSet {
    std::vector<std::size_t> head;
    std::size_t star;
    double head_mass;
    double residual;
    double star_prob;
};

HeadSet head_set(const std::vector<double>& probs, double eps);

SmoothingResult smoothing_set(const Dist& d, double eps);
SmoothingResult smoothing_set(const LevelDist& d, double eps);

// Koga closed form: (1/(1-alpha)) log( sum_{head} p^alpha + residual^alpha ).
double smooth_renyi(const Dist& d, double alpha, double eps);
double smooth_renyi(const LevelDist& d, double alpha, double eps);

// Independent oracle: grid enumeration of per-symbol removed mass over the
// sub-distribution ball. Asserts that the minimizer spends the whole budget.
double smooth_renyi_bruteforce(const Dist& d, double alpha, double eps, double grid_step);

// Threshold eta and boundary randomization beta of the eps-cutoff transform:
// P{Z > eta} + beta P{Z = eta} = eps, with eta a support point and beta in [0,1).
struct CutoffParams {
    double eta;
    double beta;
};

CutoffParams cutoff_params(const ValueDist& z, double eps);

// (1/s) log E[<exp(s Z)>_eps], evaluated exactly from the cutoff parameters.
Ent cutoff_exp_moment(const ValueDist& z, double s, double eps);

struct CutoffExpectation {
    double exact;       // E[<Z>_eps]
    double asymptotic;  // (1-eps) E[Z] - sqrt(Var[Z]) f_G(eps)
};

CutoffExpectation cutoff_expectation(const ValueDist& z, double eps);

// Tilted conditional rows: per y, masses proportional to P^alpha on the head
// and M(y)^alpha on the star symbol. delta(y) = 1 gives an empty-support row.
struct TiltedRow {
    bool empty = false;
    std::vector<double> q;          // full-length row, zeros off-support
    std::vector<std::size_t> head;  // head symbols
    std::size_t star = 0;           // star symbol (valid when !empty)
    double residual = 0.0;          // M(y)
};

struct TiltedCond {
    std::vector<TiltedRow> rows;
};

TiltedCond tilted_conditional(const CondDist& c, double alpha, const std::vector<double>& delta);
TiltedRow tilted_row(const Dist& row, double alpha, double delta);

}  // namespace smren
