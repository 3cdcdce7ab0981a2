// measures.hpp -- classical (non-smooth) information measures in bits:
// Shannon entropy and its dispersion moments, Renyi entropy of order
// 0 < alpha < 1, the alpha-expectation, and Arimoto-style conditionals.
#pragma once

#include <vector>

#include "smren/common.hpp"
#include "smren/dist.hpp"

namespace smren {

struct SourceStats {
    double H;      // Shannon entropy, bits
    double V;      // varentropy, bits^2
    double T;      // centered third absolute moment, bits^3
    double H_inf;  // min-entropy, bits
};

struct CondStats {
    double H_cond;               // H(X|Y)
    double U;                    // Var of -log P(X|Y) around H(X|Y)
    double V_cond;               // E of per-y varentropies
    std::vector<double> per_y_H;
    std::vector<double> per_y_V;
};

SourceStats source_stats(const Dist& d);
SourceStats source_stats(const LevelDist& d);

// (1/(1-alpha)) log sum p^alpha, alpha in (0, 1).
double renyi_entropy(const Dist& d, double alpha);
double renyi_entropy(const LevelDist& d, double alpha);

// Nonlinear averaging (alpha/(1-alpha)) log E[exp(((1-alpha)/alpha) Z)] with
// base-2 exp/log; -infinity values contribute weight zero.
Ent alpha_expectation(const std::vector<Ent>& values, const Dist& weights, double alpha);

// Arimoto conditional Renyi entropy, evaluated both as an alpha-expectation of
// per-y Renyi entropies and directly; the two agree to ~1e-12.
double arimoto_conditional(const JointDist& j, double alpha);
double arimoto_conditional_direct(const JointDist& j, double alpha);

// alpha-expectation of the per-y Shannon entropies.
double h_alpha_mixture(const JointDist& j, double alpha);

CondStats cond_stats(const JointDist& j);

void require_alpha(double alpha);

}  // namespace smren
