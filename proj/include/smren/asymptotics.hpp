// asymptotics.hpp -- Gaussian quantile, expansion predictions in bits, and
// residual-sweep harnesses that compare exact smooth quantities against them.
#pragma once

#include <vector>

#include "smren/common.hpp"
#include "smren/dist.hpp"
#include "smren/measures.hpp"

namespace smren {

// Inverse of the standard Gaussian CDF, |Phi(result) - p| <= 1e-12.
double gaussian_quantile(double p);

// phi(Phi^{-1}(s)) on (0,1), zero at the endpoints.
double gaussian_fg(double s);

enum class ExpansionKind {
    clt_third_order,
    zero_variance,
    avg_first_order,
    max_first_order,
    strassen_ff,
};

struct Expansion {
    double first;   // coefficient of n, bits/symbol
    double second;  // coefficient of sqrt(n), bits
    double third;   // coefficient of log2(n), bits
    ExpansionKind kind;
    double at(int n) const;
};

// n H - sqrt(n V) Phi^{-1}(eps) - log2(n) / (2 (1-alpha)); collapses to n H
// when V = 0. The O(1) constant is never predicted.
Expansion expansion_smooth_renyi(const SourceStats& stats, double alpha, double eps);
double predict_smooth_renyi(const SourceStats& stats, double alpha, double eps, int n);

// Fixed-length analogue with third coefficient 1/2.
Expansion expansion_ff(const SourceStats& stats, double eps);
double predict_ff(const SourceStats& stats, double eps, int n);

struct ResidualSweep {
    std::vector<int> n_values;
    std::vector<double> exact;
    std::vector<double> predicted;
    std::vector<double> residuals;
    double logn_slope;       // fit over the second half of the grid
    double logn_slope_full;  // fit over the whole grid
};

// Exact smooth Renyi entropy of the n-fold product vs the three-term
// prediction, with a least-squares log2(n) coefficient of the residual.
ResidualSweep residual_sweep(const Dist& d, double alpha, double eps,
                             const std::vector<int>& n_grid,
                             std::size_t cap = kDefaultTypeCap);

// Exact cutoff exponential moment of the n-fold i.i.d. sum of Z vs
// n E[Z] - sqrt(n Var[Z]) Phi^{-1}(eps) - log2(n) / (2 s).
ResidualSweep clt_mgf_sweep(const ValueDist& z, double s, double eps,
                            const std::vector<int>& n_grid,
                            std::size_t cap = kDefaultTypeCap);

// Helper shared by the sweeps: fit residuals ~ a + b * x over the second half
// and the full grid.
std::pair<double, double> sweep_slopes(const std::vector<double>& x,
                                       const std::vector<double>& residuals);

}  // namespace smren
