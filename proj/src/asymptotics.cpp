#include "smren/asymptotics.hpp"

#include <cmath>

#include "smren/smoothing.hpp"

namespace smren {

namespace {

double gaussian_cdf(double u) { return 0.5 * std::erfc(-u / std::sqrt(2.0)); }

double gaussian_pdf(double u) {
    return std::exp(-0.5 * u * u) / std::sqrt(2.0 * M_PI);
}

}  // namespace

double gaussian_quantile(double p) {
    require(p > 0.0 && p < 1.0, "gaussian_quantile: p must lie in (0,1)");
    double lo = -40.0, hi = 40.0;
    double x = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double f = gaussian_cdf(x) - p;
        if (std::fabs(f) <= 1e-15) break;
        if (f > 0)
            hi = x;
        else
            lo = x;
        const double d = gaussian_pdf(x);
        double step = d > 0 ? x - f / d : x;
        // Newton step, falling back to bisection when it leaves the bracket.
        x = (step > lo && step < hi) ? step : 0.5 * (lo + hi);
    }
    return x;
}

double gaussian_fg(double s) {
    require(s >= 0.0 && s <= 1.0, "gaussian_fg: s must lie in [0,1]");
    if (s == 0.0 || s == 1.0) return 0.0;
    return gaussian_pdf(gaussian_quantile(s));
}

double Expansion::at(int n) const {
    return first * n + second * std::sqrt(double(n)) + third * std::log2(double(n));
}

Expansion expansion_smooth_renyi(const SourceStats& stats, double alpha, double eps) {
    require_alpha(alpha);
    require(stats.V >= 0, "expansion: negative variance");
    Expansion e{};
    e.first = stats.H;
    if (stats.V == 0) {
        e.second = 0;
        e.third = 0;
        e.kind = ExpansionKind::zero_variance;
        return e;
    }
    e.second = -std::sqrt(stats.V) * gaussian_quantile(eps);
    e.third = -1.0 / (2.0 * (1.0 - alpha));
    e.kind = ExpansionKind::clt_third_order;
    return e;
}

double predict_smooth_renyi(const SourceStats& stats, double alpha, double eps, int n) {
    return expansion_smooth_renyi(stats, alpha, eps).at(n);
}

Expansion expansion_ff(const SourceStats& stats, double eps) {
    Expansion e{};
    e.first = stats.H;
    e.kind = ExpansionKind::strassen_ff;
    if (stats.V == 0) {
        e.second = 0;
        e.third = 0;
        return e;
    }
    e.second = -std::sqrt(stats.V) * gaussian_quantile(eps);
    e.third = -0.5;
    return e;
}

double predict_ff(const SourceStats& stats, double eps, int n) {
    return expansion_ff(stats, eps).at(n);
}

std::pair<double, double> sweep_slopes(const std::vector<double>& x,
                                       const std::vector<double>& residuals) {
    LinFit full = linear_fit(x, residuals);
    const std::size_t half = x.size() / 2;
    std::vector<double> x2(x.begin() + half, x.end());
    std::vector<double> r2(residuals.begin() + half, residuals.end());
    LinFit tail = linear_fit(x2, r2);
    return {tail.defined ? tail.slope : full.slope, full.slope};
}

ResidualSweep residual_sweep(const Dist& d, double alpha, double eps,
                             const std::vector<int>& n_grid, std::size_t cap) {
    require(!n_grid.empty(), "residual_sweep: empty grid");
    SourceStats stats = source_stats(d);
    ResidualSweep sw;
    std::vector<double> logn;
    for (int n : n_grid) {
        const double exact = smooth_renyi(iid_power(d, n, cap), alpha, eps);
        const double pred = predict_smooth_renyi(stats, alpha, eps, n);
        sw.n_values.push_back(n);
        sw.exact.push_back(exact);
        sw.predicted.push_back(pred);
        sw.residuals.push_back(exact - pred);
        logn.push_back(std::log2(double(n)));
    }
    auto [tail, full] = sweep_slopes(logn, sw.residuals);
    sw.logn_slope = tail;
    sw.logn_slope_full = full;
    return sw;
}

ResidualSweep clt_mgf_sweep(const ValueDist& z, double s, double eps,
                            const std::vector<int>& n_grid, std::size_t cap) {
    require(!n_grid.empty(), "clt_mgf_sweep: empty grid");
    const double ez = z.mean();
    const double vz = z.variance();
    const double quant = (vz > 0) ? gaussian_quantile(eps) : 0.0;
    ResidualSweep sw;
    std::vector<double> logn;
    for (int n : n_grid) {
        const Ent exact = cutoff_exp_moment(iid_sum(z, n, cap), s, eps);
        require(exact.is_finite(), "clt_mgf_sweep: cutoff moment vanished");
        const double pred = n * ez - std::sqrt(n * vz) * quant -
                            std::log2(double(n)) / (2.0 * s);
        sw.n_values.push_back(n);
        sw.exact.push_back(exact.value());
        sw.predicted.push_back(pred);
        sw.residuals.push_back(exact.value() - pred);
        logn.push_back(std::log2(double(n)));
    }
    auto [tail, full] = sweep_slopes(logn, sw.residuals);
    sw.logn_slope = tail;
    sw.logn_slope_full = full;
    return sw;
}

}  // namespace smren
