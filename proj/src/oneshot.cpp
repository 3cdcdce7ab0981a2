#include "smren/oneshot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "smren/smoothing.hpp"

namespace smren {

CostProfile make_cost_profile(std::size_t nx, std::size_t ny,
                              const std::vector<double>& kappa,
                              const std::vector<double>& err) {
    require(kappa.size() == nx * ny && err.size() == nx * ny,
            "cost profile: size mismatch");
    for (double k : kappa) require(k > 0, "cost profile: kappa entries must be positive");
    for (double e : err)
        require(e >= 0.0 && e <= 1.0, "cost profile: err entries must lie in [0,1]");
    CostProfile c;
    c.nx = nx;
    c.ny = ny;
    c.kappa = kappa;
    c.err = err;
    return c;
}

RhoMoment k_moment(const JointDist& j, const CostProfile& c, double rho) {
    require(rho > 0, "k_moment: rho must be positive");
    require(c.nx == j.nx() && c.ny == j.ny(), "k_moment: profile shape mismatch");
    double m = 0;
    for (std::size_t x = 0; x < j.nx(); ++x)
        for (std::size_t y = 0; y < j.ny(); ++y)
            m += j.p(x, y) * (1.0 - c.e(x, y)) * std::pow(c.k(x, y), rho);
    return make_rho_moment(m, rho);
}

double redundancy(const CostProfile& c) {
    double worst = 0;
    for (std::size_t y = 0; y < c.ny; ++y) {
        double s = 0;
        for (std::size_t x = 0; x < c.nx; ++x)
            if (c.e(x, y) < 1.0) s += 1.0 / c.k(x, y);
        worst = std::max(worst, s);
    }
    return worst;
}

ConverseReport converse_avg_bound(const JointDist& j, const CostProfile& c, double rho,
                                  double eps) {
    ConverseReport r{};
    double avg_err = 0;
    for (std::size_t x = 0; x < j.nx(); ++x)
        for (std::size_t y = 0; y < j.ny(); ++y) avg_err += j.p(x, y) * c.e(x, y);
    r.applicable = avg_err <= eps + 1e-12;
    r.moment_log = k_moment(j, c, rho).log_scaled.value_or_inf();
    if (!r.applicable) return r;
    const double alpha = 1.0 / (1.0 + rho);
    r.bound = kuzuoka_h(j, alpha, eps).value.value() - log2d(redundancy(c));
    r.holds = r.moment_log >= r.bound - 1e-9;
    return r;
}

ConverseReport converse_max_bound(const JointDist& j, const CostProfile& c, double rho,
                                  double eps) {
    ConverseReport r{};
    CondDist cd = condition_on_y(j);
    double worst = 0;
    for (std::size_t y = 0; y < j.ny(); ++y) {
        double e = 0;
        for (std::size_t x = 0; x < j.nx(); ++x) e += cd.rows[y].p(x) * c.e(x, y);
        worst = std::max(worst, e);
    }
    r.applicable = worst <= eps + 1e-12;
    r.moment_log = k_moment(j, c, rho).log_scaled.value_or_inf();
    if (!r.applicable) return r;
    const double alpha = 1.0 / (1.0 + rho);
    r.bound = check_h(j, alpha, eps).value() - log2d(redundancy(c));
    r.holds = r.moment_log >= r.bound - 1e-9;
    return r;
}

ThresholdProfile threshold_profile(const JointDist& j, double alpha,
                                   const std::vector<std::vector<double>>& kappa_xy,
                                   const DeltaProfile& delta, double c_bound) {
    require_alpha(alpha);
    require(kappa_xy.size() == j.nx(), "threshold_profile: kappa shape mismatch");
    CondDist cd = condition_on_y(j);
    TiltedCond q = tilted_conditional(cd, alpha, delta.delta);
    for (std::size_t x = 0; x < j.nx(); ++x) {
        require(kappa_xy[x].size() == j.ny(), "threshold_profile: kappa shape mismatch");
        for (std::size_t y = 0; y < j.ny(); ++y) {
            if (q.rows[y].empty || q.rows[y].q[x] <= 0) continue;
            if (kappa_xy[x][y] * q.rows[y].q[x] > c_bound + 1e-12) {
                std::ostringstream os;
                os << "threshold_profile: kappa*Q = " << kappa_xy[x][y] * q.rows[y].q[x]
                   << " exceeds bound " << c_bound << " at (x=" << x << ", y=" << y << ")";
                throw domain_error(os.str());
            }
        }
    }

    ThresholdProfile out;
    out.profile.nx = j.nx();
    out.profile.ny = j.ny();
    out.profile.kappa.assign(j.nx() * j.ny(), 1.0);
    out.profile.err.assign(j.nx() * j.ny(), 0.0);
    for (std::size_t y = 0; y < j.ny(); ++y) {
        const double dy = delta.delta[y];
        if (dy >= 1.0) {
            for (std::size_t x = 0; x < j.nx(); ++x) {
                out.profile.k(x, y) = kappa_xy[x][y];
                out.profile.e(x, y) = 1.0;
            }
            out.eta.push_back(0.0);
            out.beta.push_back(0.0);
            continue;
        }
        // Cutoff scan on the kappa values under P_{X|Y=y}: erase large costs
        // first, randomizing on the boundary atom.
        std::vector<ValueAtom> atoms;
        for (std::size_t x = 0; x < j.nx(); ++x) {
            if (cd.rows[y].p(x) <= 0) continue;
            atoms.push_back(ValueAtom{kappa_xy[x][y], log2d(cd.rows[y].p(x))});
        }
        CutoffParams cp = cutoff_params(ValueDist::from_atoms(std::move(atoms)), dy);
        out.eta.push_back(cp.eta);
        out.beta.push_back(cp.beta);
        for (std::size_t x = 0; x < j.nx(); ++x) {
            out.profile.k(x, y) = kappa_xy[x][y];
            if (cd.rows[y].p(x) <= 0) {
                out.profile.e(x, y) = 1.0;
            } else if (kappa_xy[x][y] > cp.eta) {
                out.profile.e(x, y) = 1.0;
            } else if (kappa_xy[x][y] == cp.eta) {
                out.profile.e(x, y) = cp.beta;
            } else {
                out.profile.e(x, y) = 0.0;
            }
        }
    }

    const double rho = (1.0 - alpha) / alpha;  // alpha = 1/(1+rho)
    out.moment_log = k_moment(j, out.profile, rho).log_scaled.value_or_inf();
    Ent bh = bar_h(j, alpha, delta);
    out.bound = bh.is_neg_inf() ? -std::numeric_limits<double>::infinity()
                                : bh.value() + log2d(c_bound);
    if (out.moment_log > out.bound + 1e-9) {
        std::ostringstream os;
        os << "threshold_profile: moment " << out.moment_log << " exceeds bound "
           << out.bound;
        throw construction_error(os.str());
    }
    return out;
}

}  // namespace smren
