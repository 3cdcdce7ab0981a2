#include "smren/dist.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace smren {

namespace {

constexpr double kMassTol = 1e-9;
constexpr double kLevelMassTol = 1e-7;
constexpr double kLevelMergeTol = 1e-12;  // absolute, in log2 units

// Number of weak compositions of n into k parts, saturating at cap+1.
std::size_t composition_count(int n, int k, std::size_t cap) {
    // C(n+k-1, k-1) computed incrementally with overflow guard.
    long double c = 1.0L;
    for (int i = 1; i <= k - 1; ++i) {
        c = c * (n + i) / i;
        if (c > (long double)cap * 2) return cap + 1;
    }
    return (std::size_t)std::llround((double)c);
}

void enumerate_compositions(int n, int k, std::vector<int>& parts, int idx,
                            const std::function<void(const std::vector<int>&)>& emit) {
    if (idx == k - 1) {
        parts[idx] = n;
        emit(parts);
        return;
    }
    for (int v = 0; v <= n; ++v) {
        parts[idx] = v;
        enumerate_compositions(n - v, k, parts, idx + 1, emit);
    }
}

std::vector<Level> merge_levels(std::vector<Level> lv) {
    std::sort(lv.begin(), lv.end(),
              [](const Level& a, const Level& b) { return a.log2_prob > b.log2_prob; });
    std::vector<Level> out;
    for (const Level& l : lv) {
        if (!out.empty() && std::fabs(out.back().log2_prob - l.log2_prob) <= kLevelMergeTol) {
            out.back().log2_count = lse2(out.back().log2_count, l.log2_count);
        } else {
            out.push_back(l);
        }
    }
    return out;
}

}  // namespace

std::vector<std::size_t> Dist::support() const {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < probs_.size(); ++i)
        if (probs_[i] > 0) s.push_back(i);
    return s;
}

Dist make_dist(const std::vector<double>& weights) {
    require(!weights.empty(), "make_dist: empty weight vector");
    double sum = 0;
    bool any_positive = false;
    for (double w : weights) {
        require(w >= 0, "make_dist: negative entry " + std::to_string(w));
        sum += w;
        any_positive |= (w > 0);
    }
    require(any_positive, "make_dist: no positive entry");
    if (std::fabs(sum - 1.0) > kMassTol) {
        std::ostringstream os;
        os << "make_dist: mass " << sum << " != 1";
        throw domain_error(os.str());
    }
    Dist d;
    d.probs_ = weights;
    return d;
}

std::vector<std::size_t> decreasing_rearrangement(const std::vector<double>& probs) {
    std::vector<std::size_t> idx(probs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return probs[a] > probs[b];  // stable sort keeps ascending-id tie-break
    });
    return idx;
}

std::vector<std::size_t> decreasing_rearrangement(const Dist& d) {
    return decreasing_rearrangement(d.probs());
}

std::vector<double> JointDist::y_marginal() const {
    std::vector<double> py(ny_, 0.0);
    for (std::size_t x = 0; x < nx_; ++x)
        for (std::size_t y = 0; y < ny_; ++y) py[y] += p(x, y);
    return py;
}

std::vector<double> JointDist::x_marginal() const {
    std::vector<double> px(nx_, 0.0);
    for (std::size_t x = 0; x < nx_; ++x)
        for (std::size_t y = 0; y < ny_; ++y) px[x] += p(x, y);
    return px;
}

JointDist make_joint(const std::vector<std::vector<double>>& rows) {
    require(!rows.empty(), "make_joint: no rows");
    const std::size_t ny = rows[0].size();
    require(ny > 0, "make_joint: empty rows");
    double sum = 0;
    for (const auto& r : rows) {
        require(r.size() == ny, "make_joint: ragged rows");
        for (double v : r) {
            require(v >= 0, "make_joint: negative entry");
            sum += v;
        }
    }
    require(std::fabs(sum - 1.0) <= kMassTol,
            "make_joint: mass " + std::to_string(sum) + " != 1");

    // Prune zero-marginal y columns.
    std::vector<double> py(ny, 0.0);
    for (const auto& r : rows)
        for (std::size_t y = 0; y < ny; ++y) py[y] += r[y];
    std::vector<std::size_t> keep;
    for (std::size_t y = 0; y < ny; ++y)
        if (py[y] > 0) keep.push_back(y);
    require(!keep.empty(), "make_joint: all y columns empty");

    JointDist j;
    j.nx_ = rows.size();
    j.ny_ = keep.size();
    j.m_.resize(j.nx_ * j.ny_);
    for (std::size_t x = 0; x < j.nx_; ++x)
        for (std::size_t k = 0; k < keep.size(); ++k) j.m_[x * j.ny_ + k] = rows[x][keep[k]];
    return j;
}

CondDist condition_on_y(const JointDist& j) {
    CondDist c;
    auto py = j.y_marginal();
    c.y_marginal = make_dist(py);
    c.rows.reserve(j.ny());
    for (std::size_t y = 0; y < j.ny(); ++y) {
        std::vector<double> row(j.nx());
        for (std::size_t x = 0; x < j.nx(); ++x) row[x] = j.p(x, y) / py[y];
        // Conditional rows can carry rounding from the division; renormalizing
        // by the exact row sum keeps make_dist's 1e-9 gate honest.
        double s = std::accumulate(row.begin(), row.end(), 0.0);
        for (double& v : row) v /= s;
        c.rows.push_back(make_dist(row));
    }
    return c;
}

LevelDist LevelDist::from_levels(std::vector<Level> levels) {
    LevelDist d;
    d.lv_ = merge_levels(std::move(levels));
    require(!d.lv_.empty(), "LevelDist: no levels");
    const double mass = d.total_mass();
    if (std::fabs(mass - 1.0) > kLevelMassTol) {
        std::ostringstream os;
        os << "LevelDist: total mass " << mass << " deviates from 1";
        throw domain_error(os.str());
    }
    return d;
}

LevelDist LevelDist::from_dist(const Dist& d) {
    std::vector<Level> lv;
    for (std::size_t i : d.support())
        lv.push_back(Level{log2d(d.p(i)), 0.0});
    return from_levels(std::move(lv));
}

double LevelDist::total_mass() const {
    Lse2Acc acc;
    for (const Level& l : lv_) acc.add(l.log2_mass());
    return exp2d(acc.total());
}

LevelDist iid_power(const Dist& d, int n, std::size_t cap) {
    require(n >= 1, "iid_power: n must be positive");
    std::vector<double> logp;
    for (std::size_t i : d.support()) logp.push_back(log2d(d.p(i)));
    const int k = (int)logp.size();
    if (k == 1) {
        return LevelDist::from_levels({Level{0.0, 0.0}});
    }
    const std::size_t count = composition_count(n, k, cap);
    if (count > cap) {
        std::ostringstream os;
        os << "iid_power: " << count << " types exceed cap " << cap;
        throw resource_error(os.str());
    }
    std::vector<Level> lv;
    lv.reserve(count);
    std::vector<int> parts(k);
    enumerate_compositions(n, k, parts, 0, [&](const std::vector<int>& c) {
        double lp = 0;
        for (int i = 0; i < k; ++i) lp += c[i] * logp[i];
        lv.push_back(Level{lp, lg2_multinomial(n, c)});
    });
    return LevelDist::from_levels(std::move(lv));
}

LevelDist convolve(const LevelDist& a, const LevelDist& b) {
    std::vector<Level> lv;
    lv.reserve(a.size() * b.size());
    for (const Level& la : a.levels())
        for (const Level& lb : b.levels())
            lv.push_back(Level{la.log2_prob + lb.log2_prob, la.log2_count + lb.log2_count});
    return LevelDist::from_levels(std::move(lv));
}

ValueDist ValueDist::from_atoms(std::vector<ValueAtom> atoms) {
    require(!atoms.empty(), "ValueDist: no atoms");
    std::sort(atoms.begin(), atoms.end(),
              [](const ValueAtom& x, const ValueAtom& y) { return x.value < y.value; });
    std::vector<ValueAtom> out;
    for (const ValueAtom& a : atoms) {
        if (!out.empty() && std::fabs(out.back().value - a.value) <= kLevelMergeTol) {
            out.back().log2_prob = lse2(out.back().log2_prob, a.log2_prob);
        } else {
            out.push_back(a);
        }
    }
    Lse2Acc acc;
    for (const ValueAtom& a : out) acc.add(a.log2_prob);
    require(std::fabs(exp2d(acc.total()) - 1.0) <= kLevelMassTol,
            "ValueDist: total probability deviates from 1");
    ValueDist v;
    v.atoms_ = std::move(out);
    return v;
}

ValueDist ValueDist::information_density(const LevelDist& d) {
    std::vector<ValueAtom> atoms;
    for (const Level& l : d.levels())
        atoms.push_back(ValueAtom{-l.log2_prob, l.log2_mass()});
    return from_atoms(std::move(atoms));
}

ValueDist ValueDist::information_density(const Dist& d) {
    return information_density(LevelDist::from_dist(d));
}

double ValueDist::mean() const {
    double m = 0;
    for (const ValueAtom& a : atoms_) m += a.prob() * a.value;
    return m;
}

double ValueDist::variance() const {
    const double m = mean();
    double v = 0;
    for (const ValueAtom& a : atoms_) v += a.prob() * (a.value - m) * (a.value - m);
    return v;
}

double ValueDist::third_abs_moment() const {
    const double m = mean();
    double t = 0;
    for (const ValueAtom& a : atoms_) {
        const double d = std::fabs(a.value - m);
        t += a.prob() * d * d * d;
    }
    return t;
}

ValueDist iid_sum(const ValueDist& v, int n, std::size_t cap) {
    require(n >= 1, "iid_sum: n must be positive");
    const int k = (int)v.atoms().size();
    if (k == 1) {
        return ValueDist::from_atoms({ValueAtom{v.atoms()[0].value * n, 0.0}});
    }
    const std::size_t count = composition_count(n, k, cap);
    if (count > cap) {
        std::ostringstream os;
        os << "iid_sum: " << count << " types exceed cap " << cap;
        throw resource_error(os.str());
    }
    std::vector<ValueAtom> atoms;
    atoms.reserve(count);
    std::vector<int> parts(k);
    enumerate_compositions(n, k, parts, 0, [&](const std::vector<int>& c) {
        double val = 0, lp = 0;
        for (int i = 0; i < k; ++i) {
            val += c[i] * v.atoms()[i].value;
            lp += c[i] * v.atoms()[i].log2_prob;
        }
        atoms.push_back(ValueAtom{val, lp + lg2_multinomial(n, c)});
    });
    return ValueDist::from_atoms(std::move(atoms));
}

double TypeFamily::total_mass() const {
    Lse2Acc acc;
    for (const YType& t : types) acc.add(t.log2_mass());
    return exp2d(acc.total());
}

TypeFamily joint_iid_power(const JointDist& j, int n, std::size_t cap) {
    require(n >= 1, "joint_iid_power: n must be positive");
    CondDist c = condition_on_y(j);
    const int m = (int)c.y_marginal.size();
    const std::size_t count = composition_count(n, m, cap);
    if (count > cap) {
        std::ostringstream os;
        os << "joint_iid_power: " << count << " y-types exceed cap " << cap;
        throw resource_error(os.str());
    }

    // Per-y single-coordinate conditional levels, reused across blocks.
    std::vector<LevelDist> base(m);
    for (int y = 0; y < m; ++y) base[y] = LevelDist::from_dist(c.rows[y]);

    TypeFamily tf;
    tf.n = n;
    std::vector<int> parts(m);
    enumerate_compositions(n, m, parts, 0, [&](const std::vector<int>& t) {
        YType yt;
        yt.log2_count = lg2_multinomial(n, t);
        yt.log2_prob = 0;
        LevelDist cond = LevelDist::from_levels({Level{0.0, 0.0}});
        for (int y = 0; y < m; ++y) {
            if (t[y] == 0) continue;
            yt.log2_prob += t[y] * log2d(c.y_marginal.p(y));
            cond = convolve(cond, iid_power(c.rows[y], t[y], cap));
        }
        yt.cond_levels = std::move(cond);
        tf.types.push_back(std::move(yt));
    });
    const double mass = tf.total_mass();
    if (std::fabs(mass - 1.0) > 1e-6)
        throw construction_error("joint_iid_power: reconstructed mass " + std::to_string(mass));
    return tf;
}

}  // namespace smren
