// dist.hpp -- finite-support distributions, joint/conditional decomposition,
// decreasing rearrangements, and exact level-aggregated i.i.d. powers.
#pragma once

#include <cstdint>
#include <vector>

#include "smren/common.hpp"

namespace smren {

inline constexpr std::size_t kDefaultTypeCap = 2'000'000;

// A probability vector indexed by symbol id (0-based). Zeros are retained but
// lie outside the support.
class Dist {
public:
    Dist() = default;
    const std::vector<double>& probs() const { return probs_; }
    double p(std::size_t i) const { return probs_[i]; }
    std::size_t size() const { return probs_.size(); }
    std::vector<std::size_t> support() const;
    friend Dist make_dist(const std::vector<double>& weights);

private:
    std::vector<double> probs_;
};

// Validates weights into a Dist: entries >= 0, sum within 1e-9 of 1, at least
// one positive entry. No renormalization is performed.
Dist make_dist(const std::vector<double>& weights);

// Permutation pi with p[pi[0]] >= p[pi[1]] >= ...; ties broken by ascending id.
std::vector<std::size_t> decreasing_rearrangement(const Dist& d);
std::vector<std::size_t> decreasing_rearrangement(const std::vector<double>& probs);

// Joint distribution over (x, y); rows index x, columns index y.
// Columns with zero y-marginal are pruned on construction.
class JointDist {
public:
    JointDist() = default;
    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    double p(std::size_t x, std::size_t y) const { return m_[x * ny_ + y]; }
    const std::vector<double>& flat() const { return m_; }
    std::vector<double> y_marginal() const;
    std::vector<double> x_marginal() const;
    friend JointDist make_joint(const std::vector<std::vector<double>>& rows);

private:
    std::size_t nx_ = 0, ny_ = 0;
    std::vector<double> m_;  // row-major, nx * ny
};

JointDist make_joint(const std::vector<std::vector<double>>& rows);

// y-marginal plus one conditional distribution over X per y.
struct CondDist {
    Dist y_marginal;
    std::vector<Dist> rows;  // rows[y] = P_{X|Y=y}
};

CondDist condition_on_y(const JointDist& j);

// A distribution aggregated into (log2-probability, multiplicity) levels,
// sorted by log2_prob descending. Multiplicities are kept in the log2 domain
// because they exceed integer range for long i.i.d. products.
struct Level {
    double log2_prob;   // per-item log2 probability, <= 0
    double log2_count;  // log2 of the multiplicity, >= 0
    double count() const { return exp2d(log2_count); }
    double log2_mass() const { return log2_prob + log2_count; }
    double mass() const { return exp2d(log2_mass()); }
};

class LevelDist {
public:
    LevelDist() = default;
    // Builds from raw levels: merges log2_prob values within 1e-12, sorts
    // descending, and checks total mass within 1e-7 relative of 1.
    static LevelDist from_levels(std::vector<Level> levels);
    static LevelDist from_dist(const Dist& d);

    const std::vector<Level>& levels() const { return lv_; }
    std::size_t size() const { return lv_.size(); }
    double total_mass() const;  // exact linear-domain value of the LSE total

private:
    std::vector<Level> lv_;
};

// Exact distribution of the i.i.d. n-fold product of d, aggregated by level.
// Throws resource_error when the composition count C(n+k-1, k-1) exceeds cap.
LevelDist iid_power(const Dist& d, int n, std::size_t cap = kDefaultTypeCap);

// A finite real-valued random variable as (value, log2-probability) atoms,
// sorted by value ascending. This carries quantities like information
// densities where the value is decoupled from the probability.
struct ValueAtom {
    double value;
    double log2_prob;
    double prob() const { return exp2d(log2_prob); }
};

class ValueDist {
public:
    ValueDist() = default;
    static ValueDist from_atoms(std::vector<ValueAtom> atoms);
    // Information density of d: atom value -log2 P at probability P, per level.
    static ValueDist information_density(const LevelDist& d);
    static ValueDist information_density(const Dist& d);

    const std::vector<ValueAtom>& atoms() const { return atoms_; }
    double mean() const;
    double variance() const;
    double third_abs_moment() const;  // E|Z - EZ|^3

private:
    std::vector<ValueAtom> atoms_;
};

// Exact distribution of Z_1 + ... + Z_n for i.i.d. Z ~ v (composition
// enumeration with merging); same cap semantics as iid_power.
ValueDist iid_sum(const ValueDist& v, int n, std::size_t cap = kDefaultTypeCap);

// One y-type of an i.i.d. joint power: every y-sequence of this type shares
// the same conditional distribution of X^n, stored as cond_levels.
struct YType {
    double log2_prob;   // per-sequence log2 P_{Y^n}
    double log2_count;  // log2 multiplicity of the y-type
    LevelDist cond_levels;
    double log2_mass() const { return log2_prob + log2_count; }
};

struct TypeFamily {
    int n = 0;
    std::vector<YType> types;
    double total_mass() const;
};

// Exact per-y-type conditional level structure of the n-fold product of j.
TypeFamily joint_iid_power(const JointDist& j, int n, std::size_t cap = kDefaultTypeCap);

// Convolution of two level distributions (log2_probs add, counts multiply).
LevelDist convolve(const LevelDist& a, const LevelDist& b);

}  // namespace smren
