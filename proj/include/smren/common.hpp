// common.hpp -- shared numeric helpers (base-2 log domain) and error types.
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace smren {

inline constexpr double kLn2 = 0.6931471805599453094172321214581766;

// Thrown when an input violates a documented precondition or invariant.
class domain_error : public std::invalid_argument {
public:
    explicit domain_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Thrown when a computation would exceed a configured resource cap.
class resource_error : public std::runtime_error {
public:
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a constructive postcondition fails (treated as a bug, not an input error).
class construction_error : public std::logic_error {
public:
    explicit construction_error(const std::string& msg) : std::logic_error(msg) {}
};

// An entropy-like quantity in bits that is either finite or exactly -infinity.
// The -infinity state is tagged rather than carried as an IEEE value so that
// weights exp2(-inf) = 0 are handled explicitly at use sites.
class Ent {
public:
    Ent() : v_(0.0), finite_(true) {}
    Ent(double v) : v_(v), finite_(true) {}  // NOLINT: implicit by design
    static Ent neg_inf() {
        Ent e;
        e.finite_ = false;
        e.v_ = -std::numeric_limits<double>::infinity();
        return e;
    }
    bool is_neg_inf() const { return !finite_; }
    bool is_finite() const { return finite_; }
    // Finite value in bits; calling this on -infinity is a logic error.
    double value() const {
        if (!finite_) throw std::logic_error("Ent::value() on -infinity");
        return v_;
    }
    // Value with -infinity mapped to the IEEE value, for ordering/printing.
    double value_or_inf() const {
        return finite_ ? v_ : -std::numeric_limits<double>::infinity();
    }
    friend bool operator==(const Ent& a, const Ent& b) {
        if (a.finite_ != b.finite_) return false;
        return a.finite_ ? a.v_ == b.v_ : true;
    }
    friend bool operator<(const Ent& a, const Ent& b) {
        return a.value_or_inf() < b.value_or_inf();
    }

private:
    double v_;
    bool finite_;
};

inline double exp2d(double x) { return std::exp2(x); }
inline double log2d(double x) { return std::log2(x); }

// log2(2^a + 2^b), tolerant of -infinity operands.
inline double lse2(double a, double b) {
    if (std::isinf(a) && a < 0) return b;
    if (std::isinf(b) && b < 0) return a;
    const double m = a > b ? a : b;
    const double d = (a > b ? b : a) - m;
    return m + std::log1p(std::exp2(d)) / kLn2;
}

// Streaming log-sum-exp accumulator in the base-2 domain.
class Lse2Acc {
public:
    Lse2Acc() : acc_(-std::numeric_limits<double>::infinity()) {}
    void add(double log2_term) { acc_ = lse2(acc_, log2_term); }
    // total() is -infinity when nothing was added.
    double total() const { return acc_; }
    bool empty() const { return std::isinf(acc_) && acc_ < 0; }

private:
    double acc_;
};

// log2 n!
inline double lg2_factorial(double n) { return std::lgamma(n + 1.0) / kLn2; }

// log2 of the multinomial coefficient n! / prod(parts[i]!).
inline double lg2_multinomial(int n, const std::vector<int>& parts) {
    double r = lg2_factorial(n);
    for (int p : parts) r -= lg2_factorial(p);
    return r;
}

// log2 C(n, k)
inline double lg2_binomial(double n, double k) {
    return lg2_factorial(n) - lg2_factorial(k) - lg2_factorial(n - k);
}

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw domain_error(msg);
}

// Strict "cumulative mass below target" comparison used by every head-set
// walk. Ties within fp noise resolve to "not below": at an exact boundary the
// include and exclude branches agree analytically, but only the exclude
// branch is stable once the residual collapses to rounding noise.
inline bool below_target(double cumulative, double target) {
    return cumulative < target - 1e-12;
}

// Ordinary least squares fit y ~ a + b x; returns {a, b}.
// A fit over fewer than two distinct x values is reported as {mean(y), 0}.
struct LinFit {
    double intercept = 0.0;
    double slope = 0.0;
    bool defined = false;
};

inline LinFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    LinFit f;
    const std::size_t n = x.size();
    if (n == 0 || y.size() != n) return f;
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / double(n), my = sy / double(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0) {
        f.intercept = my;
        return f;
    }
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.defined = true;
    return f;
}

}  // namespace smren
