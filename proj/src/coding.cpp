#include "smren/coding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "smren/smoothing.hpp"

namespace smren {

namespace {

std::string bits_of(std::uint64_t value, int len) {
    std::string s(len, '0');
    for (int i = len - 1; i >= 0; --i) {
        if (value & 1ULL) s[i] = '1';
        value >>= 1;
    }
    return s;
}

int shannon_length(double log2_q) {
    // ceil(-log2 q), shaving fp noise just above exact integers
    return (int)std::max(0.0, std::ceil(-log2_q - 1e-9));
}

}  // namespace

std::vector<std::string> canonical_codewords(const std::vector<int>& lengths) {
    const std::size_t n = lengths.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
    std::vector<std::string> words(n);
    std::uint64_t code = 0;
    int prev_len = -1;
    for (std::size_t r = 0; r < n; ++r) {
        const int len = lengths[idx[r]];
        if (prev_len >= 0) {
            code += 1;
            code <<= (len - prev_len);
        }
        require(len <= 62, "canonical_codewords: length too large");
        require(len == 0 ? r == 0 && n == 1 : true,
                "canonical_codewords: empty word must be the only word");
        if (code >> len) throw construction_error("canonical_codewords: Kraft violation");
        words[idx[r]] = bits_of(code, len);
        prev_len = len;
    }
    return words;
}

bool prefix_free(const std::vector<std::string>& words) {
    for (std::size_t i = 0; i < words.size(); ++i)
        for (std::size_t k = 0; k < words.size(); ++k) {
            if (i == k) continue;
            if (words[i].size() <= words[k].size() &&
                words[k].compare(0, words[i].size(), words[i]) == 0)
                return false;
        }
    return true;
}

double kraft_sum(const std::vector<std::string>& words) {
    double s = 0;
    for (const std::string& w : words) s += std::exp2(-double(w.size()));
    return s;
}

Code smoothed_shannon_code(const JointDist& j, double rho, const DeltaProfile& delta) {
    require(rho > 0, "smoothed_shannon_code: rho must be positive");
    const double alpha = 1.0 / (1.0 + rho);
    CondDist cd = condition_on_y(j);
    require(delta.delta.size() == cd.rows.size(), "smoothed_shannon_code: profile mismatch");
    bool any_live = false;
    for (double d : delta.delta) any_live |= (d < 1.0);
    require(any_live, "smoothed_shannon_code: all budgets are 1");

    Code code;
    for (std::size_t y = 0; y < cd.rows.size(); ++y) {
        CodeRow row;
        if (delta.delta[y] >= 1.0) {
            row.empty = true;
            code.rows.push_back(std::move(row));
            continue;
        }
        TiltedRow q = tilted_row(cd.rows[y], alpha, delta.delta[y]);
        std::vector<int> lengths;
        std::vector<std::size_t> symbols = q.head;
        for (std::size_t x : q.head) lengths.push_back(shannon_length(log2d(q.q[x])));
        symbols.push_back(q.star);
        lengths.push_back(shannon_length(log2d(q.q[q.star])));
        auto words = canonical_codewords(lengths);

        row.head = q.head;
        for (std::size_t i = 0; i < q.head.size(); ++i) row.head_word.push_back(words[i]);
        row.star = q.star;
        row.star_word = words.back();
        row.star_keep = q.residual / cd.rows[y].p(q.star);
        // junk: shortest codeword of the row (deterministic tie-break by order)
        std::size_t jmin = 0;
        for (std::size_t i = 1; i < words.size(); ++i)
            if (words[i].size() < words[jmin].size()) jmin = i;
        row.junk_word = words[jmin];
        for (std::size_t x = 0; x < cd.rows[y].size(); ++x) {
            if (x == q.star) continue;
            if (std::find(q.head.begin(), q.head.end(), x) != q.head.end()) continue;
            row.erased.push_back(x);
        }
        code.rows.push_back(std::move(row));
    }
    return code;
}

CodeReport code_report(const Code& code, const JointDist& j, double rho) {
    require(code.rows.size() == j.ny(), "code_report: shape mismatch");
    CondDist cd = condition_on_y(j);
    double full = 0, cut = 0, err_avg = 0, err_max = 0;
    for (std::size_t y = 0; y < code.rows.size(); ++y) {
        const CodeRow& row = code.rows[y];
        const double wy = cd.y_marginal.p(y);
        if (row.empty) {
            err_avg += wy;
            err_max = std::max(err_max, 1.0);
            continue;
        }
        double f = 0, c = 0, e = 0;
        for (std::size_t i = 0; i < row.head.size(); ++i) {
            const double p = cd.rows[y].p(row.head[i]);
            const double t = p * std::exp2(rho * double(row.head_word[i].size()));
            f += t;
            c += t;
        }
        const double pstar = cd.rows[y].p(row.star);
        const double mkeep = pstar * row.star_keep;  // mass decoding correctly at star
        f += mkeep * std::exp2(rho * double(row.star_word.size()));
        c += mkeep * std::exp2(rho * double(row.star_word.size()));
        f += (pstar - mkeep) * std::exp2(rho * double(row.junk_word.size()));
        e += pstar - mkeep;
        for (std::size_t x : row.erased) {
            const double p = cd.rows[y].p(x);
            f += p * std::exp2(rho * double(row.junk_word.size()));
            e += p;
        }
        full += wy * f;
        cut += wy * c;
        err_avg += wy * e;
        err_max = std::max(err_max, e);
    }
    CodeReport r;
    r.cgf = log2d(full) / rho;
    r.cutoff_cgf = log2d(cut) / rho;
    r.error_avg = err_avg;
    r.error_max = err_max;
    return r;
}

CampbellReport one_shot_campbell_check(const JointDist& j, double rho, double eps) {
    require(rho > 0, "rho must be positive");
    require(eps >= 0.0 && eps < 1.0, "eps must lie in [0,1)");
    const double alpha = 1.0 / (1.0 + rho);
    CondDist cd = condition_on_y(j);

    CampbellReport r{};
    DeltaProfile avg_profile;
    if (eps == 0.0) {
        avg_profile = constant_profile(0.0, cd.y_marginal);
        r.h_avg = arimoto_conditional(j, alpha);
        r.h_max = r.h_avg;
    } else {
        CondSmoothReport ks = kuzuoka_h(j, alpha, eps);
        avg_profile = ks.profile;
        r.h_avg = ks.value.value();
        r.h_max = check_h(j, alpha, eps).value();
    }

    Code code_avg = smoothed_shannon_code(j, rho, avg_profile);
    CodeReport rep_avg = code_report(code_avg, j, rho);
    Code code_max = smoothed_shannon_code(j, rho, constant_profile(eps, cd.y_marginal));
    CodeReport rep_max = code_report(code_max, j, rho);

    r.tilde_avg = rep_avg.cutoff_cgf;
    r.full_avg = rep_avg.cgf;
    r.tilde_max = rep_max.cutoff_cgf;
    r.full_max = rep_max.cgf;
    r.error_avg = rep_avg.error_avg;
    r.error_max = rep_max.error_max;

    const double tail = eps < 1.0 ? log2d(1.0 / (1.0 - eps)) / rho : 0.0;
    r.endpoint_lo_avg = r.h_avg;
    r.endpoint_hi_avg = r.h_avg + 1.0 + tail;
    r.endpoint_lo_max = r.h_max;
    r.endpoint_hi_max = r.h_max + 1.0 + tail;

    r.avg_ok = r.tilde_avg < r.h_avg + 1.0 + 1e-9;
    r.max_ok = r.tilde_max < r.h_max + 1.0 + 1e-9;
    if (!r.avg_ok || !r.max_ok) {
        std::ostringstream os;
        os << "one_shot_campbell_check failed: tilde_avg " << r.tilde_avg << " vs "
           << r.h_avg + 1.0 << ", tilde_max " << r.tilde_max << " vs " << r.h_max + 1.0;
        throw construction_error(os.str());
    }
    return r;
}

double weak_limit_bruteforce(const Dist& d, double rho, double eps, int max_len) {
    require(rho > 0, "rho must be positive");
    require(eps >= 0.0 && eps < 1.0, "eps must lie in [0,1)");
    require(max_len >= 1 && max_len <= 5, "weak_limit_bruteforce: max_len out of range");
    auto support = d.support();
    require(support.size() <= 4, "weak_limit_bruteforce: support too large");

    std::vector<double> p;
    for (std::size_t i : support) p.push_back(d.p(i));
    const std::size_t n = p.size();
    const int kDropped = -1;  // symbol excluded from the codebook

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> len(n, kDropped);
    std::function<void(std::size_t, double)> rec = [&](std::size_t idx, double kraft) {
        if (kraft > 1.0 + 1e-12) return;
        if (idx == n) {
            // Mandatory erasure of dropped symbols, then greedy spending of the
            // remaining budget on the largest 2^{rho len}.
            double budget = eps;
            for (std::size_t i = 0; i < n; ++i)
                if (len[i] == kDropped) budget -= p[i];
            if (budget < -1e-12) return;
            budget = std::max(budget, 0.0);
            std::vector<std::size_t> order;
            for (std::size_t i = 0; i < n; ++i)
                if (len[i] != kDropped) order.push_back(i);
            if (order.empty()) return;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return len[a] > len[b]; });
            double obj = 0;
            for (std::size_t i : order) {
                const double erased = std::min(budget, p[i]);
                budget -= erased;
                obj += (p[i] - erased) * std::exp2(rho * len[i]);
            }
            if (obj > 0) best = std::min(best, log2d(obj) / rho);
            return;
        }
        rec(idx + 1, kraft);  // drop the symbol
        for (int l = 0; l <= max_len; ++l) {
            len[idx] = l;
            rec(idx + 1, kraft + std::exp2(-double(l)));
            len[idx] = kDropped;
        }
    };
    rec(0, 0.0);
    require(best < std::numeric_limits<double>::infinity(),
            "weak_limit_bruteforce: no feasible code");
    return best;
}

double ff_limit(const Dist& d, double eps) {
    return ff_limit(LevelDist::from_dist(d), eps);
}

double ff_limit(const LevelDist& d, double eps) {
    SmoothingResult s = smoothing_set(d, eps);
    if (std::isinf(s.log2_head_count)) return 0.0;  // empty head: ceil(log2 1)
    if (s.log2_head_count < 50) {
        const double c = std::round(s.head_count);
        return std::ceil(std::log2(1.0 + c) - 1e-12);
    }
    return std::ceil(s.log2_head_count - 1e-12);
}

double shannon_cutoff_cgf_levels(const LevelDist& d, double rho, double eps) {
    require(rho > 0, "rho must be positive");
    const double alpha = 1.0 / (1.0 + rho);
    // S = sum over the head of p^alpha plus residual^alpha, in log2 domain.
    Lse2Acc stot;
    double head_mass = 0;
    double residual_override = -1.0;
    const double target = 1.0 - eps;
    std::vector<std::pair<std::size_t, double>> included;  // (level, log2 count)
    for (std::size_t li = 0; li < d.levels().size(); ++li) {
        const Level& l = d.levels()[li];
        const double lm = l.mass();
        if (below_target(head_mass + lm, target)) {
            head_mass += lm;
            included.emplace_back(li, l.log2_count);
            continue;
        }
        const double item = exp2d(l.log2_prob);
        const double r = target - head_mass;
        if (r / item > 0x1p52) {
            included.emplace_back(li, log2d(r) - l.log2_prob);
            head_mass = target - item;
            residual_override = item;
        } else {
            double jj = std::ceil((r - 1e-12) / item) - 1.0;
            if (jj < 0) jj = 0;
            while (jj > 0 && !below_target(head_mass + jj * item, target)) jj -= 1.0;
            if (jj > 0) {
                head_mass += jj * item;
                included.emplace_back(li, log2d(jj));
            }
        }
        break;
    }
    const double residual =
        residual_override > 0 ? residual_override : target - head_mass;
    if (residual <= 0)
        throw construction_error("shannon_cutoff_cgf_levels: nonpositive residual");
    for (const auto& [li, lc] : included) stot.add(lc + alpha * d.levels()[li].log2_prob);
    stot.add(alpha * log2d(residual));
    const double log2_S = stot.total();

    // Per-item Shannon lengths from the tilted masses q = p^alpha / S.
    Lse2Acc cgf;
    for (const auto& [li, lc] : included) {
        const double log2_q = alpha * d.levels()[li].log2_prob - log2_S;
        const int len = shannon_length(log2_q);
        cgf.add(lc + d.levels()[li].log2_prob + rho * double(len));
    }
    const double log2_q_star = alpha * log2d(residual) - log2_S;
    cgf.add(log2d(residual) + rho * double(shannon_length(log2_q_star)));
    return cgf.total() / rho;
}

}  // namespace smren
