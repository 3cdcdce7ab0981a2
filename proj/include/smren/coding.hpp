// coding.hpp -- variable-length source coding with errors: cumulant
// generating functions of codeword lengths, the smoothed Shannon code, a
// brute-force weak-code oracle, and the fixed-length limit.
#pragma once

#include <string>
#include <vector>

#include "smren/common.hpp"
#include "smren/conditional.hpp"
#include "smren/dist.hpp"

namespace smren {

// Per-y codebook of the smoothed Shannon construction. Head symbols always
// decode correctly; the star symbol realizes its own codeword with
// probability star_keep and the junk codeword otherwise; erased symbols
// always emit the junk codeword.
struct CodeRow {
    bool empty = false;                 // per-y budget was 1: no codebook
    std::vector<std::size_t> head;      // head symbols
    std::vector<std::string> head_word;
    std::size_t star = 0;
    std::string star_word;
    double star_keep = 0.0;             // M(y) / P(x*|y)
    std::string junk_word;              // shortest head/star codeword
    std::vector<std::size_t> erased;
};

struct Code {
    std::vector<CodeRow> rows;
};

struct CodeReport {
    double cgf;         // Lambda / rho over realized codewords
    double cutoff_cgf;  // counting only correctly decoded outcomes
    double error_avg;
    double error_max;
};

// Canonical prefix codewords for a Kraft-feasible multiset of lengths,
// assigned in (length, position) order.
std::vector<std::string> canonical_codewords(const std::vector<int>& lengths);

// Per-y prefix-freeness check (pairwise scan) plus Kraft sums.
bool prefix_free(const std::vector<std::string>& words);
double kraft_sum(const std::vector<std::string>& words);

// Shannon code over the tilted conditional at alpha = 1/(1+rho) with budgets
// delta; per-y error equals delta(y) exactly and every kept codeword length
// satisfies 2^len * Q < 2.
Code smoothed_shannon_code(const JointDist& j, double rho, const DeltaProfile& delta);

CodeReport code_report(const Code& code, const JointDist& j, double rho);

struct CampbellReport {
    double h_avg;            // optimized conditional smooth entropy
    double h_max;            // constant-budget conditional smooth entropy
    double tilde_avg;        // cutoff CGF/rho of the average-criterion code
    double tilde_max;
    double full_avg;         // full CGF/rho of the average-criterion code
    double full_max;
    double error_avg;
    double error_max;        // worst per-y error of the max-criterion code
    double endpoint_lo_avg;  // one-shot sandwich endpoints
    double endpoint_hi_avg;
    double endpoint_lo_max;
    double endpoint_hi_max;
    bool avg_ok;             // tilde_avg < h_avg + 1
    bool max_ok;             // tilde_max < h_max + 1
};

CampbellReport one_shot_campbell_check(const JointDist& j, double rho, double eps);

// Exhaustive weak-code search on |Y| = 1: all Kraft-feasible integer length
// assignments up to max_len (symbols may be dropped), with the erasure budget
// spent greedily on the largest 2^{rho len} first.
double weak_limit_bruteforce(const Dist& d, double rho, double eps, int max_len);

// ceil(log2(1 + |head set|)): the fixed-length limit at error eps.
double ff_limit(const Dist& d, double eps);
double ff_limit(const LevelDist& d, double eps);

// Cutoff CGF/rho of the smoothed Shannon code on a level-aggregated source
// (|Y| = 1, constant budget eps), computed without materializing codewords.
double shannon_cutoff_cgf_levels(const LevelDist& d, double rho, double eps);

}  // namespace smren
