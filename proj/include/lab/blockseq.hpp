#pragma once

// Perturbed block sequences: blocks B_k of consecutive integers with
// arbitrary integer sets D_k inserted strictly between consecutive blocks,
// their counting functions b_n / c_n, the convex decomposition of ergodic
// averages, and the series criteria deciding how much perturbation a block
// sequence tolerates.

#include <span>
#include <string>
#include <vector>

#include "lab/orlicz.hpp"
#include "lab/rotation.hpp"

namespace ergolab {

struct Block {
    long long start = 0;
    long long length = 0;  // occupies [start, start + length - 1]
    long long end() const { return start + length - 1; }
};

struct CountingProfile {
    long long n = 0;
    long long b_n = 0;  // block elements <= n
    long long c_n = 0;  // perturbation elements <= n
};

class PerturbedBlockSequence {
public:
    // perturbations.size() may equal blocks.size() or blocks.size()-1; set k
    // sits strictly between block k and block k+1 (the last one just after
    // the final block).  Validates ordering and disjointness.
    PerturbedBlockSequence(std::vector<Block> blocks,
                           std::vector<std::vector<long long>> perturbations);

    static PerturbedBlockSequence parse(std::string_view text);  // "B:start,len; D:{a,b,c}; ..."
    std::string to_text() const;

    const std::vector<Block>& blocks() const { return blocks_; }
    const std::vector<std::vector<long long>>& perturbations() const { return perturbations_; }
    long long block_length(std::size_t k) const { return blocks_[k].length; }
    long long perturbation_size(std::size_t k) const {
        return k < perturbations_.size() ? static_cast<long long>(perturbations_[k].size()) : 0;
    }
    long long max_element() const;
    long long total_elements() const;

    // ascending visit of every element <= n
    template <class Fn>
    void for_each_element_upto(long long n, Fn&& fn) const {
        for (std::size_t k = 0; k < blocks_.size(); ++k) {
            const Block& b = blocks_[k];
            if (b.start > n) break;
            const long long stop = std::min(n, b.end());
            for (long long u = b.start; u <= stop; ++u) fn(u, /*is_block=*/true);
            if (k < perturbations_.size()) {
                for (long long u : perturbations_[k]) {
                    if (u > n) break;
                    fn(u, /*is_block=*/false);
                }
            }
        }
    }

    std::vector<long long> elements_upto(long long n, CountingProfile* profile = nullptr) const;
    CountingProfile counts_upto(long long n) const;

private:
    std::vector<Block> blocks_;
    std::vector<std::vector<long long>> perturbations_;
};

struct AverageDecomposition {
    long long b_n = 0, c_n = 0;      // the exact rational weights are b/(b+c), c/(b+c)
    double w_block = 1.0;
    double avg_block = 0.0;
    double w_perturb = 0.0;
    double avg_perturb = 0.0;
    double avg_total = 0.0;
};

// A_n as the convex combination (b/(b+c)) A^B + (c/(b+c)) A^D; avg_total is
// recomputed directly over the full prefix.  Throws EmptyPrefix when no
// element is <= n.
AverageDecomposition decompose_average(const PerturbedBlockSequence& seq,
                                       const RotationSystem& sys, const MonotoneFunction& f,
                                       CirclePoint x, long long n);

enum class SeriesClass { Convergent, Divergent, Undetermined };

const char* to_string(SeriesClass c);

struct CriterionReport {
    std::vector<double> terms;
    std::vector<double> partial_sums;
    SeriesClass classification = SeriesClass::Undetermined;
    std::string rationale;
};

// Terms 1/Phi((l_1+...+l_k)/(d_1+...+d_k)); an all-zero d-prefix contributes
// 0 (Phi at infinity).  Classification is certificate-based: a sampled ratio
// test for convergence, comparison with sum 1/k for divergence, otherwise
// Undetermined.
CriterionReport perturbation_criterion(const OrliczFunction& phi, std::span<const long long> l,
                                       std::span<const long long> d, int K);

struct PropositionReport {
    bool growth_condition = false;      // l_1+...+l_k <= C*l_{k+1} for all k < K
    std::vector<double> c_ratios;       // c_k = d_k / l_k
    CriterionReport sum_length_ratios;  // sum of 1/Phi(l_{k+1}/l_k)
    CriterionReport sum_inverse_c;      // sum of 1/Phi(1/c_k)
};

PropositionReport proposition_conditions(const OrliczFunction& phi, std::span<const long long> l,
                                         std::span<const long long> d, double C, int K);

struct ReinholdReport {
    std::vector<double> ratios;  // (d_1+...+d_k)/(l_1+...+l_k)
    bool bounded = false;        // max ratio <= bound
    bool limit_zero = false;     // nonincreasing tail shrinking toward 0
};

ReinholdReport reinhold_ratio(std::span<const long long> l, std::span<const long long> d, int K,
                              double bound = 1.0);

}  // namespace ergolab
