#include "lab/blockseq.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace ergolab {

namespace {

long long checked_add(long long a, long long b) {
    long long out;
    if (__builtin_add_overflow(a, b, &out)) throw OverflowDetected("64-bit count overflow");
    return out;
}

}  // namespace

PerturbedBlockSequence::PerturbedBlockSequence(std::vector<Block> blocks,
                                               std::vector<std::vector<long long>> perturbations)
    : blocks_(std::move(blocks)), perturbations_(std::move(perturbations)) {
    if (blocks_.empty()) throw LabError("block sequence needs at least one block");
    if (perturbations_.size() > blocks_.size())
        throw LabError("more perturbation sets than blocks");
    long long prev_end = -1;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        const Block& b = blocks_[k];
        if (b.length < 1) throw LabError("block length must be >= 1");
        if (b.start <= prev_end) throw LabError("blocks must be strictly increasing and disjoint");
        prev_end = b.end();
        if (k < perturbations_.size()) {
            const long long next_start =
                k + 1 < blocks_.size() ? blocks_[k + 1].start
                                       : std::numeric_limits<long long>::max();
            long long prev_u = prev_end;
            for (long long u : perturbations_[k]) {
                if (u <= prev_u) throw LabError("perturbation set must be strictly increasing");
                if (u >= next_start)
                    throw LabError("perturbation element collides with the next block");
                prev_u = u;
            }
            if (!perturbations_[k].empty()) prev_end = perturbations_[k].back();
        }
    }
}

PerturbedBlockSequence PerturbedBlockSequence::parse(std::string_view text) {
    std::vector<Block> blocks;
    std::vector<std::vector<long long>> perturbations;
    std::string item;
    std::stringstream ss{std::string(text)};
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t");
        const auto b = s.find_last_not_of(" \t");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(ss, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        if (item[0] == 'B') {
            const auto colon = item.find(':');
            const auto comma = item.find(',', colon);
            if (colon == std::string::npos || comma == std::string::npos)
                throw LabError("bad block literal: " + item);
            Block b;
            b.start = std::stoll(item.substr(colon + 1, comma - colon - 1));
            b.length = std::stoll(item.substr(comma + 1));
            if (perturbations.size() < blocks.size()) perturbations.emplace_back();
            blocks.push_back(b);
        } else if (item[0] == 'D') {
            const auto open = item.find('{');
            const auto close = item.find('}');
            if (open == std::string::npos || close == std::string::npos || close < open)
                throw LabError("bad perturbation literal: " + item);
            std::vector<long long> dset;
            std::stringstream es{item.substr(open + 1, close - open - 1)};
            std::string tok;
            while (std::getline(es, tok, ',')) {
                tok = trim(tok);
                if (!tok.empty()) dset.push_back(std::stoll(tok));
            }
            if (blocks.empty() || perturbations.size() != blocks.size() - 1)
                throw LabError("perturbation set without a preceding block");
            perturbations.push_back(std::move(dset));
        } else {
            throw LabError("bad sequence item: " + item);
        }
    }
    return PerturbedBlockSequence(std::move(blocks), std::move(perturbations));
}

std::string PerturbedBlockSequence::to_text() const {
    std::string out;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        if (!out.empty()) out += "; ";
        out += "B:" + std::to_string(blocks_[k].start) + "," + std::to_string(blocks_[k].length);
        if (k < perturbations_.size() && !perturbations_[k].empty()) {
            out += "; D:{";
            for (std::size_t i = 0; i < perturbations_[k].size(); ++i) {
                if (i) out += ",";
                out += std::to_string(perturbations_[k][i]);
            }
            out += "}";
        }
    }
    return out;
}

long long PerturbedBlockSequence::max_element() const {
    long long m = blocks_.back().end();
    if (perturbations_.size() == blocks_.size() && !perturbations_.back().empty())
        m = std::max(m, perturbations_.back().back());
    return m;
}

long long PerturbedBlockSequence::total_elements() const {
    long long total = 0;
    for (const Block& b : blocks_) total = checked_add(total, b.length);
    for (const auto& d : perturbations_)
        total = checked_add(total, static_cast<long long>(d.size()));
    return total;
}

std::vector<long long> PerturbedBlockSequence::elements_upto(long long n,
                                                             CountingProfile* profile) const {
    std::vector<long long> out;
    CountingProfile p;
    p.n = n;
    for_each_element_upto(n, [&](long long u, bool is_block) {
        out.push_back(u);
        (is_block ? p.b_n : p.c_n) += 1;
    });
    if (profile) *profile = p;
    return out;
}

CountingProfile PerturbedBlockSequence::counts_upto(long long n) const {
    CountingProfile p;
    p.n = n;
    for (const Block& b : blocks_) {
        if (b.start > n) break;
        p.b_n += std::min(n, b.end()) - b.start + 1;
    }
    for (const auto& dset : perturbations_) {
        for (long long u : dset) {
            if (u > n) break;
            ++p.c_n;
        }
        if (!dset.empty() && dset.front() > n) break;
    }
    return p;
}

AverageDecomposition decompose_average(const PerturbedBlockSequence& seq,
                                       const RotationSystem& sys, const MonotoneFunction& f,
                                       CirclePoint x, long long n) {
    double sum_b = 0.0, comp_b = 0.0, sum_d = 0.0, comp_d = 0.0;
    long long b_n = 0, c_n = 0;
    seq.for_each_element_upto(n, [&](long long u, bool is_block) {
        const double term =
            eval_on_circle(f, orbit_point(sys, x, static_cast<unsigned long long>(u)));
        double& sum = is_block ? sum_b : sum_d;
        double& comp = is_block ? comp_b : comp_d;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        (is_block ? b_n : c_n) += 1;
    });
    if (b_n + c_n == 0) throw EmptyPrefix("no sequence element <= " + std::to_string(n));

    AverageDecomposition d;
    d.b_n = b_n;
    d.c_n = c_n;
    const double total = static_cast<double>(b_n + c_n);
    d.w_block = static_cast<double>(b_n) / total;
    d.w_perturb = static_cast<double>(c_n) / total;
    d.avg_block = b_n ? sum_b / static_cast<double>(b_n) : 0.0;
    d.avg_perturb = c_n ? sum_d / static_cast<double>(c_n) : 0.0;
    d.avg_total = (sum_b + sum_d) / total;
    return d;
}

const char* to_string(SeriesClass c) {
    switch (c) {
        case SeriesClass::Convergent: return "Convergent";
        case SeriesClass::Divergent: return "Divergent";
        case SeriesClass::Undetermined: return "Undetermined";
    }
    return "?";
}

namespace {

// shared certificate-based classifier over computed terms t_1..t_K
void classify_terms(CriterionReport& report) {
    const std::size_t K = report.terms.size();
    report.partial_sums.resize(K);
    double acc = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        acc += report.terms[i];
        report.partial_sums[i] = acc;
    }
    bool all_zero = true;
    for (double t : report.terms)
        if (t != 0.0) all_zero = false;
    if (all_zero) {
        report.classification = SeriesClass::Convergent;
        report.rationale = "all terms vanish";
        return;
    }

    const std::size_t tail_len = std::max<std::size_t>(3, K / 2);
    const std::size_t tail_from = K - std::min(K, tail_len);

    // ratio certificate over the sampled tail
    bool ratio_ok = true;
    bool has_ratio = false;
    for (std::size_t i = std::max<std::size_t>(tail_from, 1); i < K; ++i) {
        const double prev = report.terms[i - 1];
        const double cur = report.terms[i];
        if (prev <= 0.0) {
            if (cur > 0.0) ratio_ok = false;
            continue;
        }
        has_ratio = true;
        if (cur / prev > 0.9) ratio_ok = false;
    }
    if (has_ratio && ratio_ok) {
        report.classification = SeriesClass::Convergent;
        report.rationale = "sampled term ratios stay <= 0.9";
        return;
    }

    // comparison with sum 1/k on the tail, with a non-collapsing trend
    bool dominates = true;
    for (std::size_t i = tail_from; i < K; ++i) {
        const double k = static_cast<double>(i + 1);
        if (report.terms[i] < 1.0 / k) {
            dominates = false;
            break;
        }
    }
    if (dominates) {
        const double first = report.terms[tail_from] * static_cast<double>(tail_from + 1);
        const double last = report.terms[K - 1] * static_cast<double>(K);
        if (last >= 0.999 * first) {
            report.classification = SeriesClass::Divergent;
            report.rationale = "terms dominate 1/k on the sampled tail";
            return;
        }
    }
    report.classification = SeriesClass::Undetermined;
    report.rationale = "no convergence or divergence certificate on the computed range";
}

}  // namespace

CriterionReport perturbation_criterion(const OrliczFunction& phi, std::span<const long long> l,
                                       std::span<const long long> d, int K) {
    if (static_cast<int>(l.size()) < K || static_cast<int>(d.size()) < K)
        throw LabError("perturbation_criterion: need K entries in l and d");
    CriterionReport report;
    report.terms.reserve(K);
    long long sum_l = 0, sum_d = 0;
    for (int k = 0; k < K; ++k) {
        if (l[k] < 1) throw LabError("l entries must be >= 1");
        if (d[k] < 0) throw LabError("d entries must be >= 0");
        sum_l = checked_add(sum_l, l[k]);
        sum_d = checked_add(sum_d, d[k]);
        if (sum_d == 0) {
            report.terms.push_back(0.0);  // Phi at infinity
        } else {
            const double ratio = static_cast<double>(sum_l) / static_cast<double>(sum_d);
            report.terms.push_back(1.0 / phi_eval(phi, ratio));
        }
    }
    classify_terms(report);
    return report;
}

PropositionReport proposition_conditions(const OrliczFunction& phi, std::span<const long long> l,
                                         std::span<const long long> d, double C, int K) {
    if (static_cast<int>(l.size()) < K || static_cast<int>(d.size()) < K)
        throw LabError("proposition_conditions: need K entries in l and d");
    PropositionReport report;
    report.growth_condition = true;
    long long sum_l = 0;
    for (int k = 0; k + 1 < K; ++k) {
        sum_l = checked_add(sum_l, l[k]);
        if (static_cast<double>(sum_l) > C * static_cast<double>(l[k + 1]))
            report.growth_condition = false;
    }
    report.c_ratios.reserve(K);
    for (int k = 0; k < K; ++k)
        report.c_ratios.push_back(static_cast<double>(d[k]) / static_cast<double>(l[k]));

    CriterionReport& s1 = report.sum_length_ratios;
    for (int k = 0; k + 1 < K; ++k)
        s1.terms.push_back(1.0 /
                           phi_eval(phi, static_cast<double>(l[k + 1]) / static_cast<double>(l[k])));
    classify_terms(s1);

    CriterionReport& s2 = report.sum_inverse_c;
    for (int k = 0; k < K; ++k) {
        const double c_k = report.c_ratios[k];
        s2.terms.push_back(c_k == 0.0 ? 0.0 : 1.0 / phi_eval(phi, 1.0 / c_k));
    }
    classify_terms(s2);
    return report;
}

ReinholdReport reinhold_ratio(std::span<const long long> l, std::span<const long long> d, int K,
                              double bound) {
    if (static_cast<int>(l.size()) < K || static_cast<int>(d.size()) < K)
        throw LabError("reinhold_ratio: need K entries in l and d");
    ReinholdReport report;
    long long sum_l = 0, sum_d = 0;
    double max_ratio = 0.0;
    for (int k = 0; k < K; ++k) {
        sum_l = checked_add(sum_l, l[k]);
        sum_d = checked_add(sum_d, d[k]);
        const double r = static_cast<double>(sum_d) / static_cast<double>(sum_l);
        report.ratios.push_back(r);
        max_ratio = std::max(max_ratio, r);
    }
    report.bounded = max_ratio <= bound;
    // nonincreasing tail that actually shrinks
    const int tail_from = K - std::max(2, K / 2);
    bool nonincreasing = true;
    for (int k = std::max(tail_from, 1); k < K; ++k)
        if (report.ratios[k] > report.ratios[k - 1] * (1.0 + 1e-12)) nonincreasing = false;
    const double head = report.ratios[std::max(tail_from, 0)];
    const double last = report.ratios[K - 1];
    report.limit_zero = nonincreasing && last <= 0.5 * head;
    return report;
}

}  // namespace ergolab
