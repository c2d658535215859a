#pragma once

// Independent reference computations for the overlap and embedding
// metrics. Inputs are lowercase, space-separated words, so splitting on
// whitespace matches the library tokenizer.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cag/mock.hpp"
#include "cag/refmetrics.hpp"

namespace oracle {

inline std::vector<std::string> words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

// n-gram counts keyed by the space-joined gram.
inline std::map<std::string, int> grams(const std::vector<std::string>& w, std::size_t n) {
    std::map<std::string, int> out;
    for (std::size_t i = 0; i + n <= w.size(); ++i) {
        std::string key;
        for (std::size_t k = 0; k < n; ++k) key += (k ? " " : "") + w[i + k];
        ++out[key];
    }
    return out;
}

struct Precision {
    int matches = 0;
    int total = 0;
};

inline Precision clipped(const std::string& cand, const std::string& ref, std::size_t n) {
    Precision p;
    const auto c = grams(words(cand), n);
    const auto r = grams(words(ref), n);
    for (const auto& [g, k] : c) {
        p.total += k;
        const auto it = r.find(g);
        p.matches += std::min(k, it == r.end() ? 0 : it->second);
    }
    return p;
}

// Geometric mean of clipped precisions for orders with candidate n-grams;
// a zero-match order contributes 0.1 / total; no unigram overlap is 0.
inline double bleu(const std::string& cand, const std::string& ref) {
    double log_sum = 0;
    int orders = 0;
    for (std::size_t n = 1; n <= 4; ++n) {
        const auto p = clipped(cand, ref, n);
        if (p.total == 0) continue;
        if (p.matches == 0 && n == 1) return 0.0;
        log_sum += std::log(p.matches ? double(p.matches) / p.total : 0.1 / p.total);
        ++orders;
    }
    const double c = double(words(cand).size()), r = double(words(ref).size());
    const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
    return bp * std::exp(log_sum / orders);
}

// LCS by enumerating every subsequence of the shorter sequence.
inline std::size_t lcs_exhaustive(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    const auto& shorter = a.size() <= b.size() ? a : b;
    const auto& longer = a.size() <= b.size() ? b : a;
    std::size_t best = 0;
    for (unsigned long mask = 0; mask < (1UL << shorter.size()); ++mask) {
        std::vector<std::string> sub;
        for (std::size_t i = 0; i < shorter.size(); ++i)
            if (mask & (1UL << i)) sub.push_back(shorter[i]);
        std::size_t j = 0;
        for (const auto& w : longer)
            if (j < sub.size() && w == sub[j]) ++j;
        if (j == sub.size()) best = std::max(best, sub.size());
    }
    return best;
}

inline double rouge_l(const std::string& cand, const std::string& ref) {
    const auto c = words(cand), r = words(ref);
    const double l = double(lcs_exhaustive(c, r));
    if (l == 0) return 0.0;
    const double p = l / c.size(), rec = l / r.size();
    return 2 * p * rec / (p + rec);
}

// METEOR from alignment statistics: Fmean = 10PR/(R+9P), penalty
// 0.5 * ((chunks-1)/(matches-1))^3.
inline double meteor_formula(double matches, double cand_len, double ref_len, double chunks) {
    if (matches == 0) return 0.0;
    const double p = matches / cand_len, r = matches / ref_len;
    const double fmean = 10 * p * r / (r + 9 * p);
    const double frag = matches > 1 ? (chunks - 1) / (matches - 1) : 0.0;
    return fmean * (1 - 0.5 * std::pow(frag, 3));
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / std::sqrt(na * nb);
}

// Greedy max alignment in both directions, checked against every pair.
inline double embedding_f1(const std::vector<std::vector<double>>& cand,
                           const std::vector<std::vector<double>>& ref) {
    double p = 0, r = 0;
    for (const auto& c : cand) {
        double best = 0;
        for (const auto& x : ref) best = std::max(best, std::max(0.0, cosine(c, x)));
        p += best;
    }
    for (const auto& x : ref) {
        double best = 0;
        for (const auto& c : cand) best = std::max(best, std::max(0.0, cosine(c, x)));
        r += best;
    }
    p /= double(cand.size());
    r /= double(ref.size());
    return p + r > 0 ? 2 * p * r / (p + r) : 0.0;
}

struct MetricCase {
    std::string name;
    std::function<double()> actual;
    double expected;
};

// The fixture set shared by the unit tests and the acceptance run. Every
// expected value comes from the oracles above or from hand arithmetic.
inline std::vector<MetricCase> metric_cases() {
    using namespace cag;
    std::vector<MetricCase> cases;
    const std::string mat = "the cat sat on the mat";
    const std::string doubled = "the cat the cat on the mat";

    cases.push_back({"bleu identity", [=] { return refmetrics::bleu(mat, mat).value; }, 1.0});
    cases.push_back({"bleu disjoint", [=] { return refmetrics::bleu("dogs bark loudly", mat).value; }, 0.0});
    // Hand table: 1-grams 5/7, 2-grams 3/6, 3-grams 1/5, 4-grams 0/4 -> 0.1/4; c=7 > r=6.
    const double hand = std::exp((std::log(5.0 / 7) + std::log(3.0 / 6) + std::log(1.0 / 5) +
                                  std::log(0.1 / 4)) / 4);
    cases.push_back({"bleu n-gram table", [=] { return refmetrics::bleu(doubled, mat).value; }, hand});
    // 1-grams 2/2, 2-grams 1/1, no 3- or 4-grams; brevity penalty exp(1 - 6/2).
    cases.push_back({"bleu short candidate", [=] { return refmetrics::bleu("the cat", mat).value; },
                     std::exp(-2.0)});

    cases.push_back({"rouge_l identity", [=] { return refmetrics::rouge_l(mat, mat).value; }, 1.0});
    cases.push_back({"rouge_l disjoint", [=] { return refmetrics::rouge_l("dogs bark", mat).value; }, 0.0});
    cases.push_back({"rouge_l abcd", [] { return refmetrics::rouge_l("a b c d", "a c b d").value; },
                     0.75});

    cases.push_back({"meteor identity", [=] { return refmetrics::meteor(mat, mat).value; }, 1.0});
    cases.push_back({"meteor disjoint", [=] { return refmetrics::meteor("dogs bark", mat).value; }, 0.0});
    // cats~cat and sit~sits align by stem in order: 2 matches, 1 chunk.
    cases.push_back({"meteor stems in order", [] { return refmetrics::meteor("cats sit", "cat sits").value; },
                     meteor_formula(2, 2, 2, 1)});
    // Crossed alignment: 2 matches, 2 chunks.
    cases.push_back({"meteor stems crossed", [] { return refmetrics::meteor("cats sit", "sits cat").value; },
                     meteor_formula(2, 2, 2, 2)});
    // Partial: "cat" exact, 1 of 3 candidate words, 1 of 2 reference words.
    cases.push_back({"meteor partial", [] { return refmetrics::meteor("a cat runs", "the cat").value; },
                     meteor_formula(1, 3, 2, 1)});

    cases.push_back({"embedding_f1 identity", [=] {
                         mock::HashedEmbedding e(64);
                         return refmetrics::embedding_f1("First point here. Second point there.",
                                                         "First point here. Second point there.", e)
                             .value;
                     },
                     1.0});
    cases.push_back({"embedding_f1 orthogonal", [] {
                         mock::BasisEmbedding e(8);
                         return refmetrics::embedding_f1("One. Two.", "Three. Four. Five.", e).value;
                     },
                     0.0});
    const std::vector<std::vector<double>> cv = {{1, 0, 0}, {0.6, 0.8, 0}};
    const std::vector<std::vector<double>> rv = {{0, 1, 0}, {1, 1, 0}, {0, 0, -1}};
    cases.push_back({"embedding_f1 2x3 table", [=] {
                         mock::TableEmbedding e;
                         e.add("C one.", cv[0]);
                         e.add("C two.", cv[1]);
                         e.add("R one.", rv[0]);
                         e.add("R two.", rv[1]);
                         e.add("R three.", rv[2]);
                         return refmetrics::embedding_f1("C one. C two.", "R one. R two. R three.", e).value;
                     },
                     embedding_f1(cv, rv)});
    return cases;
}

}  // namespace oracle
