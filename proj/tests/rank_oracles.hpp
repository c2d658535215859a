#pragma once

// Independent ranking and correlation references plus random score-sheet
// generators for property tests.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "cag/scoresheet.hpp"

namespace oracle {

// Rank of v = 1 + (number strictly greater) + (number of other equal values) / 2.
inline std::vector<double> fractional_ranks(const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double greater = 0, equal = 0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] > v[i]) ++greater;
            else if (j != i && v[j] == v[i]) ++equal;
        }
        r[i] = 1 + greater + equal / 2;
    }
    return r;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = double(x.size());
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double cov = 0, vx = 0, vy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (x[i] - mx) * (y[i] - my);
        vx += (x[i] - mx) * (x[i] - mx);
        vy += (y[i] - my) * (y[i] - my);
    }
    return cov / std::sqrt(vx * vy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(fractional_ranks(x), fractional_ranks(y));
}

inline bool constant(const std::vector<double>& v) {
    for (double x : v)
        if (x != v.front()) return false;
    return true;
}

// Random sheet: `candidates` includes gold last; every cell present
// unless `mask_rate` > 0.
inline cag::ScoreSheet random_sheet(std::mt19937& rng, std::size_t items, std::size_t candidates,
                                    std::size_t evaluators, double mask_rate = 0.0) {
    std::vector<std::string> item_ids, cand_ids, eval_ids;
    for (std::size_t i = 0; i < items; ++i) item_ids.push_back("i" + std::to_string(i));
    for (std::size_t c = 0; c + 1 < candidates; ++c) cand_ids.push_back("s" + std::to_string(c));
    cand_ids.emplace_back("gold");
    for (std::size_t e = 0; e < evaluators; ++e) eval_ids.push_back("e" + std::to_string(e));
    cag::ScoreSheet sheet(item_ids, cand_ids, eval_ids);
    std::uniform_int_distribution<int> score(1, 3);
    std::uniform_real_distribution<double> u(0, 1);
    for (std::size_t i = 0; i < items; ++i)
        for (std::size_t c = 0; c < candidates; ++c)
            for (std::size_t e = 0; e < evaluators; ++e)
                for (auto d : cag::kDimensions)
                    if (u(rng) >= mask_rate) sheet.set(i, c, e, d, score(rng));
    return sheet;
}

}  // namespace oracle
