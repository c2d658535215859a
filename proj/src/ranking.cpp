#include "cag/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include "cag/error.hpp"
#include "cag/kernels.hpp"

namespace cag::ranking {

int total(const ScoreSheet& sheet, std::size_t item, std::size_t cand, std::size_t eval) {
    int sum = 0;
    for (auto d : kDimensions) {
        const int v = sheet.get(item, cand, eval, d);
        if (v == 0)
            throw PreconditionError("masked score for item '" + sheet.items()[item] +
                                    "', candidate '" + sheet.candidates()[cand] +
                                    "', evaluator '" + sheet.evaluators()[eval] + "', " +
                                    std::string(dimension_name(d)));
        sum += v;
    }
    return sum;
}

std::map<TotalKey, int> totals(const ScoreSheet& sheet) {
    std::map<TotalKey, int> out;
    for (std::size_t e = 0; e < sheet.evaluators().size(); ++e)
        for (std::size_t i = 0; i < sheet.items().size(); ++i) {
            if (!sheet.item_complete_for(i, e)) continue;
            for (std::size_t c = 0; c < sheet.candidates().size(); ++c)
                out[{sheet.items()[i], sheet.candidates()[c], sheet.evaluators()[e]}] =
                    total(sheet, i, c, e);
        }
    return out;
}

std::vector<double> rank_descending(std::span<const double> values) {
    if (values.size() < 2) throw PreconditionError("ranking needs at least 2 candidates");
    return kernels::serial::rank_groups_desc(values, values.size());
}

std::map<std::string, double> rank_candidates(const std::map<std::string, double>& totals_by_cand) {
    std::vector<double> v;
    for (const auto& [k, t] : totals_by_cand) v.push_back(t);
    const auto r = rank_descending(v);
    std::map<std::string, double> out;
    std::size_t i = 0;
    for (const auto& [k, t] : totals_by_cand) out[k] = r[i++];
    return out;
}

std::map<ItemCandidate, double> RankTable::pooled_item_ranks() const {
    std::map<ItemCandidate, std::pair<double, int>> acc;
    for (const auto& ev : evaluators)
        for (const auto& [key, r] : ev.ranks) {
            acc[key].first += r;
            acc[key].second += 1;
        }
    std::map<ItemCandidate, double> out;
    for (const auto& [key, a] : acc) out[key] = a.first / a.second;
    return out;
}

std::vector<double> RankTable::pooled_mean_rank() const {
    std::vector<double> sum(candidates.size(), 0.0);
    std::vector<int> n(candidates.size(), 0);
    for (const auto& ev : evaluators)
        for (const auto& [key, r] : ev.ranks) {
            for (std::size_t c = 0; c < candidates.size(); ++c)
                if (candidates[c] == key.second) {
                    sum[c] += r;
                    ++n[c];
                }
        }
    std::vector<double> out(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c)
        out[c] = n[c] ? sum[c] / n[c] : std::numeric_limits<double>::quiet_NaN();
    return out;
}

RankTable rank_table(const ScoreSheet& sheet) {
    const std::size_t nc = sheet.candidates().size();
    if (nc < 2) throw PreconditionError("ranking needs at least 2 candidates");
    RankTable table;
    table.candidates = sheet.candidates();
    for (std::size_t e = 0; e < sheet.evaluators().size(); ++e) {
        EvaluatorRanks er;
        er.evaluator = sheet.evaluators()[e];
        std::vector<std::size_t> included;
        std::vector<double> flat;
        for (std::size_t i = 0; i < sheet.items().size(); ++i) {
            if (!sheet.item_complete_for(i, e)) continue;
            included.push_back(i);
            for (std::size_t c = 0; c < nc; ++c) flat.push_back(total(sheet, i, c, e));
        }
        const auto ranks = flat.empty() ? std::vector<double>{}
                                        : kernels::parallel::rank_groups_desc(flat, nc);
        er.mean_rank.assign(nc, 0.0);
        for (std::size_t k = 0; k < included.size(); ++k) {
            const auto& item = sheet.items()[included[k]];
            er.items.push_back(item);
            for (std::size_t c = 0; c < nc; ++c) {
                const double r = ranks[k * nc + c];
                er.ranks[{item, sheet.candidates()[c]}] = r;
                er.mean_rank[c] += r;
            }
        }
        for (auto& m : er.mean_rank)
            m = included.empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : m / static_cast<double>(included.size());
        table.evaluators.push_back(std::move(er));
    }
    return table;
}

DimensionRanks per_dimension_ranks(const ScoreSheet& sheet) {
    const std::size_t nc = sheet.candidates().size();
    const std::size_t ne = sheet.evaluators().size();
    if (nc < 2) throw PreconditionError("ranking needs at least 2 candidates");
    DimensionRanks out(ne + 1);
    std::size_t pooled_count = 0;
    for (auto& slot : out)
        for (auto& v : slot) v.assign(nc, 0.0);

    for (std::size_t e = 0; e < ne; ++e) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < sheet.items().size(); ++i) {
            if (!sheet.item_complete_for(i, e)) continue;
            ++count;
            for (auto d : kDimensions) {
                std::vector<double> scores(nc);
                for (std::size_t c = 0; c < nc; ++c) scores[c] = sheet.get(i, c, e, d);
                const auto r = rank_descending(scores);
                for (std::size_t c = 0; c < nc; ++c) {
                    out[e][static_cast<std::size_t>(d)][c] += r[c];
                    out[ne][static_cast<std::size_t>(d)][c] += r[c];
                }
            }
        }
        for (auto& v : out[e])
            for (auto& x : v)
                x = count ? x / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
        pooled_count += count;
    }
    for (auto& v : out[ne])
        for (auto& x : v)
            x = pooled_count ? x / static_cast<double>(pooled_count)
                             : std::numeric_limits<double>::quiet_NaN();
    return out;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw PreconditionError("spearman: length mismatch");
    if (x.size() < 3) throw PreconditionError("spearman: need at least 3 observations");
    const auto rx = kernels::serial::rank_groups_desc(x, x.size());
    const auto ry = kernels::serial::rank_groups_desc(y, y.size());
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) throw PreconditionError("spearman: constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(
    const std::vector<std::pair<std::string, std::map<ItemCandidate, double>>>& methods) {
    if (methods.size() < 2) throw PreconditionError("correlation_matrix: need at least 2 methods");
    std::vector<ItemCandidate> common;
    for (const auto& [key, v] : methods.front().second) {
        bool everywhere = true;
        for (std::size_t m = 1; m < methods.size() && everywhere; ++m)
            everywhere = methods[m].second.count(key) > 0;
        if (everywhere) common.push_back(key);
    }
    if (common.size() < 3)
        throw PreconditionError("correlation_matrix: methods share only " +
                                std::to_string(common.size()) + " (item, candidate) pairs");

    std::vector<std::vector<double>> vec(methods.size());
    for (std::size_t m = 0; m < methods.size(); ++m)
        for (const auto& key : common) vec[m].push_back(methods[m].second.at(key));

    CorrelationMatrix out;
    out.aligned_pairs = common.size();
    const std::size_t k = methods.size();
    out.rho.assign(k * k, 1.0);
    for (const auto& m : methods) out.methods.push_back(m.first);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a + 1; b < k; ++b) {
            double r;
            try {
                r = spearman(vec[a], vec[b]);
            } catch (const PreconditionError&) {
                throw PreconditionError("correlation_matrix: ranking of '" + methods[a].first +
                                        "' or '" + methods[b].first + "' is constant");
            }
            out.rho[a * k + b] = r;
            out.rho[b * k + a] = r;
        }
    return out;
}

nlohmann::json to_json(const CorrelationMatrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < m.methods.size(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < m.methods.size(); ++j) row.push_back(m.at(i, j));
        rows.push_back(row);
    }
    return {{"methods", m.methods}, {"rho", rows}, {"aligned_pairs", m.aligned_pairs}};
}

std::string render_matrix_tsv(const CorrelationMatrix& m) {
    std::ostringstream os;
    os << "method";
    for (const auto& name : m.methods) os << '\t' << name;
    os << '\n';
    char buf[32];
    for (std::size_t i = 0; i < m.methods.size(); ++i) {
        os << m.methods[i];
        for (std::size_t j = 0; j < m.methods.size(); ++j) {
            std::snprintf(buf, sizeof buf, "\t%.4f", m.at(i, j));
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace cag::ranking
