#pragma once

#include <map>
#include "json.hpp"
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cag/scoresheet.hpp"

namespace cag::ranking {

// Sum of the five dimension scores, in [5, 15]. Throws PreconditionError
// when any of the five cells is masked.
int total(const ScoreSheet& sheet, std::size_t item, std::size_t cand, std::size_t eval);

// Totals for every (item, candidate, evaluator) of items that evaluator
// scored completely. Key order: (item id, candidate id, evaluator id).
using TotalKey = std::tuple<std::string, std::string, std::string>;
std::map<TotalKey, int> totals(const ScoreSheet& sheet);

// Fractional ranks: the highest value gets rank 1 and tied values share
// the mean of the ranks they span. Requires at least two values.
std::vector<double> rank_descending(std::span<const double> values);
std::map<std::string, double> rank_candidates(const std::map<std::string, double>& totals);

// (item id, candidate id)
using ItemCandidate = std::pair<std::string, std::string>;

struct EvaluatorRanks {
    std::string evaluator;
    std::vector<std::string> items;  // items this evaluator scored completely
    std::map<ItemCandidate, double> ranks;
    std::vector<double> mean_rank;  // per sheet candidate; NaN if no items
};

struct RankTable {
    std::vector<std::string> candidates;
    std::vector<EvaluatorRanks> evaluators;

    // Mean over evaluators of their per-item ranks, for each (item,
    // candidate) that at least one evaluator ranked.
    std::map<ItemCandidate, double> pooled_item_ranks() const;
    // Mean rank per candidate over every (evaluator, complete item).
    std::vector<double> pooled_mean_rank() const;
};

// Ranks each evaluator's candidates per item by total score. Items an
// evaluator left incomplete are excluded from that evaluator's ranking.
RankTable rank_table(const ScoreSheet& sheet);

// result[evaluator][dimension][candidate] = mean over complete items of
// the candidate's rank on that single dimension. The last evaluator slot
// (index evaluators().size()) pools all evaluators.
using DimensionRanks = std::vector<std::array<std::vector<double>, kDimensionCount>>;
DimensionRanks per_dimension_ranks(const ScoreSheet& sheet);

// Pearson correlation of fractional ranks. Requires equal lengths >= 3
// and neither vector constant.
double spearman(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
    std::vector<std::string> methods;
    std::vector<double> rho;  // methods x methods, row-major
    std::size_t aligned_pairs = 0;

    double at(std::size_t i, std::size_t j) const { return rho[i * methods.size() + j]; }
};

// Pairwise Spearman over per-(item, candidate) rank vectors. Only keys
// present for every method are used (listwise deletion).
CorrelationMatrix correlation_matrix(
    const std::vector<std::pair<std::string, std::map<ItemCandidate, double>>>& methods);

nlohmann::json to_json(const CorrelationMatrix& m);
// Dense matrix with a header row and a leading method column.
std::string render_matrix_tsv(const CorrelationMatrix& m);

}  // namespace cag::ranking
