#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cag {

enum class Dimension : std::uint8_t { Opposition, Relatedness, Specificity, Factuality, Persuasiveness };

inline constexpr std::size_t kDimensionCount = 5;
inline constexpr std::array<Dimension, kDimensionCount> kDimensions = {
    Dimension::Opposition, Dimension::Relatedness, Dimension::Specificity, Dimension::Factuality,
    Dimension::Persuasiveness};

std::string_view dimension_name(Dimension d);
// Case-insensitive.
std::optional<Dimension> parse_dimension(std::string_view name);

inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 3;
inline constexpr std::string_view kGoldCandidate = "gold";

using DimensionScores = std::array<int, kDimensionCount>;

// Likert scores indexed by (item, candidate, evaluator, dimension). Stored
// densely; a zero cell is missing (masked).
class ScoreSheet {
public:
    ScoreSheet() = default;
    ScoreSheet(std::vector<std::string> items, std::vector<std::string> candidates,
               std::vector<std::string> evaluators);

    const std::vector<std::string>& items() const { return items_; }
    const std::vector<std::string>& candidates() const { return candidates_; }
    const std::vector<std::string>& evaluators() const { return evaluators_; }

    std::size_t item_index(std::string_view id) const;
    std::size_t candidate_index(std::string_view id) const;
    std::size_t evaluator_index(std::string_view id) const;
    std::optional<std::size_t> find_item(std::string_view id) const;
    std::optional<std::size_t> find_candidate(std::string_view id) const;
    std::optional<std::size_t> find_evaluator(std::string_view id) const;

    // Throws ValidationError when the score is outside [1, 3].
    void set(std::size_t item, std::size_t cand, std::size_t eval, Dimension d, int score);
    void clear(std::size_t item, std::size_t cand, std::size_t eval, Dimension d);
    // 0 when masked.
    int get(std::size_t item, std::size_t cand, std::size_t eval, Dimension d) const;
    bool present(std::size_t item, std::size_t cand, std::size_t eval, Dimension d) const {
        return get(item, cand, eval, d) != 0;
    }

    // All dimensions of every candidate are scored by `eval` for `item`.
    bool item_complete_for(std::size_t item, std::size_t eval) const;
    std::size_t present_count() const;
    std::size_t masked_count() const { return cells_.size() - present_count(); }
    std::size_t cell_count() const { return cells_.size(); }

    const std::vector<std::uint8_t>& raw() const { return cells_; }

    // Same id sets and the same score for every (item, candidate,
    // evaluator, dimension); list order does not matter.
    bool same_scores(const ScoreSheet& other) const;

private:
    std::size_t offset(std::size_t item, std::size_t cand, std::size_t eval, Dimension d) const;

    std::vector<std::string> items_, candidates_, evaluators_;
    std::unordered_map<std::string, std::size_t> item_ix_, cand_ix_, eval_ix_;
    std::vector<std::uint8_t> cells_;
};

// Tab-separated score file with header
//   item_id  candidate_id  evaluator_id  dimension  score
// Ids keep first-appearance order. Duplicate cells, scores outside
// [1, 3], unknown dimensions and (when `known_candidates` is given)
// unknown candidates are errors naming the row. The candidate set must
// include the gold reference. Cells absent from the file are masked.
ScoreSheet read_score_sheet(std::istream& in,
                            const std::vector<std::string>* known_candidates = nullptr,
                            const std::string& source = "<stream>");
ScoreSheet ingest_human_scores(const std::filesystem::path& path,
                               const std::vector<std::string>* known_candidates = nullptr);
void write_score_sheet(std::ostream& out, const ScoreSheet& sheet);
void save_score_sheet(const std::filesystem::path& path, const ScoreSheet& sheet);

}  // namespace cag
