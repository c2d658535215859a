#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cag/corpus.hpp"
#include "cag/pipeline.hpp"
#include "cag/providers.hpp"
#include "cag/scoresheet.hpp"

namespace cag::judging {

// Parses a verdict of the form "Dimension: score" (one per line, any
// order, case-insensitive) or a JSON object keyed by dimension. Returns
// nullopt unless all five dimensions are present with a score in [1, 3].
std::optional<DimensionScores> parse_verdict(const std::string& reply);

struct Verdict {
    DimensionScores scores{};
    int retries = 0;
};

// One independent judge call per (argument, candidate). Unparseable or
// out-of-range verdicts trigger a re-prompt, up to `max_attempts` calls.
Verdict judge_candidate(ChatProvider& chat, const std::string& judge_model,
                        const std::string& argument, const std::string& candidate,
                        int max_attempts = 3);

struct CellFailure {
    std::string item_id;
    std::string candidate_id;
    std::string error;
};

struct JudgeSheet {
    ScoreSheet sheet;
    std::vector<CellFailure> failures;  // masked (item, candidate) pairs
};

// Candidate ids for an evaluation: system ids in order, then the gold reference.
std::vector<std::string> candidate_ids(const std::vector<SystemConfig>& systems);

// Scores every corpus item's candidates (all systems plus the gold
// reference) with a single judge. A missing generation or a judge failure
// masks that (item, candidate) and is reported in `failures`.
JudgeSheet build_judge_sheet(ChatProvider& chat, const std::string& judge_id,
                             const std::string& judge_model,
                             const std::vector<GenerationRecord>& generations,
                             const std::vector<ArgumentPair>& corpus,
                             const std::vector<SystemConfig>& systems, std::size_t fan_out = 4,
                             int max_attempts = 3);

}  // namespace cag::judging
