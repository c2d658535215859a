#include "cag/judging.hpp"

#include <map>
#include "json.hpp"
#include <regex>

#include "cag/error.hpp"
#include "cag/parallel.hpp"
#include "cag/prompts.hpp"
#include "cag/text.hpp"

namespace cag::judging {

using nlohmann::json;

std::optional<DimensionScores> parse_verdict(const std::string& reply) {
    std::array<int, kDimensionCount> found{};
    found.fill(0);

    auto record = [&](std::string_view name, long value) -> bool {
        auto d = parse_dimension(name);
        if (!d) return true;
        if (value < kMinScore || value > kMaxScore) return false;
        found[static_cast<std::size_t>(*d)] = static_cast<int>(value);
        return true;
    };

    const auto brace = reply.find('{');
    if (brace != std::string::npos) {
        try {
            const json j = json::parse(reply.substr(brace, reply.rfind('}') - brace + 1));
            for (const auto& [k, v] : j.items()) {
                long value = 0;
                if (v.is_number_integer()) value = v.get<long>();
                else if (v.is_string()) value = std::stol(v.get<std::string>());
                else continue;
                if (!record(k, value)) return std::nullopt;
            }
        } catch (const std::exception&) {
        }
    }
    static const std::regex kLine(
        R"((Opposition|Relatedness|Specificity|Factuality|Persuasiveness)\**\s*[:=]\s*\**\s*(-?\d+))",
        std::regex::icase);
    for (auto it = std::sregex_iterator(reply.begin(), reply.end(), kLine); it != std::sregex_iterator();
         ++it) {
        const std::string digits = (*it)[2].str();
        if (digits.size() > 3 || !record((*it)[1].str(), std::stol(digits))) return std::nullopt;
    }
    for (int v : found)
        if (v == 0) return std::nullopt;
    return found;
}

Verdict judge_candidate(ChatProvider& chat, const std::string& judge_model,
                        const std::string& argument, const std::string& candidate,
                        int max_attempts) {
    if (text::is_blank(argument) || text::is_blank(candidate))
        throw PreconditionError("judge_candidate: empty argument or candidate");
    ChatRequest req{judge_model, prompts::judge(argument, candidate)};
    const int limit = std::max(1, max_attempts);
    for (int attempt = 0; attempt < limit; ++attempt) {
        req.sample = attempt;
        if (auto scores = parse_verdict(chat.complete(req))) return Verdict{*scores, attempt};
    }
    throw ParseError("judge_candidate: no valid five-dimension verdict after " +
                         std::to_string(limit) + " attempt(s)",
                     limit);
}

std::vector<std::string> candidate_ids(const std::vector<SystemConfig>& systems) {
    std::vector<std::string> ids;
    for (const auto& s : systems) {
        if (s.id == kGoldCandidate)
            throw ValidationError("system id 'gold' is reserved for the reference");
        ids.push_back(s.id);
    }
    ids.emplace_back(kGoldCandidate);
    return ids;
}

JudgeSheet build_judge_sheet(ChatProvider& chat, const std::string& judge_id,
                             const std::string& judge_model,
                             const std::vector<GenerationRecord>& generations,
                             const std::vector<ArgumentPair>& corpus,
                             const std::vector<SystemConfig>& systems, std::size_t fan_out,
                             int max_attempts) {
    std::vector<std::string> items;
    for (const auto& p : corpus) items.push_back(p.id);
    const auto cands = candidate_ids(systems);
    JudgeSheet out{ScoreSheet(items, cands, {judge_id}), {}};

    std::map<std::pair<std::string, std::string>, const GenerationRecord*> by_key;
    for (const auto& g : generations) by_key[{g.argument_id, g.system_id}] = &g;

    struct Cell {
        std::size_t item, cand;
        std::optional<DimensionScores> scores;
        std::string error;
    };
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < items.size(); ++i)
        for (std::size_t c = 0; c < cands.size(); ++c) cells.push_back(Cell{i, c, std::nullopt, {}});

    bounded_for(cells.size(), fan_out, [&](std::size_t k) {
        Cell& cell = cells[k];
        const ArgumentPair& pair = corpus[cell.item];
        std::string candidate_text;
        if (cands[cell.cand] == kGoldCandidate) {
            candidate_text = pair.gold_counter;
        } else if (auto it = by_key.find({pair.id, cands[cell.cand]}); it != by_key.end()) {
            candidate_text = it->second->counter_text;
        } else {
            cell.error = "no generation for this candidate";
            return;
        }
        try {
            cell.scores = judge_candidate(chat, judge_model, pair.argument, candidate_text,
                                          max_attempts).scores;
        } catch (const Error& e) {
            cell.error = e.what();
        }
    });

    for (const auto& cell : cells) {
        if (!cell.scores) {
            out.failures.push_back(CellFailure{items[cell.item], cands[cell.cand], cell.error});
            continue;
        }
        for (auto d : kDimensions)
            out.sheet.set(cell.item, cell.cand, 0, d, (*cell.scores)[static_cast<std::size_t>(d)]);
    }
    return out;
}

}  // namespace cag::judging
