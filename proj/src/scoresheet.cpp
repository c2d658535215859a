#include "cag/scoresheet.hpp"

#include <fstream>
#include <sstream>

#include "cag/error.hpp"
#include "cag/text.hpp"

namespace cag {

namespace {

constexpr std::array<std::string_view, kDimensionCount> kNames = {
    "Opposition", "Relatedness", "Specificity", "Factuality", "Persuasiveness"};

std::unordered_map<std::string, std::size_t> index_of(const std::vector<std::string>& ids,
                                                      const char* what) {
    std::unordered_map<std::string, std::size_t> ix;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (!ix.emplace(ids[i], i).second)
            throw ValidationError(std::string("duplicate ") + what + " id '" + ids[i] + "'");
    }
    return ix;
}

std::size_t lookup(const std::unordered_map<std::string, std::size_t>& ix, std::string_view id,
                   const char* what) {
    auto it = ix.find(std::string(id));
    if (it == ix.end()) throw ValidationError(std::string("unknown ") + what + " '" + std::string(id) + "'");
    return it->second;
}

std::optional<std::size_t> find_in(const std::unordered_map<std::string, std::size_t>& ix,
                                   std::string_view id) {
    auto it = ix.find(std::string(id));
    if (it == ix.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        auto tab = line.find('\t', pos);
        out.emplace_back(text::trim(std::string_view(line).substr(pos, tab - pos)));
        if (tab == std::string::npos) break;
        pos = tab + 1;
    }
    return out;
}

}  // namespace

std::string_view dimension_name(Dimension d) { return kNames[static_cast<std::size_t>(d)]; }

std::optional<Dimension> parse_dimension(std::string_view name) {
    const std::string lower = text::to_lower(text::trim(name));
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (lower == text::to_lower(kNames[i])) return static_cast<Dimension>(i);
    return std::nullopt;
}

ScoreSheet::ScoreSheet(std::vector<std::string> items, std::vector<std::string> candidates,
                       std::vector<std::string> evaluators)
    : items_(std::move(items)), candidates_(std::move(candidates)), evaluators_(std::move(evaluators)) {
    item_ix_ = index_of(items_, "item");
    cand_ix_ = index_of(candidates_, "candidate");
    eval_ix_ = index_of(evaluators_, "evaluator");
    cells_.assign(items_.size() * candidates_.size() * evaluators_.size() * kDimensionCount, 0);
}

std::size_t ScoreSheet::item_index(std::string_view id) const { return lookup(item_ix_, id, "item"); }
std::size_t ScoreSheet::candidate_index(std::string_view id) const {
    return lookup(cand_ix_, id, "candidate");
}
std::size_t ScoreSheet::evaluator_index(std::string_view id) const {
    return lookup(eval_ix_, id, "evaluator");
}
std::optional<std::size_t> ScoreSheet::find_item(std::string_view id) const { return find_in(item_ix_, id); }
std::optional<std::size_t> ScoreSheet::find_candidate(std::string_view id) const {
    return find_in(cand_ix_, id);
}
std::optional<std::size_t> ScoreSheet::find_evaluator(std::string_view id) const {
    return find_in(eval_ix_, id);
}

std::size_t ScoreSheet::offset(std::size_t item, std::size_t cand, std::size_t eval, Dimension d) const {
    return ((item * candidates_.size() + cand) * evaluators_.size() + eval) * kDimensionCount +
           static_cast<std::size_t>(d);
}

void ScoreSheet::set(std::size_t item, std::size_t cand, std::size_t eval, Dimension d, int score) {
    if (score < kMinScore || score > kMaxScore)
        throw ValidationError("score " + std::to_string(score) + " outside the 1-3 scale");
    cells_.at(offset(item, cand, eval, d)) = static_cast<std::uint8_t>(score);
}

void ScoreSheet::clear(std::size_t item, std::size_t cand, std::size_t eval, Dimension d) {
    cells_.at(offset(item, cand, eval, d)) = 0;
}

int ScoreSheet::get(std::size_t item, std::size_t cand, std::size_t eval, Dimension d) const {
    return cells_.at(offset(item, cand, eval, d));
}

bool ScoreSheet::item_complete_for(std::size_t item, std::size_t eval) const {
    for (std::size_t c = 0; c < candidates_.size(); ++c)
        for (auto d : kDimensions)
            if (!present(item, c, eval, d)) return false;
    return true;
}

std::size_t ScoreSheet::present_count() const {
    std::size_t n = 0;
    for (auto v : cells_) n += v != 0;
    return n;
}

bool ScoreSheet::same_scores(const ScoreSheet& o) const {
    if (items_.size() != o.items_.size() || candidates_.size() != o.candidates_.size() ||
        evaluators_.size() != o.evaluators_.size())
        return false;
    for (std::size_t i = 0; i < items_.size(); ++i) {
        auto oi = o.find_item(items_[i]);
        if (!oi) return false;
        for (std::size_t c = 0; c < candidates_.size(); ++c) {
            auto oc = o.find_candidate(candidates_[c]);
            if (!oc) return false;
            for (std::size_t e = 0; e < evaluators_.size(); ++e) {
                auto oe = o.find_evaluator(evaluators_[e]);
                if (!oe) return false;
                for (auto d : kDimensions)
                    if (get(i, c, e, d) != o.get(*oi, *oc, *oe, d)) return false;
            }
        }
    }
    return true;
}

ScoreSheet read_score_sheet(std::istream& in, const std::vector<std::string>* known_candidates,
                            const std::string& source) {
    struct Row {
        std::string item, cand, eval;
        Dimension dim;
        int score;
        std::size_t line_no;
    };
    std::vector<Row> rows;
    std::vector<std::string> items, cands, evals;
    std::unordered_map<std::string, bool> seen_item, seen_cand, seen_eval;

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    auto fail = [&](const std::string& msg) {
        throw ValidationError(source + " row " + std::to_string(line_no) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::is_blank(line)) continue;
        auto f = split_tabs(line);
        if (!header_seen) {
            const std::vector<std::string> expected = {"item_id", "candidate_id", "evaluator_id",
                                                       "dimension", "score"};
            if (f != expected)
                fail("header must be item_id, candidate_id, evaluator_id, dimension, score "
                     "(tab-separated)");
            header_seen = true;
            continue;
        }
        if (f.size() != 5) fail("expected 5 tab-separated fields, got " + std::to_string(f.size()));
        for (std::size_t k = 0; k < 4; ++k)
            if (f[k].empty()) fail("empty field");
        auto dim = parse_dimension(f[3]);
        if (!dim) fail("unknown dimension '" + f[3] + "'");
        int score = 0;
        try {
            std::size_t used = 0;
            score = std::stoi(f[4], &used);
            if (used != f[4].size()) fail("score '" + f[4] + "' is not an integer");
        } catch (const std::logic_error&) {
            fail("score '" + f[4] + "' is not an integer");
        }
        if (score < kMinScore || score > kMaxScore)
            fail("score " + std::to_string(score) + " outside the 1-3 scale");
        if (known_candidates) {
            bool known = false;
            for (const auto& k : *known_candidates) known = known || k == f[1];
            if (!known) fail("unknown candidate id '" + f[1] + "'");
        }
        if (!seen_item[f[0]]) { seen_item[f[0]] = true; items.push_back(f[0]); }
        if (!seen_cand[f[1]]) { seen_cand[f[1]] = true; cands.push_back(f[1]); }
        if (!seen_eval[f[2]]) { seen_eval[f[2]] = true; evals.push_back(f[2]); }
        rows.push_back(Row{f[0], f[1], f[2], *dim, score, line_no});
    }
    if (!header_seen) throw ValidationError(source + ": empty score file");
    if (!seen_cand[std::string(kGoldCandidate)])
        throw ValidationError(source + ": candidate set lacks the gold reference ('gold')");

    ScoreSheet sheet(items, cands, evals);
    for (const auto& r : rows) {
        const auto i = sheet.item_index(r.item);
        const auto c = sheet.candidate_index(r.cand);
        const auto e = sheet.evaluator_index(r.eval);
        if (sheet.present(i, c, e, r.dim)) {
            line_no = r.line_no;
            fail("duplicate cell (" + r.item + ", " + r.cand + ", " + r.eval + ", " +
                 std::string(dimension_name(r.dim)) + ")");
        }
        sheet.set(i, c, e, r.dim, r.score);
    }
    return sheet;
}

ScoreSheet ingest_human_scores(const std::filesystem::path& path,
                               const std::vector<std::string>* known_candidates) {
    std::ifstream in(path);
    if (!in) throw ValidationError("score file not found: " + path.string());
    return read_score_sheet(in, known_candidates, path.string());
}

void write_score_sheet(std::ostream& out, const ScoreSheet& s) {
    out << "item_id\tcandidate_id\tevaluator_id\tdimension\tscore\n";
    for (std::size_t i = 0; i < s.items().size(); ++i)
        for (std::size_t c = 0; c < s.candidates().size(); ++c)
            for (std::size_t e = 0; e < s.evaluators().size(); ++e)
                for (auto d : kDimensions) {
                    const int v = s.get(i, c, e, d);
                    if (v == 0) continue;
                    out << s.items()[i] << '\t' << s.candidates()[c] << '\t' << s.evaluators()[e]
                        << '\t' << dimension_name(d) << '\t' << v << '\n';
                }
}

void save_score_sheet(const std::filesystem::path& path, const ScoreSheet& sheet) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    write_score_sheet(out, sheet);
}

}  // namespace cag
