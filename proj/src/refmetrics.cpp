#include "cag/refmetrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cag/error.hpp"
#include "cag/kernels.hpp"
#include "cag/segment.hpp"
#include "cag/stemmer.hpp"
#include "cag/text.hpp"

namespace cag::refmetrics {

using nlohmann::json;

namespace {

bool word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

void require_text(std::string_view s, const char* op) {
    if (text::is_blank(s)) throw PreconditionError(std::string(op) + ": empty input");
}

using Ngram = std::vector<std::string>;

std::map<Ngram, int> ngram_counts(const std::vector<std::string>& toks, int n) {
    std::map<Ngram, int> out;
    if (static_cast<int>(toks.size()) < n) return out;
    for (std::size_t i = 0; i + n <= toks.size(); ++i)
        ++out[Ngram(toks.begin() + static_cast<long>(i), toks.begin() + static_cast<long>(i) + n)];
    return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) out.push_back(std::move(cur));
        cur.clear();
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto c = static_cast<unsigned char>(s[i]);
        if (std::isspace(c)) {
            flush();
        } else if (word_byte(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if ((c == '\'' || c == '-') && !cur.empty() && i + 1 < s.size() &&
                   word_byte(static_cast<unsigned char>(s[i + 1]))) {
            cur.push_back(static_cast<char>(c));
        } else {
            flush();
            out.emplace_back(1, static_cast<char>(c));
        }
    }
    flush();
    return out;
}

MetricResult bleu(std::string_view candidate, std::string_view reference) {
    require_text(candidate, "bleu");
    require_text(reference, "bleu");
    const auto cand = tokenize(candidate);
    const auto ref = tokenize(reference);

    MetricResult r{"bleu", 0.0, json::object()};
    json precisions = json::array();
    double log_sum = 0.0;
    int orders = 0;
    bool zero = false;
    for (int n = 1; n <= kBleuMaxOrder; ++n) {
        const auto cc = ngram_counts(cand, n);
        const auto rc = ngram_counts(ref, n);
        int total = 0, clipped = 0;
        for (const auto& [g, k] : cc) {
            total += k;
            auto it = rc.find(g);
            if (it != rc.end()) clipped += std::min(k, it->second);
        }
        if (total == 0) {
            precisions.push_back({{"n", n}, {"matches", 0}, {"total", 0}, {"precision", nullptr}});
            continue;
        }
        double p = static_cast<double>(clipped) / total;
        if (clipped == 0) {
            if (n == 1) zero = true;
            p = kBleuEpsilon / total;
        }
        precisions.push_back({{"n", n}, {"matches", clipped}, {"total", total}, {"precision", p}});
        log_sum += std::log(p);
        ++orders;
    }
    const double c = static_cast<double>(cand.size());
    const double rl = static_cast<double>(ref.size());
    const double bp = c > rl ? 1.0 : std::exp(1.0 - rl / c);
    r.value = zero ? 0.0 : bp * std::exp(log_sum / orders);
    r.value = std::clamp(r.value, 0.0, 1.0);
    r.details = {{"precisions", precisions},
                 {"brevity_penalty", bp},
                 {"candidate_length", cand.size()},
                 {"reference_length", ref.size()}};
    return r;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

MetricResult rouge_l(std::string_view candidate, std::string_view reference) {
    require_text(candidate, "rouge_l");
    require_text(reference, "rouge_l");
    const auto cand = tokenize(candidate);
    const auto ref = tokenize(reference);
    const std::size_t lcs = lcs_length(cand, ref);
    const double p = static_cast<double>(lcs) / static_cast<double>(cand.size());
    const double rec = static_cast<double>(lcs) / static_cast<double>(ref.size());
    const double f = lcs == 0 ? 0.0 : 2.0 * p * rec / (p + rec);
    return MetricResult{"rouge_l", f,
                        {{"lcs", lcs},
                         {"precision", p},
                         {"recall", rec},
                         {"candidate_length", cand.size()},
                         {"reference_length", ref.size()}}};
}

void SynonymLexicon::add_group(const std::vector<std::string>& words) {
    const std::size_t g = groups_++;
    for (const auto& w : words) {
        const std::string lw = text::to_lower(text::trim(w));
        if (!lw.empty()) group_of_[lw].push_back(g);
    }
}

bool SynonymLexicon::synonyms(const std::string& a, const std::string& b) const {
    auto ia = group_of_.find(a);
    auto ib = group_of_.find(b);
    if (ia == group_of_.end() || ib == group_of_.end()) return false;
    for (auto ga : ia->second)
        for (auto gb : ib->second)
            if (ga == gb) return true;
    return false;
}

SynonymLexicon SynonymLexicon::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("synonym lexicon not found: " + path.string());
    SynonymLexicon lex;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::is_blank(line) || text::trim(line).front() == '#') continue;
        std::vector<std::string> words;
        std::size_t pos = 0;
        while (true) {
            auto tab = line.find('\t', pos);
            words.emplace_back(text::trim(std::string_view(line).substr(pos, tab - pos)));
            if (tab == std::string::npos) break;
            pos = tab + 1;
        }
        for (const auto& w : words) {
            if (w.empty() || text::split_whitespace(w).size() != 1)
                throw ValidationError(path.string() + " line " + std::to_string(line_no) +
                                      ": synonym entries must be single non-empty words");
        }
        if (words.size() < 2)
            throw ValidationError(path.string() + " line " + std::to_string(line_no) +
                                  ": a synonym group needs at least two tab-separated words");
        lex.add_group(words);
    }
    return lex;
}

MetricResult meteor(std::string_view candidate, std::string_view reference,
                    const SynonymLexicon* synonyms, const MeteorParams& params) {
    require_text(candidate, "meteor");
    require_text(reference, "meteor");
    const auto cand = tokenize(candidate);
    const auto ref = tokenize(reference);
    std::vector<std::string> cand_stem, ref_stem;
    for (const auto& t : cand) cand_stem.push_back(porter_stem(t));
    for (const auto& t : ref) ref_stem.push_back(porter_stem(t));

    std::vector<long> cand_to_ref(cand.size(), -1);
    std::vector<bool> ref_used(ref.size(), false);
    std::array<int, 3> per_stage{0, 0, 0};
    auto stage = [&](int which, auto&& match) {
        for (std::size_t i = 0; i < cand.size(); ++i) {
            if (cand_to_ref[i] >= 0) continue;
            for (std::size_t j = 0; j < ref.size(); ++j) {
                if (ref_used[j] || !match(i, j)) continue;
                cand_to_ref[i] = static_cast<long>(j);
                ref_used[j] = true;
                ++per_stage[which];
                break;
            }
        }
    };
    stage(0, [&](std::size_t i, std::size_t j) { return cand[i] == ref[j]; });
    stage(1, [&](std::size_t i, std::size_t j) { return cand_stem[i] == ref_stem[j]; });
    if (synonyms != nullptr && !synonyms->empty())
        stage(2, [&](std::size_t i, std::size_t j) { return synonyms->synonyms(cand[i], ref[j]); });

    std::size_t matches = 0, chunks = 0;
    long prev_ref = -2;
    bool prev_aligned = false;
    for (std::size_t i = 0; i < cand.size(); ++i) {
        if (cand_to_ref[i] < 0) {
            prev_aligned = false;
            continue;
        }
        ++matches;
        if (!prev_aligned || cand_to_ref[i] != prev_ref + 1) ++chunks;
        prev_ref = cand_to_ref[i];
        prev_aligned = true;
    }

    MetricResult r{"meteor", 0.0, json::object()};
    double p = 0, rec = 0, fmean = 0, frag = 0, penalty = 0;
    if (matches > 0) {
        p = static_cast<double>(matches) / static_cast<double>(cand.size());
        rec = static_cast<double>(matches) / static_cast<double>(ref.size());
        fmean = p * rec / (params.alpha * p + (1.0 - params.alpha) * rec);
        frag = matches > 1 ? static_cast<double>(chunks - 1) / static_cast<double>(matches - 1) : 0.0;
        penalty = params.gamma * std::pow(frag, params.beta);
        r.value = std::clamp(fmean * (1.0 - penalty), 0.0, 1.0);
    }
    r.details = {{"matches", matches},
                 {"exact", per_stage[0]},
                 {"stem", per_stage[1]},
                 {"synonym", per_stage[2]},
                 {"chunks", chunks},
                 {"precision", p},
                 {"recall", rec},
                 {"fmean", fmean},
                 {"fragmentation", frag},
                 {"penalty", penalty}};
    return r;
}

std::vector<std::string> embedding_units(std::string_view t, EmbeddingUnits units) {
    if (units == EmbeddingUnits::Sentence) return analysis::segment_sentences(t);
    auto toks = tokenize(t);
    std::vector<std::string> words;
    for (const auto& tok : toks)
        if (tok.size() > 1 || word_byte(static_cast<unsigned char>(tok[0]))) words.push_back(tok);
    return words.empty() ? toks : words;
}

MetricResult embedding_f1_from_vectors(const std::vector<EmbeddingVector>& cu,
                                       const std::vector<EmbeddingVector>& ru) {
    if (cu.empty() || ru.empty()) throw PreconditionError("embedding_f1: no units");
    const auto sim = kernels::serial::cosine_matrix(kernels::stack(cu), kernels::stack(ru));
    auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    std::vector<double> best_c(sim.rows, 0.0), best_r(sim.cols, 0.0);
    for (std::size_t i = 0; i < sim.rows; ++i)
        for (std::size_t j = 0; j < sim.cols; ++j) {
            const double v = clamp01(sim.at(i, j));
            best_c[i] = std::max(best_c[i], v);
            best_r[j] = std::max(best_r[j], v);
        }
    double p = 0, rec = 0;
    for (double v : best_c) p += v;
    for (double v : best_r) rec += v;
    p /= static_cast<double>(best_c.size());
    rec /= static_cast<double>(best_r.size());
    const double f = p + rec > 0 ? 2.0 * p * rec / (p + rec) : 0.0;
    return MetricResult{"embedding_f1", clamp01(f),
                        {{"precision", p},
                         {"recall", rec},
                         {"candidate_units", sim.rows},
                         {"reference_units", sim.cols},
                         {"candidate_best", best_c},
                         {"reference_best", best_r}}};
}

MetricResult embedding_f1(std::string_view candidate, std::string_view reference,
                          EmbeddingProvider& embedder, EmbeddingUnits units) {
    require_text(candidate, "embedding_f1");
    require_text(reference, "embedding_f1");
    const auto cu = embedding_units(candidate, units);
    const auto ru = embedding_units(reference, units);
    std::vector<std::string> all(cu);
    all.insert(all.end(), ru.begin(), ru.end());
    auto vecs = embedder.embed(all);
    if (vecs.size() != all.size()) throw ProviderError("embedder returned wrong batch size", false);
    std::vector<EmbeddingVector> cv(vecs.begin(), vecs.begin() + static_cast<long>(cu.size()));
    std::vector<EmbeddingVector> rv(vecs.begin() + static_cast<long>(cu.size()), vecs.end());
    return embedding_f1_from_vectors(cv, rv);
}

MetricTable score_generations(const std::vector<GenerationRecord>& generations,
                              const std::vector<ArgumentPair>& corpus, EmbeddingProvider& embedder,
                              const ScoreOptions& options) {
    std::map<std::string, const ArgumentPair*> gold;
    for (const auto& p : corpus) gold[p.id] = &p;

    struct Work {
        const GenerationRecord* gen;
        const ArgumentPair* pair;
        std::vector<std::size_t> cand_units, ref_units;
    };
    std::vector<Work> work;
    std::vector<std::string> unique_units;
    std::map<std::string, std::size_t> unit_ix;
    auto intern = [&](const std::string& u) {
        auto [it, inserted] = unit_ix.emplace(u, unique_units.size());
        if (inserted) unique_units.push_back(u);
        return it->second;
    };
    for (const auto& g : generations) {
        auto it = gold.find(g.argument_id);
        if (it == gold.end())
            throw ValidationError("no gold reference for generation '" + g.argument_id + "'");
        Work w{&g, it->second, {}, {}};
        for (const auto& u : embedding_units(g.counter_text, options.units)) w.cand_units.push_back(intern(u));
        for (const auto& u : embedding_units(it->second->gold_counter, options.units))
            w.ref_units.push_back(intern(u));
        work.push_back(std::move(w));
    }
    std::vector<EmbeddingVector> vectors;
    if (!unique_units.empty()) vectors = embedder.embed(unique_units);
    if (vectors.size() != unique_units.size())
        throw ProviderError("embedder returned wrong batch size", false);

    MetricTable table;
    table.per_item.resize(work.size());
    kernels::parallel::map_indices(work.size(), [&](std::size_t k) {
        const Work& w = work[k];
        ItemMetrics m;
        m.argument_id = w.gen->argument_id;
        m.system_id = w.gen->system_id;
        m.bleu = bleu(w.gen->counter_text, w.pair->gold_counter).value;
        m.rouge = rouge_l(w.gen->counter_text, w.pair->gold_counter).value;
        m.meteor = meteor(w.gen->counter_text, w.pair->gold_counter, options.synonyms).value;
        std::vector<EmbeddingVector> cv, rv;
        for (auto u : w.cand_units) cv.push_back(vectors[u]);
        for (auto u : w.ref_units) rv.push_back(vectors[u]);
        m.bertscore = embedding_f1_from_vectors(cv, rv).value;
        table.per_item[k] = std::move(m);
        return 0.0;
    });

    for (const auto& m : table.per_item) {
        auto row = std::find_if(table.rows.begin(), table.rows.end(),
                                [&](const MetricRow& r) { return r.system_id == m.system_id; });
        if (row == table.rows.end()) {
            table.rows.push_back(MetricRow{m.system_id});
            row = table.rows.end() - 1;
        }
        row->bleu += m.bleu;
        row->rouge += m.rouge;
        row->meteor += m.meteor;
        row->bertscore += m.bertscore;
        ++row->items;
    }
    for (auto& row : table.rows) {
        const double n = static_cast<double>(row.items);
        row.bleu = 100.0 * row.bleu / n;
        row.rouge = 100.0 * row.rouge / n;
        row.meteor = 100.0 * row.meteor / n;
        row.bertscore = 100.0 * row.bertscore / n;
        row.avg = (row.bleu + row.rouge + row.meteor + row.bertscore) / 4.0;
    }
    return table;
}

std::string format_latex_row(const std::string& name, const MetricRow& row) {
    char buf[256];
    std::snprintf(buf, sizeof buf, " & %.2f & %.2f & %.2f & %.2f & %.2f \\\\", row.bleu, row.rouge,
                  row.meteor, row.bertscore, row.avg);
    return name + buf;
}

std::string render_table(const MetricTable& table) {
    std::size_t width = 6;
    for (const auto& r : table.rows) width = std::max(width, r.system_id.size());
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-*s %9s %9s %9s %9s %9s\n", static_cast<int>(width), "System",
                  "BLEU", "ROUGE", "METEOR", "BERTScore", "Avg");
    os << buf;
    for (const auto& r : table.rows) {
        std::snprintf(buf, sizeof buf, "%-*s %9.2f %9.2f %9.2f %9.2f %9.2f\n",
                      static_cast<int>(width), r.system_id.c_str(), r.bleu, r.rouge, r.meteor,
                      r.bertscore, r.avg);
        os << buf;
    }
    return os.str();
}

json to_json(const MetricTable& table) {
    json rows = json::array();
    for (const auto& r : table.rows)
        rows.push_back({{"system_id", r.system_id},
                        {"BLEU", r.bleu},
                        {"ROUGE", r.rouge},
                        {"METEOR", r.meteor},
                        {"BERTScore", r.bertscore},
                        {"Avg", r.avg},
                        {"items", r.items}});
    json items = json::array();
    for (const auto& m : table.per_item)
        items.push_back({{"argument_id", m.argument_id},
                         {"system_id", m.system_id},
                         {"bleu", m.bleu},
                         {"rouge", m.rouge},
                         {"meteor", m.meteor},
                         {"bertscore", m.bertscore}});
    return {{"rows", rows}, {"per_item", items}};
}

}  // namespace cag::refmetrics
