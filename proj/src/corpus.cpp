#include "cag/corpus.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "cag/error.hpp"
#include "cag/prompts.hpp"
#include "cag/providers.hpp"
#include "cag/segment.hpp"
#include "cag/text.hpp"
#include "json.hpp"

namespace cag::corpus {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

bool valid_id(const std::string& id) {
    if (id.empty()) return false;
    for (unsigned char c : id) {
        if (!(std::isalnum(c) || c == '-' || c == '_' || c == '.')) return false;
    }
    return id != "." && id != "..";
}

std::string required_text(const json& j, const char* field, std::size_t line_no) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string())
        throw ValidationError("line " + std::to_string(line_no) + ": missing string field '" +
                              field + "'");
    std::string value = it->get<std::string>();
    if (text::is_blank(value))
        throw ValidationError("line " + std::to_string(line_no) + ": field '" + field +
                              "' is empty");
    return value;
}

}  // namespace

ArgumentPair parse_record(const std::string& line, std::size_t line_no) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw ValidationError("line " + std::to_string(line_no) + ": malformed record (" +
                              e.what() + ")");
    }
    if (!j.is_object())
        throw ValidationError("line " + std::to_string(line_no) + ": record is not an object");

    ArgumentPair p;
    p.id = required_text(j, "id", line_no);
    if (!valid_id(p.id))
        throw ValidationError("line " + std::to_string(line_no) + ": id '" + p.id +
                              "' must use only [A-Za-z0-9._-]");
    p.argument = required_text(j, "argument", line_no);
    p.gold_counter = required_text(j, "gold_counter", line_no);
    if (auto it = j.find("topic_tags"); it != j.end() && !it->is_null()) {
        if (!it->is_array())
            throw ValidationError("line " + std::to_string(line_no) +
                                  ": topic_tags must be a list of strings");
        std::vector<std::string> tags;
        for (const auto& t : *it) {
            if (!t.is_string())
                throw ValidationError("line " + std::to_string(line_no) +
                                      ": topic_tags must be a list of strings");
            tags.push_back(t.get<std::string>());
        }
        p.topic_tags = std::move(tags);
    }
    return p;
}

std::string serialize_record(const ArgumentPair& p) {
    ordered_json j;
    j["id"] = p.id;
    j["argument"] = p.argument;
    j["gold_counter"] = p.gold_counter;
    if (p.topic_tags) j["topic_tags"] = *p.topic_tags;
    return j.dump();
}

bool satisfies_strict(const ArgumentPair& p) {
    return analysis::sentence_count(p.argument) <= kMaxSentences &&
           analysis::sentence_count(p.gold_counter) <= kMaxSentences;
}

void check_strict(const ArgumentPair& p) {
    const auto arg_n = analysis::sentence_count(p.argument);
    const auto ctr_n = analysis::sentence_count(p.gold_counter);
    if (arg_n > kMaxSentences || ctr_n > kMaxSentences) {
        const bool arg_bad = arg_n > kMaxSentences;
        throw ValidationError("pair '" + p.id + "': " + (arg_bad ? "argument" : "gold_counter") +
                              " has " + std::to_string(arg_bad ? arg_n : ctr_n) +
                              " sentences, exceeding the maximum length of three sentences");
    }
}

std::vector<ArgumentPair> read_corpus(std::istream& in, bool strict) {
    std::vector<ArgumentPair> out;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::is_blank(line)) continue;
        ArgumentPair p = parse_record(line, line_no);
        if (!ids.insert(p.id).second)
            throw ValidationError("line " + std::to_string(line_no) + ": duplicate id '" + p.id + "'");
        if (strict) check_strict(p);
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<ArgumentPair> load_corpus(const std::filesystem::path& path, bool strict) {
    std::ifstream in(path);
    if (!in) throw ValidationError("corpus file not found: " + path.string());
    return read_corpus(in, strict);
}

void write_corpus(std::ostream& out, const std::vector<ArgumentPair>& pairs) {
    for (const auto& p : pairs) out << serialize_record(p) << '\n';
}

void save_corpus(const std::filesystem::path& path, const std::vector<ArgumentPair>& pairs) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write corpus file: " + path.string());
    write_corpus(out, pairs);
}

CorpusStats corpus_stats(const std::vector<ArgumentPair>& corpus) {
    if (corpus.empty()) throw PreconditionError("corpus_stats: empty corpus");
    double sa = 0, wa = 0, sc = 0, wc = 0;
    for (const auto& p : corpus) {
        sa += static_cast<double>(analysis::sentence_count(p.argument));
        wa += static_cast<double>(text::word_count(p.argument));
        sc += static_cast<double>(analysis::sentence_count(p.gold_counter));
        wc += static_cast<double>(text::word_count(p.gold_counter));
    }
    const double n = static_cast<double>(corpus.size());
    return CorpusStats{sa / n, wa / n, sc / n, wc / n, corpus.size()};
}

Summary summarize_text(ChatProvider& chat, const std::string& model_id, const std::string& input,
                       std::size_t max_sentences) {
    if (max_sentences < 1) throw PreconditionError("summarize_text: max_sentences must be >= 1");
    if (text::is_blank(input)) throw PreconditionError("summarize_text: empty text");
    ChatRequest req;
    req.model_id = model_id;
    req.prompt = prompts::summarize(input, max_sentences);
    Summary s;
    s.text = std::string(text::trim(chat.complete(req)));
    if (s.text.empty()) throw ProviderError("summarize_text: empty summary", false);
    s.sentences = analysis::sentence_count(s.text);
    s.over_length = s.sentences > max_sentences;
    return s;
}

}  // namespace cag::corpus
