#include "cag/mock.hpp"

#include <cctype>
#include <sstream>

#include "cag/error.hpp"
#include "cag/prompts.hpp"
#include "cag/segment.hpp"
#include "cag/text.hpp"

namespace cag::mock {

namespace {

constexpr const char* kMockTimestamp = "1970-01-01T00:00:00Z";

std::string_view between(std::string_view s, std::string_view open, std::string_view close) {
    auto b = s.find(open);
    if (b == std::string_view::npos) return {};
    b += open.size();
    auto e = s.rfind(close);
    if (e == std::string_view::npos || e < b) return s.substr(b);
    return s.substr(b, e - b);
}

// First `n` words of `s`, lowercased initial, trailing punctuation removed.
std::string head_words(std::string_view s, std::size_t n) {
    auto words = text::split_whitespace(s);
    if (words.size() > n) words.resize(n);
    std::string out = text::join(words, " ");
    while (!out.empty() && std::ispunct(static_cast<unsigned char>(out.back()))) out.pop_back();
    if (!out.empty() && std::isupper(static_cast<unsigned char>(out[0])) &&
        !(out.size() > 1 && std::isupper(static_cast<unsigned char>(out[1]))))
        out[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(out[0])));
    return out;
}

std::vector<std::string> word_tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::string synth_queries(const ChatRequest& req) {
    const std::string_view claim =
        between(req.prompt, prompts::prefix_of(prompts::kQueryGeneration),
                "?\nProvide only questions");
    const std::string head = head_words(claim, 10);
    static constexpr std::array<std::string_view, 5> kLeads = {
        "What evidence contradicts the claim that ", "Is it true that ",
        "What do experts say about whether ", "What data undermines the idea that ",
        "What counterexamples exist to the view that "};
    const std::size_t shift = stable_hash(req.model_id) % kLeads.size();
    nlohmann::json qs = nlohmann::json::array();
    for (std::size_t k = 0; k < kLeads.size(); ++k)
        qs.push_back(std::string(kLeads[(k + shift) % kLeads.size()]) + head + "?");
    return nlohmann::json{{"queries", qs}}.dump();
}

std::string synth_with_knowledge(const ChatRequest& req, std::uint64_t h) {
    constexpr std::string_view kMid =
        ", provide a succinct counter-argument that refutes the following argument using "
        "information from the context: ";
    const std::string_view body =
        std::string_view(req.prompt).substr(prompts::prefix_of(prompts::kWithKnowledge).size());
    const auto mid = body.find(kMid);
    const std::string_view context = body.substr(0, mid);
    std::string_view claim = mid == std::string_view::npos ? std::string_view{} : body.substr(mid + kMid.size());
    claim = claim.substr(0, claim.rfind(".\nProvide only the answer"));
    const std::string head = head_words(claim, 10);

    std::vector<std::string> evidence;
    if (!text::is_blank(context)) evidence = analysis::segment_sentences(context);
    if (!evidence.empty() && h % 4 != 0) {
        std::string picked = evidence[(h >> 8) % evidence.size()];
        while (!picked.empty() && (picked[0] == '-' || picked[0] == '*' || picked[0] == ' '))
            picked.erase(0, 1);
        if (!picked.empty() && !std::ispunct(static_cast<unsigned char>(picked.back())))
            picked.push_back('.');
        return picked + " This directly challenges the argument that " + head +
               ". Policies built on that premise would ignore the available evidence.";
    }
    return "The argument that " + head +
           " overlooks important counter-evidence. Its reasoning rests on assumptions that do "
           "not hold in practice.";
}

std::string synth_parametric(const ChatRequest& req, std::uint64_t h) {
    const std::string_view claim = between(
        req.prompt, prompts::prefix_of(prompts::kParametric), "?\nProvide only the answer");
    const std::string head = head_words(claim, 10);
    static constexpr std::array<std::string_view, 3> kMiddles = {
        "Historical experience points the other way.",
        "Most empirical studies reach the opposite conclusion.",
        "The reasoning confuses correlation with causation."};
    return "The claim that " + head + " is not supported by the broader record. " +
           std::string(kMiddles[h % kMiddles.size()]) +
           " It also overlooks costs and trade-offs that critics have documented.";
}

std::string synth_judge(const ChatRequest& req) {
    static constexpr std::array<std::string_view, 5> kNames = {
        "Opposition", "Relatedness", "Specificity", "Factuality", "Persuasiveness"};
    std::string out;
    for (auto name : kNames) {
        const auto h = stable_hash(req.model_id + "|" + std::string(name) + "|" + req.prompt);
        out += std::string(name) + ": " + std::to_string(1 + h % 3) + "\n";
    }
    out.pop_back();
    return out;
}

std::string synth_summary(const ChatRequest& req) {
    const auto at = req.prompt.find("\n\n");
    const std::string_view body =
        at == std::string::npos ? std::string_view(req.prompt) : std::string_view(req.prompt).substr(at + 2);
    std::size_t limit = 3;
    const auto digits = req.prompt.find_first_of("0123456789");
    if (digits != std::string::npos) limit = std::stoul(req.prompt.substr(digits));
    auto sentences = analysis::segment_sentences(body);
    if (sentences.size() > limit) sentences.resize(limit);
    return text::join(sentences, " ");
}

}  // namespace

std::uint64_t stable_hash(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

ScriptedChat::ScriptedChat(std::string provider_id) : id_(std::move(provider_id)) {}

void ScriptedChat::add(std::string match, std::vector<std::string> replies) {
    std::lock_guard<std::mutex> g(mu_);
    rules_.push_back(Rule{std::move(match), std::deque<std::string>(replies.begin(), replies.end())});
}

std::vector<ChatRequest> ScriptedChat::requests() const {
    std::lock_guard<std::mutex> g(mu_);
    return log_;
}

std::string ScriptedChat::complete(const ChatRequest& req) {
    ++calls_;
    {
        std::lock_guard<std::mutex> g(mu_);
        log_.push_back(req);
    }
    if (failures_left_ > 0) {
        --failures_left_;
        throw ProviderError("scripted transport error", true);
    }
    std::lock_guard<std::mutex> g(mu_);
    for (auto& rule : rules_) {
        if (rule.replies.empty() || req.prompt.find(rule.match) == std::string::npos) continue;
        std::string reply = rule.replies.front();
        if (rule.replies.size() > 1) rule.replies.pop_front();
        return reply;
    }
    if (default_reply_) return *default_reply_;
    throw ProviderError("scripted chat: no reply for prompt", false);
}

std::string SyntheticChat::complete(const ChatRequest& req) {
    ++calls_;
    const std::uint64_t h =
        stable_hash(req.model_id + "#" + std::to_string(req.sample) + "#" + req.prompt);
    const std::string_view p = req.prompt;
    if (p.starts_with(prompts::prefix_of(prompts::kQueryGeneration))) return synth_queries(req);
    if (p.starts_with(prompts::prefix_of(prompts::kWithKnowledge))) return synth_with_knowledge(req, h);
    if (p.starts_with(prompts::prefix_of(prompts::kParametric))) return synth_parametric(req, h);
    if (p.starts_with(prompts::prefix_of(prompts::kJudge))) return synth_judge(req);
    if (p.starts_with(prompts::prefix_of(prompts::kSummarize))) return synth_summary(req);
    return "OK";
}

std::string RecordingChat::complete(const ChatRequest& req) {
    {
        std::lock_guard<std::mutex> g(mu_);
        log_.push_back(req);
    }
    return inner_->complete(req);
}

std::vector<ChatRequest> RecordingChat::requests() const {
    std::lock_guard<std::mutex> g(mu_);
    return log_;
}

void MockSearch::add(std::string question, std::string bullets) {
    std::lock_guard<std::mutex> g(mu_);
    answers_[std::move(question)] = std::move(bullets);
}

SearchAnswer MockSearch::search(const std::string& question) {
    ++calls_;
    if (failures_left_ > 0) {
        --failures_left_;
        throw ProviderError("mock search transport error", true);
    }
    SearchAnswer a;
    a.query = question;
    a.retrieved_at = kMockTimestamp;
    {
        std::lock_guard<std::mutex> g(mu_);
        if (auto it = answers_.find(question); it != answers_.end()) {
            a.answer_text = it->second;
            a.no_results = text::is_blank(a.answer_text);
            return a;
        }
    }
    if (!synthetic_) {
        a.no_results = true;
        return a;
    }
    const auto h = stable_hash(question);
    const std::string head = head_words(question, 12);
    const auto words = word_tokens(question);
    const std::string topic = words.size() > 2 ? words[words.size() - 2] + " " + words.back() : head;
    std::ostringstream os;
    os << "- Reports from several media outlets examine " << head << ".\n"
       << "- Analysts note that the evidence on " << topic << " is mixed and depends on context.\n"
       << "- A " << (2010 + h % 14) << " survey found that " << (20 + (h >> 5) % 60)
       << "% of respondents disagreed with the premise.\n"
       << "- Official statistics on " << topic << " show a trend of "
       << ((h >> 11) % 2 ? "decline" : "growth") << " over the last decade.";
    a.answer_text = os.str();
    a.source_urls = {"https://example.org/source/" + std::to_string(h % 1000)};
    return a;
}

std::vector<EmbeddingVector> HashedEmbedding::embed(std::span<const std::string> texts) {
    ++calls_;
    items_ += texts.size();
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        EmbeddingVector v;
        v.values.assign(dim_, 0.0);
        for (const auto& tok : word_tokens(t)) {
            const auto h = stable_hash(tok);
            v.values[h % dim_] += ((h >> 32) & 1) ? 1.0 : -1.0;
        }
        bool zero = true;
        for (double x : v.values) zero = zero && x == 0.0;
        v.zero_norm = zero;
        out.push_back(std::move(v));
    }
    return out;
}

std::vector<EmbeddingVector> BasisEmbedding::embed(std::span<const std::string> texts) {
    std::lock_guard<std::mutex> g(mu_);
    std::vector<EmbeddingVector> out;
    for (const auto& t : texts) {
        auto [it, inserted] = vocab_.emplace(t, vocab_.size());
        if (it->second >= dim_)
            throw ProviderError("basis embedding: vocabulary exceeds dimension", false);
        EmbeddingVector v;
        v.values.assign(dim_, 0.0);
        v.values[it->second] = 1.0;
        out.push_back(std::move(v));
    }
    return out;
}

void TableEmbedding::add(std::string t, std::vector<double> values) {
    table_[std::move(t)] = std::move(values);
}

std::vector<EmbeddingVector> TableEmbedding::embed(std::span<const std::string> texts) {
    ++calls_;
    std::vector<EmbeddingVector> out;
    for (const auto& t : texts) {
        auto it = table_.find(t);
        if (it == table_.end()) throw ProviderError("table embedding: unknown text '" + t + "'", false);
        out.push_back(EmbeddingVector{it->second});
    }
    return out;
}

}  // namespace cag::mock
