#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cag {

class ChatProvider;

struct ArgumentPair {
    std::string id;
    std::string argument;
    std::string gold_counter;
    std::optional<std::vector<std::string>> topic_tags;

    friend bool operator==(const ArgumentPair&, const ArgumentPair&) = default;
};

struct CorpusStats {
    double mean_sentences_arg = 0.0;
    double mean_words_arg = 0.0;
    double mean_sentences_counter = 0.0;
    double mean_words_counter = 0.0;
    std::size_t item_count = 0;
};

namespace corpus {

// Upper bound on sentences per text in strict mode.
inline constexpr std::size_t kMaxSentences = 3;

// Parses one JSON line. `line_no` is only used in error messages.
ArgumentPair parse_record(const std::string& line, std::size_t line_no);
std::string serialize_record(const ArgumentPair& pair);

std::vector<ArgumentPair> read_corpus(std::istream& in, bool strict);
std::vector<ArgumentPair> load_corpus(const std::filesystem::path& path, bool strict);
void write_corpus(std::ostream& out, const std::vector<ArgumentPair>& pairs);
void save_corpus(const std::filesystem::path& path, const std::vector<ArgumentPair>& pairs);

// Throws ValidationError naming the pair when either text has more than
// kMaxSentences sentences.
void check_strict(const ArgumentPair& pair);
bool satisfies_strict(const ArgumentPair& pair);

CorpusStats corpus_stats(const std::vector<ArgumentPair>& corpus);

struct Summary {
    std::string text;
    std::size_t sentences = 0;
    bool over_length = false;
};

// Asks the chat provider for a summary of at most `max_sentences`
// sentences. Over-long replies are returned as-is with the flag set.
Summary summarize_text(ChatProvider& chat, const std::string& model_id, const std::string& text,
                       std::size_t max_sentences);

}  // namespace corpus
}  // namespace cag
