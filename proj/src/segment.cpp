#include "cag/segment.hpp"

#include <array>
#include <cctype>
#include <string_view>

#include "cag/error.hpp"
#include "cag/text.hpp"

namespace cag::analysis {

namespace {

constexpr std::array<std::string_view, 40> kAbbreviations = {
    "mr",   "mrs",  "ms",   "dr",    "prof", "sr",   "jr",  "st",  "vs",   "etc",
    "e.g",  "i.e",  "inc",  "ltd",   "co",   "corp", "pp",  "fig", "approx", "dept",
    "est",  "jan",  "feb",  "mar",   "apr",  "jun",  "jul", "aug", "sep",  "sept",
    "oct",  "nov",  "dec",  "u.s",   "u.k",  "mt",   "gen", "gov", "sen",  "rep"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }

// "A", "U.S", "e.g" style tokens: letters separated by single dots.
bool is_dotted_initials(std::string_view w) {
    if (w.empty()) return false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const bool letter_slot = (i % 2 == 0);
        if (letter_slot && !std::isalpha(static_cast<unsigned char>(w[i]))) return false;
        if (!letter_slot && w[i] != '.') return false;
    }
    return true;
}

// Word immediately before position `dot` (exclusive), without leading
// quotes or brackets.
std::string_view word_before(std::string_view s, std::size_t dot) {
    std::size_t b = dot;
    while (b > 0 && !is_space(s[b - 1])) --b;
    std::string_view w = s.substr(b, dot - b);
    while (!w.empty() && (w.front() == '"' || w.front() == '(' || w.front() == '[' ||
                          w.front() == '\''))
        w.remove_prefix(1);
    return w;
}

// UTF-8 curly closing quotes (U+2019, U+201D) count as closers.
std::size_t closer_length(std::string_view s, std::size_t i) {
    if (i < s.size() && is_closer(s[i])) return 1;
    if (i < s.size() && (s.substr(i, 3) == "\xE2\x80\x99" || s.substr(i, 3) == "\xE2\x80\x9D"))
        return 3;
    return 0;
}

}  // namespace

bool is_abbreviation(std::string_view word) {
    const std::string lw = text::to_lower(word);
    for (auto a : kAbbreviations)
        if (lw == a) return true;
    return false;
}

std::vector<std::string> segment_sentences(std::string_view input) {
    if (text::is_blank(input)) throw PreconditionError("segment_sentences: empty text");

    std::vector<std::string> out;
    std::size_t start = 0;
    auto emit = [&](std::size_t end) {
        auto piece = text::trim(input.substr(start, end - start));
        if (!piece.empty()) out.emplace_back(piece);
        start = end;
    };

    std::size_t i = 0;
    while (i < input.size()) {
        const char c = input[i];
        if (c == '\n') {
            emit(i);
            ++i;
            continue;
        }
        if (!is_terminal(c)) {
            ++i;
            continue;
        }
        const std::size_t punct_begin = i;
        while (i < input.size() && is_terminal(input[i])) ++i;
        while (std::size_t n = closer_length(input, i)) i += n;
        if (i < input.size() && !is_space(input[i])) continue;  // "3.5", "a.b"

        bool split = true;
        const bool single_period = (i - punct_begin == 1 || input[punct_begin + 1] != '.') &&
                                   input[punct_begin] == '.';
        if (single_period) {
            std::string_view w = word_before(input, punct_begin);
            if (is_abbreviation(w) || is_dotted_initials(w)) split = false;
        }
        if (input[punct_begin] == '.') {
            std::size_t k = i;
            while (k < input.size() && is_space(input[k]) && input[k] != '\n') ++k;
            if (k < input.size() && std::islower(static_cast<unsigned char>(input[k])))
                split = false;
        }
        if (split) emit(i);
    }
    emit(input.size());
    if (out.empty()) out.emplace_back(text::trim(input));
    return out;
}

std::size_t sentence_count(std::string_view t) { return segment_sentences(t).size(); }

}  // namespace cag::analysis
