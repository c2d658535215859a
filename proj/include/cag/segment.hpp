#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cag::analysis {

// Rule-based sentence splitter.
//
// A sentence ends at a run of terminal punctuation (. ! ?), optionally
// followed by closing quotes or brackets, when the next character is
// whitespace or end of input. A period does not end a sentence when the
// word it closes is a known abbreviation, an initial ("A."), a dotted
// acronym ("U.S."), or when the next word starts lowercase. Line breaks
// always end a sentence, which keeps bullet lists one item per sentence.
//
// Sentences are returned trimmed; joining them back reproduces the input
// up to whitespace. Throws PreconditionError on blank input.
std::vector<std::string> segment_sentences(std::string_view text);

std::size_t sentence_count(std::string_view text);

bool is_abbreviation(std::string_view word);

}  // namespace cag::analysis
