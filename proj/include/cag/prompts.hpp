#pragma once

#include <array>
#include <string>
#include <string_view>

namespace cag::prompts {

// Generation-step templates. Placeholders are {claim}, {question} and
// {qacontext}; line breaks are literal '\n'.
inline constexpr std::string_view kQueryGeneration =
    "Generate a list of 5 queries for web-search that would help to find information to "
    "question the veracity of the given claim and persuade to take the opposing position: "
    "{claim}?\n"
    "Provide only questions and nothing else. The answer should be in JSON.";

inline constexpr std::string_view kWebSearch =
    "Answer the question from the following text: {question}?\n"
    "1. Find factual information from different media outlets\n"
    "2. Provide the evidence in a bullet point manner.\n"
    "3. Do not output anything else.";

inline constexpr std::string_view kWithKnowledge =
    "Given the following context: {qacontext}, provide a succinct counter-argument that refutes "
    "the following argument using information from the context: {claim}.\n"
    "Provide only the answer and nothing else.\n"
    "Make sure the answer is no longer than 3 sentences.";

inline constexpr std::string_view kParametric =
    "Generate a succinct counter-argument that refutes the following claim: {claim}?\n"
    "Provide only the answer and nothing else.\n"
    "Make sure the answer is no longer than 3 sentences.";

// Dataset-construction aid; {max_sentences} and {text}.
inline constexpr std::string_view kSummarize =
    "Summarize the following text in at most {max_sentences} sentences, keeping its main claim "
    "and supporting evidence. Provide only the summary and nothing else.\n\n{text}";

// Judge instructions. Candidates are shown anonymously: the template never
// names the system that produced the text.
inline constexpr std::string_view kJudge =
    "You are evaluating a counter-argument written in response to an argument.\n\n"
    "Argument:\n{argument}\n\n"
    "Counter-argument:\n{candidate}\n\n"
    "Rate the counter-argument on each of the following five dimensions using a 3-point scale: "
    "1 = unsatisfactory, 2 = moderately satisfactory, 3 = highly satisfactory.\n"
    "- Opposition: does the counter-argument take a stance that opposes the argument?\n"
    "- Relatedness: does the counter-argument stay on the topic of the argument and address "
    "its points?\n"
    "- Specificity: does the counter-argument make specific, focused points rather than generic "
    "statements?\n"
    "- Factuality: is the content of the counter-argument factually accurate and supported by "
    "evidence?\n"
    "- Persuasiveness: how convincing is the counter-argument?\n\n"
    "Reply with exactly these five lines and nothing else, replacing <score> with 1, 2 or 3:\n"
    "Opposition: <score>\n"
    "Relatedness: <score>\n"
    "Specificity: <score>\n"
    "Factuality: <score>\n"
    "Persuasiveness: <score>";

// Replaces every "{name}" with `value`, scanning left to right. Text
// inserted for one placeholder is never rescanned.
std::string fill(std::string_view tmpl, std::string_view name, std::string_view value);

std::string query_generation(std::string_view claim);
std::string web_search(std::string_view question);
std::string with_knowledge(std::string_view qacontext, std::string_view claim);
std::string parametric(std::string_view claim);
std::string summarize(std::string_view text, std::size_t max_sentences);
std::string judge(std::string_view argument, std::string_view candidate);

// Leading text of each template up to its first placeholder; used to
// recognise prompt kinds (mock providers, prompt audits).
std::string_view prefix_of(std::string_view tmpl);

}  // namespace cag::prompts
