#include "cag/prompts.hpp"

namespace cag::prompts {

std::string fill(std::string_view tmpl, std::string_view name, std::string_view value) {
    const std::string needle = "{" + std::string(name) + "}";
    std::string out;
    out.reserve(tmpl.size() + value.size());
    std::size_t pos = 0;
    while (true) {
        const std::size_t hit = tmpl.find(needle, pos);
        if (hit == std::string_view::npos) break;
        out.append(tmpl.substr(pos, hit - pos));
        out.append(value);
        pos = hit + needle.size();
    }
    out.append(tmpl.substr(pos));
    return out;
}

namespace {

// Two-placeholder fill in one pass so substituted text is never rescanned.
std::string fill2(std::string_view tmpl, std::string_view n1, std::string_view v1,
                  std::string_view n2, std::string_view v2) {
    const std::string a = "{" + std::string(n1) + "}";
    const std::string b = "{" + std::string(n2) + "}";
    std::string out;
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const std::size_t ha = tmpl.find(a, pos);
        const std::size_t hb = tmpl.find(b, pos);
        const std::size_t hit = std::min(ha, hb);
        if (hit == std::string_view::npos) break;
        out.append(tmpl.substr(pos, hit - pos));
        if (hit == ha) {
            out.append(v1);
            pos = hit + a.size();
        } else {
            out.append(v2);
            pos = hit + b.size();
        }
    }
    if (pos < tmpl.size()) out.append(tmpl.substr(pos));
    return out;
}

}  // namespace

std::string query_generation(std::string_view claim) { return fill(kQueryGeneration, "claim", claim); }

std::string web_search(std::string_view question) { return fill(kWebSearch, "question", question); }

std::string with_knowledge(std::string_view qacontext, std::string_view claim) {
    return fill2(kWithKnowledge, "qacontext", qacontext, "claim", claim);
}

std::string parametric(std::string_view claim) { return fill(kParametric, "claim", claim); }

std::string summarize(std::string_view text, std::size_t max_sentences) {
    return fill2(kSummarize, "max_sentences", std::to_string(max_sentences), "text", text);
}

std::string judge(std::string_view argument, std::string_view candidate) {
    return fill2(kJudge, "argument", argument, "candidate", candidate);
}

std::string_view prefix_of(std::string_view tmpl) {
    return tmpl.substr(0, tmpl.find('{'));
}

}  // namespace cag::prompts
