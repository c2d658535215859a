#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace testutil {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag = "cag") {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& p) const { return path_ / p; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

// Prompt cells as typeset (LaTeX source), rendered by the oracle below.
inline constexpr std::string_view kQueryCell =
    R"(Generate a list of 5 queries for web-search that would help to find information to question the veracity of the given claim and persuade to take the opposing position: \{claim\}? \newline
                                Provide only questions and nothing else.
                                The answer should be in JSON.)";
inline constexpr std::string_view kWebSearchCell =
    R"(Answer the question from the following text: \{question\}? \newline
                                1. Find factual information from different media outlets \newline
                                2. Provide the evidence in a bullet point manner. \newline
                                3. Do not output anything else. \newline)";
inline constexpr std::string_view kWithKnowledgeCell =
    R"(Given the following context: \{qacontext\}, provide a succinct counter-argument that refutes the following argument using information from the context: \{claim\}. \newline
                                   Provide only the answer and nothing else. \newline
                                   Make sure the answer is no longer than 3 sentences.)";
inline constexpr std::string_view kParametricCell =
    R"(Generate a succinct counter-argument that refutes the following claim: \{claim\}? \newline
                                   Provide only the answer and nothing else. \newline
                                   Make sure the answer is no longer than 3 sentences.)";

// Renders a table cell: "\newline" is a hard break, any other run of
// whitespace is one space, escaped braces are unescaped, and trailing
// breaks are dropped.
inline std::string render_cell(std::string_view cell) {
    std::vector<std::string> words;
    std::istringstream in{std::string(cell)};
    std::string w;
    while (in >> w) words.push_back(w);
    std::string out;
    bool at_line_start = true;
    for (const auto& word : words) {
        if (word == "\\newline") {
            out += '\n';
            at_line_start = true;
            continue;
        }
        if (!at_line_start) out += ' ';
        out += word;
        at_line_start = false;
    }
    while (!out.empty() && out.back() == '\n') out.pop_back();
    std::string unescaped;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] == '\\' && i + 1 < out.size() && (out[i + 1] == '{' || out[i + 1] == '}')) continue;
        unescaped += out[i];
    }
    return unescaped;
}

// Splits on the placeholder and rejoins with the value.
inline std::string substitute(std::string tmpl, const std::string& name, const std::string& value) {
    const std::string key = "{" + name + "}";
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const auto hit = tmpl.find(key, start);
        parts.push_back(tmpl.substr(start, hit == std::string::npos ? std::string::npos : hit - start));
        if (hit == std::string::npos) break;
        start = hit + key.size();
    }
    std::string out = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) out += value + parts[i];
    return out;
}

inline std::string oracle_query_prompt(const std::string& claim) {
    return substitute(render_cell(kQueryCell), "claim", claim);
}
inline std::string oracle_search_prompt(const std::string& question) {
    return substitute(render_cell(kWebSearchCell), "question", question);
}
inline std::string oracle_knowledge_prompt(const std::string& context, const std::string& claim) {
    // Placeholders are filled in one pass, so substitute the later one
    // first into the head and tail separately.
    const std::string t = render_cell(kWithKnowledgeCell);
    const auto cut = t.find("{claim}");
    return substitute(t.substr(0, cut), "qacontext", context) +
           substitute(t.substr(cut), "claim", claim);
}
inline std::string oracle_parametric_prompt(const std::string& claim) {
    return substitute(render_cell(kParametricCell), "claim", claim);
}

inline std::string mini_corpus_jsonl() {
    return R"({"id":"a1","argument":"School uniforms should be mandatory everywhere. They reduce bullying over clothing. They also save families money.","gold_counter":"Studies of uniform policies find little effect on bullying or attendance. Uniforms can cost more than ordinary clothes for low-income families. Dress codes can achieve the same aims with more freedom."}
{"id":"a2","argument":"Self-driving cars will never be safe enough. Software cannot handle every situation on the road. Human drivers are more adaptable.","gold_counter":"Human error causes the vast majority of crashes, including those due to fatigue and distraction. Automated systems do not get tired or drunk. Early deployment data already shows lower injury crash rates in some cities."}
{"id":"a3","argument":"Organic food is healthier than conventional food. It has no pesticides. Everyone should switch to organic.","gold_counter":"Large reviews have found no consistent nutritional advantage for organic produce. Organic farming also uses approved pesticides, and residues on conventional produce are usually far below safety limits. Higher prices may lead people to eat fewer vegetables overall."}
{"id":"a4","argument":"Video games make children violent. Many shooters have played violent games. Such games should be restricted for minors.","gold_counter":"Meta-analyses find no reliable link between playing violent games and real-world violence. Youth violence fell during the years when gaming grew fastest. Almost all teenagers play games, so the overlap with offenders says little."}
{"id":"a5","argument":"Plastic recycling solves the plastic waste problem. If everyone recycled, there would be no pollution. We do not need bans on single-use plastic.","gold_counter":"Only a small fraction of plastic ever produced has been recycled, and most types degrade with each cycle. Much collected plastic is exported or landfilled. Reducing use at the source cuts waste that recycling cannot absorb."}
)";
}

inline std::string mock_config_json(const std::filesystem::path& cache_dir) {
    return R"({
  "cache_dir": ")" + cache_dir.string() + R"(",
  "fan_out": 3,
  "retries": 2,
  "backoff_ms": 1,
  "providers": {"chat": {"kind": "mock"}, "search": {"kind": "mock"}, "embed": {"kind": "mock", "dimension": 128}},
  "systems": [
    {"id": "cmdr", "model": "command-r-plus", "with_knowledge": false},
    {"id": "cmdr-ek", "model": "command-r-plus", "with_knowledge": true},
    {"id": "mistral", "model": "mistral-7b", "with_knowledge": false},
    {"id": "mistral-ek", "model": "mistral-7b", "with_knowledge": true}
  ],
  "judges": [{"id": "judge-a", "model": "judge-a"}, {"id": "judge-b", "model": "judge-b"}]
})";
}

// Human score file over every (item, candidate, evaluator, dimension);
// scores are drawn from a fixed seed.
inline std::string human_scores_tsv(const std::vector<std::string>& items,
                                    const std::vector<std::string>& candidates,
                                    const std::vector<std::string>& evaluators, unsigned seed) {
    static const char* dims[] = {"opposition", "relatedness", "specificity", "factuality", "persuasiveness"};
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> score(1, 3);
    std::string out = "item_id\tcandidate_id\tevaluator_id\tdimension\tscore\n";
    for (const auto& i : items)
        for (const auto& c : candidates)
            for (const auto& e : evaluators)
                for (const char* d : dims)
                    out += i + "\t" + c + "\t" + e + "\t" + d + "\t" + std::to_string(score(rng)) + "\n";
    return out;
}

}  // namespace testutil
