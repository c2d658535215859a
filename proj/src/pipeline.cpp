#include "cag/pipeline.hpp"

#include <fstream>

#include "cag/error.hpp"
#include "cag/parallel.hpp"
#include "cag/prompts.hpp"
#include "cag/segment.hpp"
#include "cag/text.hpp"

namespace cag {

using nlohmann::json;
using nlohmann::ordered_json;

json to_json(const EvidenceBundle& b) {
    ordered_json answers = ordered_json::array();
    for (const auto& a : b.answers) {
        ordered_json j;
        j["query"] = a.query;
        j["answer_text"] = a.answer_text;
        j["source_urls"] = a.source_urls;
        j["retrieved_at"] = a.retrieved_at;
        j["no_results"] = a.no_results;
        answers.push_back(std::move(j));
    }
    ordered_json j;
    j["argument_id"] = b.argument_id;
    j["queries"] = b.queries;
    j["answers"] = std::move(answers);
    j["concatenated_context"] = b.concatenated_context;
    return json::parse(j.dump());
}

EvidenceBundle evidence_bundle_from_json(const json& j) {
    EvidenceBundle b;
    b.argument_id = j.at("argument_id").get<std::string>();
    b.queries = j.at("queries").get<std::vector<std::string>>();
    for (const auto& a : j.at("answers")) b.answers.push_back(search_answer_from_json(a));
    b.concatenated_context = j.at("concatenated_context").get<std::string>();
    if (b.queries.size() != kQueriesPerArgument || b.answers.size() != b.queries.size())
        throw ValidationError("evidence bundle '" + b.argument_id + "' is not a 5-query bundle");
    return b;
}

json to_json(const GenerationRecord& r) {
    json j;
    j["argument_id"] = r.argument_id;
    j["system_id"] = r.system_id;
    j["model_id"] = r.model_id;
    j["with_knowledge"] = r.with_knowledge;
    j["counter_text"] = r.counter_text;
    j["evidence_ref"] = r.evidence_ref ? json(*r.evidence_ref) : json(nullptr);
    j["over_length_flag"] = r.over_length_flag;
    j["repair_prompts"] = r.repair_prompts;
    return j;
}

GenerationRecord generation_record_from_json(const json& j) {
    GenerationRecord r;
    r.argument_id = j.at("argument_id").get<std::string>();
    r.system_id = j.at("system_id").get<std::string>();
    r.model_id = j.value("model_id", std::string{});
    r.with_knowledge = j.at("with_knowledge").get<bool>();
    r.counter_text = j.at("counter_text").get<std::string>();
    if (auto it = j.find("evidence_ref"); it != j.end() && !it->is_null())
        r.evidence_ref = it->get<std::string>();
    r.over_length_flag = j.value("over_length_flag", false);
    r.repair_prompts = j.value("repair_prompts", 0);
    if (r.with_knowledge != r.evidence_ref.has_value())
        throw ValidationError("generation " + r.argument_id + "/" + r.system_id +
                              ": evidence_ref must be present iff with_knowledge");
    return r;
}

std::vector<GenerationRecord> read_generations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("generations file not found: " + path.string());
    std::vector<GenerationRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::is_blank(line)) continue;
        try {
            out.push_back(generation_record_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw ValidationError(path.string() + " line " + std::to_string(line_no) + ": " +
                                  e.what());
        }
    }
    return out;
}

void write_generations(const std::filesystem::path& path, const std::vector<GenerationRecord>& recs) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    for (const auto& r : recs) out << to_json(r).dump() << '\n';
}

namespace pipeline {

namespace {

std::optional<json> parse_json_loose(std::string s) {
    if (auto fence = s.find("```"); fence != std::string::npos) {
        auto body = s.find('\n', fence);
        auto close = s.find("```", fence + 3);
        if (body != std::string::npos && close != std::string::npos && close > body)
            s = s.substr(body + 1, close - body - 1);
    }
    try {
        return json::parse(s);
    } catch (const json::parse_error&) {
    }
    const auto open = s.find_first_of("[{");
    if (open == std::string::npos) return std::nullopt;
    const char closer = s[open] == '[' ? ']' : '}';
    const auto close = s.rfind(closer);
    if (close == std::string::npos || close <= open) return std::nullopt;
    try {
        return json::parse(s.substr(open, close - open + 1));
    } catch (const json::parse_error&) {
        return std::nullopt;
    }
}

std::optional<std::vector<std::string>> strings_of(const json& arr) {
    std::vector<std::string> out;
    for (const auto& item : arr) {
        if (item.is_string()) {
            out.push_back(item.get<std::string>());
        } else if (item.is_object()) {
            bool found = false;
            for (const char* key : {"query", "question", "text"}) {
                if (auto it = item.find(key); it != item.end() && it->is_string()) {
                    out.push_back(it->get<std::string>());
                    found = true;
                    break;
                }
            }
            if (!found) return std::nullopt;
        } else {
            return std::nullopt;
        }
    }
    return out;
}

GenerationRecord generate(ChatProvider& chat, const SystemConfig& system, const ArgumentPair& pair,
                          const std::string& prompt) {
    GenerationRecord rec;
    rec.argument_id = pair.id;
    rec.system_id = system.id;
    rec.model_id = system.model;
    rec.with_knowledge = system.with_knowledge;

    ChatRequest req{system.model, prompt};
    std::string reply(text::trim(chat.complete(req)));
    if (reply.empty()) throw ProviderError("empty generation for " + pair.id, false);
    if (analysis::sentence_count(reply) > corpus::kMaxSentences) {
        req.sample = 1;
        std::string repaired(text::trim(chat.complete(req)));
        rec.repair_prompts = 1;
        if (!repaired.empty()) reply = std::move(repaired);
    }
    rec.counter_text = std::move(reply);
    rec.over_length_flag = analysis::sentence_count(rec.counter_text) > corpus::kMaxSentences;
    return rec;
}

}  // namespace

std::optional<std::vector<std::string>> parse_query_list(const std::string& reply) {
    auto parsed = parse_json_loose(reply);
    if (!parsed) return std::nullopt;
    if (parsed->is_array()) return strings_of(*parsed);
    if (parsed->is_object()) {
        for (const auto& [k, v] : parsed->items())
            if (v.is_array()) return strings_of(v);
    }
    return std::nullopt;
}

QueryResult generate_queries(ChatProvider& chat, const std::string& model_id,
                             const std::string& argument, int max_attempts) {
    if (text::is_blank(argument)) throw PreconditionError("generate_queries: empty argument");
    ChatRequest req{model_id, prompts::query_generation(argument)};
    std::string last_reason;
    for (int attempt = 0; attempt < std::max(1, max_attempts); ++attempt) {
        req.sample = attempt;
        const std::string reply = chat.complete(req);
        auto queries = parse_query_list(reply);
        if (!queries) {
            last_reason = "reply is not a JSON list of queries";
            continue;
        }
        std::vector<std::string> cleaned;
        for (const auto& q : *queries)
            if (!text::is_blank(q)) cleaned.emplace_back(text::trim(q));
        if (cleaned.size() != kQueriesPerArgument) {
            last_reason = "expected 5 queries, got " + std::to_string(cleaned.size());
            continue;
        }
        return QueryResult{std::move(cleaned), attempt};
    }
    throw ParseError("generate_queries: " + last_reason + " after " +
                         std::to_string(std::max(1, max_attempts)) + " attempt(s)",
                     std::max(1, max_attempts));
}

std::string join_context(const std::vector<SearchAnswer>& answers) {
    std::vector<std::string> parts;
    parts.reserve(answers.size());
    for (const auto& a : answers) parts.push_back(a.answer_text);
    return text::join(parts, "\n\n");
}

EvidenceBundle retrieve_evidence(SearchProvider& search, const std::string& argument_id,
                                 const std::vector<std::string>& queries) {
    if (queries.size() != kQueriesPerArgument)
        throw PreconditionError("retrieve_evidence: expected 5 queries, got " +
                                std::to_string(queries.size()));
    EvidenceBundle b;
    b.argument_id = argument_id;
    b.queries = queries;
    for (const auto& q : queries) {
        SearchAnswer a = search.search(q);
        a.no_results = a.no_results || text::is_blank(a.answer_text);
        b.answers.push_back(std::move(a));
    }
    b.concatenated_context = join_context(b.answers);
    return b;
}

GenerationRecord generate_with_knowledge(ChatProvider& chat, const SystemConfig& system,
                                         const ArgumentPair& pair, const EvidenceBundle& evidence) {
    if (!system.with_knowledge)
        throw PreconditionError("generate_with_knowledge: system '" + system.id +
                                "' is parametric");
    if (evidence.argument_id != pair.id)
        throw PreconditionError("generate_with_knowledge: evidence for '" + evidence.argument_id +
                                "' supplied for '" + pair.id + "'");
    auto rec = generate(chat, system, pair,
                        prompts::with_knowledge(evidence.concatenated_context, pair.argument));
    rec.evidence_ref = evidence.id();
    return rec;
}

GenerationRecord generate_parametric(ChatProvider& chat, const SystemConfig& system,
                                     const ArgumentPair& pair, const EvidenceBundle* evidence) {
    if (evidence != nullptr || system.with_knowledge)
        throw PreconditionError("generate_parametric: evidence is not allowed for system '" +
                                system.id + "'");
    return generate(chat, system, pair, prompts::parametric(pair.argument));
}

ExperimentResult run_experiment(ChatProvider& chat, SearchProvider& search,
                                const std::vector<ArgumentPair>& corpus,
                                const std::vector<SystemConfig>& systems,
                                const ExperimentOptions& options) {
    if (systems.empty()) throw PreconditionError("run_experiment: no system configurations");
    std::string query_model = options.query_model;
    bool any_knowledge = false;
    for (const auto& s : systems) {
        if (s.with_knowledge) {
            if (!any_knowledge && query_model.empty()) query_model = s.model;
            any_knowledge = true;
        }
    }

    struct Slot {
        std::optional<EvidenceBundle> bundle;
        std::vector<GenerationRecord> records;
        ItemStatus status;
    };
    std::vector<Slot> slots(corpus.size());

    bounded_for(corpus.size(), options.fan_out, [&](std::size_t i) {
        const ArgumentPair& pair = corpus[i];
        Slot& slot = slots[i];
        slot.status.argument_id = pair.id;
        try {
            if (any_knowledge) {
                auto q = generate_queries(chat, query_model, pair.argument, options.parse_attempts);
                slot.status.query_retries = q.retries;
                slot.bundle = retrieve_evidence(search, pair.id, q.queries);
            }
            for (const auto& s : systems) {
                slot.records.push_back(s.with_knowledge
                                           ? generate_with_knowledge(chat, s, pair, *slot.bundle)
                                           : generate_parametric(chat, s, pair));
            }
        } catch (const std::exception& e) {
            slot.status.ok = false;
            slot.status.error = e.what();
            slot.bundle.reset();
            slot.records.clear();
        }
    });

    ExperimentResult result;
    for (auto& slot : slots) {
        if (slot.bundle) result.bundles.push_back(std::move(*slot.bundle));
        for (auto& r : slot.records) result.generations.push_back(std::move(r));
        result.items.push_back(std::move(slot.status));
    }
    return result;
}

}  // namespace pipeline
}  // namespace cag
