#include "cag/utilization.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "cag/error.hpp"
#include "cag/kernels.hpp"
#include "cag/segment.hpp"
#include "cag/text.hpp"

namespace cag::analysis {

using nlohmann::json;

std::string_view status_name(UtilizationStatus s) {
    switch (s) {
        case UtilizationStatus::Utilized: return "utilized";
        case UtilizationStatus::Partial: return "partial";
        case UtilizationStatus::NotUtilized: return "not_utilized";
    }
    return "not_utilized";
}

UtilizationStatus classify(double similarity, const Thresholds& t) {
    if (similarity >= t.utilized) return UtilizationStatus::Utilized;
    if (similarity >= t.partial) return UtilizationStatus::Partial;
    return UtilizationStatus::NotUtilized;
}

std::vector<std::string> evidence_sentences(const EvidenceBundle& bundle) {
    std::vector<std::string> out;
    for (const auto& a : bundle.answers) {
        if (text::is_blank(a.answer_text)) continue;
        for (auto& s : segment_sentences(a.answer_text)) out.push_back(std::move(s));
    }
    return out;
}

UtilizationRecord evidence_utilization(const GenerationRecord& gen, const EvidenceBundle& evidence,
                                       EmbeddingProvider& embedder, const Thresholds& thresholds,
                                       bool verbose) {
    if (!gen.evidence_ref || *gen.evidence_ref != evidence.id())
        throw PreconditionError("evidence_utilization: generation " + gen.argument_id + "/" +
                                gen.system_id + " does not reference bundle '" + evidence.id() + "'");
    const auto generated = segment_sentences(gen.counter_text);
    const auto ev = evidence_sentences(evidence);
    if (ev.empty())
        throw PreconditionError("evidence_utilization: bundle '" + evidence.id() +
                                "' has no evidence sentences");

    std::vector<std::string> batch(generated);
    batch.insert(batch.end(), ev.begin(), ev.end());
    const auto vecs = embedder.embed(batch);
    if (vecs.size() != batch.size()) throw ProviderError("embedder returned wrong batch size", false);

    std::vector<EmbeddingVector> gv(vecs.begin(), vecs.begin() + static_cast<long>(generated.size()));
    std::vector<EmbeddingVector> evv(vecs.begin() + static_cast<long>(generated.size()), vecs.end());
    const auto gm = kernels::stack(gv);
    const auto em = kernels::stack(evv);
    const auto best = kernels::parallel::max_cosine(gm, em);

    UtilizationRecord r;
    r.argument_id = gen.argument_id;
    r.system_id = gen.system_id;
    r.max_similarity = best.value;
    r.best_generated = best.row;
    r.best_evidence = best.col;
    r.status = classify(best.value, thresholds);
    for (const auto& v : vecs) r.zero_vector = r.zero_vector || v.zero_norm;
    if (verbose) {
        const auto sim = kernels::parallel::cosine_matrix(gm, em);
        for (std::size_t i = 0; i < sim.rows; ++i)
            for (std::size_t j = 0; j < sim.cols; ++j) r.pairs.push_back({i, j, sim.at(i, j)});
        std::stable_sort(r.pairs.begin(), r.pairs.end(),
                         [](const SimilarityPair& a, const SimilarityPair& b) {
                             return a.similarity > b.similarity;
                         });
    }
    return r;
}

std::vector<UtilizationSummaryRow> utilization_summary(const std::vector<UtilizationRecord>& records) {
    if (records.empty()) throw PreconditionError("utilization_summary: no records");
    std::vector<UtilizationSummaryRow> rows;
    for (const auto& r : records) {
        auto it = std::find_if(rows.begin(), rows.end(),
                               [&](const UtilizationSummaryRow& x) { return x.system_id == r.system_id; });
        if (it == rows.end()) {
            rows.push_back(UtilizationSummaryRow{r.system_id});
            it = rows.end() - 1;
        }
        ++it->total;
        switch (r.status) {
            case UtilizationStatus::Utilized: ++it->utilized; break;
            case UtilizationStatus::Partial: ++it->partial; break;
            case UtilizationStatus::NotUtilized: ++it->not_utilized; break;
        }
    }
    return rows;
}

json to_json(const UtilizationRecord& r) {
    json j{{"argument_id", r.argument_id},
           {"system_id", r.system_id},
           {"max_similarity", r.max_similarity},
           {"status", status_name(r.status)},
           {"best_pair", {r.best_generated, r.best_evidence}},
           {"zero_vector", r.zero_vector}};
    if (!r.pairs.empty()) {
        json pairs = json::array();
        for (const auto& p : r.pairs) pairs.push_back({p.generated, p.evidence, p.similarity});
        j["pairs"] = pairs;
    }
    return j;
}

UtilizationRecord utilization_record_from_json(const json& j) {
    UtilizationRecord r;
    r.argument_id = j.at("argument_id").get<std::string>();
    r.system_id = j.at("system_id").get<std::string>();
    r.max_similarity = j.at("max_similarity").get<double>();
    const auto status = j.at("status").get<std::string>();
    if (status == "utilized") r.status = UtilizationStatus::Utilized;
    else if (status == "partial") r.status = UtilizationStatus::Partial;
    else if (status == "not_utilized") r.status = UtilizationStatus::NotUtilized;
    else throw ValidationError("unknown utilization status '" + status + "'");
    r.best_generated = j.at("best_pair").at(0).get<std::size_t>();
    r.best_evidence = j.at("best_pair").at(1).get<std::size_t>();
    r.zero_vector = j.value("zero_vector", false);
    return r;
}

std::string render_summary(const std::vector<UtilizationSummaryRow>& rows) {
    std::ostringstream os;
    os << "system_id\ttotal\tutilized\tpartial\tnot_utilized\tutilized_fraction\tpartial_fraction\n";
    char buf[64];
    for (const auto& r : rows) {
        os << r.system_id << '\t' << r.total << '\t' << r.utilized << '\t' << r.partial << '\t'
           << r.not_utilized;
        std::snprintf(buf, sizeof buf, "\t%.4f\t%.4f\n", r.utilized_fraction(), r.partial_fraction());
        os << buf;
    }
    return os.str();
}

}  // namespace cag::analysis
