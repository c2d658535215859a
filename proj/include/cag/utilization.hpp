#pragma once

#include <map>
#include "json.hpp"
#include <string>
#include <vector>

#include "cag/pipeline.hpp"
#include "cag/providers.hpp"

namespace cag::analysis {

enum class UtilizationStatus { Utilized, Partial, NotUtilized };

std::string_view status_name(UtilizationStatus s);

struct Thresholds {
    double utilized = 0.70;  // similarity >= utilized
    double partial = 0.65;   // partial <= similarity < utilized
};

UtilizationStatus classify(double similarity, const Thresholds& t = {});

struct SimilarityPair {
    std::size_t generated;
    std::size_t evidence;
    double similarity;
};

struct UtilizationRecord {
    std::string argument_id;
    std::string system_id;
    double max_similarity = 0.0;
    UtilizationStatus status = UtilizationStatus::NotUtilized;
    std::size_t best_generated = 0;  // sentence indices of the best pair
    std::size_t best_evidence = 0;
    bool zero_vector = false;  // some sentence embedded to a zero vector
    std::vector<SimilarityPair> pairs;  // all pairs, descending; verbose mode only
};

// Evidence sentences are the segmented answers of the bundle, in query order.
std::vector<std::string> evidence_sentences(const EvidenceBundle& bundle);

// Cosine similarity of every (generated sentence, evidence sentence) pair;
// the record keeps the global maximum and its status.
UtilizationRecord evidence_utilization(const GenerationRecord& generation,
                                       const EvidenceBundle& evidence, EmbeddingProvider& embedder,
                                       const Thresholds& thresholds = {}, bool verbose = false);

struct UtilizationSummaryRow {
    std::string system_id;
    std::size_t total = 0, utilized = 0, partial = 0, not_utilized = 0;
    double utilized_fraction() const { return total ? double(utilized) / double(total) : 0.0; }
    double partial_fraction() const { return total ? double(partial) / double(total) : 0.0; }
    double not_utilized_fraction() const { return total ? double(not_utilized) / double(total) : 0.0; }
};

// One row per system, in order of first appearance.
std::vector<UtilizationSummaryRow> utilization_summary(const std::vector<UtilizationRecord>& records);

nlohmann::json to_json(const UtilizationRecord& r);
UtilizationRecord utilization_record_from_json(const nlohmann::json& j);
std::string render_summary(const std::vector<UtilizationSummaryRow>& rows);

}  // namespace cag::analysis
