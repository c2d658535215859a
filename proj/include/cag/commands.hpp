#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "cag/config.hpp"

namespace cag::cli {

// Run-directory layout shared by every command.
struct RunLayout {
    std::filesystem::path root;

    std::filesystem::path corpus() const { return root / "corpus.jsonl"; }
    std::filesystem::path evidence_dir() const { return root / "evidence"; }
    std::filesystem::path evidence(const std::string& id) const { return evidence_dir() / (id + ".json"); }
    std::filesystem::path generations() const { return root / "generations.jsonl"; }
    std::filesystem::path scores_dir() const { return root / "scores"; }
    std::filesystem::path reports_dir() const { return root / "reports"; }
    std::filesystem::path manifest() const { return root / "manifest.json"; }
};

struct CommandIO {
    std::ostream& out;
    std::ostream& err;
};

// Each command returns a process exit status: 0 on success, 1 when the
// command completed but found problems (validation failures, failed
// items), 2 when it could not run.
int cmd_validate(const std::filesystem::path& corpus_path, bool strict, CommandIO io);

struct GenerateOptions {
    std::optional<std::filesystem::path> corpus;  // copied into the run directory
    std::optional<std::size_t> fan_out;
    bool strict = false;
};
int cmd_generate(const HarnessConfig& config, const std::filesystem::path& run_dir,
                 const GenerateOptions& options, CommandIO io);

struct EvaluateOptions {
    std::optional<std::filesystem::path> human_scores;
    std::optional<std::size_t> fan_out;
    bool verbose_similarity = false;
};
int cmd_evaluate(const HarnessConfig& config, const std::filesystem::path& run_dir,
                 const EvaluateOptions& options, CommandIO io);

// Works from the run directory alone; never constructs a provider.
int cmd_report(const std::filesystem::path& run_dir, CommandIO io);

}  // namespace cag::cli
