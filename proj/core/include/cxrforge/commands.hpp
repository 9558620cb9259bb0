#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cxrforge/config.hpp"
#include "cxrforge/corpus.hpp"
#include "cxrforge/metrics.hpp"
#include "cxrforge/mixer.hpp"

namespace cxrforge {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInput = 2;

struct BuildReport {
    CorpusManifest manifest;
    std::vector<std::string> warnings;
};

/// Ingests every dataset, applies the blocklists, renders each configured
/// task and writes one corpus file per (task, dataset) plus the manifest.
/// On failure no new corpus file is left behind.
BuildReport cmd_build(const ForgeConfig &config);

struct MixReport {
    std::string output_path;
    std::uint64_t seed = 0;
    std::string spec_hash;
    MixtureStats stats;
};

/// Samples `n` tickets from the config's mixture over the built corpus and
/// writes them, with their samples, to `output_path`. Pool sizes come from
/// the built corpus. `epoch` switches to without-replacement sampling.
MixReport cmd_mix(const ForgeConfig &config, std::uint64_t n, const std::string &output_path, bool epoch = false);

enum class EvalKind { Report, Grounding, Vqa };
EvalKind parse_eval_kind(std::string_view s);

struct EvalOptions {
    /// Supplies the label vocabulary and labeler for report evaluation; the
    /// keyword stub over its own labels is used when absent.
    std::optional<ForgeConfig> config;
    double iou_threshold = kGroundingIouThreshold;
    /// Machine-readable table; defaults to "<predictions>.metrics.tsv".
    std::string table_path;
};

/// Prediction and reference files hold one {"id", "text"} object per line.
MetricReport cmd_eval(EvalKind kind, const std::string &predictions_path, const std::string &references_path,
                      const EvalOptions &options = {});

struct ValidationReport {
    bool passed = true;
    std::uint64_t samples = 0;
    std::uint64_t files = 0;
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
};

/// Accepts a build output directory or a single corpus file.
ValidationReport cmd_validate(const std::string &path);

struct StatsReport {
    std::string kind; ///< corpus | mix | empty
    MixtureStats stats;
    std::uint64_t images = 0;
    std::uint64_t turns = 0;

    std::string to_text() const;
    std::string to_table() const;
};

/// Accepts a build output directory, a corpus file or a mix file.
StatsReport cmd_stats(const std::string &path);

} // namespace cxrforge
