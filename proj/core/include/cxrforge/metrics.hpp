#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cxrforge/geometry.hpp"
#include "cxrforge/vocabulary.hpp"

namespace cxrforge {

struct LabelPredictionPair {
    std::string sample_id;
    std::vector<std::string> predicted;
    std::vector<std::string> reference;
};

struct F1Scores {
    double micro = 0;
    double macro = 0;
    double example = 0;
    std::size_t samples = 0;
    std::vector<std::pair<std::string, double>> per_label;
};

/// Micro F1 pools TP/FP/FN over the scored labels; macro averages per-label F1
/// with zero-support labels contributing 0; example-based averages per-sample
/// F1 with both-empty samples scoring 1. `subset` restricts the scored labels.
F1Scores f1_scores(std::span<const LabelPredictionPair> pairs, const FindingVocabulary &vocab,
                   const std::optional<std::vector<std::string>> &subset = std::nullopt);

/// Corpus BLEU (single reference per candidate, no smoothing): geometric mean
/// of clipped n-gram precisions for n = 1..max_n times the brevity penalty.
double bleu(std::span<const std::string> candidates, std::span<const std::string> references, int max_n = 4);

double sentence_bleu(std::string_view candidate, std::string_view reference, int max_n = 1);

/// Mean of per-sample BLEU-1.
double mean_sentence_bleu1(std::span<const std::string> candidates, std::span<const std::string> references);

inline constexpr double kRougeBeta = 1.2;

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// LCS F-measure with recall weighted by beta = 1.2. 0 when either side is empty.
double rouge_l(std::string_view candidate, std::string_view reference);
double mean_rouge_l(std::span<const std::string> candidates, std::span<const std::string> references);

double iou(const NormalizedBBox &a, const NormalizedBBox &b);

struct GroundingResult {
    double accuracy = 0;
    double miou = 0;
    std::vector<double> ious;
};

inline constexpr double kGroundingIouThreshold = 0.5;

/// A missing prediction scores IoU 0. A sample is correct when IoU >= threshold.
GroundingResult grounding_eval(std::span<const std::optional<NormalizedBBox>> predictions,
                               std::span<const NormalizedBBox> references,
                               double threshold = kGroundingIouThreshold);

/// Parses the first box out of each generated text.
GroundingResult grounding_eval_text(std::span<const std::string> prediction_texts,
                                    std::span<const NormalizedBBox> references,
                                    double threshold = kGroundingIouThreshold);

struct VqaResult {
    double accuracy = 0;
    double recall = 0;
    double bleu1 = 0;
    std::size_t samples = 0;
    std::size_t recall_samples = 0;
};

VqaResult vqa_eval(std::span<const std::string> predictions, std::span<const std::string> references);

/// Named metric values in [0, 1]; rendered x100.
struct MetricReport {
    std::string kind;
    std::size_t samples = 0;
    std::vector<std::pair<std::string, double>> values;
    std::vector<std::pair<std::string, double>> per_label;

    std::optional<double> value(std::string_view name) const;
    std::string to_text() const;
    /// Tab-separated: metric, value (x100), samples.
    std::string to_table() const;
};

} // namespace cxrforge
