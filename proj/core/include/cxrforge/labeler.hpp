#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <condition_variable>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cxrforge/vocabulary.hpp"

namespace cxrforge {

enum class ObservationClass { Positive, Negative, Uncertain, Blank };

std::string_view to_string(ObservationClass c);
/// Accepts the class names plus the common numeric coding (1, 0, -1, empty).
std::optional<ObservationClass> parse_observation_class(std::string_view s);

/// Four-class status for every vocabulary entry.
struct ObservationLabels {
    FindingVocabulary vocabulary;
    std::vector<ObservationClass> classes;

    static ObservationLabels blank(const FindingVocabulary &vocab);
    ObservationClass at(std::string_view label) const;
    void set(std::string_view label, ObservationClass c);

    friend bool operator==(const ObservationLabels &, const ObservationLabels &) = default;
};

/// Positive labels in vocabulary order; every other class counts as absent.
std::vector<std::string> binarize(const ObservationLabels &labels);

class LabelerError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Source of observation labels for report text.
class Labeler {
  public:
    virtual ~Labeler() = default;

    virtual ObservationLabels label(std::string_view report_id, std::string_view findings,
                                    const FindingVocabulary &vocab) = 0;

    virtual std::string kind() const = 0;
    /// Pins the labeling behaviour (file digest, keyword table digest, endpoint).
    virtual std::string content_hash() const = 0;
};

using KeywordTable = std::map<std::string, std::vector<std::string>>;

/// Deterministic keyword matcher for tests and smoke runs. A label is positive
/// when one of its keywords occurs with no negation cue ("no", "without",
/// "free of") in the three preceding tokens of the same sentence, negative when
/// every occurrence is negated, blank otherwise.
class KeywordStubLabeler final : public Labeler {
  public:
    KeywordStubLabeler();
    explicit KeywordStubLabeler(KeywordTable table);

    static const KeywordTable &default_table();

    ObservationLabels label(std::string_view report_id, std::string_view findings,
                            const FindingVocabulary &vocab) override;
    std::string kind() const override { return "keyword_stub"; }
    std::string content_hash() const override;

    ObservationLabels label_text(std::string_view findings, const FindingVocabulary &vocab) const;

  private:
    KeywordTable table_;
};

/// Reads a delimited table keyed by report id with one column per label.
class PrecomputedLabeler final : public Labeler {
  public:
    explicit PrecomputedLabeler(const std::string &path);

    ObservationLabels label(std::string_view report_id, std::string_view findings,
                            const FindingVocabulary &vocab) override;
    std::string kind() const override { return "precomputed_file"; }
    std::string content_hash() const override { return hash_; }

  private:
    std::string path_;
    std::string hash_;
    std::vector<std::string> columns_;
    std::unordered_map<std::string, std::vector<ObservationClass>> rows_;
};

struct RemoteLabelerOptions {
    std::string url; ///< e.g. http://127.0.0.1:8500/label
    std::chrono::milliseconds timeout{10000};
    int retries = 2;
    int max_in_flight = 4;
};

/// POSTs {"report_id", "text", "vocabulary"} as JSON and expects
/// {"labels": [class, ...]} aligned with the vocabulary.
class RemoteLabeler final : public Labeler {
  public:
    explicit RemoteLabeler(RemoteLabelerOptions options);

    ObservationLabels label(std::string_view report_id, std::string_view findings,
                            const FindingVocabulary &vocab) override;
    std::string kind() const override { return "remote_service"; }
    std::string content_hash() const override;

  private:
    RemoteLabelerOptions options_;
    std::string scheme_host_port_;
    std::string path_;
    std::mutex mutex_;
    std::condition_variable slots_cv_;
    int in_flight_ = 0;
};

ObservationLabels label_report(std::string_view findings, const FindingVocabulary &vocab, Labeler &endpoint,
                               std::string_view report_id = "");

} // namespace cxrforge
