#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cxrforge/ingest.hpp"
#include "cxrforge/labeler.hpp"
#include "cxrforge/tasks.hpp"
#include "cxrforge/templates.hpp"
#include "cxrforge/vocabulary.hpp"

namespace cxrforge {

struct Turn {
    Role role = Role::User;
    std::string content;
    bool target = false;

    friend bool operator==(const Turn &, const Turn &) = default;
};

/// One rendered instruction-following record.
struct ConversationSample {
    std::string sample_id;
    TaskId task = TaskId::SingleImage;
    std::string dataset_id;
    std::vector<ImageRef> images;
    std::vector<Turn> turns;
    /// Values substituted into the template, including image placeholders.
    FieldMap fields;

    /// One flag per assistant turn, in order; true marks a training target.
    std::vector<bool> target_flags() const;

    friend bool operator==(const ConversationSample &, const ConversationSample &) = default;
};

/// Structural problems with a sample; empty when every invariant holds.
std::vector<std::string> sample_violations(const ConversationSample &sample);

/// Re-renders `sample.fields` through the template and extracts them back;
/// reports any mismatch with the stored turns.
std::vector<std::string> template_violations(const ConversationSample &sample, const TemplateSet &templates);

/// The input a non-MRG task renders from: its images in slot order and the
/// annotations that feed the answer.
struct TaskRecord {
    std::string key;
    std::string dataset_id;
    std::vector<ImageRef> images;
    std::vector<Annotation> annotations;
};

std::vector<TaskRecord> collect_task_records(const DatasetCatalog &catalog, TaskId task);

ConversationSample render_task(const TaskRecord &record, TaskId task, const FindingVocabulary &vocab,
                               const TemplateSet &templates = TemplateSet::builtin());

/// Two-turn report generation: findings first, then the report. A multi-study
/// instance without a prior is rendered with the multi-image template.
ConversationSample build_cot_mrg(const ScenarioInstance &instance, const ObservationLabels &labels,
                                 const FindingVocabulary &vocab, std::string_view dataset_id,
                                 const TemplateSet &templates = TemplateSet::builtin());

TaskId task_for_scenario(Scenario s);

/// Single-string serialization of a conversation. Each turn is one line,
/// "<role>[*]\t<escaped content>", where '*' marks target turns and content
/// escapes backslash, newline and tab. The i-th "<image>" marker is images[i].
struct FlatPrompt {
    std::string text;
    std::vector<std::string> slot_image_ids;
    std::vector<std::size_t> slot_offsets;
};

FlatPrompt interleave_image_slots(const ConversationSample &sample);
std::vector<Turn> parse_flat_prompt(std::string_view text);

/// Image-slot markers joined by single spaces.
std::string image_markers(std::size_t count);

} // namespace cxrforge
