#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace cxrforge {

enum class TaskType { ReportGeneration, ImageUnderstanding, QuestionAnswering };

enum class TaskId {
    SingleImage,
    MultiImage,
    MultiStudy,
    DiseaseClassification,
    FindingGrounding,
    GroundedFinding,
    AbnormalityDetection,
    MultiFindingGrounding,
    OrganGrounding,
    GroundedOrgan,
    GroundedPhraseGeneration,
    PhraseGrounding,
    AnatomicalRegionGrounding,
    GroundedAnatomicalRegion,
    VisualQuestionAnswering,
    DifferenceVisualQuestionAnswering,
    VisualInstructionFollowing,
};

inline constexpr std::size_t kTaskCount = 17;

const std::array<TaskId, kTaskCount> &all_tasks();

std::string_view task_name(TaskId id);
std::optional<TaskId> parse_task(std::string_view name);
TaskType task_type(TaskId id);
std::string_view task_type_name(TaskType t);
std::optional<TaskType> parse_task_type(std::string_view name);

inline bool is_report_generation(TaskId id) { return task_type(id) == TaskType::ReportGeneration; }

} // namespace cxrforge
