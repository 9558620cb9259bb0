#include "cxrforge/tasks.hpp"

namespace cxrforge {

namespace {

struct TaskInfo {
    TaskId id;
    std::string_view name;
    TaskType type;
};

constexpr std::array<TaskInfo, kTaskCount> kTasks{{
    {TaskId::SingleImage, "single_image", TaskType::ReportGeneration},
    {TaskId::MultiImage, "multi_image", TaskType::ReportGeneration},
    {TaskId::MultiStudy, "multi_study", TaskType::ReportGeneration},
    {TaskId::DiseaseClassification, "disease_classification", TaskType::ImageUnderstanding},
    {TaskId::FindingGrounding, "finding_grounding", TaskType::ImageUnderstanding},
    {TaskId::GroundedFinding, "grounded_finding", TaskType::ImageUnderstanding},
    {TaskId::AbnormalityDetection, "abnormality_detection", TaskType::ImageUnderstanding},
    {TaskId::MultiFindingGrounding, "multi_finding_grounding", TaskType::ImageUnderstanding},
    {TaskId::OrganGrounding, "organ_grounding", TaskType::ImageUnderstanding},
    {TaskId::GroundedOrgan, "grounded_organ", TaskType::ImageUnderstanding},
    {TaskId::GroundedPhraseGeneration, "grounded_phrase_generation", TaskType::ImageUnderstanding},
    {TaskId::PhraseGrounding, "phrase_grounding", TaskType::ImageUnderstanding},
    {TaskId::AnatomicalRegionGrounding, "anatomical_region_grounding", TaskType::ImageUnderstanding},
    {TaskId::GroundedAnatomicalRegion, "grounded_anatomical_region", TaskType::ImageUnderstanding},
    {TaskId::VisualQuestionAnswering, "vqa", TaskType::QuestionAnswering},
    {TaskId::DifferenceVisualQuestionAnswering, "difference_vqa", TaskType::QuestionAnswering},
    {TaskId::VisualInstructionFollowing, "visual_instruction_following", TaskType::QuestionAnswering},
}};

const TaskInfo &info(TaskId id) { return kTasks[static_cast<std::size_t>(id)]; }

} // namespace

const std::array<TaskId, kTaskCount> &all_tasks() {
    static const std::array<TaskId, kTaskCount> ids = [] {
        std::array<TaskId, kTaskCount> a{};
        for (std::size_t i = 0; i < kTaskCount; ++i) a[i] = kTasks[i].id;
        return a;
    }();
    return ids;
}

std::string_view task_name(TaskId id) { return info(id).name; }

std::optional<TaskId> parse_task(std::string_view name) {
    for (const auto &t : kTasks)
        if (t.name == name) return t.id;
    return std::nullopt;
}

TaskType task_type(TaskId id) { return info(id).type; }

std::string_view task_type_name(TaskType t) {
    switch (t) {
    case TaskType::ReportGeneration: return "MRG";
    case TaskType::ImageUnderstanding: return "ImageUnderstanding";
    case TaskType::QuestionAnswering: return "VQA";
    }
    return "MRG";
}

std::optional<TaskType> parse_task_type(std::string_view name) {
    if (name == "MRG") return TaskType::ReportGeneration;
    if (name == "ImageUnderstanding") return TaskType::ImageUnderstanding;
    if (name == "VQA") return TaskType::QuestionAnswering;
    return std::nullopt;
}

} // namespace cxrforge
