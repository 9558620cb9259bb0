#include "cxrforge/templates.hpp"

#include <json.hpp>

#include "cxrforge/csv.hpp"
#include "cxrforge/error.hpp"

namespace cxrforge {

using nlohmann::json;

namespace {

constexpr std::string_view kBuiltinTemplates = R"json({
  "version": 1,
  "system_prompt": "You are an AI medical assistant specialized in chest X-ray interpretation. Give helpful and detailed answers to the user's questions.",
  "tasks": [
    {"task": "single_image", "turns": [
      {"role": "user", "text": "radiology image: {image} Which of the following findings are present in the radiology images? Findings: {candidates}"},
      {"role": "assistant", "text": "{findings}", "target": true},
      {"role": "user", "text": "Based on the previous conversation provide a description of the findings in the radiology image."},
      {"role": "assistant", "text": "{report}", "target": true}]},
    {"task": "multi_image", "turns": [
      {"role": "user", "text": "radiology images: {images} Which of the following findings are present in the radiology images? Findings: {candidates}"},
      {"role": "assistant", "text": "{findings}", "target": true},
      {"role": "user", "text": "Based on the previous conversation provide a description of the findings in the current follow-up radiology images."},
      {"role": "assistant", "text": "{report}", "target": true}]},
    {"task": "multi_study", "turns": [
      {"role": "user", "text": "prior radiology images: {prior_images} prior radiology report: {prior_report} follow-up images: {followup_images} The radiology studies are given in chronological order. Which of the following findings are present in the current follow-up radiology images? Findings: {candidates}"},
      {"role": "assistant", "text": "{findings}", "target": true},
      {"role": "user", "text": "Based on the previous conversation provide a description of the findings in the current follow-up radiology images."},
      {"role": "assistant", "text": "{report}", "target": true}]},
    {"task": "disease_classification", "turns": [
      {"role": "user", "text": "radiology image: {image} Which of the following findings are present in the radiology image? Findings: {candidates}"},
      {"role": "assistant", "text": "{findings}", "target": true}]},
    {"task": "finding_grounding", "turns": [
      {"role": "user", "text": "radiology image: {image} Is {finding} present in the radiology image? If so, provide the bounding box coordinates of the region."},
      {"role": "assistant", "text": "{bbox}", "target": true}]},
    {"task": "grounded_finding", "turns": [
      {"role": "user", "text": "radiology image: {image} Provide a finding name for this region. {bbox}"},
      {"role": "assistant", "text": "{finding}", "target": true}]},
    {"task": "abnormality_detection", "turns": [
      {"role": "user", "text": "radiology image: {image} Provide the bounding box coordinates of abnormal regions in the radiology image."},
      {"role": "assistant", "text": "{bbox}", "target": true}]},
    {"task": "multi_finding_grounding", "turns": [
      {"role": "user", "text": "radiology image: {image} Which of the following findings are present in the radiology image? Provide the bounding box coordinates if present. Findings: {candidates}"},
      {"role": "assistant", "text": "{findings_with_boxes}", "target": true}]},
    {"task": "organ_grounding", "turns": [
      {"role": "user", "text": "radiology image: {image} Provide the bounding box coordinates of {organ} in the radiology image."},
      {"role": "assistant", "text": "{bbox}", "target": true}]},
    {"task": "grounded_organ", "turns": [
      {"role": "user", "text": "radiology image: {image} Provide an organ name for this region. {bbox}"},
      {"role": "assistant", "text": "{organ}", "target": true}]},
    {"task": "grounded_phrase_generation", "turns": [
      {"role": "user", "text": "radiology image: {image} Provide a radiology report phrase for the region. {bbox}"},
      {"role": "assistant", "text": "{phrase}", "target": true}]},
    {"task": "phrase_grounding", "turns": [
      {"role": "user", "text": "radiology image: {image} Provide the bounding box coordinate of the region this phrase describes: {phrase}"},
      {"role": "assistant", "text": "{bbox}", "target": true}]},
    {"task": "anatomical_region_grounding", "turns": [
      {"role": "user", "text": "radiology image: {image} Provide the bounding box coordinate of the anatomical region. {name}"},
      {"role": "assistant", "text": "{bbox}", "target": true}]},
    {"task": "grounded_anatomical_region", "turns": [
      {"role": "user", "text": "radiology image: {image} Provide an anatomical region name for this region. {bbox}"},
      {"role": "assistant", "text": "{name}", "target": true}]},
    {"task": "vqa", "turns": [
      {"role": "user", "text": "radiology image: {image} Answer the question. {question}"},
      {"role": "assistant", "text": "{answer}", "target": true}]},
    {"task": "difference_vqa", "turns": [
      {"role": "user", "text": "reference: {reference_image} main: {main_image} Using the provided reference and main radiology images answer the following question. {question}"},
      {"role": "assistant", "text": "{answer}", "target": true}]},
    {"task": "visual_instruction_following", "turns": [
      {"role": "user", "text": "radiology image: {image} {question}"},
      {"role": "assistant", "text": "{answer}", "target": true}],
     "repeat": [
      {"role": "user", "text": "{question}"},
      {"role": "assistant", "text": "{answer}", "target": true}]}
  ]
})json";

struct Segment {
    bool placeholder;
    std::string text;
};

std::vector<Segment> segments(std::string_view tmpl) {
    std::vector<Segment> out;
    std::string literal;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        if (tmpl[i] == '{') {
            const auto close = tmpl.find('}', i + 1);
            if (close == std::string_view::npos) throw InputError("unterminated placeholder in template");
            const auto name = tmpl.substr(i + 1, close - i - 1);
            if (name.empty()) throw InputError("empty placeholder in template");
            out.push_back({false, std::move(literal)});
            literal.clear();
            out.push_back({true, std::string(name)});
            i = close;
        } else {
            literal.push_back(tmpl[i]);
        }
    }
    out.push_back({false, std::move(literal)});
    return out;
}

std::vector<TurnTemplate> parse_turns(const json &arr, const std::string &origin) {
    std::vector<TurnTemplate> turns;
    if (!arr.is_array()) throw FormatError(origin + ": turns must be an array");
    for (const auto &t : arr) {
        TurnTemplate tt;
        const auto role = parse_role(t.at("role").get<std::string>());
        if (!role || *role == Role::System) throw FormatError(origin + ": turn role must be user or assistant");
        tt.role = *role;
        tt.text = t.at("text").get<std::string>();
        tt.target = t.value("target", false);
        for (const auto &k : t.items())
            if (k.key() != "role" && k.key() != "text" && k.key() != "target")
                throw FormatError(origin + ": unknown turn key '" + k.key() + "'");
        segments(tt.text);
        turns.push_back(std::move(tt));
    }
    return turns;
}

json turns_json(const std::vector<TurnTemplate> &turns) {
    json arr = json::array();
    for (const auto &t : turns) {
        json j{{"role", to_string(t.role)}, {"text", t.text}};
        if (t.target) j["target"] = true;
        arr.push_back(j);
    }
    return arr;
}

} // namespace

std::string_view to_string(Role r) {
    switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
    }
    return "user";
}

std::optional<Role> parse_role(std::string_view s) {
    if (s == "system") return Role::System;
    if (s == "user") return Role::User;
    if (s == "assistant") return Role::Assistant;
    return std::nullopt;
}

const TemplateSet &TemplateSet::builtin() {
    static const TemplateSet set = parse(kBuiltinTemplates, "<builtin templates>");
    return set;
}

TemplateSet TemplateSet::parse(std::string_view json_text, const std::string &origin) {
    TemplateSet set;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw FormatError(origin + ": " + e.what());
    }
    try {
        for (const auto &k : doc.items())
            if (k.key() != "version" && k.key() != "system_prompt" && k.key() != "tasks")
                throw FormatError(origin + ": unknown key '" + k.key() + "'");
        set.version_ = doc.at("version").get<int>();
        set.system_prompt_ = doc.at("system_prompt").get<std::string>();
        for (const auto &entry : doc.at("tasks")) {
            const auto name = entry.at("task").get<std::string>();
            const auto id = parse_task(name);
            if (!id) throw FormatError(origin + ": unknown task '" + name + "'");
            TaskTemplate tt;
            tt.task = *id;
            tt.turns = parse_turns(entry.at("turns"), origin);
            if (entry.contains("repeat")) tt.repeat = parse_turns(entry.at("repeat"), origin);
            if (tt.turns.empty()) throw FormatError(origin + ": task '" + name + "' has no turns");
            if (!set.tasks_.emplace(*id, std::move(tt)).second)
                throw FormatError(origin + ": duplicate task '" + name + "'");
        }
    } catch (const json::exception &e) {
        throw FormatError(origin + ": " + e.what());
    }
    for (auto id : all_tasks())
        if (!set.tasks_.count(id)) throw FormatError(origin + ": missing task '" + std::string(task_name(id)) + "'");
    return set;
}

TemplateSet TemplateSet::load(const std::string &path) { return parse(read_text_file(path), path); }

std::string TemplateSet::to_json() const {
    json tasks = json::array();
    for (const auto &[id, tt] : tasks_) {
        json j{{"task", task_name(id)}, {"turns", turns_json(tt.turns)}};
        if (!tt.repeat.empty()) j["repeat"] = turns_json(tt.repeat);
        tasks.push_back(j);
    }
    return json{{"version", version_}, {"system_prompt", system_prompt_}, {"tasks", tasks}}.dump(2) + "\n";
}

const TaskTemplate &TemplateSet::task(TaskId id) const { return tasks_.at(id); }

std::vector<std::string> placeholders(std::string_view tmpl) {
    std::vector<std::string> out;
    for (auto &s : segments(tmpl))
        if (s.placeholder) out.push_back(std::move(s.text));
    return out;
}

bool is_image_placeholder(std::string_view name) {
    return name == "image" || name == "images" || name == "prior_images" || name == "followup_images" ||
           name == "reference_image" || name == "main_image";
}

std::string fill_template(std::string_view tmpl, const FieldMap &fields, std::string_view suffix) {
    std::string out;
    for (const auto &s : segments(tmpl)) {
        if (!s.placeholder) {
            out += s.text;
            continue;
        }
        auto it = fields.find(s.text + std::string(suffix));
        if (it == fields.end()) throw InputError("missing value for placeholder {" + s.text + "}");
        out += it->second;
    }
    return out;
}

std::optional<FieldMap> extract_fields(std::string_view tmpl, std::string_view rendered, std::string_view suffix) {
    const auto segs = segments(tmpl);
    FieldMap fields;
    std::size_t pos = 0;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const auto &s = segs[i];
        if (!s.placeholder) {
            if (rendered.substr(pos, s.text.size()) != s.text) return std::nullopt;
            pos += s.text.size();
            continue;
        }
        // segments alternate literal/placeholder, so segs[i + 1] is a literal
        const std::string &next = segs[i + 1].text;
        std::size_t end;
        if (i + 2 == segs.size()) {
            if (rendered.size() < pos + next.size() || rendered.substr(rendered.size() - next.size()) != next)
                return std::nullopt;
            end = rendered.size() - next.size();
        } else {
            end = next.empty() ? std::string_view::npos : rendered.find(next, pos);
            if (end == std::string_view::npos) return std::nullopt;
        }
        if (end < pos) return std::nullopt;
        std::string value(rendered.substr(pos, end - pos));
        const std::string key = s.text + std::string(suffix);
        auto [it, inserted] = fields.emplace(key, value);
        if (!inserted && it->second != value) return std::nullopt;
        pos = end;
    }
    if (pos != rendered.size()) return std::nullopt;
    return fields;
}

} // namespace cxrforge
