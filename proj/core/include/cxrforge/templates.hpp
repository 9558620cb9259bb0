#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cxrforge/tasks.hpp"

namespace cxrforge {

using FieldMap = std::map<std::string, std::string>;

enum class Role { System, User, Assistant };
std::string_view to_string(Role r);
std::optional<Role> parse_role(std::string_view s);

inline constexpr std::string_view kImageMarker = "<image>";

struct TurnTemplate {
    Role role = Role::User;
    std::string text;
    bool target = false;
};

/// Turn texts for one task. `repeat` turns are appended once per extra
/// exchange; their placeholders read fields suffixed "_2", "_3", ...
struct TaskTemplate {
    TaskId task = TaskId::SingleImage;
    std::vector<TurnTemplate> turns;
    std::vector<TurnTemplate> repeat;
};

class TemplateSet {
  public:
    static const TemplateSet &builtin();
    static TemplateSet parse(std::string_view json_text, const std::string &origin = "<templates>");
    static TemplateSet load(const std::string &path);

    std::string to_json() const;

    int version() const noexcept { return version_; }
    const std::string &system_prompt() const noexcept { return system_prompt_; }
    void set_system_prompt(std::string prompt) { system_prompt_ = std::move(prompt); }
    const TaskTemplate &task(TaskId id) const;

  private:
    int version_ = 1;
    std::string system_prompt_;
    std::map<TaskId, TaskTemplate> tasks_;
};

/// Placeholder names are the identifiers inside {...}.
std::vector<std::string> placeholders(std::string_view tmpl);

/// Image placeholders expand to slot markers rather than text.
bool is_image_placeholder(std::string_view name);

/// Substitutes every {name}; throws InputError when a value is missing.
std::string fill_template(std::string_view tmpl, const FieldMap &fields, std::string_view suffix = "");

/// Inverse of fill_template: recovers placeholder values from rendered text,
/// or nullopt when the text does not follow the template.
std::optional<FieldMap> extract_fields(std::string_view tmpl, std::string_view rendered, std::string_view suffix = "");

} // namespace cxrforge
