#pragma once

#include <vector>

#include "cxrforge/conversation.hpp"

namespace golden {

/// One hand-built input per task, rendered through the builtin templates.
/// The expected flat prompts live in tests/golden/<task>.txt.
struct Case {
    cxrforge::TaskId task;
    cxrforge::ConversationSample sample;
};

std::vector<Case> render_all();

} // namespace golden
