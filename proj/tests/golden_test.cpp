#include <set>

#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/golden_cases.hpp"

using namespace cxrforge;

TEST(Golden, EveryTaskHasOneCase) {
    std::set<TaskId> seen;
    for (const auto &c : golden::render_all()) seen.insert(c.task);
    EXPECT_EQ(seen.size(), kTaskCount);
}

TEST(Golden, RenderedPromptsMatchCheckedInFiles) {
    for (const auto &c : golden::render_all()) {
        const std::string name(task_name(c.task));
        const auto expected = fixture::read(fixture::golden_path(name + ".txt"));
        EXPECT_EQ(interleave_image_slots(c.sample).text, expected) << name;
    }
}

TEST(Golden, CasesAreStructurallyValid) {
    for (const auto &c : golden::render_all()) {
        EXPECT_TRUE(sample_violations(c.sample).empty()) << c.sample.sample_id;
        EXPECT_TRUE(template_violations(c.sample, TemplateSet::builtin()).empty()) << c.sample.sample_id;
    }
}

TEST(Golden, FlatPromptRoundTrips) {
    for (const auto &c : golden::render_all()) {
        const auto flat = interleave_image_slots(c.sample);
        EXPECT_EQ(parse_flat_prompt(flat.text), c.sample.turns) << c.sample.sample_id;
        ASSERT_EQ(flat.slot_image_ids.size(), c.sample.images.size());
        for (std::size_t i = 0; i < flat.slot_offsets.size(); ++i)
            EXPECT_EQ(flat.text.compare(flat.slot_offsets[i], kImageMarker.size(), kImageMarker), 0);
    }
}

TEST(Golden, MultiStudySlotsArePriorThenFollowUp) {
    for (const auto &c : golden::render_all()) {
        if (c.task != TaskId::MultiStudy) continue;
        const auto flat = interleave_image_slots(c.sample);
        EXPECT_EQ(flat.slot_image_ids, (std::vector<std::string>{"p0", "f0", "f1"}));
    }
}
