#include <random>

#include <gtest/gtest.h>

#include "cxrforge/error.hpp"
#include "cxrforge/templates.hpp"
#include "support/fixtures.hpp"

using namespace cxrforge;

TEST(Templates, BuiltinCoversEveryTask) {
    const auto &t = TemplateSet::builtin();
    for (auto id : all_tasks()) {
        const auto &tt = t.task(id);
        EXPECT_FALSE(tt.turns.empty()) << task_name(id);
        bool target = false;
        for (const auto &turn : tt.turns) target = target || turn.target;
        EXPECT_TRUE(target) << task_name(id);
    }
    EXPECT_NE(t.system_prompt().find("AI medical assistant"), std::string::npos);
    EXPECT_NE(t.system_prompt().find("helpful and detailed answers"), std::string::npos);
}

TEST(Templates, JsonRoundTrip) {
    const auto &t = TemplateSet::builtin();
    const auto again = TemplateSet::parse(t.to_json());
    EXPECT_EQ(again.to_json(), t.to_json());
}

TEST(Templates, ShippedFileMatchesBuiltin) {
    const auto shipped = TemplateSet::load(fixture::data_path("templates.json"));
    EXPECT_EQ(shipped.to_json(), TemplateSet::builtin().to_json());
}

TEST(Templates, ParseRejectsUnknownKeysAndTasks) {
    EXPECT_THROW(TemplateSet::parse(R"({"version":1,"system_prompt":"x","tasks":{},"extra":1})"), FormatError);
    EXPECT_THROW(TemplateSet::parse(R"({"version":1,"system_prompt":"x","tasks":{"no_such_task":{"turns":[]}}})"),
                 FormatError);
    EXPECT_THROW(TemplateSet::parse("not json"), FormatError);
}

TEST(Templates, PlaceholderNames) {
    EXPECT_EQ(placeholders("radiology image: {image} Is {finding} present?"),
              (std::vector<std::string>{"image", "finding"}));
    EXPECT_TRUE(placeholders("no fields").empty());
    EXPECT_TRUE(is_image_placeholder("image"));
    EXPECT_TRUE(is_image_placeholder("prior_images"));
    EXPECT_FALSE(is_image_placeholder("finding"));
}

TEST(Templates, FillSubstitutesAndRejectsMissing) {
    EXPECT_EQ(fill_template("Is {finding} present? {bbox}", {{"finding", "nodule"}, {"bbox", "[1, 2, 3, 4]"}}),
              "Is nodule present? [1, 2, 3, 4]");
    EXPECT_EQ(fill_template("{question}", {{"question_2", "why?"}}, "_2"), "why?");
    EXPECT_THROW(fill_template("Is {finding} present?", {}), InputError);
}

TEST(Templates, ExtractInvertsFill) {
    const std::string tmpl = "radiology image: {image} Provide the bounding box coordinates of {organ} in the radiology image.";
    const FieldMap f{{"image", "<image>"}, {"organ", "left lung"}};
    EXPECT_EQ(extract_fields(tmpl, fill_template(tmpl, f)), f);
    EXPECT_FALSE(extract_fields(tmpl, "something else").has_value());
    EXPECT_FALSE(extract_fields(tmpl, fill_template(tmpl, f) + " trailing").has_value());
}

TEST(Templates, ExtractRoundTripOnRandomValues) {
    std::mt19937 rng(7);
    const std::string alphabet = "abcdefghijklmnop ,.[]0123456789";
    auto word = [&] {
        std::string s;
        const int n = 1 + static_cast<int>(rng() % 12);
        for (int i = 0; i < n; ++i) s += alphabet[rng() % alphabet.size()];
        return s;
    };
    const auto &t = TemplateSet::builtin();
    for (int trial = 0; trial < 1000; ++trial) {
        const auto id = all_tasks()[rng() % kTaskCount];
        for (const auto &turn : t.task(id).turns) {
            FieldMap f;
            for (const auto &p : placeholders(turn.text)) f[p] = is_image_placeholder(p) ? "<image>" : word();
            const auto got = extract_fields(turn.text, fill_template(turn.text, f));
            ASSERT_TRUE(got.has_value()) << turn.text;
            EXPECT_EQ(*got, f);
        }
    }
}

TEST(Templates, RoleNames) {
    EXPECT_EQ(parse_role("assistant"), Role::Assistant);
    EXPECT_EQ(to_string(Role::System), "system");
    EXPECT_FALSE(parse_role("bot").has_value());
}
