#include <algorithm>

#include <gtest/gtest.h>

#include "cxrforge/error.hpp"
#include "cxrforge/ingest.hpp"
#include "support/fixtures.hpp"

using namespace cxrforge;

TEST(CleanReport, Examples) {
    EXPECT_EQ(clean_report_text(""), "");
    EXPECT_EQ(clean_report_text("1. No  acute process.\n\n"), "no acute process.");
    EXPECT_EQ(clean_report_text("Heart size\xE2\x80\x94normal***"), "heart size normal");
}

TEST(CleanReport, NumberingOnlyAtSentenceStarts) {
    EXPECT_EQ(clean_report_text("1. Lungs clear. 2) Heart normal.\n3. No effusion."),
              "lungs clear. heart normal. no effusion.");
    // Numbers inside a sentence are content, not numbering.
    EXPECT_EQ(clean_report_text("Nodule measures 3. mm"), "nodule measures 3. mm");
    EXPECT_EQ(clean_report_text("Tube at T4/T5 (stable); see: prior."), "tube at t4/t5 (stable); see: prior.");
}

TEST(CleanReport, Idempotent) {
    for (const char *raw : {"1. A  b.\n2. C d!", "X-ray: (PA) view; stable.", "   "}) {
        const auto once = clean_report_text(raw);
        EXPECT_EQ(clean_report_text(once), once);
    }
}

TEST(FindingsSection, Examples) {
    EXPECT_EQ(extract_findings_section("FINDINGS: clear lungs. IMPRESSION: normal."), "clear lungs.");
    EXPECT_FALSE(extract_findings_section("IMPRESSION: normal.").has_value());
    EXPECT_FALSE(extract_findings_section("FINDINGS:").has_value());
    EXPECT_FALSE(extract_findings_section("FINDINGS:   \n IMPRESSION: x").has_value());
}

TEST(FindingsSection, CaseInsensitiveAndMultiline) {
    EXPECT_EQ(extract_findings_section("Indication: cough\nFindings: Heart normal.\nLungs clear.\nComparison: none"),
              "Heart normal.\nLungs clear.");
    EXPECT_EQ(extract_findings_section("FINDINGS: stable.", {"FINDINGS"}), "stable.");
    // A header word without a colon does not start a section.
    EXPECT_EQ(extract_findings_section("FINDINGS: no impression of mass. IMPRESSION: none"),
              "no impression of mass.");
}

TEST(AdmitReport, LengthRule) {
    EXPECT_FALSE(admit_report("abc"));
    EXPECT_FALSE(admit_report(""));
    EXPECT_FALSE(admit_report("abcd"));
    EXPECT_TRUE(admit_report("abcde"));
    EXPECT_TRUE(admit_report("clear lungs."));
}

TEST(Views, ParseAndRender) {
    EXPECT_EQ(parse_view("pa"), View::PA);
    EXPECT_EQ(parse_view("LATERAL"), View::Lateral);
    EXPECT_EQ(parse_view(""), View::Unknown);
    EXPECT_EQ(parse_view("frontal"), View::Other);
    EXPECT_EQ(parse_split("valid"), Split::Validation);
    EXPECT_THROW(parse_split("holdout"), InputError);
}

namespace {

ImageRef img(const std::string &id, const std::string &study, const std::string &patient) {
    return {"mimic-cxr", id, id + ".jpg", 100, 100, View::PA, study, patient};
}

StudyRecord study(const std::string &id, const std::string &patient, const std::string &order,
                  std::vector<ImageRef> images, std::optional<std::string> findings = "heart is normal.") {
    StudyRecord s;
    s.study_id = id;
    s.patient_id = patient;
    s.images = std::move(images);
    s.findings_section = findings;
    s.report = findings;
    s.order_key = order;
    return s;
}

std::vector<ImageRef> images_for(const std::string &study_id, const std::string &patient, int n) {
    std::vector<ImageRef> out;
    for (int i = 0; i < n; ++i) out.push_back(img(study_id + "_" + std::to_string(i), study_id, patient));
    return out;
}

DatasetCatalog scenario_catalog() {
    DatasetCatalog c;
    c.dataset_id = "mimic-cxr";
    c.studies.push_back(study("a2", "p1", "t:2020-02", images_for("a2", "p1", 2)));
    c.studies.push_back(study("a1", "p1", "t:2020-01", images_for("a1", "p1", 1)));
    c.studies.push_back(study("b1", "p2", "s:00000000", images_for("b1", "p2", 6)));
    c.studies.push_back(study("c1", "p3", "t:1", images_for("c1", "p3", 5)));
    c.studies.push_back(study("c2", "p3", "t:2", images_for("c2", "p3", 6)));
    c.studies.push_back(study("d1", "p4", "t:1", images_for("d1", "p4", 1), "abc"));
    for (const auto &s : c.studies) c.images.insert(c.images.end(), s.images.begin(), s.images.end());
    return c;
}

std::vector<std::string> keys(const std::vector<ScenarioInstance> &v) {
    std::vector<std::string> out;
    for (const auto &i : v) out.push_back(i.key);
    return out;
}

} // namespace

TEST(Scenarios, SingleImageOnePerAdmittedImage) {
    const auto v = scenario_studies(scenario_catalog(), Scenario::SingleImage);
    EXPECT_EQ(v.size(), 1u + 2u + 6u + 5u + 6u); // d1 has a rejected report
    for (const auto &i : v) EXPECT_EQ(i.images.size(), 1u);
}

TEST(Scenarios, MultiImageRejectsMoreThanFive) {
    const auto v = scenario_studies(scenario_catalog(), Scenario::MultiImage);
    EXPECT_EQ(keys(v), (std::vector<std::string>{"a1", "a2", "c1"}));
}

TEST(Scenarios, MultiStudyPairsAndLimits) {
    const auto v = scenario_studies(scenario_catalog(), Scenario::MultiStudy);
    // c2 + prior c1 = 11 images: excluded. b1 has no prior: follow-up only.
    EXPECT_EQ(keys(v), (std::vector<std::string>{"a1", "a2", "b1", "c1"}));
    for (const auto &i : v) {
        if (i.key == "a2") {
            ASSERT_TRUE(i.prior.has_value());
            EXPECT_EQ(i.prior->study_id, "a1");
            EXPECT_LT(i.prior->order_key, i.order_key);
        } else {
            EXPECT_FALSE(i.prior.has_value()) << i.key;
        }
    }
}

TEST(Scenarios, OneImageStudyValidEverywhere) {
    DatasetCatalog c;
    c.studies.push_back(study("x", "p", "t:1", images_for("x", "p", 1)));
    for (auto s : {Scenario::SingleImage, Scenario::MultiImage, Scenario::MultiStudy})
        EXPECT_EQ(scenario_studies(c, s).size(), 1u);
}

TEST(Exclusion, EmptyBlocklistIsIdentity) {
    const auto c = scenario_catalog();
    const auto r = exclude_images(c, {});
    EXPECT_EQ(serialize_catalog(r.catalog), serialize_catalog(c));
    EXPECT_EQ(r.removed_images + r.removed_studies + r.removed_annotations, 0u);
}

TEST(Exclusion, FullBlocklistEmptiesCatalog) {
    auto c = scenario_catalog();
    c.annotations.push_back({"a1_0", AnnotationKind::QaPair, QuestionAnswer{"q", "a"}});
    std::unordered_set<std::string> all;
    for (const auto &i : c.images) all.insert(i.image_id);
    const auto r = exclude_images(c, all);
    EXPECT_EQ(r.catalog.record_count(), 0u);
    EXPECT_EQ(r.removed_images, c.images.size());
    EXPECT_EQ(r.removed_studies, c.studies.size());
    EXPECT_EQ(r.removed_annotations, 1u);
}

TEST(Exclusion, OnlyBlockedRecordsRemoved) {
    auto c = scenario_catalog();
    c.annotations.push_back({"a1_0", AnnotationKind::QaPair, QuestionAnswer{"q", "a"}});
    c.annotations.push_back({"a2_0", AnnotationKind::DiffQaPair, DiffQuestionAnswer{"a1_0", "q", "a"}});
    c.annotations.push_back({"c1_0", AnnotationKind::QaPair, QuestionAnswer{"q2", "a2"}});
    const auto r = exclude_images(c, {"a1_0"});
    EXPECT_EQ(r.removed_images, 1u);
    EXPECT_EQ(r.removed_studies, 1u);
    EXPECT_EQ(r.removed_annotations, 2u);
    ASSERT_EQ(r.catalog.annotations.size(), 1u);
    EXPECT_EQ(r.catalog.annotations[0], c.annotations[2]);
    for (const auto &s : r.catalog.studies) {
        const auto it = std::find_if(c.studies.begin(), c.studies.end(),
                                     [&](const StudyRecord &o) { return o.study_id == s.study_id; });
        EXPECT_EQ(s, *it);
    }
}

TEST(Blocklist, IgnoresCommentsAndBlankLines) {
    fixture::TempDir dir;
    const auto ids = read_blocklist(dir.write("b.txt", "# header\n\nimg1\n  img2  \n#img3\n"));
    EXPECT_EQ(ids, (std::unordered_set<std::string>{"img1", "img2"}));
}

TEST(Annotation, ShapeCheck) {
    Annotation ok{"i", AnnotationKind::FindingBox, LabeledBox{"x", {0, 0, 1, 1}}};
    EXPECT_NO_THROW(ok.check_shape());
    Annotation bad{"i", AnnotationKind::QaPair, LabeledBox{"x", {0, 0, 1, 1}}};
    EXPECT_THROW(bad.check_shape(), InputError);
    Annotation diff{"main", AnnotationKind::DiffQaPair, DiffQuestionAnswer{"ref", "q", "a"}};
    EXPECT_EQ(diff.referenced_images(), (std::vector<std::string>{"main", "ref"}));
}
