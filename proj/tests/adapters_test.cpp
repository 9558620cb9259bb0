#include <algorithm>

#include <gtest/gtest.h>

#include "cxrforge/error.hpp"
#include "cxrforge/ingest.hpp"
#include "support/fixtures.hpp"

using namespace cxrforge;

namespace {

const std::string kImagesHeader = "image_id,path,width,height,split\n";
const std::string kBoxHeader = "image_id,kind,label,x1,y1,x2,y2\n";

struct Source {
    fixture::TempDir dir;
    DatasetSource src;

    Source(const std::string &id, const std::string &adapter = "") {
        src.dataset_id = id;
        src.adapter = adapter.empty() ? id : adapter;
    }
    Source &file(const std::string &role, const std::string &content) {
        src.files[role] = dir.write(role + (content.front() == '{' ? ".jsonl" : ".csv"), content);
        return *this;
    }
    DatasetCatalog load(Split split = Split::Train) const { return load_dataset(src, split); }
};

std::vector<LabeledBox> boxes_of(const DatasetCatalog &c, AnnotationKind kind) {
    std::vector<LabeledBox> out;
    for (const auto &a : c.annotations)
        if (a.kind == kind) out.push_back(std::get<LabeledBox>(a.payload));
    return out;
}

bool has_warning(const DatasetCatalog &c, const std::string &needle) {
    const auto &w = c.diagnostics.warnings();
    return std::any_of(w.begin(), w.end(), [&](const std::string &s) { return s.find(needle) != std::string::npos; });
}

std::string mimic_images(int studies_images_a, int studies_images_b) {
    std::string csv = "image_id,path,width,height,split,view,study_id,patient_id\n";
    for (int i = 0; i < studies_images_a; ++i) csv += "a" + std::to_string(i) + ",a.jpg,10,10,train,PA,sa,p1\n";
    for (int i = 0; i < studies_images_b; ++i) csv += "b" + std::to_string(i) + ",b.jpg,10,10,train,PA,sb,p1\n";
    return csv;
}

const std::string kTwoReports =
    "{\"study_id\":\"sa\",\"patient_id\":\"p1\",\"timestamp\":\"2180-01-01\",\"report\":\"FINDINGS: Heart size is normal.\"}\n"
    "{\"study_id\":\"sb\",\"patient_id\":\"p1\",\"timestamp\":\"2180-02-01\",\"report\":\"FINDINGS: New small effusion.\"}\n";

} // namespace

TEST(Adapters, RegistryCoversTrainingSources) {
    for (const char *id : {"mimic-cxr", "vindr-cxr", "jsrt", "chestx-det10", "siim", "covid19-radiography",
                           "covid-qu-ex", "qata-cov19", "rsna", "imagenome", "radialog", "ms-cxr", "chexpert",
                           "mimic-cxr-vqa", "mimic-diff-vqa"})
        EXPECT_TRUE(is_registered_adapter(id)) << id;
    EXPECT_THROW(load_dataset({"unknown-set", "unknown-set", {}, false, {}, {}}), InputError);
    EXPECT_EQ(anatomical_regions().size(), 29u);
}

TEST(Adapters, RsnaLungOpacityBecomesPneumonia) {
    Source s("rsna");
    s.file("images", kImagesHeader + "r1,r1.dcm,1024,1024,train\nr2,r2.dcm,1024,1024,train\nr3,r3.dcm,1024,1024,train\n")
        .file("labels", "image_id,labels\nr1,Lung Opacity\nr2,Normal\nr3,No Lung Opacity / Not Normal\n")
        .file("boxes", kBoxHeader + "r1,finding,Lung Opacity,264,152,477,531\n");
    const auto c = s.load();
    const auto boxes = boxes_of(c, AnnotationKind::FindingBox);
    ASSERT_EQ(boxes.size(), 1u);
    EXPECT_EQ(boxes[0].label, "pneumonia");
    std::vector<std::string> labels;
    for (const auto &a : c.annotations)
        if (const auto *cl = std::get_if<ClassLabels>(&a.payload))
            labels.insert(labels.end(), cl->positives.begin(), cl->positives.end());
    EXPECT_EQ(labels, (std::vector<std::string>{"pneumonia", "normal"}));
}

TEST(Adapters, CovidRadiographyDropsImagesWithMoreThanThreeRegions) {
    Source s("covid19-radiography");
    s.file("images", kImagesHeader + "k1,k1.png,4,4,train\nk2,k2.png,4,4,train\nk3,k3.png,4,4,train\n")
        .file("masks", "image_id,kind,label,rle\n"
                       "k1,finding,covid-19,4 4 0 2 2 2 10\n"
                       "k2,finding,covid-19,4 4 0 1 1 1 5 1 1 1 5\n"
                       "k3,finding,covid-19,4 4 0 1 1 1 5 1 7\n");
    const auto c = s.load();
    std::vector<std::string> ids;
    for (const auto &i : c.images) ids.push_back(i.image_id);
    EXPECT_EQ(ids, (std::vector<std::string>{"k1", "k3"})); // k3 has exactly three regions
    for (const auto &a : c.annotations) EXPECT_NE(a.image_id, "k2");
    EXPECT_TRUE(has_warning(c, "more than 3 mask regions"));
}

TEST(Adapters, MaskBoxesMinimallyEncloseComponents) {
    Source s("siim");
    s.file("images", kImagesHeader + "m,m.png,4,4,train\n").file("masks", "image_id,kind,label,rle\nm,finding,pneumothorax,4 4 5 2 2 2 5\n");
    const auto boxes = boxes_of(s.load(), AnnotationKind::FindingBox);
    ASSERT_EQ(boxes.size(), 1u);
    EXPECT_EQ(boxes[0].box, (BBox{1, 1, 3, 3}));
}

TEST(Adapters, JsrtCircleBecomesEnclosingBox) {
    Source s("jsrt");
    s.file("images", kImagesHeader + "J1,J1.IMG,2048,2048,train\n").file("circles", "image_id,label,cx,cy,r\nJ1,Nodule,1634,692,15\n");
    const auto boxes = boxes_of(s.load(), AnnotationKind::FindingBox);
    ASSERT_EQ(boxes.size(), 1u);
    EXPECT_EQ(boxes[0].label, "nodule");
    EXPECT_EQ(boxes[0].box, (BBox{1619, 677, 1649, 707}));
}

TEST(Adapters, MimicAdmitThresholdRejectsShortFindings) {
    Source s("mimic-cxr");
    s.file("images", mimic_images(1, 1))
        .file("reports", "{\"study_id\":\"sa\",\"patient_id\":\"p1\",\"report\":\"FINDINGS: ok.\"}\n"
                         "{\"study_id\":\"sb\",\"patient_id\":\"p1\",\"report\":\"FINDINGS: Lungs clear.\\nIMPRESSION: Normal.\"}\n");
    const auto c = s.load();
    ASSERT_EQ(c.studies.size(), 1u);
    EXPECT_EQ(c.studies[0].study_id, "sb");
    EXPECT_EQ(c.studies[0].findings_section, "lungs clear.");
    EXPECT_TRUE(has_warning(c, "without an admissible FINDINGS section"));
}

TEST(Adapters, MimicMultiImageRejectsSixImages) {
    Source s("mimic-cxr");
    s.file("images", mimic_images(6, 5)).file("reports", kTwoReports);
    const auto c = s.load();
    const auto v = scenario_studies(c, Scenario::MultiImage);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_EQ(v[0].study_id, "sb");
}

TEST(Adapters, MimicMultiStudyRejectsElevenCombinedImages) {
    Source s("mimic-cxr");
    s.file("images", mimic_images(5, 6)).file("reports", kTwoReports);
    const auto v = scenario_studies(s.load(), Scenario::MultiStudy);
    ASSERT_EQ(v.size(), 1u); // sa alone, sb + prior sa = 11 images
    EXPECT_EQ(v[0].study_id, "sa");
    EXPECT_FALSE(v[0].prior.has_value());

    Source ok("mimic-cxr");
    ok.file("images", mimic_images(5, 5)).file("reports", kTwoReports);
    const auto w = scenario_studies(ok.load(), Scenario::MultiStudy);
    ASSERT_EQ(w.size(), 2u);
    ASSERT_TRUE(w[1].prior.has_value());
    EXPECT_EQ(w[1].prior->study_id, "sa");
}

TEST(Adapters, MimicOrderKeyFallsBackToSequence) {
    Source s("mimic-cxr");
    s.file("images", mimic_images(1, 1))
        .file("reports", "{\"study_id\":\"sa\",\"patient_id\":\"p1\",\"report\":\"FINDINGS: Heart size is normal.\"}\n"
                         "{\"study_id\":\"sb\",\"patient_id\":\"p1\",\"timestamp\":\"2180\",\"report\":\"FINDINGS: Small effusion.\"}\n");
    const auto c = s.load();
    ASSERT_EQ(c.studies.size(), 2u);
    EXPECT_EQ(c.studies[0].order_key, "s:00000000");
    EXPECT_EQ(c.studies[1].order_key, "s:00000001");
}

TEST(Adapters, VindrMergesOverlappingSameLabelBoxes) {
    Source s("vindr-cxr");
    s.file("images", kImagesHeader + "v1,v1.dicom,2000,2500,train\n")
        .file("boxes", kBoxHeader + "v1,finding,Nodule/Mass,100,200,300,400\n"
                                    "v1,finding,Nodule/Mass,120,220,310,410\n"
                                    "v1,finding,Cardiomegaly,150,250,300,400\n");
    const auto boxes = boxes_of(s.load(), AnnotationKind::FindingBox);
    ASSERT_EQ(boxes.size(), 2u);
    std::vector<std::string> labels{boxes[0].label, boxes[1].label};
    std::sort(labels.begin(), labels.end());
    EXPECT_EQ(labels, (std::vector<std::string>{"cardiomegaly", "nodule/mass"}));
    for (const auto &b : boxes)
        if (b.label == "nodule/mass") EXPECT_EQ(b.box, (BBox{100, 200, 310, 410}));
}

TEST(Adapters, VindrHalfOverlapIsNotMerged) {
    Source s("vindr-cxr");
    s.file("images", kImagesHeader + "v1,v1.dicom,100,100,train\n")
        .file("boxes", kBoxHeader + "v1,finding,Nodule,0,0,10,10\nv1,finding,Nodule,5,0,15,10\n");
    EXPECT_EQ(boxes_of(s.load(), AnnotationKind::FindingBox).size(), 2u);
}

TEST(Adapters, QataDropsRowsOverlappingCovidQuEx) {
    Source s("qata-cov19");
    fixture::TempDir extra;
    s.file("images", kImagesHeader + "q1,imgs/covid_1.png,4,4,train\nq2,imgs/covid_2.png,4,4,train\n")
        .file("masks", "image_id,kind,label,rle\nq1,finding,covid-19,4 4 0 1 15\nq2,finding,covid-19,4 4 0 1 15\n");
    s.src.files["dedup_against"] = extra.write("quex.txt", "# covid-qu-ex file list\nother/Covid_1.PNG\n");
    const auto c = s.load();
    ASSERT_EQ(c.images.size(), 1u);
    EXPECT_EQ(c.images[0].image_id, "q2");
    for (const auto &a : c.annotations) EXPECT_EQ(a.image_id, "q2");

    Source missing("qata-cov19");
    missing.file("images", kImagesHeader);
    EXPECT_THROW(missing.load(), InputError);
}

TEST(Adapters, RadialogKeepsOnlyMimicNonReportRecords) {
    Source s("radialog");
    s.file("images", kImagesHeader + "m1,m1.jpg,10,10,train\nm2,m2.jpg,10,10,train\n")
        .file("instructions",
              "{\"image_id\":\"m1\",\"image_source\":\"mimic-cxr\",\"task\":\"QA\",\"turns\":[{\"question\":\"q\",\"answer\":\"a\"}]}\n"
              "{\"image_id\":\"m2\",\"image_source\":\"mimic-cxr\",\"task\":\"RG\",\"turns\":[{\"question\":\"q\",\"answer\":\"a\"}]}\n"
              "{\"image_id\":\"m2\",\"image_source\":\"chexpert\",\"task\":\"QA\",\"turns\":[{\"question\":\"q\",\"answer\":\"a\"}]}\n");
    const auto c = s.load();
    ASSERT_EQ(c.annotations.size(), 1u);
    EXPECT_EQ(c.annotations[0].image_id, "m1");
    EXPECT_EQ(c.annotations[0].kind, AnnotationKind::InstructionPair);
}

TEST(Adapters, ImagenomeKeepsKnownRegionsOnly) {
    Source s("imagenome");
    s.file("images", kImagesHeader + "m1,m1.jpg,100,100,train\n")
        .file("boxes", kBoxHeader + "m1,region,Right Lung,1,1,50,90\nm1,region,left ventricle,10,10,20,20\n");
    const auto c = s.load();
    const auto boxes = boxes_of(c, AnnotationKind::AnatomicalRegionBox);
    ASSERT_EQ(boxes.size(), 1u);
    EXPECT_EQ(boxes[0].label, "right lung");
    EXPECT_TRUE(has_warning(c, "left ventricle"));
}

TEST(Adapters, BoxesAreValidAndInsideImage) {
    Source s("ms-cxr");
    s.file("images", kImagesHeader + "x,x.jpg,100,80,train\n")
        .file("boxes", kBoxHeader + "x,phrase,Small effusion,10,10,150,90\nx,phrase,Heart,0,0,50,50\n");
    const auto c = s.load();
    for (const auto &b : boxes_of(c, AnnotationKind::PhraseBox)) {
        EXPECT_TRUE(b.box.valid());
        EXPECT_LE(b.box.x2, 100);
        EXPECT_LE(b.box.y2, 80);
    }
    EXPECT_TRUE(has_warning(c, "clamped"));
}

TEST(Adapters, InclusiveCornersAddOnePixel) {
    Source s("ms-cxr");
    s.src.inclusive_corners = true;
    s.file("images", kImagesHeader + "x,x.jpg,100,100,train\n").file("boxes", kBoxHeader + "x,phrase,Heart,10,10,19,19\n");
    EXPECT_EQ(boxes_of(s.load(), AnnotationKind::PhraseBox)[0].box, (BBox{10, 10, 20, 20}));
}

TEST(Adapters, EmptySourceFileGivesEmptyCatalogWithWarning) {
    Source s("chexpert");
    s.src.files["images"] = s.dir.write("empty.csv", "");
    const auto c = s.load();
    EXPECT_EQ(c.record_count(), 0u);
    EXPECT_TRUE(has_warning(c, "empty source file"));
}

TEST(Adapters, MalformedRowReportsPathAndLine) {
    Source s("chexpert");
    s.file("images", kImagesHeader + "c1,c1.jpg,10,10,train\nc2,c2.jpg,ten,10,train\n");
    try {
        s.load();
        FAIL() << "expected FormatError";
    } catch (const FormatError &e) {
        EXPECT_EQ(e.path(), s.src.files.at("images"));
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Adapters, DuplicateImageIdIsAnError) {
    Source s("chexpert");
    s.file("images", kImagesHeader + "c1,c1.jpg,10,10,train\nc1,c1b.jpg,10,10,train\n");
    EXPECT_THROW(s.load(), FormatError);
}

TEST(Adapters, OtherSplitImagesAreSkipped) {
    Source s("chexpert");
    s.file("images", kImagesHeader + "c1,c1.jpg,10,10,train\nc2,c2.jpg,10,10,test\n")
        .file("labels", "image_id,labels\nc1,Edema\nc2,Cardiomegaly\n");
    const auto train = s.load();
    ASSERT_EQ(train.images.size(), 1u);
    EXPECT_EQ(train.annotations.size(), 1u);
    const auto test = s.load(Split::Test);
    ASSERT_EQ(test.images.size(), 1u);
    EXPECT_EQ(test.images[0].image_id, "c2");
}

TEST(Adapters, LoadingIsDeterministic) {
    Source s("vindr-cxr");
    s.file("images", kImagesHeader + "v2,v2.dicom,3000,3000,train\nv1,v1.dicom,2000,2500,train\n")
        .file("boxes", kBoxHeader + "v2,finding,Pleural effusion,100,2000,900,2900\nv1,finding,Nodule/Mass,100,200,300,400\n"
                                    "v1,finding,Nodule/Mass,120,220,310,410\n");
    EXPECT_EQ(serialize_catalog(s.load()), serialize_catalog(s.load()));
}
