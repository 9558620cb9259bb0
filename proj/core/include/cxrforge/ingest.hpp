#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <variant>
#include <vector>

#include "cxrforge/error.hpp"
#include "cxrforge/geometry.hpp"

namespace cxrforge {

enum class View { PA, AP, Lateral, Other, Unknown };
enum class Split { Train, Validation, Test };

View parse_view(std::string_view s);
std::string_view to_string(View v);
Split parse_split(std::string_view s);
std::string_view to_string(Split s);

struct ImageRef {
    std::string dataset_id;
    std::string image_id;
    std::string path;
    int width = 0;
    int height = 0;
    View view = View::Unknown;
    std::optional<std::string> study_id;
    std::optional<std::string> patient_id;

    friend bool operator==(const ImageRef &, const ImageRef &) = default;
};

struct StudyRecord {
    std::string study_id;
    std::string patient_id;
    std::vector<ImageRef> images;
    std::optional<std::string> report;
    std::optional<std::string> findings_section;
    /// Totally orders one patient's studies: "t:<timestamp>" when every study of
    /// the patient has a distinct timestamp, otherwise "s:<zero-padded index>".
    std::string order_key;

    friend bool operator==(const StudyRecord &, const StudyRecord &) = default;
};

enum class AnnotationKind {
    ClassLabels,
    FindingBox,
    PhraseBox,
    OrganBox,
    AnatomicalRegionBox,
    QaPair,
    DiffQaPair,
    InstructionPair,
};

std::string_view to_string(AnnotationKind k);

struct ClassLabels {
    std::vector<std::string> positives;
    friend bool operator==(const ClassLabels &, const ClassLabels &) = default;
};
struct LabeledBox {
    std::string label;
    BBox box;
    friend bool operator==(const LabeledBox &, const LabeledBox &) = default;
};
struct QuestionAnswer {
    std::string question;
    std::string answer;
    friend bool operator==(const QuestionAnswer &, const QuestionAnswer &) = default;
};
/// `Annotation::image_id` holds the main image.
struct DiffQuestionAnswer {
    std::string reference_image_id;
    std::string question;
    std::string answer;
    friend bool operator==(const DiffQuestionAnswer &, const DiffQuestionAnswer &) = default;
};
struct InstructionDialog {
    std::vector<QuestionAnswer> turns;
    friend bool operator==(const InstructionDialog &, const InstructionDialog &) = default;
};

using AnnotationPayload = std::variant<ClassLabels, LabeledBox, QuestionAnswer, DiffQuestionAnswer, InstructionDialog>;

struct Annotation {
    std::string image_id;
    AnnotationKind kind = AnnotationKind::ClassLabels;
    AnnotationPayload payload;

    /// Image ids this annotation depends on (main image first).
    std::vector<std::string> referenced_images() const;
    /// Throws InputError if the payload alternative does not match `kind`.
    void check_shape() const;

    friend bool operator==(const Annotation &, const Annotation &) = default;
};

struct DatasetCatalog {
    std::string dataset_id;
    Split split = Split::Train;
    std::vector<ImageRef> images;
    std::vector<StudyRecord> studies;
    std::vector<Annotation> annotations;
    std::vector<std::string> finding_vocabulary;
    Diagnostics diagnostics;

    const ImageRef *find_image(std::string_view image_id) const;
    std::size_t record_count() const noexcept { return images.size() + studies.size() + annotations.size(); }
};

/// Stable textual dump; equal catalogs produce equal bytes.
std::string serialize_catalog(const DatasetCatalog &catalog);

// ---- report text ---------------------------------------------------------

const std::vector<std::string> &default_section_headers();

/// Lowercases, strips enumeration prefixes at sentence starts, replaces
/// characters outside letters, digits, whitespace and .,:;()/- with spaces,
/// collapses whitespace, trims.
std::string clean_report_text(std::string_view raw);

/// Text after the FINDINGS header up to the next recognised header.
/// Headers are matched case-insensitively and must be followed by ':'.
std::optional<std::string> extract_findings_section(std::string_view report,
                                                    const std::vector<std::string> &headers = default_section_headers());

inline constexpr std::size_t kMinFindingsLength = 5;

bool admit_report(std::string_view findings);

// ---- adapters ------------------------------------------------------------

/// Where an adapter reads from. `files` maps a role (images, labels, boxes,
/// circles, masks, reports, qa, diff_qa, instructions, dedup_against) to a path.
struct DatasetSource {
    std::string dataset_id;
    std::string adapter;
    std::map<std::string, std::string> files;
    bool inclusive_corners = false;
    std::vector<std::string> vocabulary;
    std::vector<std::string> section_headers;
};

std::vector<std::string> registered_adapters();
bool is_registered_adapter(std::string_view adapter);

/// The 29 anatomical region names accepted for region boxes.
const std::vector<std::string> &anatomical_regions();

DatasetCatalog load_dataset(const DatasetSource &source, Split split = Split::Train);

struct ExclusionResult {
    DatasetCatalog catalog;
    std::size_t removed_images = 0;
    std::size_t removed_studies = 0;
    std::size_t removed_annotations = 0;
};

ExclusionResult exclude_images(const DatasetCatalog &catalog, const std::unordered_set<std::string> &blocklist);

/// Newline-delimited identifiers; blank lines and '#' comments are ignored.
std::unordered_set<std::string> read_blocklist(const std::string &path);

// ---- report-generation scenarios -----------------------------------------

enum class Scenario { SingleImage, MultiImage, MultiStudy };
std::string_view to_string(Scenario s);

inline constexpr std::size_t kMaxMultiImageImages = 5;
inline constexpr std::size_t kMaxMultiStudyImages = 10;

struct PriorStudy {
    std::string study_id;
    std::string order_key;
    std::vector<ImageRef> images;
    std::string findings;
};

struct ScenarioInstance {
    Scenario scenario = Scenario::SingleImage;
    std::string key;
    std::string patient_id;
    std::string study_id;
    std::string order_key;
    std::vector<ImageRef> images;
    std::string findings;
    std::optional<PriorStudy> prior;
};

std::vector<ScenarioInstance> scenario_studies(const DatasetCatalog &catalog, Scenario scenario);

} // namespace cxrforge
