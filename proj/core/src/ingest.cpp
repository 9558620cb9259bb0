#include "cxrforge/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>

#include <json.hpp>

#include "cxrforge/csv.hpp"
#include "cxrforge/text.hpp"

namespace cxrforge {

using nlohmann::json;

View parse_view(std::string_view s) {
    const std::string v = text::to_lower(text::trim(s));
    if (v == "pa") return View::PA;
    if (v == "ap") return View::AP;
    if (v == "lateral" || v == "lat" || v == "ll" || v == "lao" || v == "rl") return View::Lateral;
    if (v.empty() || v == "unknown") return View::Unknown;
    return View::Other;
}

std::string_view to_string(View v) {
    switch (v) {
    case View::PA: return "PA";
    case View::AP: return "AP";
    case View::Lateral: return "lateral";
    case View::Other: return "other";
    case View::Unknown: return "unknown";
    }
    return "unknown";
}

Split parse_split(std::string_view s) {
    const std::string v = text::to_lower(text::trim(s));
    if (v == "train") return Split::Train;
    if (v == "validation" || v == "valid" || v == "val" || v == "validate") return Split::Validation;
    if (v == "test") return Split::Test;
    throw InputError("unknown split '" + std::string(s) + "'");
}

std::string_view to_string(Split s) {
    switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
    }
    return "train";
}

std::string_view to_string(AnnotationKind k) {
    switch (k) {
    case AnnotationKind::ClassLabels: return "class_labels";
    case AnnotationKind::FindingBox: return "finding_box";
    case AnnotationKind::PhraseBox: return "phrase_box";
    case AnnotationKind::OrganBox: return "organ_box";
    case AnnotationKind::AnatomicalRegionBox: return "anatomical_region_box";
    case AnnotationKind::QaPair: return "qa_pair";
    case AnnotationKind::DiffQaPair: return "diff_qa_pair";
    case AnnotationKind::InstructionPair: return "instruction_pair";
    }
    return "class_labels";
}

std::string_view to_string(Scenario s) {
    switch (s) {
    case Scenario::SingleImage: return "single_image";
    case Scenario::MultiImage: return "multi_image";
    case Scenario::MultiStudy: return "multi_study";
    }
    return "single_image";
}

std::vector<std::string> Annotation::referenced_images() const {
    std::vector<std::string> ids{image_id};
    if (const auto *d = std::get_if<DiffQuestionAnswer>(&payload)) ids.push_back(d->reference_image_id);
    return ids;
}

void Annotation::check_shape() const {
    bool ok = false;
    switch (kind) {
    case AnnotationKind::ClassLabels: ok = std::holds_alternative<ClassLabels>(payload); break;
    case AnnotationKind::FindingBox:
    case AnnotationKind::PhraseBox:
    case AnnotationKind::OrganBox:
    case AnnotationKind::AnatomicalRegionBox:
        ok = std::holds_alternative<LabeledBox>(payload);
        if (ok) require_valid(std::get<LabeledBox>(payload).box);
        break;
    case AnnotationKind::QaPair: ok = std::holds_alternative<QuestionAnswer>(payload); break;
    case AnnotationKind::DiffQaPair: ok = std::holds_alternative<DiffQuestionAnswer>(payload); break;
    case AnnotationKind::InstructionPair: ok = std::holds_alternative<InstructionDialog>(payload); break;
    }
    if (!ok) throw InputError("annotation payload does not match kind " + std::string(to_string(kind)));
}

const ImageRef *DatasetCatalog::find_image(std::string_view image_id) const {
    for (const auto &img : images)
        if (img.image_id == image_id) return &img;
    return nullptr;
}

namespace {

json image_json(const ImageRef &img) {
    json j{{"dataset", img.dataset_id}, {"id", img.image_id}, {"path", img.path},
           {"width", img.width},        {"height", img.height}, {"view", to_string(img.view)}};
    if (img.study_id) j["study"] = *img.study_id;
    if (img.patient_id) j["patient"] = *img.patient_id;
    return j;
}

json payload_json(const AnnotationPayload &p) {
    return std::visit(
        [](const auto &v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, ClassLabels>) {
                return {{"positives", v.positives}};
            } else if constexpr (std::is_same_v<T, LabeledBox>) {
                return {{"label", v.label}, {"box", {v.box.x1, v.box.y1, v.box.x2, v.box.y2}}};
            } else if constexpr (std::is_same_v<T, QuestionAnswer>) {
                return {{"question", v.question}, {"answer", v.answer}};
            } else if constexpr (std::is_same_v<T, DiffQuestionAnswer>) {
                return {{"reference", v.reference_image_id}, {"question", v.question}, {"answer", v.answer}};
            } else {
                json turns = json::array();
                for (const auto &t : v.turns) turns.push_back({{"question", t.question}, {"answer", t.answer}});
                return {{"turns", turns}};
            }
        },
        p);
}

} // namespace

std::string serialize_catalog(const DatasetCatalog &catalog) {
    std::string out;
    out += json{{"dataset", catalog.dataset_id},
                {"split", to_string(catalog.split)},
                {"vocabulary", catalog.finding_vocabulary}}
               .dump() +
           "\n";
    for (const auto &img : catalog.images) out += json{{"image", image_json(img)}}.dump() + "\n";
    for (const auto &s : catalog.studies) {
        json images = json::array();
        for (const auto &img : s.images) images.push_back(img.image_id);
        json j{{"study", s.study_id}, {"patient", s.patient_id}, {"order_key", s.order_key}, {"images", images}};
        j["report"] = s.report ? json(*s.report) : json(nullptr);
        j["findings"] = s.findings_section ? json(*s.findings_section) : json(nullptr);
        out += j.dump() + "\n";
    }
    for (const auto &a : catalog.annotations) {
        out += json{{"annotation", to_string(a.kind)}, {"image", a.image_id}, {"payload", payload_json(a.payload)}}
                   .dump() +
               "\n";
    }
    return out;
}

// ---- report text ---------------------------------------------------------

const std::vector<std::string> &default_section_headers() {
    static const std::vector<std::string> headers{"FINDINGS", "IMPRESSION", "COMPARISON", "INDICATION", "TECHNIQUE"};
    return headers;
}

namespace {

bool allowed_report_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x80) return false;
    if (std::isalnum(u)) return true;
    switch (c) {
    case '.': case ',': case ':': case ';': case '(': case ')': case '/': case '-': return true;
    default: return false;
    }
}

bool is_enumeration(std::string_view tok) {
    if (tok.size() < 2) return false;
    const char last = tok.back();
    if (last != '.' && last != ')') return false;
    return std::all_of(tok.begin(), tok.end() - 1, [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

} // namespace

std::string clean_report_text(std::string_view raw) {
    std::vector<std::string> kept;
    std::string token;
    bool newline_seen = true; // start of text is a sentence start
    bool sentence_start = true;

    auto flush = [&] {
        if (token.empty()) return;
        const bool starts = sentence_start || newline_seen;
        if (!(starts && is_enumeration(token))) {
            sentence_start = token.back() == '.';
            kept.push_back(std::move(token));
        } else {
            sentence_start = true;
        }
        token.clear();
        newline_seen = false;
    };

    for (char c : raw) {
        if (c == '\n' || c == '\r') {
            flush();
            newline_seen = true;
        } else if (std::isspace(static_cast<unsigned char>(c)) || !allowed_report_char(c)) {
            flush();
        } else {
            token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    flush();
    return text::join(kept, " ");
}

namespace {

// Position of the first "<header>:" at or after `from`, with the header on a
// word boundary. Returns {start of header, end of colon}.
std::optional<std::pair<std::size_t, std::size_t>> find_header(std::string_view report, std::string_view header,
                                                               std::size_t from) {
    const std::string lower = text::to_lower(report);
    const std::string needle = text::to_lower(header);
    for (auto pos = lower.find(needle, from); pos != std::string::npos; pos = lower.find(needle, pos + 1)) {
        if (pos > 0 && std::isalpha(static_cast<unsigned char>(lower[pos - 1]))) continue;
        std::size_t end = pos + needle.size();
        while (end < lower.size() && (lower[end] == ' ' || lower[end] == '\t')) ++end;
        if (end < lower.size() && lower[end] == ':') return std::make_pair(pos, end + 1);
    }
    return std::nullopt;
}

} // namespace

std::optional<std::string> extract_findings_section(std::string_view report, const std::vector<std::string> &headers) {
    const auto start = find_header(report, "FINDINGS", 0);
    if (!start) return std::nullopt;
    std::size_t stop = report.size();
    for (const auto &h : headers) {
        if (auto next = find_header(report, h, start->second)) stop = std::min(stop, next->first);
    }
    std::string section = text::trim(report.substr(start->second, stop - start->second));
    if (section.empty()) return std::nullopt;
    return section;
}

bool admit_report(std::string_view findings) { return findings.size() >= kMinFindingsLength; }

// ---- exclusion -------------------------------------------------------------

ExclusionResult exclude_images(const DatasetCatalog &catalog, const std::unordered_set<std::string> &blocklist) {
    ExclusionResult r;
    r.catalog.dataset_id = catalog.dataset_id;
    r.catalog.split = catalog.split;
    r.catalog.finding_vocabulary = catalog.finding_vocabulary;
    r.catalog.diagnostics = catalog.diagnostics;
    auto blocked = [&](const std::string &id) { return blocklist.count(id) > 0; };

    for (const auto &img : catalog.images) {
        if (blocked(img.image_id))
            ++r.removed_images;
        else
            r.catalog.images.push_back(img);
    }
    for (const auto &s : catalog.studies) {
        StudyRecord copy = s;
        std::erase_if(copy.images, [&](const ImageRef &img) { return blocked(img.image_id); });
        if (copy.images.empty() && !s.images.empty())
            ++r.removed_studies;
        else
            r.catalog.studies.push_back(std::move(copy));
    }
    for (const auto &a : catalog.annotations) {
        const auto refs = a.referenced_images();
        if (std::any_of(refs.begin(), refs.end(), blocked))
            ++r.removed_annotations;
        else
            r.catalog.annotations.push_back(a);
    }
    return r;
}

std::unordered_set<std::string> read_blocklist(const std::string &path) {
    std::unordered_set<std::string> ids;
    const std::string content = read_text_file(path);
    for (const auto &line : text::split(content, '\n')) {
        const std::string id = text::trim(line);
        if (id.empty() || id.front() == '#') continue;
        ids.insert(id);
    }
    return ids;
}

// ---- scenarios -------------------------------------------------------------

std::vector<ScenarioInstance> scenario_studies(const DatasetCatalog &catalog, Scenario scenario) {
    std::map<std::string, std::vector<const StudyRecord *>> by_patient;
    for (const auto &s : catalog.studies) {
        if (!s.findings_section || !admit_report(*s.findings_section) || s.images.empty()) continue;
        by_patient[s.patient_id].push_back(&s);
    }

    std::vector<ScenarioInstance> out;
    for (auto &[patient, studies] : by_patient) {
        std::sort(studies.begin(), studies.end(), [](const StudyRecord *a, const StudyRecord *b) {
            return std::tie(a->order_key, a->study_id) < std::tie(b->order_key, b->study_id);
        });
        for (std::size_t i = 0; i < studies.size(); ++i) {
            const StudyRecord &s = *studies[i];
            ScenarioInstance base;
            base.scenario = scenario;
            base.patient_id = s.patient_id;
            base.study_id = s.study_id;
            base.order_key = s.order_key;
            base.findings = *s.findings_section;

            switch (scenario) {
            case Scenario::SingleImage:
                for (const auto &img : s.images) {
                    ScenarioInstance inst = base;
                    inst.key = s.study_id + "/" + img.image_id;
                    inst.images = {img};
                    out.push_back(std::move(inst));
                }
                break;
            case Scenario::MultiImage:
                if (s.images.size() <= kMaxMultiImageImages) {
                    base.key = s.study_id;
                    base.images = s.images;
                    out.push_back(std::move(base));
                }
                break;
            case Scenario::MultiStudy: {
                std::size_t total = s.images.size();
                if (i > 0) total += studies[i - 1]->images.size();
                if (total > kMaxMultiStudyImages) break;
                base.key = s.study_id;
                base.images = s.images;
                if (i > 0) {
                    const StudyRecord &p = *studies[i - 1];
                    base.prior = PriorStudy{p.study_id, p.order_key, p.images, *p.findings_section};
                }
                out.push_back(std::move(base));
                break;
            }
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const ScenarioInstance &a, const ScenarioInstance &b) { return a.key < b.key; });
    return out;
}

} // namespace cxrforge
