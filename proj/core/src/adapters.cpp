#include <algorithm>
#include <charconv>
#include <map>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "cxrforge/csv.hpp"
#include "cxrforge/ingest.hpp"
#include "cxrforge/text.hpp"

namespace cxrforge {

using nlohmann::json;

namespace {

struct AdapterRules {
    bool merge_same_label_boxes = false;
    bool circles = false;
    bool masks = false;
    int max_mask_regions = -1;
    bool dedup_against = false;
    bool rsna_labels = false;
    bool anatomical_regions = false;
    bool radialog = false;
    bool reports = false;
};

const std::map<std::string, AdapterRules, std::less<>> &registry() {
    static const std::map<std::string, AdapterRules, std::less<>> r = [] {
        std::map<std::string, AdapterRules, std::less<>> m;
        m["mimic-cxr"] = {.reports = true};
        m["vindr-cxr"] = {.merge_same_label_boxes = true};
        m["jsrt"] = {.circles = true};
        m["chestx-det10"] = {.masks = true};
        m["siim"] = {.masks = true};
        m["covid19-radiography"] = {.masks = true, .max_mask_regions = 3};
        m["covid-qu-ex"] = {.masks = true};
        m["qata-cov19"] = {.masks = true, .dedup_against = true};
        m["rsna"] = {.rsna_labels = true};
        m["imagenome"] = {.anatomical_regions = true};
        m["radialog"] = {.radialog = true};
        m["ms-cxr"] = {};
        m["brax"] = {};
        m["chexpert"] = {};
        m["chestx-ray14"] = {};
        m["mimic-cxr-vqa"] = {};
        m["mimic-diff-vqa"] = {};
        return m;
    }();
    return r;
}

double parse_number(const std::string &s, const std::string &origin, std::size_t line, std::string_view what) {
    const std::string t = text::trim(s);
    double v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw FormatError(origin, line, "invalid " + std::string(what) + " '" + s + "'");
    return v;
}

int parse_int(const std::string &s, const std::string &origin, std::size_t line, std::string_view what) {
    const std::string t = text::trim(s);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
        throw FormatError(origin, line, "invalid " + std::string(what) + " '" + s + "'");
    return v;
}

std::string canonical_label(std::string_view s) { return text::to_lower(text::trim(s)); }

struct JsonLine {
    std::size_t line;
    json value;
};

std::vector<JsonLine> read_jsonl(const std::string &path) {
    std::vector<JsonLine> out;
    const std::string content = read_text_file(path);
    std::size_t line_no = 0;
    for (const auto &line : text::split(content, '\n')) {
        ++line_no;
        const std::string t = text::trim(line);
        if (t.empty()) continue;
        try {
            auto j = json::parse(t);
            if (!j.is_object()) throw FormatError(path, line_no, "record is not an object");
            out.push_back({line_no, std::move(j)});
        } catch (const json::parse_error &e) {
            throw FormatError(path, line_no, std::string("invalid JSON: ") + e.what());
        }
    }
    return out;
}

std::string require_string(const JsonLine &rec, const char *key, const std::string &origin) {
    auto it = rec.value.find(key);
    if (it == rec.value.end() || !it->is_string())
        throw FormatError(origin, rec.line, std::string("missing string field '") + key + "'");
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const JsonLine &rec, const char *key, const std::string &origin) {
    auto it = rec.value.find(key);
    if (it == rec.value.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw FormatError(origin, rec.line, std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

class CatalogBuilder {
  public:
    CatalogBuilder(const DatasetSource &source, Split split, const AdapterRules &rules)
        : source_(source), rules_(rules) {
        catalog_.dataset_id = source.dataset_id;
        catalog_.split = split;
    }

    DatasetCatalog build() {
        load_images();
        if (rules_.dedup_against) dedup_against();
        if (has("labels")) load_labels();
        if (has("boxes")) load_boxes();
        if (has("circles")) load_circles();
        if (has("masks")) load_masks();
        if (has("reports")) load_reports();
        if (has("qa")) load_qa();
        if (has("diff_qa")) load_diff_qa();
        if (has("instructions")) load_instructions();
        if (rules_.merge_same_label_boxes) merge_boxes();
        if (rules_.max_mask_regions >= 0) drop_noisy_masks();
        finish();
        return std::move(catalog_);
    }

  private:
    bool has(const std::string &role) const { return source_.files.count(role) > 0; }
    const std::string &file(const std::string &role) const { return source_.files.at(role); }
    void warn(std::string msg) { catalog_.diagnostics.warn(catalog_.dataset_id + ": " + std::move(msg)); }

    // Returns the image when it belongs to the loaded split, nullptr when it
    // belongs to another split. Unknown ids are a format error.
    const ImageRef *lookup(const std::string &image_id, const std::string &origin, std::size_t line) {
        auto it = index_.find(image_id);
        if (it != index_.end()) return &catalog_.images[it->second];
        if (other_split_.count(image_id)) {
            ++skipped_other_split_;
            return nullptr;
        }
        throw FormatError(origin, line, "unknown image id '" + image_id + "'");
    }

    void load_images() {
        if (!has("images")) throw InputError(catalog_.dataset_id + ": source 'images' is required");
        const auto table = CsvTable::read_file(file("images"));
        if (table.empty()) {
            if (table.header().empty()) warn("empty source file " + table.origin());
            return;
        }
        const auto c_id = table.require_column("image_id");
        const auto c_path = table.require_column("path");
        const auto c_w = table.require_column("width");
        const auto c_h = table.require_column("height");
        const auto c_split = table.require_column("split");
        const auto c_view = table.column("view");
        const auto c_study = table.column("study_id");
        const auto c_patient = table.column("patient_id");

        std::set<std::string> seen;
        for (const auto &row : table.rows()) {
            const auto &f = row.fields;
            ImageRef img;
            img.dataset_id = catalog_.dataset_id;
            img.image_id = text::trim(f[c_id]);
            if (img.image_id.empty()) throw FormatError(table.origin(), row.line, "empty image_id");
            if (!seen.insert(img.image_id).second)
                throw FormatError(table.origin(), row.line,
                                  "duplicate image id (" + catalog_.dataset_id + ", " + img.image_id + ")");
            Split split;
            try {
                split = parse_split(f[c_split]);
            } catch (const InputError &e) {
                throw FormatError(table.origin(), row.line, e.what());
            }
            if (split != catalog_.split) {
                other_split_.insert(img.image_id);
                continue;
            }
            img.path = text::trim(f[c_path]);
            img.width = parse_int(f[c_w], table.origin(), row.line, "width");
            img.height = parse_int(f[c_h], table.origin(), row.line, "height");
            if (img.width < 0 || img.height < 0)
                throw FormatError(table.origin(), row.line, "negative image dimension");
            if (c_view) img.view = parse_view(f[*c_view]);
            if (c_study && !text::trim(f[*c_study]).empty()) img.study_id = text::trim(f[*c_study]);
            if (c_patient && !text::trim(f[*c_patient]).empty()) img.patient_id = text::trim(f[*c_patient]);
            index_.emplace(img.image_id, catalog_.images.size());
            image_lines_.emplace(img.image_id, std::make_pair(table.origin(), row.line));
            catalog_.images.push_back(std::move(img));
        }
        if (!other_split_.empty())
            warn(std::to_string(other_split_.size()) + " images outside split " + std::string(to_string(catalog_.split)) +
                 " ignored");
    }

    void dedup_against() {
        std::set<std::string> stems;
        for (const auto &line : text::split(read_text_file(file("dedup_against")), '\n')) {
            const auto t = text::trim(line);
            if (!t.empty() && t.front() != '#') stems.insert(text::normalized_stem(t));
        }
        std::size_t removed = 0;
        std::vector<ImageRef> kept;
        for (auto &img : catalog_.images) {
            if (stems.count(text::normalized_stem(img.path))) {
                other_split_.insert(img.image_id);
                ++removed;
            } else {
                kept.push_back(std::move(img));
            }
        }
        catalog_.images = std::move(kept);
        reindex();
        if (removed) warn(std::to_string(removed) + " images overlapping the dedup list removed");
    }

    void reindex() {
        index_.clear();
        for (std::size_t i = 0; i < catalog_.images.size(); ++i) index_.emplace(catalog_.images[i].image_id, i);
    }

    bool keep_rsna_label(std::string &label) const {
        if (label == "lung opacity") {
            label = "pneumonia";
            return true;
        }
        return label == "normal";
    }

    void load_labels() {
        const auto table = CsvTable::read_file(file("labels"));
        if (table.empty()) return;
        const auto c_id = table.require_column("image_id");
        const auto c_labels = table.require_column("labels");
        for (const auto &row : table.rows()) {
            const auto *img = lookup(text::trim(row.fields[c_id]), table.origin(), row.line);
            if (!img) continue;
            ClassLabels labels;
            const std::string raw = text::trim(row.fields[c_labels]);
            bool had_any = false;
            if (!raw.empty()) {
                for (const auto &part : text::split(raw, '|')) {
                    std::string label = canonical_label(part);
                    if (label.empty()) continue;
                    had_any = true;
                    if (rules_.rsna_labels && !keep_rsna_label(label)) continue;
                    if (std::find(labels.positives.begin(), labels.positives.end(), label) == labels.positives.end())
                        labels.positives.push_back(label);
                }
            }
            if (rules_.rsna_labels && had_any && labels.positives.empty()) {
                ++dropped_rows_;
                continue;
            }
            catalog_.annotations.push_back({img->image_id, AnnotationKind::ClassLabels, std::move(labels)});
        }
    }

    std::optional<AnnotationKind> box_kind(std::string_view s) const {
        const std::string k = text::to_lower(text::trim(s));
        if (k == "finding") return AnnotationKind::FindingBox;
        if (k == "phrase") return AnnotationKind::PhraseBox;
        if (k == "organ") return AnnotationKind::OrganBox;
        if (k == "region") return AnnotationKind::AnatomicalRegionBox;
        return std::nullopt;
    }

    bool add_box(const ImageRef &img, AnnotationKind kind, std::string label, BBox box, const std::string &origin,
                 std::size_t line) {
        if (!box.valid()) throw FormatError(origin, line, "invalid box: corners out of order or negative");
        if (img.width <= 0 || img.height <= 0)
            throw FormatError(origin, line, "box on image '" + img.image_id + "' without positive dimensions");
        if (clamp_to_image(box, img.width, img.height)) warn("box on " + img.image_id + " clamped to image bounds");
        if (box.area() <= 0) warn("degenerate box on " + img.image_id + " retained");

        if (kind != AnnotationKind::PhraseBox) label = canonical_label(label);
        if (kind == AnnotationKind::FindingBox && rules_.rsna_labels && !keep_rsna_label(label)) {
            ++dropped_rows_;
            return false;
        }
        if (kind == AnnotationKind::AnatomicalRegionBox && rules_.anatomical_regions) {
            const auto &regions = anatomical_regions();
            if (std::find(regions.begin(), regions.end(), label) == regions.end()) {
                warn("unknown anatomical region '" + label + "' dropped");
                ++dropped_rows_;
                return false;
            }
        }
        if (text::trim(label).empty()) throw FormatError(origin, line, "empty box label");
        catalog_.annotations.push_back({img.image_id, kind, LabeledBox{std::move(label), box}});
        return true;
    }

    void load_boxes() {
        const auto table = CsvTable::read_file(file("boxes"));
        if (table.empty()) return;
        const auto c_id = table.require_column("image_id");
        const auto c_kind = table.require_column("kind");
        const auto c_label = table.require_column("label");
        const auto c_x1 = table.require_column("x1");
        const auto c_y1 = table.require_column("y1");
        const auto c_x2 = table.require_column("x2");
        const auto c_y2 = table.require_column("y2");
        const double far = source_.inclusive_corners ? 1.0 : 0.0;
        for (const auto &row : table.rows()) {
            const auto &f = row.fields;
            const auto kind = box_kind(f[c_kind]);
            if (!kind) throw FormatError(table.origin(), row.line, "unknown box kind '" + f[c_kind] + "'");
            const auto *img = lookup(text::trim(f[c_id]), table.origin(), row.line);
            if (!img) continue;
            BBox b{parse_number(f[c_x1], table.origin(), row.line, "x1"),
                   parse_number(f[c_y1], table.origin(), row.line, "y1"),
                   parse_number(f[c_x2], table.origin(), row.line, "x2") + far,
                   parse_number(f[c_y2], table.origin(), row.line, "y2") + far};
            add_box(*img, *kind, f[c_label], b, table.origin(), row.line);
        }
    }

    void load_circles() {
        const auto table = CsvTable::read_file(file("circles"));
        if (table.empty()) return;
        const auto c_id = table.require_column("image_id");
        const auto c_label = table.require_column("label");
        const auto c_cx = table.require_column("cx");
        const auto c_cy = table.require_column("cy");
        const auto c_r = table.require_column("r");
        for (const auto &row : table.rows()) {
            const auto &f = row.fields;
            const auto *img = lookup(text::trim(f[c_id]), table.origin(), row.line);
            if (!img) continue;
            BBox b;
            try {
                b = circle_to_bbox(parse_number(f[c_cx], table.origin(), row.line, "cx"),
                                   parse_number(f[c_cy], table.origin(), row.line, "cy"),
                                   parse_number(f[c_r], table.origin(), row.line, "r"));
            } catch (const InputError &e) {
                throw FormatError(table.origin(), row.line, e.what());
            }
            add_box(*img, AnnotationKind::FindingBox, f[c_label], b, table.origin(), row.line);
        }
    }

    void load_masks() {
        const auto table = CsvTable::read_file(file("masks"));
        if (table.empty()) return;
        const auto c_id = table.require_column("image_id");
        const auto c_kind = table.require_column("kind");
        const auto c_label = table.require_column("label");
        const auto c_rle = table.require_column("rle");
        for (const auto &row : table.rows()) {
            const auto &f = row.fields;
            const auto kind = box_kind(f[c_kind]);
            if (!kind) throw FormatError(table.origin(), row.line, "unknown mask kind '" + f[c_kind] + "'");
            const auto *img = lookup(text::trim(f[c_id]), table.origin(), row.line);
            if (!img) continue;
            std::vector<BBox> boxes;
            try {
                const RleMask mask = parse_rle(f[c_rle]);
                if (mask.width != img->width || mask.height != img->height)
                    throw FormatError("mask size differs from image size");
                boxes = mask_to_bboxes(mask);
            } catch (const FormatError &e) {
                throw FormatError(table.origin(), row.line, e.what());
            }
            mask_regions_[img->image_id] += boxes.size();
            for (const auto &b : boxes) add_box(*img, *kind, f[c_label], b, table.origin(), row.line);
        }
    }

    void load_reports() {
        const std::string origin = file("reports");
        const auto records = read_jsonl(origin);
        const auto &headers = source_.section_headers.empty() ? default_section_headers() : source_.section_headers;

        std::map<std::string, std::vector<std::size_t>> images_by_study;
        for (std::size_t i = 0; i < catalog_.images.size(); ++i)
            if (catalog_.images[i].study_id) images_by_study[*catalog_.images[i].study_id].push_back(i);

        struct Pending {
            StudyRecord study;
            std::optional<std::string> timestamp;
        };
        std::vector<Pending> pending;
        std::set<std::string> seen;
        std::size_t rejected = 0;
        for (const auto &rec : records) {
            Pending p;
            p.study.study_id = require_string(rec, "study_id", origin);
            p.study.patient_id = require_string(rec, "patient_id", origin);
            const std::string raw = require_string(rec, "report", origin);
            p.timestamp = optional_string(rec, "timestamp", origin);
            if (!seen.insert(p.study.study_id).second)
                throw FormatError(origin, rec.line, "duplicate study id '" + p.study.study_id + "'");

            auto it = images_by_study.find(p.study.study_id);
            if (it == images_by_study.end()) continue; // study outside this split
            for (auto idx : it->second) {
                const auto &img = catalog_.images[idx];
                if (img.patient_id && *img.patient_id != p.study.patient_id)
                    throw FormatError(origin, rec.line, "image " + img.image_id + " belongs to another patient");
                p.study.images.push_back(img);
            }

            const auto findings = extract_findings_section(raw, headers);
            const std::string cleaned = findings ? clean_report_text(*findings) : std::string();
            if (!findings || !admit_report(cleaned)) {
                ++rejected;
                continue;
            }
            p.study.report = clean_report_text(raw);
            p.study.findings_section = cleaned;
            pending.push_back(std::move(p));
        }
        if (rejected) warn(std::to_string(rejected) + " reports without an admissible FINDINGS section excluded");

        std::map<std::string, std::vector<std::size_t>> by_patient;
        for (std::size_t i = 0; i < pending.size(); ++i) by_patient[pending[i].study.patient_id].push_back(i);
        for (auto &[patient, idxs] : by_patient) {
            std::set<std::string> stamps;
            bool usable = true;
            for (auto i : idxs) {
                if (!pending[i].timestamp || !stamps.insert(*pending[i].timestamp).second) usable = false;
            }
            for (std::size_t k = 0; k < idxs.size(); ++k) {
                auto &p = pending[idxs[k]];
                if (usable) {
                    p.study.order_key = "t:" + *p.timestamp;
                } else {
                    std::string seq = std::to_string(k);
                    p.study.order_key = "s:" + std::string(8 - std::min<std::size_t>(8, seq.size()), '0') + seq;
                }
            }
        }
        for (auto &p : pending) catalog_.studies.push_back(std::move(p.study));
    }

    void load_qa() {
        const std::string origin = file("qa");
        for (const auto &rec : read_jsonl(origin)) {
            const auto *img = lookup(require_string(rec, "image_id", origin), origin, rec.line);
            if (!img) continue;
            catalog_.annotations.push_back(
                {img->image_id, AnnotationKind::QaPair,
                 QuestionAnswer{require_string(rec, "question", origin), require_string(rec, "answer", origin)}});
        }
    }

    void load_diff_qa() {
        const std::string origin = file("diff_qa");
        for (const auto &rec : read_jsonl(origin)) {
            const auto *main = lookup(require_string(rec, "main_image_id", origin), origin, rec.line);
            const auto *ref = lookup(require_string(rec, "reference_image_id", origin), origin, rec.line);
            if (!main || !ref) continue;
            catalog_.annotations.push_back({main->image_id, AnnotationKind::DiffQaPair,
                                            DiffQuestionAnswer{ref->image_id, require_string(rec, "question", origin),
                                                               require_string(rec, "answer", origin)}});
        }
    }

    void load_instructions() {
        const std::string origin = file("instructions");
        std::size_t excluded = 0;
        for (const auto &rec : read_jsonl(origin)) {
            const auto *img = lookup(require_string(rec, "image_id", origin), origin, rec.line);
            if (!img) continue;
            if (rules_.radialog) {
                const auto source = optional_string(rec, "image_source", origin);
                if (!source) throw FormatError(origin, rec.line, "missing string field 'image_source'");
                const auto task = optional_string(rec, "task", origin);
                if (canonical_label(*source) != "mimic-cxr" || (task && canonical_label(*task) == "rg")) {
                    ++excluded;
                    continue;
                }
            }
            auto it = rec.value.find("turns");
            if (it == rec.value.end() || !it->is_array() || it->empty())
                throw FormatError(origin, rec.line, "instruction record needs a non-empty 'turns' array");
            InstructionDialog dialog;
            for (const auto &t : *it) {
                if (!t.is_object() || !t.contains("question") || !t.contains("answer") || !t["question"].is_string() ||
                    !t["answer"].is_string())
                    throw FormatError(origin, rec.line, "each turn needs string 'question' and 'answer'");
                dialog.turns.push_back({t["question"].get<std::string>(), t["answer"].get<std::string>()});
            }
            catalog_.annotations.push_back({img->image_id, AnnotationKind::InstructionPair, std::move(dialog)});
        }
        if (excluded) warn(std::to_string(excluded) + " instruction records excluded (report generation or non-MIMIC image)");
    }

    void merge_boxes() {
        std::map<std::pair<std::string, std::string>, std::vector<BBox>> groups;
        std::vector<Annotation> rest;
        for (auto &a : catalog_.annotations) {
            if (a.kind == AnnotationKind::FindingBox) {
                const auto &lb = std::get<LabeledBox>(a.payload);
                groups[{a.image_id, lb.label}].push_back(lb.box);
            } else {
                rest.push_back(std::move(a));
            }
        }
        std::size_t before = 0, after = 0;
        for (auto &[key, boxes] : groups) {
            before += boxes.size();
            for (const auto &b : merge_overlapping(boxes, 0.5)) {
                rest.push_back({key.first, AnnotationKind::FindingBox, LabeledBox{key.second, b}});
                ++after;
            }
        }
        if (after != before) warn(std::to_string(before - after) + " overlapping boxes merged");
        catalog_.annotations = std::move(rest);
    }

    void drop_noisy_masks() {
        std::set<std::string> dropped;
        for (const auto &[id, regions] : mask_regions_)
            if (regions > static_cast<std::size_t>(rules_.max_mask_regions)) dropped.insert(id);
        if (dropped.empty()) return;
        std::erase_if(catalog_.images, [&](const ImageRef &img) { return dropped.count(img.image_id) > 0; });
        std::erase_if(catalog_.annotations, [&](const Annotation &a) {
            const auto refs = a.referenced_images();
            return std::any_of(refs.begin(), refs.end(), [&](const std::string &r) { return dropped.count(r) > 0; });
        });
        reindex();
        warn(std::to_string(dropped.size()) + " images with more than " + std::to_string(rules_.max_mask_regions) +
             " mask regions excluded");
    }

    void finish() {
        // Stable canonical order: images by id, annotations by image then kind, file order within.
        std::sort(catalog_.images.begin(), catalog_.images.end(),
                  [](const ImageRef &a, const ImageRef &b) { return a.image_id < b.image_id; });
        std::stable_sort(catalog_.annotations.begin(), catalog_.annotations.end(),
                         [](const Annotation &a, const Annotation &b) {
                             return std::tie(a.image_id, a.kind) < std::tie(b.image_id, b.kind);
                         });
        std::sort(catalog_.studies.begin(), catalog_.studies.end(),
                  [](const StudyRecord &a, const StudyRecord &b) { return a.study_id < b.study_id; });

        if (!source_.vocabulary.empty()) {
            for (const auto &v : source_.vocabulary) catalog_.finding_vocabulary.push_back(canonical_label(v));
        } else {
            std::set<std::string> labels;
            for (const auto &a : catalog_.annotations) {
                if (const auto *c = std::get_if<ClassLabels>(&a.payload))
                    labels.insert(c->positives.begin(), c->positives.end());
                else if (a.kind == AnnotationKind::FindingBox)
                    labels.insert(std::get<LabeledBox>(a.payload).label);
            }
            catalog_.finding_vocabulary.assign(labels.begin(), labels.end());
        }
        if (dropped_rows_) warn(std::to_string(dropped_rows_) + " rows dropped by dataset label rules");
        if (skipped_other_split_)
            warn(std::to_string(skipped_other_split_) + " annotation rows referencing other-split images skipped");
        if (catalog_.record_count() == 0) warn("catalog is empty");
    }

    const DatasetSource &source_;
    AdapterRules rules_;
    DatasetCatalog catalog_;
    std::unordered_map<std::string, std::size_t> index_;
    std::unordered_map<std::string, std::pair<std::string, std::size_t>> image_lines_;
    std::set<std::string> other_split_;
    std::map<std::string, std::size_t> mask_regions_;
    std::size_t dropped_rows_ = 0;
    std::size_t skipped_other_split_ = 0;
};

} // namespace

std::vector<std::string> registered_adapters() {
    std::vector<std::string> out;
    for (const auto &[name, _] : registry()) out.push_back(name);
    return out;
}

bool is_registered_adapter(std::string_view adapter) { return registry().count(text::to_lower(adapter)) > 0; }

const std::vector<std::string> &anatomical_regions() {
    static const std::vector<std::string> regions{
        "right lung",           "right upper lung zone", "right mid lung zone",   "right lower lung zone",
        "right hilar structures", "right apical zone",   "right costophrenic angle", "right hemidiaphragm",
        "left lung",            "left upper lung zone",  "left mid lung zone",    "left lower lung zone",
        "left hilar structures", "left apical zone",     "left costophrenic angle", "left hemidiaphragm",
        "trachea",              "spine",                 "right clavicle",        "left clavicle",
        "aortic arch",          "mediastinum",           "upper mediastinum",     "svc",
        "cardiac silhouette",   "cavoatrial junction",   "right atrium",          "carina",
        "abdomen",
    };
    return regions;
}

DatasetCatalog load_dataset(const DatasetSource &source, Split split) {
    const std::string adapter = text::to_lower(source.adapter.empty() ? source.dataset_id : source.adapter);
    auto it = registry().find(adapter);
    if (it == registry().end()) throw InputError("no adapter registered for dataset '" + adapter + "'");
    if (source.dataset_id.empty()) throw InputError("dataset id must not be empty");
    if (it->second.dedup_against && !source.files.count("dedup_against"))
        throw InputError(source.dataset_id + ": source 'dedup_against' is required for adapter " + adapter);
    return CatalogBuilder(source, split, it->second).build();
}

} // namespace cxrforge
