#include "cxrforge/conversation.hpp"

#include <algorithm>
#include <map>

#include "cxrforge/geometry.hpp"
#include "cxrforge/text.hpp"

namespace cxrforge {

std::vector<bool> ConversationSample::target_flags() const {
    std::vector<bool> flags;
    for (const auto &t : turns)
        if (t.role == Role::Assistant) flags.push_back(t.target);
    return flags;
}

std::string image_markers(std::size_t count) {
    std::string out;
    for (std::size_t i = 0; i < count; ++i) {
        if (i) out += ' ';
        out += kImageMarker;
    }
    return out;
}

TaskId task_for_scenario(Scenario s) {
    switch (s) {
    case Scenario::SingleImage: return TaskId::SingleImage;
    case Scenario::MultiImage: return TaskId::MultiImage;
    case Scenario::MultiStudy: return TaskId::MultiStudy;
    }
    return TaskId::SingleImage;
}

namespace {

const std::string kTemplateField = "template";

TaskId template_task(const ConversationSample &s) {
    auto it = s.fields.find(kTemplateField);
    if (it == s.fields.end()) return s.task;
    return parse_task(it->second).value_or(s.task);
}

std::size_t exchanges_in(const FieldMap &fields) {
    std::size_t n = 1;
    while (fields.count("question_" + std::to_string(n + 1))) ++n;
    return n;
}

std::vector<Turn> render_turns(const TaskTemplate &tt, const std::string &system_prompt, const FieldMap &fields) {
    std::vector<Turn> turns;
    turns.push_back({Role::System, system_prompt, false});
    for (const auto &t : tt.turns) turns.push_back({t.role, fill_template(t.text, fields), t.target});
    if (!tt.repeat.empty()) {
        const std::size_t n = exchanges_in(fields);
        for (std::size_t k = 2; k <= n; ++k)
            for (const auto &t : tt.repeat)
                turns.push_back({t.role, fill_template(t.text, fields, "_" + std::to_string(k)), t.target});
    }
    return turns;
}

ConversationSample assemble(TaskId task, TaskId tmpl_task, const std::string &dataset_id, const std::string &key,
                            std::vector<ImageRef> images, FieldMap fields, const TemplateSet &templates) {
    for (const auto &[name, value] : fields) {
        if (!is_image_placeholder(name) && value.find(kImageMarker) != std::string::npos)
            throw InputError("value for {" + name + "} contains an image slot marker");
    }
    if (tmpl_task != task) fields[kTemplateField] = std::string(task_name(tmpl_task));

    ConversationSample s;
    s.task = task;
    s.dataset_id = dataset_id;
    s.sample_id = std::string(task_name(task)) + "/" + dataset_id + "/" + key;
    s.images = std::move(images);
    s.turns = render_turns(templates.task(tmpl_task), templates.system_prompt(), fields);
    s.fields = std::move(fields);

    std::size_t markers = 0;
    for (const auto &t : s.turns) markers += text::count_occurrences(t.content, kImageMarker);
    if (markers != s.images.size())
        throw InputError(s.sample_id + ": template yields " + std::to_string(markers) + " image slots for " +
                         std::to_string(s.images.size()) + " images");
    return s;
}

std::vector<NormalizedBBox> normalized_boxes(const TaskRecord &rec, const ImageRef &img) {
    std::vector<BBox> boxes;
    for (const auto &a : rec.annotations) boxes.push_back(std::get<LabeledBox>(a.payload).box);
    std::sort(boxes.begin(), boxes.end(), canonical_less);
    std::vector<NormalizedBBox> out;
    for (const auto &b : boxes) out.push_back(normalize(b, img.width, img.height));
    return out;
}

void expect_kind(const TaskRecord &rec, TaskId task, AnnotationKind kind, bool single) {
    if (rec.images.empty()) throw InputError("record '" + rec.key + "' has no images");
    if (rec.annotations.empty() || (single && rec.annotations.size() != 1))
        throw InputError("record '" + rec.key + "' does not fit task " + std::string(task_name(task)));
    for (const auto &a : rec.annotations) {
        if (a.kind != kind)
            throw InputError("record '" + rec.key + "' holds " + std::string(to_string(a.kind)) +
                             " annotations; task " + std::string(task_name(task)) + " needs " +
                             std::string(to_string(kind)));
        a.check_shape();
    }
}

const std::string &single_label(const TaskRecord &rec) {
    const auto &label = std::get<LabeledBox>(rec.annotations.front().payload).label;
    for (const auto &a : rec.annotations)
        if (std::get<LabeledBox>(a.payload).label != label)
            throw InputError("record '" + rec.key + "' mixes labels");
    return label;
}

std::string candidates(const FindingVocabulary &vocab) {
    if (vocab.empty()) throw InputError("finding vocabulary is empty");
    return text::join(vocab.names(), ", ");
}

std::string findings_answer(const std::vector<std::string> &positives, const FindingVocabulary &vocab) {
    const auto ordered = vocab.ordered(positives);
    if (ordered.empty()) return vocab.empty_answer();
    return text::join(ordered, ", ");
}

} // namespace

// ---- validation -------------------------------------------------------------

std::vector<std::string> sample_violations(const ConversationSample &s) {
    std::vector<std::string> v;
    const std::string id = s.sample_id.empty() ? "<no id>" : s.sample_id;
    if (s.sample_id.empty()) v.push_back(id + ": empty sample id");
    if (s.images.empty()) v.push_back(id + ": no images");

    std::size_t markers = 0;
    for (const auto &t : s.turns) markers += text::count_occurrences(t.content, kImageMarker);
    if (markers != s.images.size())
        v.push_back(id + ": " + std::to_string(markers) + " image slots but " + std::to_string(s.images.size()) +
                    " images");

    bool any_target = false;
    for (std::size_t i = 0; i < s.turns.size(); ++i) {
        const auto &t = s.turns[i];
        if (t.role == Role::System && i != 0) v.push_back(id + ": system turn at position " + std::to_string(i));
        if (t.role == Role::Assistant && (i == 0 || s.turns[i - 1].role != Role::User))
            v.push_back(id + ": assistant turn " + std::to_string(i) + " does not follow a user turn");
        if (t.target && t.role != Role::Assistant) v.push_back(id + ": non-assistant turn flagged as target");
        any_target = any_target || (t.target && t.role == Role::Assistant);
        for (const auto &bad : find_invalid_bbox_text(t.content))
            v.push_back(id + ": invalid box " + bad + " in turn " + std::to_string(i));
    }
    if (!any_target) v.push_back(id + ": no target turn");
    return v;
}

std::vector<std::string> template_violations(const ConversationSample &s, const TemplateSet &templates) {
    std::vector<std::string> v;
    const TaskId tmpl_task = template_task(s);
    if (tmpl_task != s.task && !(s.task == TaskId::MultiStudy && tmpl_task == TaskId::MultiImage)) {
        v.push_back(s.sample_id + ": template override " + std::string(task_name(tmpl_task)) + " not allowed");
        return v;
    }
    const auto &tt = templates.task(tmpl_task);
    std::vector<Turn> expected;
    try {
        expected = render_turns(tt, templates.system_prompt(), s.fields);
    } catch (const InputError &e) {
        v.push_back(s.sample_id + ": " + e.what());
        return v;
    }
    if (expected.size() != s.turns.size()) {
        v.push_back(s.sample_id + ": expected " + std::to_string(expected.size()) + " turns, found " +
                    std::to_string(s.turns.size()));
        return v;
    }
    if (s.turns.front().role != Role::System || s.turns.front().content != templates.system_prompt())
        v.push_back(s.sample_id + ": system prompt differs from the template set");

    // Inverse extraction must recover the stored values exactly.
    FieldMap recovered;
    std::size_t turn = 1;
    auto extract = [&](const TurnTemplate &t, const std::string &suffix) {
        const auto &actual = s.turns[turn];
        if (actual.role != t.role || actual.target != t.target)
            v.push_back(s.sample_id + ": turn " + std::to_string(turn) + " role or target flag differs from template");
        auto got = extract_fields(t.text, actual.content, suffix);
        if (!got)
            v.push_back(s.sample_id + ": turn " + std::to_string(turn) + " does not follow the template");
        else
            for (auto &[k, val] : *got) recovered[k] = val;
        ++turn;
    };
    for (const auto &t : tt.turns) extract(t, "");
    for (std::size_t k = 2; turn < s.turns.size(); ++k)
        for (const auto &t : tt.repeat) extract(t, "_" + std::to_string(k));

    FieldMap stored = s.fields;
    stored.erase(kTemplateField);
    if (v.empty() && recovered != stored) v.push_back(s.sample_id + ": recovered template values differ from stored");
    return v;
}

// ---- task records -----------------------------------------------------------

std::vector<TaskRecord> collect_task_records(const DatasetCatalog &catalog, TaskId task) {
    if (is_report_generation(task))
        throw InputError("report generation records come from scenario_studies, not annotations");

    std::map<std::string, TaskRecord> records;
    std::map<std::string, std::size_t> ordinal;
    auto image_of = [&](const std::string &id) -> const ImageRef & {
        const auto *img = catalog.find_image(id);
        if (!img) throw InputError("annotation references unknown image '" + id + "'");
        return *img;
    };
    auto add = [&](const std::string &key, const Annotation &a, std::vector<ImageRef> images) {
        auto &rec = records[key];
        if (rec.key.empty()) {
            rec.key = key;
            rec.dataset_id = catalog.dataset_id;
            rec.images = std::move(images);
        }
        rec.annotations.push_back(a);
    };
    auto next_ordinal = [&](const std::string &image_id, AnnotationKind kind) {
        const auto n = ordinal[image_id + "\x1f" + std::string(to_string(kind))]++;
        std::string s = std::to_string(n);
        return image_id + "/" + std::string(4 - std::min<std::size_t>(4, s.size()), '0') + s;
    };

    for (const auto &a : catalog.annotations) {
        const auto label = [&] { return std::get<LabeledBox>(a.payload).label; };
        switch (task) {
        case TaskId::DiseaseClassification:
            if (a.kind == AnnotationKind::ClassLabels) add(next_ordinal(a.image_id, a.kind), a, {image_of(a.image_id)});
            break;
        case TaskId::FindingGrounding:
            if (a.kind == AnnotationKind::FindingBox) add(a.image_id + "/" + label(), a, {image_of(a.image_id)});
            break;
        case TaskId::GroundedFinding:
            if (a.kind == AnnotationKind::FindingBox) add(next_ordinal(a.image_id, a.kind), a, {image_of(a.image_id)});
            break;
        case TaskId::AbnormalityDetection:
        case TaskId::MultiFindingGrounding:
            if (a.kind == AnnotationKind::FindingBox) add(a.image_id, a, {image_of(a.image_id)});
            break;
        case TaskId::OrganGrounding:
            if (a.kind == AnnotationKind::OrganBox) add(a.image_id + "/" + label(), a, {image_of(a.image_id)});
            break;
        case TaskId::GroundedOrgan:
            if (a.kind == AnnotationKind::OrganBox) add(next_ordinal(a.image_id, a.kind), a, {image_of(a.image_id)});
            break;
        case TaskId::GroundedPhraseGeneration:
        case TaskId::PhraseGrounding:
            if (a.kind == AnnotationKind::PhraseBox) add(next_ordinal(a.image_id, a.kind), a, {image_of(a.image_id)});
            break;
        case TaskId::AnatomicalRegionGrounding:
            if (a.kind == AnnotationKind::AnatomicalRegionBox)
                add(a.image_id + "/" + label(), a, {image_of(a.image_id)});
            break;
        case TaskId::GroundedAnatomicalRegion:
            if (a.kind == AnnotationKind::AnatomicalRegionBox)
                add(next_ordinal(a.image_id, a.kind), a, {image_of(a.image_id)});
            break;
        case TaskId::VisualQuestionAnswering:
            if (a.kind == AnnotationKind::QaPair) add(next_ordinal(a.image_id, a.kind), a, {image_of(a.image_id)});
            break;
        case TaskId::DifferenceVisualQuestionAnswering:
            if (a.kind == AnnotationKind::DiffQaPair) {
                const auto &d = std::get<DiffQuestionAnswer>(a.payload);
                add(next_ordinal(a.image_id, a.kind), a, {image_of(d.reference_image_id), image_of(a.image_id)});
            }
            break;
        case TaskId::VisualInstructionFollowing:
            if (a.kind == AnnotationKind::InstructionPair)
                add(next_ordinal(a.image_id, a.kind), a, {image_of(a.image_id)});
            break;
        default: break;
        }
    }
    std::vector<TaskRecord> out;
    out.reserve(records.size());
    for (auto &[key, rec] : records) out.push_back(std::move(rec));
    return out;
}

// ---- rendering ----------------------------------------------------------------

ConversationSample render_task(const TaskRecord &rec, TaskId task, const FindingVocabulary &vocab,
                               const TemplateSet &templates) {
    if (is_report_generation(task))
        throw InputError("task " + std::string(task_name(task)) + " is rendered with build_cot_mrg");

    FieldMap f;
    const std::string dataset = rec.dataset_id.empty() && !rec.images.empty() ? rec.images.front().dataset_id
                                                                                : rec.dataset_id;
    std::vector<ImageRef> images = rec.images;

    switch (task) {
    case TaskId::DiseaseClassification: {
        expect_kind(rec, task, AnnotationKind::ClassLabels, true);
        f["candidates"] = candidates(vocab);
        f["findings"] = findings_answer(std::get<ClassLabels>(rec.annotations.front().payload).positives, vocab);
        break;
    }
    case TaskId::FindingGrounding:
        expect_kind(rec, task, AnnotationKind::FindingBox, false);
        f["finding"] = single_label(rec);
        f["bbox"] = render_bboxes(normalized_boxes(rec, images.front()));
        break;
    case TaskId::GroundedFinding:
        expect_kind(rec, task, AnnotationKind::FindingBox, true);
        f["bbox"] = render_bboxes(normalized_boxes(rec, images.front()));
        f["finding"] = single_label(rec);
        break;
    case TaskId::AbnormalityDetection:
        expect_kind(rec, task, AnnotationKind::FindingBox, false);
        f["bbox"] = render_bboxes(normalized_boxes(rec, images.front()));
        break;
    case TaskId::MultiFindingGrounding: {
        expect_kind(rec, task, AnnotationKind::FindingBox, false);
        std::map<std::size_t, std::vector<BBox>> by_label;
        for (const auto &a : rec.annotations) {
            const auto &lb = std::get<LabeledBox>(a.payload);
            const auto idx = vocab.index_of(lb.label);
            if (!idx) throw InputError("'" + lb.label + "' is not in the finding vocabulary");
            by_label[*idx].push_back(lb.box);
        }
        std::vector<std::string> parts;
        for (auto &[idx, boxes] : by_label) {
            std::sort(boxes.begin(), boxes.end(), canonical_less);
            std::vector<NormalizedBBox> nb;
            for (const auto &b : boxes) nb.push_back(normalize(b, images.front().width, images.front().height));
            parts.push_back(vocab.names()[idx] + ": " + render_bboxes(nb));
        }
        f["candidates"] = candidates(vocab);
        f["findings_with_boxes"] = text::join(parts, "; ");
        break;
    }
    case TaskId::OrganGrounding:
        expect_kind(rec, task, AnnotationKind::OrganBox, false);
        f["organ"] = single_label(rec);
        f["bbox"] = render_bboxes(normalized_boxes(rec, images.front()));
        break;
    case TaskId::GroundedOrgan:
        expect_kind(rec, task, AnnotationKind::OrganBox, true);
        f["bbox"] = render_bboxes(normalized_boxes(rec, images.front()));
        f["organ"] = single_label(rec);
        break;
    case TaskId::GroundedPhraseGeneration:
    case TaskId::PhraseGrounding:
        expect_kind(rec, task, AnnotationKind::PhraseBox, true);
        f["bbox"] = render_bboxes(normalized_boxes(rec, images.front()));
        f["phrase"] = single_label(rec);
        break;
    case TaskId::AnatomicalRegionGrounding:
        expect_kind(rec, task, AnnotationKind::AnatomicalRegionBox, false);
        f["name"] = single_label(rec);
        f["bbox"] = render_bboxes(normalized_boxes(rec, images.front()));
        break;
    case TaskId::GroundedAnatomicalRegion:
        expect_kind(rec, task, AnnotationKind::AnatomicalRegionBox, true);
        f["bbox"] = render_bboxes(normalized_boxes(rec, images.front()));
        f["name"] = single_label(rec);
        break;
    case TaskId::VisualQuestionAnswering: {
        expect_kind(rec, task, AnnotationKind::QaPair, true);
        const auto &qa = std::get<QuestionAnswer>(rec.annotations.front().payload);
        f["question"] = qa.question;
        f["answer"] = qa.answer;
        break;
    }
    case TaskId::DifferenceVisualQuestionAnswering: {
        expect_kind(rec, task, AnnotationKind::DiffQaPair, true);
        if (images.size() != 2) throw InputError("difference VQA needs reference and main images");
        const auto &qa = std::get<DiffQuestionAnswer>(rec.annotations.front().payload);
        f["question"] = qa.question;
        f["answer"] = qa.answer;
        f["reference_image"] = image_markers(1);
        f["main_image"] = image_markers(1);
        break;
    }
    case TaskId::VisualInstructionFollowing: {
        expect_kind(rec, task, AnnotationKind::InstructionPair, true);
        const auto &dialog = std::get<InstructionDialog>(rec.annotations.front().payload);
        if (dialog.turns.empty()) throw InputError("instruction record '" + rec.key + "' has no turns");
        for (std::size_t k = 0; k < dialog.turns.size(); ++k) {
            const std::string suffix = k == 0 ? "" : "_" + std::to_string(k + 1);
            f["question" + suffix] = dialog.turns[k].question;
            f["answer" + suffix] = dialog.turns[k].answer;
        }
        break;
    }
    default: break;
    }
    if (task != TaskId::DifferenceVisualQuestionAnswering) {
        if (images.size() != 1) throw InputError("task " + std::string(task_name(task)) + " takes exactly one image");
        f["image"] = image_markers(1);
    }
    return assemble(task, task, dataset, rec.key, std::move(images), std::move(f), templates);
}

ConversationSample build_cot_mrg(const ScenarioInstance &inst, const ObservationLabels &labels,
                                 const FindingVocabulary &vocab, std::string_view dataset_id,
                                 const TemplateSet &templates) {
    if (labels.vocabulary.names() != vocab.names())
        throw InputError("label vocabulary differs from the prompt vocabulary");
    if (text::trim(inst.findings).empty()) throw InputError("scenario instance '" + inst.key + "' has no report");
    if (inst.images.empty()) throw InputError("scenario instance '" + inst.key + "' has no images");

    const TaskId task = task_for_scenario(inst.scenario);
    TaskId tmpl_task = task;
    FieldMap f;
    f["candidates"] = candidates(vocab);
    f["findings"] = findings_answer(binarize(labels), vocab);
    f["report"] = inst.findings;

    std::vector<ImageRef> images;
    switch (inst.scenario) {
    case Scenario::SingleImage:
        if (inst.images.size() != 1) throw InputError("single-image instance needs exactly one image");
        f["image"] = image_markers(1);
        images = inst.images;
        break;
    case Scenario::MultiImage:
        f["images"] = image_markers(inst.images.size());
        images = inst.images;
        break;
    case Scenario::MultiStudy:
        if (inst.prior) {
            if (text::trim(inst.prior->findings).empty())
                throw InputError("prior study of '" + inst.key + "' has no report");
            f["prior_images"] = image_markers(inst.prior->images.size());
            f["prior_report"] = inst.prior->findings;
            f["followup_images"] = image_markers(inst.images.size());
            images = inst.prior->images;
            images.insert(images.end(), inst.images.begin(), inst.images.end());
        } else {
            tmpl_task = TaskId::MultiImage;
            f["images"] = image_markers(inst.images.size());
            images = inst.images;
        }
        break;
    }
    return assemble(task, tmpl_task, std::string(dataset_id), inst.key, std::move(images), std::move(f), templates);
}

// ---- flat prompt ----------------------------------------------------------------

namespace {

std::string escape(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape(std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] != '\\') {
            out.push_back(s[i]);
            continue;
        }
        if (++i >= s.size()) throw FormatError("dangling escape in flat prompt");
        switch (s[i]) {
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: throw FormatError("unknown escape in flat prompt");
        }
    }
    return out;
}

} // namespace

FlatPrompt interleave_image_slots(const ConversationSample &sample) {
    if (sample.images.empty()) throw InputError(sample.sample_id + ": sample has no images to interleave");
    FlatPrompt out;
    for (const auto &t : sample.turns) {
        out.text += to_string(t.role);
        if (t.target) out.text += '*';
        out.text += '\t';
        out.text += escape(t.content);
        out.text += '\n';
    }
    for (auto pos = out.text.find(kImageMarker); pos != std::string::npos;
         pos = out.text.find(kImageMarker, pos + kImageMarker.size()))
        out.slot_offsets.push_back(pos);
    if (out.slot_offsets.size() != sample.images.size())
        throw InputError(sample.sample_id + ": " + std::to_string(out.slot_offsets.size()) + " slots for " +
                         std::to_string(sample.images.size()) + " images");
    for (const auto &img : sample.images) out.slot_image_ids.push_back(img.image_id);
    return out;
}

std::vector<Turn> parse_flat_prompt(std::string_view text) {
    std::vector<Turn> turns;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(start, end - start);
        const auto tab = line.find('\t');
        if (tab == std::string_view::npos) throw FormatError("flat prompt line without a tab");
        auto head = line.substr(0, tab);
        Turn t;
        if (!head.empty() && head.back() == '*') {
            t.target = true;
            head.remove_suffix(1);
        }
        const auto role = parse_role(head);
        if (!role) throw FormatError("unknown role '" + std::string(head) + "' in flat prompt");
        t.role = *role;
        t.content = unescape(line.substr(tab + 1));
        turns.push_back(std::move(t));
        start = end + 1;
    }
    return turns;
}

} // namespace cxrforge
