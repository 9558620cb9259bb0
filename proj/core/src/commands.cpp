#include "cxrforge/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "cxrforge/csv.hpp"
#include "cxrforge/error.hpp"
#include "cxrforge/hash.hpp"
#include "cxrforge/text.hpp"

namespace cxrforge {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---- build ---------------------------------------------------------------------

namespace {

struct Shard {
    TaskId task;
    std::string dataset_id;
    std::vector<ConversationSample> samples;
};

std::vector<ConversationSample> render_report_generation(const DatasetCatalog &catalog, TaskId task,
                                                         const FindingVocabulary &vocab, Labeler &labeler,
                                                         std::map<std::string, ObservationLabels> &label_cache,
                                                         const TemplateSet &templates) {
    Scenario scenario = Scenario::SingleImage;
    if (task == TaskId::MultiImage) scenario = Scenario::MultiImage;
    if (task == TaskId::MultiStudy) scenario = Scenario::MultiStudy;
    std::vector<ConversationSample> out;
    for (const auto &inst : scenario_studies(catalog, scenario)) {
        auto it = label_cache.find(inst.study_id);
        if (it == label_cache.end())
            it = label_cache.emplace(inst.study_id, label_report(inst.findings, vocab, labeler, inst.study_id)).first;
        out.push_back(build_cot_mrg(inst, it->second, vocab, catalog.dataset_id, templates));
    }
    return out;
}

FindingVocabulary dataset_vocabulary(const DatasetCatalog &catalog, const DatasetConfig &dc,
                                     const FindingVocabulary &global) {
    if (catalog.finding_vocabulary.empty()) return global;
    try {
        return FindingVocabulary::make(catalog.finding_vocabulary, dc.no_finding);
    } catch (const InputError &e) {
        throw ConfigError(dc.source.dataset_id + ": " + e.what());
    }
}

std::string join_blocklist(const std::set<std::string> &ids) {
    std::string out;
    for (const auto &id : ids) out += id + "\n";
    return out;
}

} // namespace

BuildReport cmd_build(const ForgeConfig &config) {
    TemplateSet templates = config.template_file.empty() ? TemplateSet::builtin() : TemplateSet::load(config.template_file);
    if (config.system_prompt) templates.set_system_prompt(*config.system_prompt);
    const auto vocab = config.finding_vocabulary();
    auto labeler = config.make_labeler();

    std::set<std::string> blocked_sorted;
    for (const auto &path : config.blocklists)
        for (const auto &id : read_blocklist(path)) blocked_sorted.insert(id);
    const std::unordered_set<std::string> blocked(blocked_sorted.begin(), blocked_sorted.end());

    BuildReport report;
    auto &m = report.manifest;
    m.corpus_id = config.corpus_id;
    m.tool_version = std::string(kToolVersion);
    m.seed = config.seed;
    m.config_hash = config.hash;
    m.labeler_kind = labeler->kind();
    m.labeler_hash = labeler->content_hash();
    m.blocklists = config.blocklists;
    m.blocked_ids = blocked.size();

    std::vector<Shard> shards;
    for (const auto &dc : config.datasets) {
        DatasetCatalog loaded;
        try {
            loaded = load_dataset(dc.source, config.split);
        } catch (const FormatError &) {
            throw;
        } catch (const InputError &e) {
            throw InputError(dc.source.dataset_id + ": " + e.what());
        }
        auto excluded = exclude_images(loaded, blocked);
        const auto &catalog = excluded.catalog;
        m.exclusions[dc.source.dataset_id] = {excluded.removed_images, excluded.removed_studies,
                                              excluded.removed_annotations};
        for (const auto &w : catalog.diagnostics.warnings()) report.warnings.push_back(w);

        const auto ds_vocab = dataset_vocabulary(catalog, dc, vocab);
        std::map<std::string, ObservationLabels> label_cache;
        for (const auto task : dc.tasks) {
            Shard shard{task, dc.source.dataset_id, {}};
            if (is_report_generation(task)) {
                shard.samples = render_report_generation(catalog, task, vocab, *labeler, label_cache, templates);
            } else {
                for (const auto &rec : collect_task_records(catalog, task))
                    shard.samples.push_back(render_task(rec, task, ds_vocab, templates));
            }
            std::sort(shard.samples.begin(), shard.samples.end(),
                      [](const auto &a, const auto &b) { return a.sample_id < b.sample_id; });
            for (std::size_t i = 1; i < shard.samples.size(); ++i)
                if (shard.samples[i].sample_id == shard.samples[i - 1].sample_id)
                    throw InputError("duplicate sample id " + shard.samples[i].sample_id);
            for (const auto &s : shard.samples) {
                const auto v = sample_violations(s);
                if (!v.empty()) throw InputError("rendered sample violates invariants: " + v.front());
            }
            shards.push_back(std::move(shard));
        }
    }

    // Stage every shard as a temp file first so a failure leaves the
    // previous corpus untouched.
    const CorpusLayout layout{config.output_dir};
    fs::create_directories(layout.corpus_dir());
    std::vector<std::pair<fs::path, fs::path>> staged;
    std::set<std::string> names;
    try {
        for (const auto &shard : shards) {
            const std::string name = corpus_file_name(shard.task, shard.dataset_id);
            if (!names.insert(name).second) throw ConfigError("task " + std::string(task_name(shard.task)) +
                                                              " listed twice for dataset " + shard.dataset_id);
            CorpusHeader h{config.corpus_id, shard.task, shard.dataset_id, config.hash, config.seed,
                           shard.samples.size()};
            const std::string content = render_corpus(h, shard.samples);
            const fs::path target = layout.shard(name);
            const fs::path tmp = target.string() + ".staged";
            write_file_atomic(tmp.string(), content);
            staged.emplace_back(tmp, target);
            m.files.push_back({"corpus/" + name, shard.task, shard.dataset_id, shard.samples.size(),
                               sha256_hex(content)});
        }
    } catch (...) {
        for (const auto &[tmp, _] : staged) fs::remove(tmp);
        throw;
    }
    for (const auto &[tmp, target] : staged) fs::rename(tmp, target);
    for (const auto &entry : fs::directory_iterator(layout.corpus_dir())) {
        const auto name = entry.path().filename().string();
        if (entry.path().extension() == ".jsonl" && !names.count(name)) fs::remove(entry.path());
    }
    std::sort(m.files.begin(), m.files.end(), [](const auto &a, const auto &b) { return a.path < b.path; });

    const std::string tmpl_json = templates.to_json();
    m.template_hash = sha256_hex(tmpl_json);
    m.warnings = report.warnings.size();
    write_file_atomic(layout.templates(), tmpl_json);
    write_file_atomic(layout.blocklist(), join_blocklist(blocked_sorted));
    write_file_atomic(layout.manifest(), m.to_json());
    return report;
}

// ---- mix -----------------------------------------------------------------------

namespace {

std::string read_or_input_error(const std::string &path) {
    try {
        return read_text_file(path);
    } catch (const FormatError &) {
        throw;
    } catch (const std::exception &e) {
        throw InputError(e.what());
    }
}

} // namespace

MixReport cmd_mix(const ForgeConfig &config, std::uint64_t n, const std::string &output_path, bool epoch) {
    if (config.mixture_file.empty()) throw ConfigError("config has no mixture_file");
    auto spec = MixtureSpec::load(config.mixture_file);
    const CorpusLayout layout{config.output_dir};
    if (!fs::is_regular_file(layout.manifest()))
        throw InputError("no built corpus at " + config.output_dir + " (run build first)");
    const auto manifest = CorpusManifest::load(layout.manifest());

    std::map<std::pair<TaskId, std::string>, const ManifestFile *> files;
    for (const auto &f : manifest.files) files[{f.task, f.dataset_id}] = &f;
    for (auto &e : spec.entries) {
        const auto it = files.find({e.task, e.dataset_id});
        e.pool_size = it == files.end() ? 0 : it->second->records;
    }

    MixReport r;
    r.output_path = output_path;
    if (config.seed_from_env)
        spec.seed = config.seed;
    else if (!spec.seed_given)
        spec.seed = config.seed;
    r.seed = spec.seed;
    r.spec_hash = sha256_hex(spec.to_json());

    const auto tickets = epoch ? sample_epoch(spec, n) : sample_stream(spec, n);
    r.stats = mixture_stats(tickets);

    // Load only the shards the stream touches.
    std::map<std::size_t, CorpusFile> loaded;
    ordered_json head;
    head["format"] = std::string(kMixFormat);
    head["version"] = kFormatVersion;
    head["corpus_id"] = manifest.corpus_id;
    head["config_hash"] = config.hash;
    head["corpus_config_hash"] = manifest.config_hash;
    head["seed"] = spec.seed;
    head["spec_hash"] = r.spec_hash;
    head["strategy"] = std::string(to_string(spec.strategy));
    head["generator"] = std::string(kGeneratorVersion);
    head["mode"] = epoch ? "epoch" : "stream";
    head["tickets"] = n;
    std::string out = head.dump() + "\n";
    for (const auto &t : tickets) {
        auto it = loaded.find(t.entry);
        if (it == loaded.end()) {
            const auto &mf = *files.at({t.task, t.dataset_id});
            auto corpus = parse_corpus(read_or_input_error(config.output_dir + "/" + mf.path), mf.path);
            it = loaded.emplace(t.entry, std::move(corpus)).first;
        }
        const auto &samples = it->second.samples;
        if (t.record_index >= samples.size())
            throw InputError("ticket " + std::to_string(t.sequence) + " references record " +
                             std::to_string(t.record_index) + " beyond its pool");
        ordered_json line;
        line["seq"] = t.sequence;
        line["task"] = std::string(task_name(t.task));
        line["dataset"] = t.dataset_id;
        line["record"] = t.record_index;
        line["sample"] = ordered_json::parse(sample_to_json(samples[t.record_index]));
        out += line.dump() + "\n";
    }
    write_file_atomic(output_path, out);
    return r;
}

// ---- eval ----------------------------------------------------------------------

EvalKind parse_eval_kind(std::string_view s) {
    if (s == "report") return EvalKind::Report;
    if (s == "grounding") return EvalKind::Grounding;
    if (s == "vqa") return EvalKind::Vqa;
    throw InputError("unknown eval kind '" + std::string(s) + "' (expected report, grounding or vqa)");
}

namespace {

std::map<std::string, std::string> read_text_records(const std::string &path) {
    const std::string content = read_or_input_error(path);
    std::map<std::string, std::string> out;
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error &e) {
            throw FormatError(path, line_no, e.what());
        }
        if (!j.is_object() || !j.contains("id") || !j.contains("text") || !j.at("id").is_string() ||
            !j.at("text").is_string())
            throw FormatError(path, line_no, "expected {\"id\": string, \"text\": string}");
        const auto id = j.at("id").get<std::string>();
        if (!out.emplace(id, j.at("text").get<std::string>()).second)
            throw FormatError(path, line_no, "duplicate id '" + id + "'");
    }
    if (out.empty()) throw InputError(path + ": no records");
    return out;
}

std::string list_ids(const std::vector<std::string> &ids) {
    constexpr std::size_t kShown = 20;
    std::string out;
    for (std::size_t i = 0; i < ids.size() && i < kShown; ++i) out += (i ? ", " : "") + ids[i];
    if (ids.size() > kShown) out += ", ... (" + std::to_string(ids.size() - kShown) + " more)";
    return out;
}

void check_alignment(const std::map<std::string, std::string> &pred, const std::map<std::string, std::string> &ref) {
    std::vector<std::string> missing, extra;
    for (const auto &[id, _] : ref)
        if (!pred.count(id)) missing.push_back(id);
    for (const auto &[id, _] : pred)
        if (!ref.count(id)) extra.push_back(id);
    if (missing.empty() && extra.empty()) return;
    std::string msg = "prediction and reference ids differ;";
    if (!missing.empty()) msg += " missing from predictions: " + list_ids(missing) + ";";
    if (!extra.empty()) msg += " not in references: " + list_ids(extra) + ";";
    msg.pop_back();
    throw InputError(msg);
}

const std::vector<std::string> &f1_five() {
    static const std::vector<std::string> five = {"cardiomegaly", "edema", "consolidation", "atelectasis",
                                                   "pleural effusion"};
    return five;
}

MetricReport eval_report(const std::map<std::string, std::string> &pred, const std::map<std::string, std::string> &ref,
                         const EvalOptions &options) {
    FindingVocabulary vocab;
    std::unique_ptr<Labeler> labeler;
    if (options.config) {
        vocab = options.config->finding_vocabulary();
        labeler = options.config->make_labeler();
    } else {
        vocab = ForgeConfig{}.finding_vocabulary();
        labeler = std::make_unique<KeywordStubLabeler>();
    }
    std::vector<LabelPredictionPair> pairs;
    std::vector<std::string> cands, refs;
    for (const auto &[id, ref_text] : ref) {
        const auto &pred_text = pred.at(id);
        LabelPredictionPair p;
        p.sample_id = id;
        p.predicted = binarize(label_report(pred_text, vocab, *labeler, "pred/" + id));
        p.reference = binarize(label_report(ref_text, vocab, *labeler, "ref/" + id));
        pairs.push_back(std::move(p));
        cands.push_back(pred_text);
        refs.push_back(ref_text);
    }
    MetricReport r;
    r.kind = "report";
    r.samples = pairs.size();
    const auto all = f1_scores(pairs, vocab);
    const std::string n = std::to_string(vocab.size());
    r.values.emplace_back("mF1-" + n, all.micro);
    r.values.emplace_back("MF1-" + n, all.macro);
    r.values.emplace_back("eF1-" + n, all.example);
    const bool has_five = std::all_of(f1_five().begin(), f1_five().end(), [&](const auto &l) { return vocab.contains(l); });
    if (has_five && vocab.size() != f1_five().size()) {
        const auto five = f1_scores(pairs, vocab, f1_five());
        r.values.emplace_back("mF1-5", five.micro);
        r.values.emplace_back("MF1-5", five.macro);
        r.values.emplace_back("eF1-5", five.example);
    }
    r.values.emplace_back("BLEU-1", bleu(cands, refs, 1));
    r.values.emplace_back("BLEU-4", bleu(cands, refs, 4));
    r.values.emplace_back("ROUGE-L", mean_rouge_l(cands, refs));
    r.per_label = all.per_label;
    return r;
}

MetricReport eval_grounding(const std::map<std::string, std::string> &pred,
                            const std::map<std::string, std::string> &ref, double threshold) {
    std::vector<std::string> texts;
    std::vector<NormalizedBBox> boxes;
    for (const auto &[id, ref_text] : ref) {
        const auto parsed = parse_bboxes_from_text(ref_text);
        if (parsed.empty()) throw InputError("reference '" + id + "' has no box");
        boxes.push_back(parsed.front());
        texts.push_back(pred.at(id));
    }
    const auto g = grounding_eval_text(texts, boxes, threshold);
    MetricReport r;
    r.kind = "grounding";
    r.samples = boxes.size();
    r.values.emplace_back("mIoU", g.miou);
    r.values.emplace_back("Acc@IoU", g.accuracy);
    return r;
}

MetricReport eval_vqa(const std::map<std::string, std::string> &pred, const std::map<std::string, std::string> &ref) {
    std::vector<std::string> preds, refs;
    for (const auto &[id, ref_text] : ref) {
        preds.push_back(pred.at(id));
        refs.push_back(ref_text);
    }
    const auto v = vqa_eval(preds, refs);
    MetricReport r;
    r.kind = "vqa";
    r.samples = v.samples;
    r.values.emplace_back("accuracy", v.accuracy);
    r.values.emplace_back("recall", v.recall);
    r.values.emplace_back("BLEU-1", v.bleu1);
    return r;
}

} // namespace

MetricReport cmd_eval(EvalKind kind, const std::string &predictions_path, const std::string &references_path,
                      const EvalOptions &options) {
    const auto pred = read_text_records(predictions_path);
    const auto ref = read_text_records(references_path);
    check_alignment(pred, ref);
    MetricReport r;
    switch (kind) {
    case EvalKind::Report: r = eval_report(pred, ref, options); break;
    case EvalKind::Grounding: r = eval_grounding(pred, ref, options.iou_threshold); break;
    case EvalKind::Vqa: r = eval_vqa(pred, ref); break;
    }
    const std::string table = options.table_path.empty() ? predictions_path + ".metrics.tsv" : options.table_path;
    write_file_atomic(table, r.to_table());
    return r;
}

// ---- validate ------------------------------------------------------------------

namespace {

struct ValidationContext {
    TemplateSet templates = TemplateSet::builtin();
    std::unordered_set<std::string> blocked;
    std::set<std::string> seen_ids;
};

std::optional<fs::path> corpus_root_for_file(const fs::path &file) {
    const auto root = file.parent_path().parent_path();
    if (fs::is_regular_file(root / "manifest.json")) return root;
    return std::nullopt;
}

void load_context(const CorpusLayout &layout, ValidationContext &ctx, ValidationReport &r) {
    if (fs::is_regular_file(layout.templates()))
        ctx.templates = TemplateSet::load(layout.templates());
    else
        r.warnings.push_back("no templates.json beside the corpus; using the built-in templates");
    if (fs::is_regular_file(layout.blocklist()))
        ctx.blocked = read_blocklist(layout.blocklist());
}

void validate_file(const std::string &path, const std::string &label, ValidationContext &ctx, ValidationReport &r,
                   const ManifestFile *expected, const CorpusManifest *manifest) {
    const std::string content = read_or_input_error(path);
    if (!expected && text::trim(content).empty()) {
        ++r.files;
        r.warnings.push_back(label + ": empty file");
        return;
    }
    CorpusFile f;
    try {
        f = parse_corpus(content, label);
    } catch (const FormatError &e) {
        r.violations.push_back(e.what());
        return;
    }
    ++r.files;
    r.samples += f.samples.size();
    auto violation = [&](const std::string &msg) { r.violations.push_back(label + ": " + msg); };

    if (f.header.records != f.samples.size())
        violation("header declares " + std::to_string(f.header.records) + " records, file holds " +
                  std::to_string(f.samples.size()));
    if (expected) {
        if (expected->records != f.samples.size())
            violation("manifest declares " + std::to_string(expected->records) + " records, file holds " +
                      std::to_string(f.samples.size()));
        if (expected->sha256 != sha256_hex(content)) violation("content hash differs from the manifest");
        if (expected->task != f.header.task || expected->dataset_id != f.header.dataset_id)
            violation("header task/dataset differ from the manifest");
    }
    if (manifest && (f.header.config_hash != manifest->config_hash || f.header.seed != manifest->seed))
        violation("config hash or seed differs from the manifest");

    const std::string prefix = std::string(task_name(f.header.task)) + "/" + f.header.dataset_id + "/";
    for (std::size_t i = 0; i < f.samples.size(); ++i) {
        const auto &s = f.samples[i];
        const std::string where = "line " + std::to_string(f.lines[i]) + " (" + s.sample_id + ")";
        if (s.task != f.header.task || s.dataset_id != f.header.dataset_id)
            violation(where + ": task/dataset differ from the file header");
        if (s.sample_id.rfind(prefix, 0) != 0) violation(where + ": id does not start with " + prefix);
        if (i > 0 && !(f.samples[i - 1].sample_id < s.sample_id)) violation(where + ": ids not strictly sorted");
        if (!ctx.seen_ids.insert(s.sample_id).second) violation(where + ": duplicate sample id");
        for (const auto &v : sample_violations(s)) violation(v);
        for (const auto &v : template_violations(s, ctx.templates)) violation(v);
        for (const auto &img : s.images)
            if (ctx.blocked.count(img.image_id)) violation(where + ": references blocked image " + img.image_id);
    }
}

} // namespace

ValidationReport cmd_validate(const std::string &path) {
    ValidationReport r;
    ValidationContext ctx;
    if (fs::is_directory(path)) {
        const CorpusLayout layout{path};
        if (!fs::is_regular_file(layout.manifest())) throw InputError(path + ": no manifest.json");
        const auto manifest = CorpusManifest::load(layout.manifest());
        load_context(layout, ctx, r);
        if (fs::is_regular_file(layout.templates()) &&
            sha256_hex(read_text_file(layout.templates())) != manifest.template_hash)
            r.violations.push_back("templates.json hash differs from the manifest");
        std::set<std::string> listed;
        for (const auto &mf : manifest.files) {
            listed.insert(fs::path(mf.path).filename().string());
            const std::string file = path + "/" + mf.path;
            if (!fs::is_regular_file(file)) {
                r.violations.push_back(mf.path + ": listed in the manifest but missing");
                continue;
            }
            validate_file(file, mf.path, ctx, r, &mf, &manifest);
        }
        if (fs::is_directory(layout.corpus_dir()))
            for (const auto &entry : fs::directory_iterator(layout.corpus_dir())) {
                const auto name = entry.path().filename().string();
                if (entry.path().extension() == ".jsonl" && !listed.count(name))
                    r.violations.push_back("corpus/" + name + ": not listed in the manifest");
            }
    } else if (fs::is_regular_file(path)) {
        if (const auto root = corpus_root_for_file(path)) load_context(CorpusLayout{root->string()}, ctx, r);
        else r.warnings.push_back("no manifest found for " + path + "; using the built-in templates");
        validate_file(path, fs::path(path).filename().string(), ctx, r, nullptr, nullptr);
    } else {
        throw InputError(path + ": no such file or directory");
    }
    if (r.samples == 0) r.warnings.push_back("corpus is empty");
    r.passed = r.violations.empty();
    return r;
}

// ---- stats ---------------------------------------------------------------------

namespace {

void add_corpus(const CorpusFile &f, StatsReport &r) {
    for (const auto &s : f.samples) {
        r.stats.add(s.task, s.dataset_id);
        r.images += s.images.size();
        r.turns += s.turns.size();
    }
}

void add_mix(std::string_view content, const std::string &origin, StatsReport &r) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        const auto nl = content.find('\n', pos);
        const auto line = content.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? content.size() : nl + 1;
        if (++line_no == 1) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error &e) {
            throw FormatError(origin, line_no, e.what());
        }
        const auto task = parse_task(j.value("task", ""));
        if (!task || !j.contains("dataset") || !j.contains("sample"))
            throw FormatError(origin, line_no, "not a mix ticket");
        r.stats.add(*task, j.at("dataset").get<std::string>());
        r.images += j.at("sample").at("images").size();
        r.turns += j.at("sample").at("turns").size();
    }
}

} // namespace

StatsReport cmd_stats(const std::string &path) {
    StatsReport r;
    r.kind = "empty";
    if (fs::is_directory(path)) {
        const CorpusLayout layout{path};
        if (!fs::is_regular_file(layout.manifest())) throw InputError(path + ": no manifest.json");
        const auto manifest = CorpusManifest::load(layout.manifest());
        r.kind = "corpus";
        for (const auto &mf : manifest.files)
            add_corpus(parse_corpus(read_or_input_error(path + "/" + mf.path), mf.path), r);
        return r;
    }
    const std::string content = read_or_input_error(path);
    if (text::trim(content).empty()) return r;
    const auto first = content.substr(0, content.find('\n'));
    json head;
    try {
        head = json::parse(first);
    } catch (const json::parse_error &e) {
        throw FormatError(path, 1, e.what());
    }
    const std::string format = head.is_object() ? head.value("format", "") : "";
    if (format == kCorpusFormat) {
        r.kind = "corpus";
        add_corpus(parse_corpus(content, path), r);
    } else if (format == kMixFormat) {
        r.kind = "mix";
        add_mix(content, path, r);
    } else {
        throw FormatError(path, 1, "neither a corpus nor a mix file");
    }
    return r;
}

std::string StatsReport::to_text() const {
    std::ostringstream os;
    os << kind << ": " << stats.total << " records, " << images << " image slots, " << turns << " turns\n";
    os << std::fixed << std::setprecision(2);
    auto block = [&](const char *title, const std::map<std::string, std::uint64_t> &counts) {
        if (counts.empty()) return;
        os << title << ":\n";
        for (const auto &[k, v] : counts)
            os << "  " << std::left << std::setw(48) << k << std::right << std::setw(10) << v << std::setw(9)
               << 100.0 * MixtureStats::frequency(counts, stats.total, k) << "%\n";
    };
    block("task type", stats.by_task_type);
    block("task", stats.by_task);
    block("dataset", stats.by_dataset);
    block("task/dataset", stats.by_task_dataset);
    return os.str();
}

std::string StatsReport::to_table() const {
    std::string out = stats.to_table();
    out += "size\timages\t" + std::to_string(images) + "\t\n";
    out += "size\tturns\t" + std::to_string(turns) + "\t\n";
    return out;
}

} // namespace cxrforge
