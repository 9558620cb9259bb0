#include "cxrforge/corpus.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "cxrforge/csv.hpp"
#include "cxrforge/error.hpp"
#include "cxrforge/hash.hpp"

namespace cxrforge {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

ordered_json image_to_json(const ImageRef &img) {
    ordered_json j;
    j["id"] = img.image_id;
    j["dataset"] = img.dataset_id;
    j["path"] = img.path;
    j["width"] = img.width;
    j["height"] = img.height;
    j["view"] = std::string(to_string(img.view));
    if (img.study_id) j["study"] = *img.study_id;
    if (img.patient_id) j["patient"] = *img.patient_id;
    return j;
}

template <class T> T require(const json &j, const char *key, const std::string &where) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(where + ": missing '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &) {
        throw FormatError(where + ": field '" + key + "' has the wrong type");
    }
}

ImageRef image_from_json(const json &j, const std::string &where) {
    ImageRef img;
    img.image_id = require<std::string>(j, "id", where);
    img.dataset_id = require<std::string>(j, "dataset", where);
    img.path = require<std::string>(j, "path", where);
    img.width = require<int>(j, "width", where);
    img.height = require<int>(j, "height", where);
    img.view = parse_view(require<std::string>(j, "view", where));
    if (j.contains("study")) img.study_id = require<std::string>(j, "study", where);
    if (j.contains("patient")) img.patient_id = require<std::string>(j, "patient", where);
    return img;
}

} // namespace

std::string sample_to_json(const ConversationSample &s) {
    ordered_json j;
    j["id"] = s.sample_id;
    j["task"] = std::string(task_name(s.task));
    j["dataset"] = s.dataset_id;
    j["images"] = ordered_json::array();
    for (const auto &img : s.images) j["images"].push_back(image_to_json(img));
    j["turns"] = ordered_json::array();
    for (const auto &t : s.turns)
        j["turns"].push_back(ordered_json{{"role", std::string(to_string(t.role))}, {"content", t.content}});
    j["target_flags"] = s.target_flags();
    ordered_json fields = ordered_json::object();
    for (const auto &[k, v] : s.fields) fields[k] = v;
    j["meta"] = ordered_json{{"fields", fields}};
    return j.dump();
}

ConversationSample sample_from_json(std::string_view line, const std::string &origin, std::size_t line_no) {
    const std::string where = origin + ":" + std::to_string(line_no);
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error &e) {
        throw FormatError(origin, line_no, e.what());
    }
    ConversationSample s;
    s.sample_id = require<std::string>(j, "id", where);
    const auto task = parse_task(require<std::string>(j, "task", where));
    if (!task) throw FormatError(origin, line_no, "unknown task");
    s.task = *task;
    s.dataset_id = require<std::string>(j, "dataset", where);
    const auto images = require<json>(j, "images", where);
    if (!images.is_array()) throw FormatError(origin, line_no, "'images' must be an array");
    for (const auto &img : images) s.images.push_back(image_from_json(img, where));
    const auto turns = require<json>(j, "turns", where);
    const auto flags = require<std::vector<bool>>(j, "target_flags", where);
    if (!turns.is_array()) throw FormatError(origin, line_no, "'turns' must be an array");
    std::size_t assistant = 0;
    for (std::size_t i = 0; i < turns.size(); ++i) {
        Turn t;
        const auto role = parse_role(require<std::string>(turns[i], "role", where));
        if (!role) throw FormatError(origin, line_no, "unknown role in turn " + std::to_string(i));
        t.role = *role;
        t.content = require<std::string>(turns[i], "content", where);
        if (t.role == Role::Assistant) {
            if (assistant >= flags.size()) throw FormatError(origin, line_no, "fewer target_flags than assistant turns");
            t.target = flags[assistant++];
        }
        s.turns.push_back(std::move(t));
    }
    if (assistant != flags.size()) throw FormatError(origin, line_no, "more target_flags than assistant turns");
    if (j.contains("meta")) {
        const auto meta = j.at("meta");
        if (meta.contains("fields")) s.fields = require<FieldMap>(meta, "fields", where);
    }
    return s;
}

std::string render_corpus(const CorpusHeader &h, const std::vector<ConversationSample> &samples) {
    ordered_json head;
    head["format"] = std::string(kCorpusFormat);
    head["version"] = kFormatVersion;
    head["corpus_id"] = h.corpus_id;
    head["task"] = std::string(task_name(h.task));
    head["dataset"] = h.dataset_id;
    head["config_hash"] = h.config_hash;
    head["seed"] = h.seed;
    head["records"] = samples.size();
    std::string out = head.dump() + "\n";
    for (const auto &s : samples) out += sample_to_json(s) + "\n";
    return out;
}

CorpusFile parse_corpus(std::string_view content, const std::string &origin) {
    CorpusFile f;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos < content.size()) {
        const auto nl = content.find('\n', pos);
        const auto line = content.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? content.size() : nl + 1;
        ++line_no;
        if (line.empty()) throw FormatError(origin, line_no, "empty line");
        if (!have_header) {
            json h;
            try {
                h = json::parse(line);
            } catch (const json::parse_error &e) {
                throw FormatError(origin, line_no, e.what());
            }
            const std::string where = origin + ":1";
            if (!h.is_object() || h.value("format", "") != kCorpusFormat)
                throw FormatError(origin, line_no, "not a corpus file (missing header)");
            if (require<int>(h, "version", where) != kFormatVersion)
                throw FormatError(origin, line_no, "unsupported corpus version");
            f.header.corpus_id = require<std::string>(h, "corpus_id", where);
            const auto task = parse_task(require<std::string>(h, "task", where));
            if (!task) throw FormatError(origin, line_no, "unknown task in header");
            f.header.task = *task;
            f.header.dataset_id = require<std::string>(h, "dataset", where);
            f.header.config_hash = require<std::string>(h, "config_hash", where);
            f.header.seed = require<std::uint64_t>(h, "seed", where);
            f.header.records = require<std::uint64_t>(h, "records", where);
            have_header = true;
            continue;
        }
        f.samples.push_back(sample_from_json(line, origin, line_no));
        f.lines.push_back(line_no);
    }
    if (!have_header) throw FormatError(origin, 1, "empty corpus file has no header");
    return f;
}

CorpusFile read_corpus(const std::string &path) { return parse_corpus(read_text_file(path), path); }

std::string corpus_file_name(TaskId task, std::string_view dataset_id) {
    return std::string(task_name(task)) + "__" + std::string(dataset_id) + ".jsonl";
}

void write_file_atomic(const std::string &path, std::string_view content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw InputError("write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw InputError("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

std::string CorpusManifest::to_json() const {
    ordered_json j;
    j["format"] = std::string(kManifestFormat);
    j["version"] = kFormatVersion;
    j["corpus_id"] = corpus_id;
    j["tool_version"] = tool_version;
    j["seed"] = seed;
    j["config_hash"] = config_hash;
    j["template_hash"] = template_hash;
    j["labeler"] = ordered_json{{"kind", labeler_kind}, {"hash", labeler_hash}};
    j["blocklists"] = blocklists;
    j["blocked_ids"] = blocked_ids;
    ordered_json ex = ordered_json::object();
    for (const auto &[ds, c] : exclusions)
        ex[ds] = ordered_json{{"images", c.images}, {"studies", c.studies}, {"annotations", c.annotations}};
    j["exclusions"] = ex;
    j["files"] = ordered_json::array();
    std::uint64_t total = 0;
    for (const auto &f : files) {
        j["files"].push_back(ordered_json{{"path", f.path},
                                          {"task", std::string(task_name(f.task))},
                                          {"dataset", f.dataset_id},
                                          {"records", f.records},
                                          {"sha256", f.sha256}});
        total += f.records;
    }
    j["total_records"] = total;
    j["warnings"] = warnings;
    return j.dump(2) + "\n";
}

CorpusManifest CorpusManifest::parse(std::string_view json_text, const std::string &origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw FormatError(origin + ": " + e.what());
    }
    if (!j.is_object() || j.value("format", "") != kManifestFormat)
        throw FormatError(origin + ": not a corpus manifest");
    CorpusManifest m;
    m.corpus_id = require<std::string>(j, "corpus_id", origin);
    m.tool_version = require<std::string>(j, "tool_version", origin);
    m.seed = require<std::uint64_t>(j, "seed", origin);
    m.config_hash = require<std::string>(j, "config_hash", origin);
    m.template_hash = require<std::string>(j, "template_hash", origin);
    const auto lab = require<json>(j, "labeler", origin);
    m.labeler_kind = require<std::string>(lab, "kind", origin);
    m.labeler_hash = require<std::string>(lab, "hash", origin);
    m.blocklists = require<std::vector<std::string>>(j, "blocklists", origin);
    m.blocked_ids = require<std::uint64_t>(j, "blocked_ids", origin);
    const auto exclusions = require<json>(j, "exclusions", origin);
    for (const auto &[ds, c] : exclusions.items())
        m.exclusions[ds] = {require<std::uint64_t>(c, "images", origin), require<std::uint64_t>(c, "studies", origin),
                            require<std::uint64_t>(c, "annotations", origin)};
    const auto files_json = require<json>(j, "files", origin);
    for (const auto &f : files_json) {
        ManifestFile mf;
        mf.path = require<std::string>(f, "path", origin);
        const auto task = parse_task(require<std::string>(f, "task", origin));
        if (!task) throw FormatError(origin + ": unknown task in files");
        mf.task = *task;
        mf.dataset_id = require<std::string>(f, "dataset", origin);
        mf.records = require<std::uint64_t>(f, "records", origin);
        mf.sha256 = require<std::string>(f, "sha256", origin);
        m.files.push_back(std::move(mf));
    }
    m.warnings = require<std::uint64_t>(j, "warnings", origin);
    return m;
}

CorpusManifest CorpusManifest::load(const std::string &path) { return parse(read_text_file(path), path); }

} // namespace cxrforge
