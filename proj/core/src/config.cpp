#include "cxrforge/config.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <set>

#include <json.hpp>

#include "cxrforge/csv.hpp"
#include "cxrforge/error.hpp"
#include "cxrforge/hash.hpp"

namespace cxrforge {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void reject_unknown(const json &obj, const std::set<std::string> &allowed, const std::string &where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto &[k, _] : obj.items())
        if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

std::string get_string(const json &obj, const char *key, const std::string &where) {
    const auto &v = obj.at(key);
    if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

std::vector<std::string> get_strings(const json &obj, const char *key, const std::string &where) {
    const auto &v = obj.at(key);
    if (!v.is_array()) throw ConfigError(where + "." + key + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto &e : v) {
        if (!e.is_string()) throw ConfigError(where + "." + key + ": expected an array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

int get_int(const json &obj, const char *key, const std::string &where, int min) {
    const auto &v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < min || v.get<long long>() > 1000000000)
        throw ConfigError(where + "." + key + ": expected an integer >= " + std::to_string(min));
    return v.get<int>();
}

std::string resolve(const std::string &base, const std::string &p) {
    if (p.empty()) return p;
    const fs::path path(p);
    if (path.is_absolute() || base.empty()) return path.lexically_normal().string();
    return (fs::path(base) / path).lexically_normal().string();
}

LabelerConfig parse_labeler(const json &j, const std::string &base) {
    const std::string where = "labeler";
    reject_unknown(j, {"kind", "path", "url", "timeout_ms", "retries", "max_in_flight", "keywords"}, where);
    LabelerConfig c;
    if (j.contains("kind")) c.kind = get_string(j, "kind", where);
    if (c.kind != "keyword_stub" && c.kind != "precomputed_file" && c.kind != "remote_service")
        throw ConfigError("labeler.kind: unknown labeler '" + c.kind + "'");
    if (j.contains("path")) c.path = resolve(base, get_string(j, "path", where));
    if (j.contains("url")) c.url = get_string(j, "url", where);
    if (j.contains("timeout_ms")) c.timeout_ms = get_int(j, "timeout_ms", where, 1);
    if (j.contains("retries")) c.retries = get_int(j, "retries", where, 0);
    if (j.contains("max_in_flight")) c.max_in_flight = get_int(j, "max_in_flight", where, 1);
    if (j.contains("keywords")) {
        const auto &kw = j.at("keywords");
        if (!kw.is_object()) throw ConfigError("labeler.keywords: expected an object");
        for (const auto &[label, _] : kw.items()) c.keywords[label] = get_strings(kw, label.c_str(), "labeler.keywords");
    }
    if (c.kind == "precomputed_file" && c.path.empty()) throw ConfigError("labeler.path is required for precomputed_file");
    if (c.kind == "remote_service" && c.url.empty()) throw ConfigError("labeler.url is required for remote_service");
    return c;
}

DatasetConfig parse_dataset(const json &j, std::size_t index, const std::string &base) {
    const std::string where = "datasets[" + std::to_string(index) + "]";
    reject_unknown(j,
                   {"id", "adapter", "sources", "tasks", "vocabulary", "no_finding", "inclusive_corners",
                    "section_headers"},
                   where);
    for (const char *k : {"id", "adapter", "sources", "tasks"})
        if (!j.contains(k)) throw ConfigError(where + ": missing '" + k + "'");
    DatasetConfig d;
    d.source.dataset_id = get_string(j, "id", where);
    if (d.source.dataset_id.empty() || d.source.dataset_id.find_first_of("/\\ \t") != std::string::npos)
        throw ConfigError(where + ".id: must be non-empty without '/' or whitespace");
    d.source.adapter = get_string(j, "adapter", where);
    if (!is_registered_adapter(d.source.adapter))
        throw ConfigError(where + ".adapter: unknown adapter '" + d.source.adapter + "'");
    const auto &src = j.at("sources");
    if (!src.is_object()) throw ConfigError(where + ".sources: expected an object");
    for (const auto &[role, _] : src.items())
        d.source.files[role] = resolve(base, get_string(src, role.c_str(), where + ".sources"));
    for (const auto &name : get_strings(j, "tasks", where)) {
        const auto t = parse_task(name);
        if (!t) throw ConfigError(where + ".tasks: unknown task '" + name + "'");
        d.tasks.push_back(*t);
    }
    if (d.tasks.empty()) throw ConfigError(where + ".tasks: at least one task is required");
    if (j.contains("vocabulary")) d.source.vocabulary = get_strings(j, "vocabulary", where);
    if (j.contains("no_finding")) d.no_finding = get_string(j, "no_finding", where);
    if (j.contains("inclusive_corners")) {
        if (!j.at("inclusive_corners").is_boolean()) throw ConfigError(where + ".inclusive_corners: expected a boolean");
        d.source.inclusive_corners = j.at("inclusive_corners").get<bool>();
    }
    if (j.contains("section_headers")) d.source.section_headers = get_strings(j, "section_headers", where);
    return d;
}

} // namespace

std::uint64_t parse_seed(const std::string &text, const std::string &origin) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(origin + ": seed must be an unsigned 64-bit integer, got '" + text + "'");
    return v;
}

std::optional<std::string> env_seed() {
    const char *v = std::getenv(std::string(kSeedEnvVar).c_str());
    if (!v || !*v) return std::nullopt;
    return std::string(v);
}

ForgeConfig ForgeConfig::parse(std::string_view json_text, const std::string &origin, const std::string &base_dir,
                               const std::optional<std::string> &env_seed_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ConfigError(origin + ": " + e.what());
    }
    reject_unknown(j,
                   {"corpus_id", "seed", "split", "template_file", "system_prompt", "vocabulary", "labeler",
                    "mixture_file", "blocklists", "output_dir", "datasets"},
                   origin);
    for (const char *k : {"corpus_id", "seed", "output_dir", "datasets"})
        if (!j.contains(k)) throw ConfigError(origin + ": missing '" + k + "'");

    ForgeConfig c;
    try {
        c.corpus_id = get_string(j, "corpus_id", origin);
        if (!j.at("seed").is_number_unsigned()) throw ConfigError(origin + ".seed: expected an unsigned integer");
        c.seed = j.at("seed").get<std::uint64_t>();
        if (env_seed_text) {
            c.seed = parse_seed(*env_seed_text, std::string(kSeedEnvVar));
            c.seed_from_env = true;
        }
        if (j.contains("split")) {
            try {
                c.split = parse_split(get_string(j, "split", origin));
            } catch (const InputError &e) {
                throw ConfigError(origin + ".split: " + e.what());
            }
        }
        if (j.contains("template_file")) c.template_file = resolve(base_dir, get_string(j, "template_file", origin));
        if (j.contains("system_prompt")) c.system_prompt = get_string(j, "system_prompt", origin);
        if (j.contains("vocabulary")) {
            const auto &v = j.at("vocabulary");
            reject_unknown(v, {"labels", "no_finding"}, "vocabulary");
            if (!v.contains("labels")) throw ConfigError("vocabulary: missing 'labels'");
            c.vocabulary = get_strings(v, "labels", "vocabulary");
            if (v.contains("no_finding")) c.no_finding = get_string(v, "no_finding", "vocabulary");
        }
        if (j.contains("labeler")) c.labeler = parse_labeler(j.at("labeler"), base_dir);
        if (j.contains("mixture_file")) c.mixture_file = resolve(base_dir, get_string(j, "mixture_file", origin));
        if (j.contains("blocklists"))
            for (const auto &b : get_strings(j, "blocklists", origin)) c.blocklists.push_back(resolve(base_dir, b));
        c.output_dir = resolve(base_dir, get_string(j, "output_dir", origin));
        if (c.output_dir.empty()) throw ConfigError(origin + ".output_dir: must not be empty");

        const auto &ds = j.at("datasets");
        if (!ds.is_array()) throw ConfigError(origin + ".datasets: expected an array");
        std::set<std::string> ids;
        for (std::size_t i = 0; i < ds.size(); ++i) {
            c.datasets.push_back(parse_dataset(ds[i], i, base_dir));
            if (!ids.insert(c.datasets.back().source.dataset_id).second)
                throw ConfigError(origin + ": duplicate dataset id '" + c.datasets.back().source.dataset_id + "'");
        }
        if (!c.vocabulary.empty()) (void)c.finding_vocabulary();
    } catch (const json::exception &e) {
        throw ConfigError(origin + ": " + e.what());
    }

    json canonical = j;
    canonical["seed"] = c.seed;
    c.hash = sha256_hex(canonical.dump());
    return c;
}

ForgeConfig ForgeConfig::load(const std::string &path) {
    std::string content;
    try {
        content = read_text_file(path);
    } catch (const std::exception &e) {
        throw ConfigError(std::string("cannot read config: ") + e.what());
    }
    const std::string base = fs::path(path).parent_path().string();
    auto c = parse(content, path, base, env_seed());
    c.check_paths();
    return c;
}

FindingVocabulary ForgeConfig::finding_vocabulary() const {
    try {
        if (vocabulary.empty()) {
            std::vector<std::string> names;
            for (const auto &[label, _] : KeywordStubLabeler::default_table()) names.push_back(label);
            return FindingVocabulary::make(names);
        }
        return FindingVocabulary::make(vocabulary, no_finding);
    } catch (const InputError &e) {
        throw ConfigError(std::string("vocabulary: ") + e.what());
    }
}

std::unique_ptr<Labeler> ForgeConfig::make_labeler() const {
    if (labeler.kind == "precomputed_file") return std::make_unique<PrecomputedLabeler>(labeler.path);
    if (labeler.kind == "remote_service") {
        RemoteLabelerOptions o;
        o.url = labeler.url;
        o.timeout = std::chrono::milliseconds(labeler.timeout_ms);
        o.retries = labeler.retries;
        o.max_in_flight = labeler.max_in_flight;
        return std::make_unique<RemoteLabeler>(o);
    }
    if (labeler.keywords.empty()) return std::make_unique<KeywordStubLabeler>();
    return std::make_unique<KeywordStubLabeler>(labeler.keywords);
}

void ForgeConfig::check_paths() const {
    auto need = [](const std::string &p, const std::string &what) {
        if (!p.empty() && !fs::is_regular_file(p)) throw ConfigError(what + ": file not found: " + p);
    };
    need(template_file, "template_file");
    need(mixture_file, "mixture_file");
    if (labeler.kind == "precomputed_file") need(labeler.path, "labeler.path");
    for (const auto &b : blocklists) need(b, "blocklists");
    for (const auto &d : datasets)
        for (const auto &[role, p] : d.source.files) need(p, d.source.dataset_id + ".sources." + role);
}

} // namespace cxrforge
