#include "cxrforge/labeler.hpp"

#include <algorithm>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "cxrforge/csv.hpp"
#include "cxrforge/error.hpp"
#include "cxrforge/hash.hpp"
#include "cxrforge/text.hpp"

namespace cxrforge {

using nlohmann::json;

std::string_view to_string(ObservationClass c) {
    switch (c) {
    case ObservationClass::Positive: return "positive";
    case ObservationClass::Negative: return "negative";
    case ObservationClass::Uncertain: return "uncertain";
    case ObservationClass::Blank: return "blank";
    }
    return "blank";
}

std::optional<ObservationClass> parse_observation_class(std::string_view s) {
    const std::string v = text::to_lower(text::trim(s));
    if (v == "positive" || v == "1" || v == "1.0") return ObservationClass::Positive;
    if (v == "negative" || v == "0" || v == "0.0") return ObservationClass::Negative;
    if (v == "uncertain" || v == "-1" || v == "-1.0") return ObservationClass::Uncertain;
    if (v == "blank" || v.empty()) return ObservationClass::Blank;
    return std::nullopt;
}

ObservationLabels ObservationLabels::blank(const FindingVocabulary &vocab) {
    return {vocab, std::vector<ObservationClass>(vocab.size(), ObservationClass::Blank)};
}

ObservationClass ObservationLabels::at(std::string_view label) const {
    const auto idx = vocabulary.index_of(label);
    if (!idx) throw InputError("'" + std::string(label) + "' is not in the label vocabulary");
    return classes.at(*idx);
}

void ObservationLabels::set(std::string_view label, ObservationClass c) {
    const auto idx = vocabulary.index_of(label);
    if (!idx) throw InputError("'" + std::string(label) + "' is not in the label vocabulary");
    classes.at(*idx) = c;
}

std::vector<std::string> binarize(const ObservationLabels &labels) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < labels.classes.size() && i < labels.vocabulary.size(); ++i)
        if (labels.classes[i] == ObservationClass::Positive) out.push_back(labels.vocabulary.names()[i]);
    return out;
}

// ---- keyword stub ---------------------------------------------------------

namespace {

struct Token {
    std::string text;
    std::size_t sentence;
};

std::vector<Token> stub_tokens(std::string_view s) {
    std::vector<Token> out;
    std::string cur;
    std::size_t sentence = 0;
    auto flush = [&] {
        if (!cur.empty()) out.push_back({std::move(cur), sentence});
        cur.clear();
    };
    for (char c : s) {
        const auto u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            cur.push_back(static_cast<char>(std::tolower(u)));
        } else {
            flush();
            if (c == '.' || c == ';' || c == '!' || c == '?' || c == '\n') ++sentence;
        }
    }
    flush();
    return out;
}

std::vector<std::string> keyword_tokens(std::string_view s) {
    std::vector<std::string> out;
    for (auto &t : stub_tokens(s)) out.push_back(std::move(t.text));
    return out;
}

bool negated(const std::vector<Token> &tokens, std::size_t start) {
    constexpr std::size_t kWindow = 3;
    const std::size_t sentence = tokens[start].sentence;
    const std::size_t lo = start >= kWindow ? start - kWindow : 0;
    for (std::size_t j = lo; j < start; ++j) {
        if (tokens[j].sentence != sentence) continue;
        const auto &t = tokens[j].text;
        if (t == "no" || t == "without") return true;
        if (t == "of" && j > 0 && tokens[j - 1].text == "free" && tokens[j - 1].sentence == sentence) return true;
    }
    return false;
}

} // namespace

KeywordStubLabeler::KeywordStubLabeler() : KeywordStubLabeler(default_table()) {}

KeywordStubLabeler::KeywordStubLabeler(KeywordTable table) {
    for (auto &[label, keywords] : table) {
        auto &dst = table_[text::to_lower(text::trim(label))];
        for (const auto &k : keywords) {
            const auto toks = keyword_tokens(k);
            if (toks.empty()) throw InputError("empty keyword for label '" + label + "'");
            dst.push_back(text::join(toks, " "));
        }
    }
}

const KeywordTable &KeywordStubLabeler::default_table() {
    static const KeywordTable table{
        {"atelectasis", {"atelectasis", "atelectatic"}},
        {"cardiomegaly", {"cardiomegaly", "enlarged heart", "heart is enlarged", "enlarged cardiac silhouette"}},
        {"consolidation", {"consolidation", "consolidations"}},
        {"edema", {"edema", "oedema"}},
        {"pleural effusion", {"pleural effusion", "pleural effusions", "effusion", "effusions"}},
    };
    return table;
}

std::string KeywordStubLabeler::content_hash() const {
    json j = table_;
    return sha256_hex(j.dump());
}

ObservationLabels KeywordStubLabeler::label_text(std::string_view findings, const FindingVocabulary &vocab) const {
    ObservationLabels labels = ObservationLabels::blank(vocab);
    const auto tokens = stub_tokens(findings);
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        auto it = table_.find(vocab.names()[i]);
        if (it == table_.end()) continue;
        bool positive = false;
        bool negative = false;
        for (const auto &kw : it->second) {
            const auto kt = text::split(kw, ' ');
            for (std::size_t s = 0; s + kt.size() <= tokens.size(); ++s) {
                bool match = true;
                for (std::size_t k = 0; k < kt.size() && match; ++k)
                    match = tokens[s + k].text == kt[k] && tokens[s + k].sentence == tokens[s].sentence;
                if (!match) continue;
                if (negated(tokens, s))
                    negative = true;
                else
                    positive = true;
            }
        }
        if (positive)
            labels.classes[i] = ObservationClass::Positive;
        else if (negative)
            labels.classes[i] = ObservationClass::Negative;
    }
    return labels;
}

ObservationLabels KeywordStubLabeler::label(std::string_view, std::string_view findings, const FindingVocabulary &vocab) {
    return label_text(findings, vocab);
}

// ---- precomputed file -----------------------------------------------------

PrecomputedLabeler::PrecomputedLabeler(const std::string &path) : path_(path) {
    const std::string content = read_text_file(path);
    hash_ = sha256_hex(content);
    const auto first_line = content.substr(0, content.find('\n'));
    const char delim = first_line.find('\t') != std::string::npos ? '\t' : ',';
    const auto table = CsvTable::parse(content, path, delim);
    if (table.header().empty()) throw FormatError(path, 1, "empty label file");
    const auto id_col = table.require_column("report_id");
    for (std::size_t c = 0; c < table.header().size(); ++c)
        if (c != id_col) columns_.push_back(text::to_lower(table.header()[c]));
    for (const auto &row : table.rows()) {
        std::vector<ObservationClass> classes;
        for (std::size_t c = 0; c < row.fields.size(); ++c) {
            if (c == id_col) continue;
            const auto cls = parse_observation_class(row.fields[c]);
            if (!cls) throw FormatError(path, row.line, "invalid label value '" + row.fields[c] + "'");
            classes.push_back(*cls);
        }
        const std::string id = text::trim(row.fields[id_col]);
        if (!rows_.emplace(id, std::move(classes)).second)
            throw FormatError(path, row.line, "duplicate report id '" + id + "'");
    }
}

ObservationLabels PrecomputedLabeler::label(std::string_view report_id, std::string_view,
                                            const FindingVocabulary &vocab) {
    auto it = rows_.find(std::string(report_id));
    if (it == rows_.end()) throw LabelerError(path_ + ": no labels for report '" + std::string(report_id) + "'");
    ObservationLabels labels = ObservationLabels::blank(vocab);
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        const auto col = std::find(columns_.begin(), columns_.end(), vocab.names()[i]);
        if (col == columns_.end())
            throw LabelerError(path_ + ": no column for label '" + vocab.names()[i] + "'");
        labels.classes[i] = it->second[static_cast<std::size_t>(col - columns_.begin())];
    }
    return labels;
}

// ---- remote service ---------------------------------------------------------

RemoteLabeler::RemoteLabeler(RemoteLabelerOptions options) : options_(std::move(options)) {
    const auto scheme_end = options_.url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("labeler url must include a scheme: " + options_.url);
    const auto path_start = options_.url.find('/', scheme_end + 3);
    scheme_host_port_ = options_.url.substr(0, path_start);
    path_ = path_start == std::string::npos ? "/" : options_.url.substr(path_start);
    if (options_.max_in_flight < 1) options_.max_in_flight = 1;
    if (options_.retries < 0) options_.retries = 0;
}

std::string RemoteLabeler::content_hash() const { return sha256_hex("remote:" + options_.url); }

ObservationLabels RemoteLabeler::label(std::string_view report_id, std::string_view findings,
                                       const FindingVocabulary &vocab) {
    {
        std::unique_lock lock(mutex_);
        slots_cv_.wait(lock, [&] { return in_flight_ < options_.max_in_flight; });
        ++in_flight_;
    }
    struct Release {
        RemoteLabeler *self;
        ~Release() {
            {
                std::lock_guard lock(self->mutex_);
                --self->in_flight_;
            }
            self->slots_cv_.notify_one();
        }
    } release{this};

    const json request{{"report_id", report_id}, {"text", findings}, {"vocabulary", vocab.names()}};
    const std::string body = request.dump();
    std::string last_error;
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
        httplib::Client client(scheme_host_port_);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_write_timeout(secs.count(), usecs.count());
        auto res = client.Post(path_, body, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) throw LabelerError("labeler returned HTTP " + std::to_string(res->status));
        try {
            const auto reply = json::parse(res->body);
            const auto &arr = reply.at("labels");
            if (!arr.is_array() || arr.size() != vocab.size())
                throw LabelerError("labeler reply has " + std::to_string(arr.size()) + " labels, expected " +
                                   std::to_string(vocab.size()));
            ObservationLabels labels = ObservationLabels::blank(vocab);
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const auto cls = parse_observation_class(arr[i].is_string() ? arr[i].get<std::string>() : arr[i].dump());
                if (!cls) throw LabelerError("labeler reply has invalid class " + arr[i].dump());
                labels.classes[i] = *cls;
            }
            return labels;
        } catch (const json::exception &e) {
            throw LabelerError(std::string("malformed labeler reply: ") + e.what());
        }
    }
    throw LabelerError("labeler request failed after " + std::to_string(options_.retries + 1) +
                       " attempts: " + last_error);
}

ObservationLabels label_report(std::string_view findings, const FindingVocabulary &vocab, Labeler &endpoint,
                               std::string_view report_id) {
    return endpoint.label(report_id, findings, vocab);
}

} // namespace cxrforge
