#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cxrforge/conversation.hpp"

namespace cxrforge {

inline constexpr std::string_view kCorpusFormat = "cxrforge-corpus";
inline constexpr std::string_view kMixFormat = "cxrforge-mix";
inline constexpr std::string_view kManifestFormat = "cxrforge-manifest";
inline constexpr int kFormatVersion = 1;

/// First line of every corpus file.
struct CorpusHeader {
    std::string corpus_id;
    TaskId task = TaskId::SingleImage;
    std::string dataset_id;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::uint64_t records = 0;
};

struct CorpusFile {
    CorpusHeader header;
    std::vector<ConversationSample> samples;
    /// 1-based line of each sample, parallel to `samples`.
    std::vector<std::size_t> lines;
};

/// One JSON object per line: id, task, dataset, images, turns (role, content,
/// target), target_flags, meta.fields.
std::string sample_to_json(const ConversationSample &sample);
ConversationSample sample_from_json(std::string_view line, const std::string &origin, std::size_t line_no);

std::string render_corpus(const CorpusHeader &header, const std::vector<ConversationSample> &samples);
CorpusFile parse_corpus(std::string_view content, const std::string &origin);
CorpusFile read_corpus(const std::string &path);

/// File name for a (task, dataset) shard: "<task>__<dataset>.jsonl".
std::string corpus_file_name(TaskId task, std::string_view dataset_id);

/// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::string &path, std::string_view content);

struct ManifestFile {
    std::string path; ///< relative to the corpus directory
    TaskId task = TaskId::SingleImage;
    std::string dataset_id;
    std::uint64_t records = 0;
    std::string sha256;
};

struct ExclusionCounts {
    std::uint64_t images = 0;
    std::uint64_t studies = 0;
    std::uint64_t annotations = 0;
};

struct CorpusManifest {
    std::string corpus_id;
    std::string tool_version;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string template_hash;
    std::string labeler_kind;
    std::string labeler_hash;
    std::vector<std::string> blocklists;
    std::uint64_t blocked_ids = 0;
    std::map<std::string, ExclusionCounts> exclusions;
    std::vector<ManifestFile> files;
    std::uint64_t warnings = 0;

    std::string to_json() const;
    static CorpusManifest parse(std::string_view json_text, const std::string &origin);
    static CorpusManifest load(const std::string &path);
};

/// Layout of a build output directory.
struct CorpusLayout {
    std::string root;

    std::string manifest() const { return root + "/manifest.json"; }
    std::string templates() const { return root + "/templates.json"; }
    std::string blocklist() const { return root + "/blocklist.txt"; }
    std::string corpus_dir() const { return root + "/corpus"; }
    std::string shard(const std::string &name) const { return corpus_dir() + "/" + name; }
};

} // namespace cxrforge
