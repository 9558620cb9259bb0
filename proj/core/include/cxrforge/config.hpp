#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cxrforge/ingest.hpp"
#include "cxrforge/labeler.hpp"
#include "cxrforge/tasks.hpp"
#include "cxrforge/vocabulary.hpp"

namespace cxrforge {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kSeedEnvVar = "FORGE_SEED";

struct LabelerConfig {
    std::string kind = "keyword_stub"; ///< keyword_stub | precomputed_file | remote_service
    std::string path;
    std::string url;
    int timeout_ms = 10000;
    int retries = 2;
    int max_in_flight = 4;
    KeywordTable keywords; ///< empty means the built-in table
};

struct DatasetConfig {
    DatasetSource source;
    std::vector<TaskId> tasks;
    std::optional<std::string> no_finding;
};

/// Build configuration. Relative paths are resolved against the config
/// file's directory when loading.
struct ForgeConfig {
    std::string corpus_id;
    std::uint64_t seed = 0;
    bool seed_from_env = false;
    Split split = Split::Train;
    std::string template_file;
    std::optional<std::string> system_prompt;
    std::vector<std::string> vocabulary;
    std::optional<std::string> no_finding;
    LabelerConfig labeler;
    std::string mixture_file;
    std::vector<std::string> blocklists;
    std::string output_dir;
    std::vector<DatasetConfig> datasets;
    /// SHA-256 of the canonical config document with the effective seed.
    std::string hash;

    /// Strict JSON schema: unknown keys and wrong types raise ConfigError.
    /// `base_dir` anchors relative paths. `env_seed` overrides "seed".
    static ForgeConfig parse(std::string_view json_text, const std::string &origin, const std::string &base_dir,
                             const std::optional<std::string> &env_seed = std::nullopt);
    /// Reads the file, applies FORGE_SEED from the environment, and checks
    /// that every referenced input path exists.
    static ForgeConfig load(const std::string &path);

    FindingVocabulary finding_vocabulary() const;
    std::unique_ptr<Labeler> make_labeler() const;
    /// Throws ConfigError naming the first referenced input that is missing.
    void check_paths() const;
};

/// Parses a decimal unsigned 64-bit seed; ConfigError otherwise.
std::uint64_t parse_seed(const std::string &text, const std::string &origin);

std::optional<std::string> env_seed();

} // namespace cxrforge
