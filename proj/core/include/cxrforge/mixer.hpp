#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cxrforge/tasks.hpp"

namespace cxrforge {

enum class MixStrategy {
    Explicit,                   ///< entry weights, normalised globally
    PerTaskDataset,             ///< uniform over task-datasets (D1)
    PerSize,                    ///< proportional to pool size (D2)
    PerTaskTypeThenTaskDataset, ///< equal task-type shares, uniform inside (D3)
    PerTaskTypeThenSize,        ///< equal task-type shares, size-proportional inside (D4)
};

std::string_view to_string(MixStrategy s);
MixStrategy parse_strategy(std::string_view s);

struct MixtureEntry {
    TaskId task = TaskId::SingleImage;
    std::string dataset_id;
    double weight = 1.0;
    std::uint64_t pool_size = 0;
};

struct MixtureSpec {
    MixStrategy strategy = MixStrategy::Explicit;
    std::vector<MixtureEntry> entries;
    /// Optional task-type shares for the per-task-type strategies.
    std::map<TaskType, double> task_type_weights;
    std::uint64_t seed = 0;
    bool seed_given = false;

    /// Strict JSON schema; unknown keys are rejected.
    static MixtureSpec parse(std::string_view json_text, const std::string &origin = "<mixture>");
    static MixtureSpec load(const std::string &path);
    std::string to_json() const;
};

/// Probability per entry, in entry order. Sums to 1.
std::vector<double> compute_weights(const MixtureSpec &spec);

struct SampleTicket {
    std::uint64_t sequence = 0;
    std::size_t entry = 0;
    TaskId task = TaskId::SingleImage;
    std::string dataset_id;
    std::uint64_t record_index = 0;

    friend bool operator==(const SampleTicket &, const SampleTicket &) = default;
};

/// Counter-based generator "splitmix64-ctr/v1": the value for (seed, counter)
/// is the SplitMix64 finaliser applied to seed + (counter + 1) * 0x9E3779B97F4A7C15.
/// Ticket i uses counter 2i to pick the entry and 2i + 1 to pick the record.
/// Changing this function changes every stream, so it is versioned.
inline constexpr std::string_view kGeneratorVersion = "splitmix64-ctr/v1";
std::uint64_t counter_random(std::uint64_t seed, std::uint64_t counter) noexcept;
double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept;

/// With-replacement stream; tickets [first, first + n). Stateless per ticket,
/// so ranges can be generated independently and concatenated.
std::vector<SampleTicket> sample_stream(const MixtureSpec &spec, std::uint64_t n, std::uint64_t first = 0);

/// Entry choice as in sample_stream, but each entry walks a seeded permutation
/// of its pool so no record repeats until the pool is exhausted.
std::vector<SampleTicket> sample_epoch(const MixtureSpec &spec, std::uint64_t n);

struct MixtureStats {
    std::uint64_t total = 0;
    std::map<std::string, std::uint64_t> by_task;
    std::map<std::string, std::uint64_t> by_dataset;
    std::map<std::string, std::uint64_t> by_task_type;
    std::map<std::string, std::uint64_t> by_task_dataset;

    void add(TaskId task, const std::string &dataset, std::uint64_t count = 1);
    void merge(const MixtureStats &other);
    static double frequency(const std::map<std::string, std::uint64_t> &counts, std::uint64_t total,
                            const std::string &key);
    double task_type_frequency(TaskType t) const;
    std::string to_json() const;
    /// Tab-separated rows: group, key, count, frequency.
    std::string to_table() const;
};

MixtureStats mixture_stats(std::span<const SampleTicket> tickets);

} // namespace cxrforge
