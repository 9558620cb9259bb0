#include "cxrforge/mixer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "cxrforge/csv.hpp"
#include "cxrforge/error.hpp"

namespace cxrforge {

using nlohmann::json;

std::string_view to_string(MixStrategy s) {
    switch (s) {
    case MixStrategy::Explicit: return "explicit";
    case MixStrategy::PerTaskDataset: return "per_task_dataset";
    case MixStrategy::PerSize: return "per_size";
    case MixStrategy::PerTaskTypeThenTaskDataset: return "per_task_type_then_task_dataset";
    case MixStrategy::PerTaskTypeThenSize: return "per_task_type_then_size";
    }
    return "explicit";
}

MixStrategy parse_strategy(std::string_view s) {
    if (s == "explicit") return MixStrategy::Explicit;
    if (s == "per_task_dataset" || s == "D1") return MixStrategy::PerTaskDataset;
    if (s == "per_size" || s == "D2") return MixStrategy::PerSize;
    if (s == "per_task_type_then_task_dataset" || s == "D3") return MixStrategy::PerTaskTypeThenTaskDataset;
    if (s == "per_task_type_then_size" || s == "D4") return MixStrategy::PerTaskTypeThenSize;
    throw InputError("unknown mixture strategy '" + std::string(s) + "'");
}

// ---- mixture file -----------------------------------------------------------

MixtureSpec MixtureSpec::parse(std::string_view json_text, const std::string &origin) {
    MixtureSpec spec;
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error &e) {
        throw ConfigError(origin + ": " + e.what());
    }
    try {
        if (!doc.is_object()) throw ConfigError(origin + ": mixture spec must be an object");
        for (const auto &k : doc.items())
            if (k.key() != "strategy" && k.key() != "seed" && k.key() != "task_type_weights" && k.key() != "entries")
                throw ConfigError(origin + ": unknown key '" + k.key() + "'");
        spec.strategy = parse_strategy(doc.at("strategy").get<std::string>());
        if (doc.contains("seed")) {
            spec.seed = doc.at("seed").get<std::uint64_t>();
            spec.seed_given = true;
        }
        if (doc.contains("task_type_weights")) {
            for (const auto &[name, w] : doc.at("task_type_weights").items()) {
                const auto type = parse_task_type(name);
                if (!type) throw ConfigError(origin + ": unknown task type '" + name + "'");
                spec.task_type_weights[*type] = w.get<double>();
            }
        }
        for (const auto &e : doc.at("entries")) {
            for (const auto &k : e.items())
                if (k.key() != "task" && k.key() != "dataset" && k.key() != "weight" && k.key() != "pool_size")
                    throw ConfigError(origin + ": unknown entry key '" + k.key() + "'");
            MixtureEntry entry;
            const auto task = parse_task(e.at("task").get<std::string>());
            if (!task) throw ConfigError(origin + ": unknown task '" + e.at("task").get<std::string>() + "'");
            entry.task = *task;
            entry.dataset_id = e.at("dataset").get<std::string>();
            entry.weight = e.value("weight", 1.0);
            entry.pool_size = e.value("pool_size", std::uint64_t{0});
            spec.entries.push_back(std::move(entry));
        }
    } catch (const json::exception &e) {
        throw ConfigError(origin + ": " + e.what());
    } catch (const InputError &e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return spec;
}

MixtureSpec MixtureSpec::load(const std::string &path) {
    try {
        return parse(read_text_file(path), path);
    } catch (const FormatError &e) {
        throw ConfigError(e.what());
    }
}

std::string MixtureSpec::to_json() const {
    json doc;
    doc["strategy"] = to_string(strategy);
    if (seed_given) doc["seed"] = seed;
    if (!task_type_weights.empty()) {
        json tw = json::object();
        for (const auto &[t, w] : task_type_weights) tw[std::string(task_type_name(t))] = w;
        doc["task_type_weights"] = tw;
    }
    json entries = json::array();
    for (const auto &e : this->entries)
        entries.push_back({{"task", task_name(e.task)}, {"dataset", e.dataset_id}, {"weight", e.weight},
                           {"pool_size", e.pool_size}});
    doc["entries"] = entries;
    return doc.dump(2) + "\n";
}

// ---- weights ----------------------------------------------------------------------

std::vector<double> compute_weights(const MixtureSpec &spec) {
    if (spec.entries.empty()) throw InputError("mixture spec has no entries");
    const std::size_t n = spec.entries.size();
    std::vector<double> raw(n, 0.0);

    auto inner = [&](const MixtureEntry &e) -> double {
        switch (spec.strategy) {
        case MixStrategy::Explicit: return e.weight;
        case MixStrategy::PerTaskDataset:
        case MixStrategy::PerTaskTypeThenTaskDataset: return 1.0;
        case MixStrategy::PerSize:
        case MixStrategy::PerTaskTypeThenSize: return static_cast<double>(e.pool_size);
        }
        return 0.0;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const double w = inner(spec.entries[i]);
        if (!std::isfinite(w) || w < 0) throw InputError("mixture weights must be finite and non-negative");
        raw[i] = w;
    }

    const bool per_type = spec.strategy == MixStrategy::PerTaskTypeThenTaskDataset ||
                          spec.strategy == MixStrategy::PerTaskTypeThenSize;
    std::vector<double> p(n, 0.0);
    if (per_type) {
        std::map<TaskType, double> type_sum;
        for (std::size_t i = 0; i < n; ++i) type_sum[task_type(spec.entries[i].task)] += raw[i];
        std::map<TaskType, double> share;
        double share_total = 0;
        for (const auto &[type, sum] : type_sum) {
            if (sum <= 0) continue;
            double s = 1.0;
            if (!spec.task_type_weights.empty()) {
                auto it = spec.task_type_weights.find(type);
                s = it == spec.task_type_weights.end() ? 0.0 : it->second;
            }
            if (!std::isfinite(s) || s < 0) throw InputError("task type weights must be finite and non-negative");
            share[type] = s;
            share_total += s;
        }
        if (share_total <= 0) throw InputError("mixture weights are all zero");
        for (std::size_t i = 0; i < n; ++i) {
            const TaskType t = task_type(spec.entries[i].task);
            if (!share.count(t)) continue;
            p[i] = share[t] / share_total * raw[i] / type_sum[t];
        }
    } else {
        const double total = std::accumulate(raw.begin(), raw.end(), 0.0);
        if (total <= 0) throw InputError("mixture weights are all zero");
        for (std::size_t i = 0; i < n; ++i) p[i] = raw[i] / total;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (p[i] > 0 && spec.entries[i].pool_size == 0)
            throw InputError("entry " + std::string(task_name(spec.entries[i].task)) + "/" + spec.entries[i].dataset_id +
                             " has probability > 0 but an empty pool");
    }
    return p;
}

// ---- generator ----------------------------------------------------------------------

std::uint64_t counter_random(std::uint64_t seed, std::uint64_t counter) noexcept {
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept {
    return static_cast<double>(counter_random(seed, counter) >> 11) * 0x1.0p-53;
}

namespace {

__extension__ using uint128 = unsigned __int128;

std::uint64_t bounded(std::uint64_t x, std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>((static_cast<uint128>(x) * bound) >> 64);
}

struct EntryPicker {
    std::vector<double> cumulative;
    std::size_t last_positive = 0;

    explicit EntryPicker(const std::vector<double> &p) {
        double acc = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            acc += p[i];
            cumulative.push_back(acc);
            if (p[i] > 0) last_positive = i;
        }
    }

    std::size_t pick(double u) const {
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const auto idx = static_cast<std::size_t>(it - cumulative.begin());
        return std::min(idx, last_positive);
    }
};

} // namespace

std::vector<SampleTicket> sample_stream(const MixtureSpec &spec, std::uint64_t n, std::uint64_t first) {
    std::vector<SampleTicket> out;
    if (n == 0) {
        compute_weights(spec);
        return out;
    }
    const EntryPicker picker(compute_weights(spec));
    out.reserve(n);
    for (std::uint64_t i = first; i < first + n; ++i) {
        const std::size_t e = picker.pick(counter_uniform(spec.seed, 2 * i));
        const auto &entry = spec.entries[e];
        out.push_back({i, e, entry.task, entry.dataset_id, bounded(counter_random(spec.seed, 2 * i + 1), entry.pool_size)});
    }
    return out;
}

std::vector<SampleTicket> sample_epoch(const MixtureSpec &spec, std::uint64_t n) {
    std::vector<SampleTicket> out;
    const EntryPicker picker(compute_weights(spec));
    struct EntryState {
        std::uint64_t drawn = 0;
        std::uint64_t epoch = ~0ULL;
        std::vector<std::uint64_t> perm;
    };
    std::unordered_map<std::size_t, EntryState> states;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::size_t e = picker.pick(counter_uniform(spec.seed, 2 * i));
        const auto &entry = spec.entries[e];
        auto &st = states[e];
        const std::uint64_t epoch = st.drawn / entry.pool_size;
        if (epoch != st.epoch) {
            st.perm.resize(entry.pool_size);
            std::iota(st.perm.begin(), st.perm.end(), std::uint64_t{0});
            const std::uint64_t key = counter_random(spec.seed ^ counter_random(e, epoch), 0x5EEDULL);
            for (std::uint64_t k = entry.pool_size; k > 1; --k) {
                const std::uint64_t j = bounded(counter_random(key, k), k);
                std::swap(st.perm[k - 1], st.perm[j]);
            }
            st.epoch = epoch;
        }
        out.push_back({i, e, entry.task, entry.dataset_id, st.perm[st.drawn % entry.pool_size]});
        ++st.drawn;
    }
    return out;
}

// ---- stats ----------------------------------------------------------------------------

void MixtureStats::add(TaskId task, const std::string &dataset, std::uint64_t count) {
    total += count;
    by_task[std::string(task_name(task))] += count;
    by_dataset[dataset] += count;
    by_task_type[std::string(task_type_name(task_type(task)))] += count;
    by_task_dataset[std::string(task_name(task)) + "/" + dataset] += count;
}

void MixtureStats::merge(const MixtureStats &other) {
    total += other.total;
    for (const auto &[k, v] : other.by_task) by_task[k] += v;
    for (const auto &[k, v] : other.by_dataset) by_dataset[k] += v;
    for (const auto &[k, v] : other.by_task_type) by_task_type[k] += v;
    for (const auto &[k, v] : other.by_task_dataset) by_task_dataset[k] += v;
}

double MixtureStats::frequency(const std::map<std::string, std::uint64_t> &counts, std::uint64_t total,
                               const std::string &key) {
    if (total == 0) return 0.0;
    auto it = counts.find(key);
    return it == counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total);
}

double MixtureStats::task_type_frequency(TaskType t) const {
    return frequency(by_task_type, total, std::string(task_type_name(t)));
}

namespace {

json group_json(const std::map<std::string, std::uint64_t> &counts, std::uint64_t total) {
    json g = json::object();
    for (const auto &[k, v] : counts)
        g[k] = {{"count", v}, {"frequency", total ? static_cast<double>(v) / static_cast<double>(total) : 0.0}};
    return g;
}

} // namespace

std::string MixtureStats::to_json() const {
    json by_type = group_json(by_task_type, total);
    for (auto t : {TaskType::ReportGeneration, TaskType::ImageUnderstanding, TaskType::QuestionAnswering}) {
        const std::string name(task_type_name(t));
        if (!by_type.contains(name)) by_type[name] = {{"count", 0}, {"frequency", 0.0}};
    }
    json doc{{"total", total},
             {"task_type", by_type},
             {"task", group_json(by_task, total)},
             {"dataset", group_json(by_dataset, total)},
             {"task_dataset", group_json(by_task_dataset, total)}};
    return doc.dump(2) + "\n";
}

std::string MixtureStats::to_table() const {
    std::ostringstream os;
    os << "group\tkey\tcount\tfrequency\n";
    os << "total\tall\t" << total << "\t" << (total ? 1.0 : 0.0) << "\n";
    auto rows = [&](const char *group, const std::map<std::string, std::uint64_t> &counts) {
        for (const auto &[k, v] : counts)
            os << group << "\t" << k << "\t" << v << "\t" << frequency(counts, total, k) << "\n";
    };
    rows("task_type", by_task_type);
    rows("task", by_task);
    rows("dataset", by_dataset);
    rows("task_dataset", by_task_dataset);
    return os.str();
}

MixtureStats mixture_stats(std::span<const SampleTicket> tickets) {
    MixtureStats s;
    for (const auto &t : tickets) s.add(t.task, t.dataset_id);
    return s;
}

} // namespace cxrforge
