#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cxrforge/commands.hpp"
#include "cxrforge/error.hpp"

using namespace cxrforge;

namespace {

void print_warnings(const std::vector<std::string> &warnings) {
    for (const auto &w : warnings) std::cerr << "warning: " << w << "\n";
}

int run_build(const std::string &config_path) {
    const auto config = ForgeConfig::load(config_path);
    const auto report = cmd_build(config);
    print_warnings(report.warnings);
    std::uint64_t total = 0;
    for (const auto &f : report.manifest.files) {
        std::cout << f.path << "\t" << f.records << "\n";
        total += f.records;
    }
    for (const auto &[ds, ex] : report.manifest.exclusions)
        if (ex.images || ex.studies || ex.annotations)
            std::cout << "excluded from " << ds << ": " << ex.images << " images, " << ex.studies << " studies, "
                      << ex.annotations << " annotations\n";
    std::cout << "built " << total << " samples in " << report.manifest.files.size() << " files under "
              << config.output_dir << " (seed " << config.seed << ")\n";
    return kExitOk;
}

int run_mix(const std::string &config_path, std::uint64_t n, const std::string &out, bool epoch) {
    const auto config = ForgeConfig::load(config_path);
    const auto r = cmd_mix(config, n, out, epoch);
    std::cout << "wrote " << r.stats.total << " tickets to " << r.output_path << " (seed " << r.seed << ")\n";
    return kExitOk;
}

int run_eval(const std::string &kind, const std::string &pred, const std::string &ref, const std::string &config_path,
             const std::string &table, double threshold) {
    EvalOptions options;
    if (!config_path.empty()) options.config = ForgeConfig::load(config_path);
    options.table_path = table;
    options.iou_threshold = threshold;
    const auto r = cmd_eval(parse_eval_kind(kind), pred, ref, options);
    std::cout << r.to_text();
    return kExitOk;
}

int run_validate(const std::string &path) {
    const auto r = cmd_validate(path);
    print_warnings(r.warnings);
    for (const auto &v : r.violations) std::cout << "violation: " << v << "\n";
    std::cout << (r.passed ? "PASS" : "FAIL") << ": " << r.files << " files, " << r.samples << " samples, "
              << r.violations.size() << " violations\n";
    return r.passed ? kExitOk : kExitValidation;
}

int run_stats(const std::string &path, const std::string &table) {
    const auto r = cmd_stats(path);
    std::cout << r.to_text();
    std::string out = table;
    if (out.empty()) out = (std::filesystem::is_directory(path) ? path + "/stats" : path + ".stats") + std::string(".tsv");
    write_file_atomic(out, r.to_table());
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Builds chest X-ray instruction corpora, mixes them and scores model outputs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    std::string config_path, out_path, kind, pred, ref, path, table;
    std::uint64_t n = 0;
    bool epoch = false;
    double threshold = kGroundingIouThreshold;

    auto *build = app.add_subcommand("build", "Ingest datasets and write the corpus");
    build->add_option("-c,--config", config_path, "Config file")->required();

    auto *mix = app.add_subcommand("mix", "Sample a training mixture from a built corpus");
    mix->add_option("-c,--config", config_path, "Config file")->required();
    mix->add_option("-n,--count", n, "Number of tickets")->required();
    mix->add_option("-o,--output", out_path, "Output file")->required();
    mix->add_flag("--epoch", epoch, "Sample without replacement within each pool");

    auto *eval = app.add_subcommand("eval", "Score predictions against references");
    eval->add_option("--kind", kind, "report, grounding or vqa")->required()->check(
        CLI::IsMember({"report", "grounding", "vqa"}));
    eval->add_option("--pred", pred, "Predictions (JSON lines with id, text)")->required();
    eval->add_option("--ref", ref, "References (JSON lines with id, text)")->required();
    eval->add_option("-c,--config", config_path, "Config supplying vocabulary and labeler (report kind)");
    eval->add_option("--table", table, "Machine-readable output table");
    eval->add_option("--iou-threshold", threshold, "Grounding accuracy threshold")->check(CLI::Range(0.0, 1.0));

    auto *validate = app.add_subcommand("validate", "Check a built corpus");
    validate->add_option("path", path, "Corpus directory or file")->required();

    auto *stats = app.add_subcommand("stats", "Count records per task, dataset and task type");
    stats->add_option("path", path, "Corpus directory, corpus file or mix file")->required();
    stats->add_option("--table", table, "Machine-readable output table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*build) return run_build(config_path);
        if (*mix) return run_mix(config_path, n, out_path, epoch);
        if (*eval) return run_eval(kind, pred, ref, config_path, table, threshold);
        if (*validate) return run_validate(path);
        if (*stats) return run_stats(path, table);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
