#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "cxrforge/metrics.hpp"

using namespace cxrforge;

namespace {

std::vector<std::string> random_reports(std::size_t n, std::uint64_t seed) {
    static const char *words[] = {"the", "heart", "is", "normal", "size", "no", "pleural", "effusion", "mild",
                                  "edema", "left", "lower", "lobe", "opacity", "stable", "lungs", "clear"};
    std::mt19937_64 rng(seed);
    std::vector<std::string> out(n);
    for (auto &r : out) {
        const std::size_t len = 20 + rng() % 40;
        for (std::size_t i = 0; i < len; ++i) r += std::string(i ? " " : "") + words[rng() % 17];
    }
    return out;
}

void BM_CorpusBleu4(benchmark::State &state) {
    const auto c = random_reports(static_cast<std::size_t>(state.range(0)), 1);
    const auto r = random_reports(static_cast<std::size_t>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(bleu(c, r, 4));
}
BENCHMARK(BM_CorpusBleu4)->Arg(100)->Arg(1000);

void BM_RougeL(benchmark::State &state) {
    const auto c = random_reports(static_cast<std::size_t>(state.range(0)), 3);
    const auto r = random_reports(static_cast<std::size_t>(state.range(0)), 4);
    for (auto _ : state) benchmark::DoNotOptimize(mean_rouge_l(c, r));
}
BENCHMARK(BM_RougeL)->Arg(100)->Arg(1000);

void BM_F1(benchmark::State &state) {
    const std::vector<std::string> labels{"atelectasis", "cardiomegaly", "consolidation", "edema",
                                          "enlarged cardiomediastinum", "fracture", "lung lesion", "lung opacity",
                                          "no finding", "pleural effusion", "pleural other", "pneumonia",
                                          "pneumothorax", "support devices"};
    const auto vocab = FindingVocabulary::make(labels);
    std::mt19937_64 rng(5);
    std::vector<LabelPredictionPair> pairs(static_cast<std::size_t>(state.range(0)));
    for (auto &p : pairs)
        for (const auto &l : labels) {
            if (rng() % 4 == 0) p.predicted.push_back(l);
            if (rng() % 4 == 0) p.reference.push_back(l);
        }
    for (auto _ : state) benchmark::DoNotOptimize(f1_scores(pairs, vocab));
}
BENCHMARK(BM_F1)->Arg(1000)->Arg(10000);

} // namespace
