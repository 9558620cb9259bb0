#include "cxrforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "cxrforge/error.hpp"
#include "cxrforge/text.hpp"

namespace cxrforge {

namespace {

double f1(double tp, double fp, double fn) {
    const double denom = 2 * tp + fp + fn;
    return denom > 0 ? 2 * tp / denom : 0.0;
}

std::vector<bool> as_mask(const std::vector<std::string> &labels, const FindingVocabulary &vocab,
                          const std::string &sample_id) {
    std::vector<bool> m(vocab.size(), false);
    for (const auto &l : labels) {
        const auto idx = vocab.index_of(l);
        if (!idx) throw InputError(sample_id + ": label '" + l + "' is not in the vocabulary");
        m[*idx] = true;
    }
    return m;
}

} // namespace

F1Scores f1_scores(std::span<const LabelPredictionPair> pairs, const FindingVocabulary &vocab,
                   const std::optional<std::vector<std::string>> &subset) {
    if (pairs.empty()) throw InputError("f1_scores needs at least one sample");
    std::vector<std::size_t> scored;
    if (subset) {
        for (const auto &l : *subset) {
            const auto idx = vocab.index_of(l);
            if (!idx) throw InputError("subset label '" + l + "' is not in the vocabulary");
            scored.push_back(*idx);
        }
    } else {
        for (std::size_t i = 0; i < vocab.size(); ++i) scored.push_back(i);
    }

    std::vector<double> tp(vocab.size()), fp(vocab.size()), fn(vocab.size());
    double example_sum = 0;
    for (const auto &p : pairs) {
        const auto pred = as_mask(p.predicted, vocab, p.sample_id);
        const auto ref = as_mask(p.reference, vocab, p.sample_id);
        double s_tp = 0, s_fp = 0, s_fn = 0;
        for (auto i : scored) {
            if (pred[i] && ref[i]) {
                ++tp[i];
                ++s_tp;
            } else if (pred[i]) {
                ++fp[i];
                ++s_fp;
            } else if (ref[i]) {
                ++fn[i];
                ++s_fn;
            }
        }
        example_sum += (s_tp + s_fp + s_fn == 0) ? 1.0 : f1(s_tp, s_fp, s_fn);
    }

    F1Scores out;
    out.samples = pairs.size();
    double TP = 0, FP = 0, FN = 0, macro_sum = 0;
    for (auto i : scored) {
        TP += tp[i];
        FP += fp[i];
        FN += fn[i];
        const double label_f1 = f1(tp[i], fp[i], fn[i]);
        macro_sum += label_f1;
        out.per_label.emplace_back(vocab.names()[i], label_f1);
    }
    out.micro = f1(TP, FP, FN);
    out.macro = scored.empty() ? 0.0 : macro_sum / static_cast<double>(scored.size());
    out.example = example_sum / static_cast<double>(pairs.size());
    return out;
}

namespace {

using Ngram = std::vector<std::string>;

std::map<Ngram, std::size_t> ngram_counts(const std::vector<std::string> &tokens, std::size_t n) {
    std::map<Ngram, std::size_t> counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) ++counts[Ngram(tokens.begin() + i, tokens.begin() + i + n)];
    return counts;
}

struct BleuTotals {
    std::vector<double> matches;
    std::vector<double> totals;
    double cand_len = 0;
    double ref_len = 0;

    explicit BleuTotals(int max_n) : matches(max_n, 0.0), totals(max_n, 0.0) {}

    void add(std::string_view candidate, std::string_view reference) {
        const auto c = text::tokenize(candidate);
        const auto r = text::tokenize(reference);
        cand_len += static_cast<double>(c.size());
        ref_len += static_cast<double>(r.size());
        for (std::size_t n = 1; n <= matches.size(); ++n) {
            const auto cc = ngram_counts(c, n);
            const auto rc = ngram_counts(r, n);
            for (const auto &[g, count] : cc) {
                auto it = rc.find(g);
                if (it != rc.end()) matches[n - 1] += static_cast<double>(std::min(count, it->second));
            }
            if (c.size() >= n) totals[n - 1] += static_cast<double>(c.size() - n + 1);
        }
    }

    double score() const {
        if (cand_len == 0) return 0.0;
        double log_sum = 0;
        for (std::size_t n = 0; n < matches.size(); ++n) {
            if (totals[n] == 0 || matches[n] == 0) return 0.0;
            log_sum += std::log(matches[n] / totals[n]);
        }
        const double bp = cand_len < ref_len ? std::exp(1.0 - ref_len / cand_len) : 1.0;
        return bp * std::exp(log_sum / static_cast<double>(matches.size()));
    }
};

void check_corpus(std::span<const std::string> candidates, std::span<const std::string> references) {
    if (candidates.empty()) throw InputError("metric needs at least one sample");
    if (candidates.size() != references.size()) throw InputError("candidate and reference counts differ");
}

} // namespace

double bleu(std::span<const std::string> candidates, std::span<const std::string> references, int max_n) {
    check_corpus(candidates, references);
    if (max_n < 1) throw InputError("BLEU order must be at least 1");
    BleuTotals totals(max_n);
    for (std::size_t i = 0; i < candidates.size(); ++i) totals.add(candidates[i], references[i]);
    return totals.score();
}

double sentence_bleu(std::string_view candidate, std::string_view reference, int max_n) {
    if (max_n < 1) throw InputError("BLEU order must be at least 1");
    BleuTotals totals(max_n);
    totals.add(candidate, reference);
    return totals.score();
}

double mean_sentence_bleu1(std::span<const std::string> candidates, std::span<const std::string> references) {
    check_corpus(candidates, references);
    double sum = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) sum += sentence_bleu(candidates[i], references[i], 1);
    return sum / static_cast<double>(candidates.size());
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
    std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double rouge_l(std::string_view candidate, std::string_view reference) {
    const auto c = text::tokenize(candidate);
    const auto r = text::tokenize(reference);
    if (c.empty() || r.empty()) return 0.0;
    const double lcs = static_cast<double>(lcs_length(c, r));
    if (lcs == 0) return 0.0;
    const double precision = lcs / static_cast<double>(c.size());
    const double recall = lcs / static_cast<double>(r.size());
    const double b2 = kRougeBeta * kRougeBeta;
    return (1 + b2) * precision * recall / (recall + b2 * precision);
}

double mean_rouge_l(std::span<const std::string> candidates, std::span<const std::string> references) {
    check_corpus(candidates, references);
    double sum = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) sum += rouge_l(candidates[i], references[i]);
    return sum / static_cast<double>(candidates.size());
}

namespace {

long long area(const NormalizedBBox &b) { return static_cast<long long>(b.x2 - b.x1) * (b.y2 - b.y1); }

long long intersection(const NormalizedBBox &a, const NormalizedBBox &b) {
    const long long w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const long long h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    return (w > 0 && h > 0) ? w * h : 0;
}

} // namespace

double iou(const NormalizedBBox &a, const NormalizedBBox &b) {
    if (!a.valid() || !b.valid()) throw InputError("invalid normalized box");
    const long long inter = intersection(a, b);
    const long long uni = area(a) + area(b) - inter;
    return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

GroundingResult grounding_eval(std::span<const std::optional<NormalizedBBox>> predictions,
                               std::span<const NormalizedBBox> references, double threshold) {
    if (references.empty()) throw InputError("grounding evaluation needs at least one sample");
    if (predictions.size() != references.size()) throw InputError("prediction and reference counts differ");
    GroundingResult r;
    std::size_t correct = 0;
    double sum = 0;
    for (std::size_t i = 0; i < references.size(); ++i) {
        if (!references[i].valid()) throw InputError("invalid reference box");
        double value = 0;
        bool hit = false;
        if (predictions[i]) {
            const long long inter = intersection(*predictions[i], references[i]);
            const long long uni = area(*predictions[i]) + area(references[i]) - inter;
            if (uni > 0) {
                value = static_cast<double>(inter) / static_cast<double>(uni);
                hit = static_cast<double>(inter) >= threshold * static_cast<double>(uni);
            }
        }
        r.ious.push_back(value);
        sum += value;
        if (hit) ++correct;
    }
    r.miou = sum / static_cast<double>(references.size());
    r.accuracy = static_cast<double>(correct) / static_cast<double>(references.size());
    return r;
}

GroundingResult grounding_eval_text(std::span<const std::string> prediction_texts,
                                    std::span<const NormalizedBBox> references, double threshold) {
    std::vector<std::optional<NormalizedBBox>> preds;
    preds.reserve(prediction_texts.size());
    for (const auto &t : prediction_texts) {
        const auto boxes = parse_bboxes_from_text(t);
        preds.push_back(boxes.empty() ? std::nullopt : std::optional<NormalizedBBox>(boxes.front()));
    }
    return grounding_eval(preds, references, threshold);
}

VqaResult vqa_eval(std::span<const std::string> predictions, std::span<const std::string> references) {
    check_corpus(predictions, references);
    VqaResult r;
    r.samples = predictions.size();
    std::size_t exact = 0;
    double recall_sum = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (text::to_lower(text::trim(predictions[i])) == text::to_lower(text::trim(references[i]))) ++exact;
        const auto ref_words = text::words(references[i]);
        const std::set<std::string> ref_set(ref_words.begin(), ref_words.end());
        if (!ref_set.empty()) {
            const auto pred_words = text::words(predictions[i]);
            const std::set<std::string> pred_set(pred_words.begin(), pred_words.end());
            std::size_t hit = 0;
            for (const auto &w : ref_set) hit += pred_set.count(w);
            recall_sum += static_cast<double>(hit) / static_cast<double>(ref_set.size());
            ++r.recall_samples;
        }
    }
    r.accuracy = static_cast<double>(exact) / static_cast<double>(r.samples);
    r.recall = r.recall_samples ? recall_sum / static_cast<double>(r.recall_samples) : 0.0;
    r.bleu1 = mean_sentence_bleu1(predictions, references);
    return r;
}

std::optional<double> MetricReport::value(std::string_view name) const {
    for (const auto &[k, v] : values)
        if (k == name) return v;
    return std::nullopt;
}

std::string MetricReport::to_text() const {
    std::ostringstream os;
    os << kind << " evaluation over " << samples << " samples\n";
    os << std::fixed << std::setprecision(1);
    for (const auto &[k, v] : values) os << "  " << std::left << std::setw(12) << k << std::right << v * 100 << "\n";
    if (!per_label.empty()) {
        os << "  per-label F1:\n";
        for (const auto &[k, v] : per_label) os << "    " << std::left << std::setw(28) << k << std::right << v * 100 << "\n";
    }
    return os.str();
}

std::string MetricReport::to_table() const {
    std::ostringstream os;
    os << "metric\tvalue\tsamples\n" << std::fixed << std::setprecision(4);
    for (const auto &[k, v] : values) os << k << "\t" << v * 100 << "\t" << samples << "\n";
    for (const auto &[k, v] : per_label) os << "f1[" << k << "]\t" << v * 100 << "\t" << samples << "\n";
    return os.str();
}

} // namespace cxrforge
