#include "support/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace oracle {

namespace {

// Row-major bit raster; bit (x, y) set when cell [x, x+1) x [y, y+1) lies in the box.
std::vector<std::uint64_t> rasterize(const cxrforge::BBox &r, int width, int height, std::size_t words_per_row) {
    std::vector<std::uint64_t> bits(words_per_row * static_cast<std::size_t>(height), 0);
    const int x1 = static_cast<int>(std::ceil(r.x1)), x2 = static_cast<int>(std::floor(r.x2));
    const int y1 = static_cast<int>(std::ceil(r.y1)), y2 = static_cast<int>(std::floor(r.y2));
    const int lo = std::max(0, x1), hi = std::min(width, x2);
    if (lo >= hi) return bits;
    // Mask of one row, copied into every covered row.
    std::vector<std::uint64_t> row(words_per_row, 0);
    for (int x = lo; x < hi; ++x) row[static_cast<std::size_t>(x) / 64] |= std::uint64_t{1} << (x % 64);
    for (int y = std::max(0, y1); y < std::min(height, y2); ++y)
        std::copy(row.begin(), row.end(), bits.begin() + static_cast<std::ptrdiff_t>(y * words_per_row));
    return bits;
}

} // namespace

double raster_iou(const cxrforge::BBox &a, const cxrforge::BBox &b, int width, int height) {
    const std::size_t wpr = (static_cast<std::size_t>(width) + 63) / 64;
    const auto ra = rasterize(a, width, height, wpr);
    const auto rb = rasterize(b, width, height, wpr);
    long inter = 0, uni = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        inter += std::popcount(ra[i] & rb[i]);
        uni += std::popcount(ra[i] | rb[i]);
    }
    return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

F1 brute_force_f1(const std::vector<std::vector<std::string>> &pred, const std::vector<std::vector<std::string>> &ref,
                  const std::vector<std::string> &labels) {
    auto has = [](const std::vector<std::string> &v, const std::string &l) {
        return std::find(v.begin(), v.end(), l) != v.end();
    };
    auto f1 = [](double tp, double fp, double fn) { return tp + fp + fn == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn); };
    F1 out;
    double TP = 0, FP = 0, FN = 0, macro = 0, ex = 0;
    for (const auto &l : labels) {
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const bool p = has(pred[i], l), r = has(ref[i], l);
            tp += p && r;
            fp += p && !r;
            fn += !p && r;
        }
        TP += tp;
        FP += fp;
        FN += fn;
        macro += f1(tp, fp, fn);
    }
    for (std::size_t i = 0; i < pred.size(); ++i) {
        std::set<std::string> p, r;
        for (const auto &l : labels) {
            if (has(pred[i], l)) p.insert(l);
            if (has(ref[i], l)) r.insert(l);
        }
        if (p.empty() && r.empty()) {
            ex += 1;
            continue;
        }
        std::size_t common = 0;
        for (const auto &l : p) common += r.count(l);
        // Set form of per-sample F1: 2|P∩R| / (|P| + |R|).
        ex += 2.0 * static_cast<double>(common) / static_cast<double>(p.size() + r.size());
    }
    out.micro = f1(TP, FP, FN);
    out.macro = labels.empty() ? 0.0 : macro / static_cast<double>(labels.size());
    out.example = ex / static_cast<double>(pred.size());
    return out;
}

std::size_t recursive_lcs(const std::vector<std::string> &a, const std::vector<std::string> &b) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == a.size() || j == b.size()) return 0;
        auto it = memo.find({i, j});
        if (it != memo.end()) return it->second;
        const std::size_t v = a[i] == b[j] ? 1 + go(i + 1, j + 1) : std::max(go(i + 1, j), go(i, j + 1));
        memo[{i, j}] = v;
        return v;
    };
    return go(0, 0);
}

std::vector<std::string> whitespace_tokens(const std::string &s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

F1Instance random_f1_instance(std::mt19937_64 &rng) {
    F1Instance inst;
    const int n_labels = 1 + static_cast<int>(rng() % 14);
    const int n_samples = 1 + static_cast<int>(rng() % 50);
    for (int l = 0; l < n_labels; ++l) inst.labels.push_back("label" + std::to_string(l));
    std::bernoulli_distribution coin(0.3);
    for (int i = 0; i < n_samples; ++i) {
        std::vector<std::string> p, r;
        for (const auto &l : inst.labels) {
            if (coin(rng)) p.push_back(l);
            if (coin(rng)) r.push_back(l);
        }
        std::shuffle(p.begin(), p.end(), rng);
        inst.pred.push_back(std::move(p));
        inst.ref.push_back(std::move(r));
    }
    return inst;
}

} // namespace oracle
