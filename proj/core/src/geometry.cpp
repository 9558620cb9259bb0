#include "cxrforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <regex>
#include <sstream>
#include <tuple>

namespace cxrforge {

bool BBox::valid() const noexcept {
    return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) && std::isfinite(y2) && x1 >= 0 && y1 >= 0 &&
           x1 <= x2 && y1 <= y2;
}

bool NormalizedBBox::valid() const noexcept {
    return 0 <= x1 && x1 <= x2 && x2 <= 100 && 0 <= y1 && y1 <= y2 && y2 <= 100;
}

bool canonical_less(const BBox &a, const BBox &b) noexcept {
    return std::tie(a.x1, a.y1, a.x2, a.y2) < std::tie(b.x1, b.y1, b.x2, b.y2);
}

void require_valid(const BBox &b) {
    if (!b.valid()) {
        std::ostringstream os;
        os << "invalid box (" << b.x1 << ", " << b.y1 << ", " << b.x2 << ", " << b.y2 << ")";
        throw InputError(os.str());
    }
}

namespace {

double intersection_area(const BBox &a, const BBox &b) noexcept {
    const double w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const double h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (w <= 0 || h <= 0) return 0.0;
    return w * h;
}

} // namespace

double iou(const BBox &a, const BBox &b) {
    require_valid(a);
    require_valid(b);
    const double inter = intersection_area(a, b);
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0) return 0.0;
    return std::clamp(inter / uni, 0.0, 1.0);
}

double overlap_fraction(const BBox &a, const BBox &b) {
    require_valid(a);
    require_valid(b);
    const double smaller = std::min(a.area(), b.area());
    if (smaller <= 0) return 0.0;
    return std::clamp(intersection_area(a, b) / smaller, 0.0, 1.0);
}

BBox enclosing(const BBox &a, const BBox &b) noexcept {
    return {std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2), std::max(a.y2, b.y2)};
}

std::vector<BBox> merge_overlapping(std::vector<BBox> boxes, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) throw InputError("merge threshold must lie in [0, 1]");
    for (const auto &b : boxes) require_valid(b);

    std::sort(boxes.begin(), boxes.end(), canonical_less);
    for (;;) {
        bool merged = false;
        for (std::size_t i = 0; i < boxes.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < boxes.size(); ++j) {
                if (overlap_fraction(boxes[i], boxes[j]) > threshold) {
                    boxes[i] = enclosing(boxes[i], boxes[j]);
                    boxes.erase(boxes.begin() + static_cast<std::ptrdiff_t>(j));
                    merged = true;
                    break;
                }
            }
        }
        if (!merged) break;
        std::sort(boxes.begin(), boxes.end(), canonical_less);
    }
    return boxes;
}

bool clamp_to_image(BBox &b, double image_width, double image_height) noexcept {
    const BBox before = b;
    b.x1 = std::clamp(b.x1, 0.0, image_width);
    b.x2 = std::clamp(b.x2, 0.0, image_width);
    b.y1 = std::clamp(b.y1, 0.0, image_height);
    b.y2 = std::clamp(b.y2, 0.0, image_height);
    return !(before == b);
}

NormalizedBBox normalize(const BBox &b, double image_width, double image_height, Diagnostics *diag) {
    if (!(image_width > 0) || !(image_height > 0)) throw InputError("image dimensions must be positive");
    require_valid(b);

    BBox inside = b;
    if (clamp_to_image(inside, image_width, image_height) && diag) {
        std::ostringstream os;
        os << "box (" << b.x1 << ", " << b.y1 << ", " << b.x2 << ", " << b.y2 << ") exceeds " << image_width << "x"
           << image_height << " image; clamped";
        diag->warn(os.str());
    }

    auto scale = [](double v, double dim) {
        const long r = std::lround(v * 100.0 / dim);
        return static_cast<int>(std::clamp(r, 0L, 100L));
    };
    NormalizedBBox n{scale(inside.x1, image_width), scale(inside.y1, image_height), scale(inside.x2, image_width),
                     scale(inside.y2, image_height)};
    if (diag && (n.x1 == n.x2 || n.y1 == n.y2)) diag->warn("degenerate normalized box " + render_bbox(n));
    return n;
}

BBox denormalize(const NormalizedBBox &b, double image_width, double image_height) {
    if (!(image_width > 0) || !(image_height > 0)) throw InputError("image dimensions must be positive");
    return {b.x1 * image_width / 100.0, b.y1 * image_height / 100.0, b.x2 * image_width / 100.0,
            b.y2 * image_height / 100.0};
}

BBox circle_to_bbox(double cx, double cy, double radius) {
    if (!(radius >= 0)) throw InputError("circle radius must be non-negative");
    if (!std::isfinite(cx) || !std::isfinite(cy)) throw InputError("circle centre must be finite");
    return {std::max(0.0, cx - radius), std::max(0.0, cy - radius), std::max(0.0, cx + radius),
            std::max(0.0, cy + radius)};
}

std::vector<BBox> mask_to_bboxes(const RleMask &mask) {
    if (mask.width < 0 || mask.height < 0) throw FormatError("mask dimensions must be non-negative");
    const std::int64_t total = static_cast<std::int64_t>(mask.width) * mask.height;
    std::int64_t sum = 0;
    for (auto r : mask.runs) {
        if (r < 0) throw FormatError("negative run length in mask");
        sum += r;
    }
    if (sum != total) {
        throw FormatError("run lengths sum to " + std::to_string(sum) + ", expected " + std::to_string(total));
    }

    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(total), 0);
    std::int64_t pos = 0;
    for (std::size_t i = 0; i < mask.runs.size(); ++i) {
        if (i % 2 == 1) std::fill_n(pixels.begin() + pos, mask.runs[i], std::uint8_t{1});
        pos += mask.runs[i];
    }

    const int w = mask.width;
    const int h = mask.height;
    std::vector<BBox> boxes;
    std::vector<std::int64_t> stack;
    for (std::int64_t start = 0; start < total; ++start) {
        if (pixels[start] != 1) continue;
        int min_x = w, min_y = h, max_x = -1, max_y = -1;
        pixels[start] = 2;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::int64_t p = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(p % w);
            const int y = static_cast<int>(p / w);
            min_x = std::min(min_x, x);
            max_x = std::max(max_x, x);
            min_y = std::min(min_y, y);
            max_y = std::max(max_y, y);
            auto visit = [&](std::int64_t q) {
                if (pixels[q] == 1) {
                    pixels[q] = 2;
                    stack.push_back(q);
                }
            };
            if (x > 0) visit(p - 1);
            if (x + 1 < w) visit(p + 1);
            if (y > 0) visit(p - w);
            if (y + 1 < h) visit(p + w);
        }
        boxes.push_back({double(min_x), double(min_y), double(max_x + 1), double(max_y + 1)});
    }
    std::sort(boxes.begin(), boxes.end(), canonical_less);
    return boxes;
}

RleMask parse_rle(std::string_view text) {
    std::istringstream in{std::string(text)};
    RleMask mask;
    if (!(in >> mask.width >> mask.height)) throw FormatError("mask must start with width and height");
    if (mask.width <= 0 || mask.height <= 0) throw FormatError("mask dimensions must be positive");
    std::int64_t run = 0;
    while (in >> run) mask.runs.push_back(run);
    if (!in.eof()) throw FormatError("non-integer token in mask runs");

    std::int64_t sum = 0;
    for (auto r : mask.runs) {
        if (r < 0) throw FormatError("negative run length in mask");
        sum += r;
    }
    if (sum != static_cast<std::int64_t>(mask.width) * mask.height) {
        throw FormatError("run lengths sum to " + std::to_string(sum) + ", expected " +
                          std::to_string(static_cast<std::int64_t>(mask.width) * mask.height));
    }
    return mask;
}

std::string render_rle(const RleMask &mask) {
    std::string out = std::to_string(mask.width) + " " + std::to_string(mask.height);
    for (auto r : mask.runs) out += " " + std::to_string(r);
    return out;
}

std::string render_bbox(const NormalizedBBox &b) {
    return "[" + std::to_string(b.x1) + ", " + std::to_string(b.y1) + ", " + std::to_string(b.x2) + ", " +
           std::to_string(b.y2) + "]";
}

std::string render_bboxes(const std::vector<NormalizedBBox> &boxes) {
    std::string out;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        if (i) out += ", ";
        out += render_bbox(boxes[i]);
    }
    return out;
}

namespace {

const std::regex &bbox_pattern() {
    static const std::regex re(R"(\[\s*(-?\d{1,9})\s*,\s*(-?\d{1,9})\s*,\s*(-?\d{1,9})\s*,\s*(-?\d{1,9})\s*\])");
    return re;
}

template <typename Fn> void for_each_candidate(std::string_view text, Fn &&fn) {
    using It = std::string_view::const_iterator;
    std::regex_iterator<It> it(text.begin(), text.end(), bbox_pattern());
    for (; it != std::regex_iterator<It>(); ++it) {
        const auto &m = *it;
        NormalizedBBox b{std::stoi(m[1].str()), std::stoi(m[2].str()), std::stoi(m[3].str()), std::stoi(m[4].str())};
        fn(b, m.str());
    }
}

} // namespace

std::vector<NormalizedBBox> parse_bboxes_from_text(std::string_view text) {
    std::vector<NormalizedBBox> out;
    for_each_candidate(text, [&](const NormalizedBBox &b, const std::string &) {
        if (b.valid()) out.push_back(b);
    });
    return out;
}

std::vector<std::string> find_invalid_bbox_text(std::string_view text) {
    std::vector<std::string> out;
    for_each_candidate(text, [&](const NormalizedBBox &b, const std::string &raw) {
        if (!b.valid()) out.push_back(raw);
    });
    return out;
}

} // namespace cxrforge
