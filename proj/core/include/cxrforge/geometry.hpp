#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cxrforge/error.hpp"

namespace cxrforge {

/// Pixel-space rectangle. Corners are half-open: (x1, y1) is the first covered
/// pixel edge and (x2, y2) the first edge past the box, so area is exact.
struct BBox {
    double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

    double width() const noexcept { return x2 - x1; }
    double height() const noexcept { return y2 - y1; }
    double area() const noexcept { return width() * height(); }
    bool valid() const noexcept;

    friend bool operator==(const BBox &, const BBox &) = default;
};

/// Rectangle in the 0..100 integer frame used in rendered text.
struct NormalizedBBox {
    int x1 = 0, y1 = 0, x2 = 0, y2 = 0;

    bool valid() const noexcept;
    friend bool operator==(const NormalizedBBox &, const NormalizedBBox &) = default;
};

/// Binary mask stored as alternating run lengths over row-major pixels.
/// The first run counts background pixels (it may be 0).
struct RleMask {
    int width = 0;
    int height = 0;
    std::vector<std::int64_t> runs;
};

bool canonical_less(const BBox &a, const BBox &b) noexcept;

void require_valid(const BBox &b);

/// Intersection over union; 0 when the union is empty.
double iou(const BBox &a, const BBox &b);

/// Intersection divided by the smaller of the two areas; 0 if either is empty.
double overlap_fraction(const BBox &a, const BBox &b);

BBox enclosing(const BBox &a, const BBox &b) noexcept;

/// Merges any pair whose overlap_fraction is strictly above `threshold` into
/// their enclosing box until no such pair remains. Output is canonically sorted,
/// and the result depends only on the multiset of inputs.
std::vector<BBox> merge_overlapping(std::vector<BBox> boxes, double threshold = 0.5);

/// Scales to the 0..100 frame with round-half-away-from-zero, then clamps.
/// Out-of-image and degenerate results are reported to `diag` when given.
NormalizedBBox normalize(const BBox &b, double image_width, double image_height, Diagnostics *diag = nullptr);

BBox denormalize(const NormalizedBBox &b, double image_width, double image_height);

/// Clamps a box into [0, width] x [0, height]. Returns true if anything moved.
bool clamp_to_image(BBox &b, double image_width, double image_height) noexcept;

BBox circle_to_bbox(double cx, double cy, double radius);

/// One minimal enclosing box per 4-connected foreground component.
std::vector<BBox> mask_to_bboxes(const RleMask &mask);

/// Parses "<width> <height> <run0> <run1> ..." and checks the run total.
RleMask parse_rle(std::string_view text);
std::string render_rle(const RleMask &mask);

/// Renders as "[x1, y1, x2, y2]".
std::string render_bbox(const NormalizedBBox &b);
std::string render_bboxes(const std::vector<NormalizedBBox> &boxes);

/// Every "[int, int, int, int]" in order of appearance whose values lie in
/// [0, 100] with ordered corners. Malformed candidates are skipped.
std::vector<NormalizedBBox> parse_bboxes_from_text(std::string_view text);

/// Bracketed integer quadruples that fail validation; used by corpus checks.
std::vector<std::string> find_invalid_bbox_text(std::string_view text);

} // namespace cxrforge
