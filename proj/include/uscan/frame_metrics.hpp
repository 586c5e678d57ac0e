#pragma once

#include <string>
#include <utility>

#include "uscan/types.hpp"

namespace uscan {

/// 4*pi*Area / Perimeter^2, clamped to (0, 1]. Throws DegenerateContour
/// on zero area or perimeter.
double circularity(const Contour& c);

/// Perimeter of the contour rebuilt from its first K Fourier harmonics
/// divided by the raw perimeter, clamped to (0, 1]. Needs at least
/// 2K + 1 points (throws TooFewPoints).
double smoothness(const Contour& c, int harmonics = 10);

struct PerforationResult {
    double area_mm2 = 0.0;
    int site_count = 0;
};

/// Resection pixels that lie inside the peripheral shell: class-3 pixels
/// outside the convex hull of the slice's class-2 pixels, scaled by the
/// pixel area. Sites are 4-connected components of that overlap.
PerforationResult perforation(const Image8& frame_mask, double pixel_size_mm);

/// Per-frame metrics for every slice containing resection pixels, with
/// mean/std/min/max aggregates. Throws EmptyStack.
MetricsReport metrics_stack(const LabelVolume& vol, int harmonics = 10);

/// Key-value rendering; per_frame_table adds one row per scored frame.
std::string render_metrics_report(const MetricsReport& report, bool per_frame_table = false);

}  // namespace uscan
