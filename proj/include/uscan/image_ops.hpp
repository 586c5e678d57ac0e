#pragma once

#include <utility>
#include <vector>

#include "uscan/types.hpp"

namespace uscan {

/// Separable Gaussian blur with reflect borders; sigma 0 is the identity.
ImageF gaussian_blur(const ImageF& img, double sigma);

ImageF to_float(const Image8& img, double scale = 1.0);
Image8 to_u8_clamped(const ImageF& img);

/// 3x3 Sobel derivative pair (dx, dy), reflect borders.
std::pair<ImageF, ImageF> sobel(const ImageF& img);

/// sqrt(gx^2 + gy^2) of the Sobel pair.
ImageF gradient_magnitude(const ImageF& img);

/// Grayscale min/max filters over a disk of the given pixel radius.
/// The disk is decomposed into horizontal runs, so cost is O(N * radius).
Image8 erode_disk(const Image8& img, int radius);
Image8 dilate_disk(const Image8& img, int radius);

Image8 open_disk(const Image8& img, int radius);
Image8 close_disk(const Image8& img, int radius);

/// 4-connected region of pixels whose value differs from the seed value
/// by at most tolerance. Throws SeedOutOfBounds.
Mask2D flood_fill(const Image8& img, int seed_x, int seed_y, int tolerance);

/// Binary dilation by one 4-connected step, repeated `steps` times.
Mask2D dilate_mask(const Mask2D& mask, int steps);
Mask2D erode_mask(const Mask2D& mask, int steps);

/// Connected components of the nonzero pixels (4-connected).
/// Returns a label image (0 = background, 1..n = components) and the
/// pixel count per component (index 0 unused).
std::pair<Image2D<int>, std::vector<std::size_t>> connected_components(const Mask2D& mask);

/// Mask of the largest 4-connected nonzero component; all zero when the
/// input has no nonzero pixel.
Mask2D largest_component(const Mask2D& mask);

/// Fill background holes: nonzero pixels plus every zero region not
/// 4-connected to the image border.
Mask2D fill_holes(const Mask2D& mask);

/// Rasterize a closed polygon: pixel (x, y) is set when its center lies
/// inside the polygon (even-odd rule).
Mask2D rasterize_contour(const Contour& contour, int width, int height);

/// Trace the iso-0.5 boundary loops of a binary mask (marching squares
/// between pixel centers). Loops are returned closed and CCW-or-CW as
/// traced; callers pick what they need.
std::vector<std::vector<Vec2>> trace_boundaries(const Mask2D& mask);

/// Boundary of the largest nonzero region as a Contour; nullopt when the
/// mask is empty or the traced loop is degenerate.
std::optional<Contour> boundary_contour(const Mask2D& mask);

/// Convex hull (monotone chain) of all nonzero pixel centers, CCW.
/// Empty when the mask has fewer than 3 distinct points.
std::vector<Vec2> convex_hull_points(const Mask2D& mask);

/// Point strictly inside a convex CCW polygon (boundary counts as inside).
bool inside_convex(const std::vector<Vec2>& hull, const Vec2& p);

double mean_gray(const Image8& img);

}  // namespace uscan
