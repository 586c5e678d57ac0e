#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uscan/types.hpp"

namespace uscan {

struct SnakeParams {
    double alpha = 0.015;        // elasticity weight
    double beta = 10.0;          // rigidity weight
    double gamma = 0.001;        // step size
    int max_iters = 2500;
    double convergence_tol = 0.1;  // max point displacement, px
    int n_points = 200;
};

struct ChanVeseParams {
    double lambda1 = 1.0;
    double lambda2 = 1.0;
    int smoothing_passes = 1;
    int max_iters = 150;
};

struct Rect {
    double x = 0.0, y = 0.0, w = 0.0, h = 0.0;
};

struct SegmentConfig {
    double gauss_sigma = 2.0;
    SnakeParams snake;
    Rect init_rect;                // outer-contour init for the first slice
    double inner_init_scale = 0.85;  // inner init = outer contour scaled by this
    ChanVeseParams chanvese;
    int tophat_radius_px = 15;
    int flood_tolerance = 10;
    double min_region_area_px = 80.0;  // below this a contour counts as lost
    double max_failed_fraction = 0.2;

    void validate() const;
};

/// One segmented frame: the two zone boundaries, the optional resection
/// region, and the composed 4-class mask.
struct FrameSegmentation {
    Contour outer;
    Contour inner;
    std::optional<Contour> resection;
    Image8 mask;       // class codes
    bool converged = true;
};

/// Evolve a closed snake on the image: internal bending/stretching energy
/// plus attraction to the smoothed gradient magnitude, semi-implicit
/// Euler steps on a periodic point chain, arc-length resampling each
/// iteration. Runs until the max displacement drops below
/// params.convergence_tol or max_iters.
Contour active_contour(const Image8& image, const Contour& init, const SnakeParams& params,
                       double gauss_sigma = 2.0, bool* converged = nullptr);

/// clamp(image + white_tophat - black_tophat) over a disk of the given
/// radius. Throws BadRadius for radius < 1.
Image8 morph_contrast_enhance(const Image8& image, int radius_px);

struct ChanVeseResult {
    Mask2D mask;
    bool converged = false;
    int iterations = 0;
    std::vector<double> energy;  // within-region squared deviation per iteration
};

/// Two-phase morphological region segmentation: boundary pixels flip by
/// the sign of lambda1*(I-c1)^2 - lambda2*(I-c2)^2, followed by the
/// alternating sup-inf / inf-sup curvature smoothing. The optional domain
/// restricts both the region statistics and the evolution.
ChanVeseResult morph_chan_vese(const Image8& image, const Mask2D& init_mask,
                               const ChanVeseParams& cfg,
                               const Mask2D* domain = nullptr);

/// Compose the 4-class mask from the extracted geometry with precedence
/// resection > central > peripheral > background. Throws
/// ContainmentViolation when the inner contour leaves the outer one.
Image8 compose_mask(const Contour& outer, const Contour& inner,
                    const std::optional<Mask2D>& resection, int width, int height);

/// Full per-frame cascade. Prior contours (from the previous slice) seed
/// the snakes; without a prior the configured init rectangle is used.
struct FramePrior {
    Contour outer;
    Contour inner;
};
FrameSegmentation segment_frame(const Image8& image, const std::optional<FramePrior>& prior,
                                const SegmentConfig& cfg);

struct SliceRecord {
    int slice = 0;
    bool ok = false;
    bool converged = false;
    bool has_resection = false;
    int filled_from = -1;  // source slice when this one was patched
    std::string error;
};

struct StackSegmentation {
    LabelVolume volume;
    std::vector<SliceRecord> records;
};

/// Segment every slice, propagating each slice's contours as the next
/// slice's init. Failed slices are patched with the nearest successful
/// slice's labels; more than cfg.max_failed_fraction failures is fatal.
StackSegmentation segment_stack(const ImageStack& stack, const SegmentConfig& cfg);

/// Contour init helper: n points along the rectangle boundary by arc length.
Contour rect_contour(const Rect& r, int n_points);

}  // namespace uscan
