#include <algorithm>
#include <cmath>

#include "uscan/image_ops.hpp"
#include "uscan/segment.hpp"

namespace uscan {

namespace {

double mask_iou(const Mask2D& a, const Mask2D& b) {
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool pa = a.pixels()[i], pb = b.pixels()[i];
        inter += pa && pb;
        uni += pa || pb;
    }
    return uni == 0 ? 1.0 : double(inter) / double(uni);
}

Mask2D disk_mask(int w, int h, double cx, double cy, double r) {
    Mask2D m(w, h);
    const int x0 = std::max(0, int(std::floor(cx - r)));
    const int x1 = std::min(w - 1, int(std::ceil(cx + r)));
    const int y0 = std::max(0, int(std::floor(cy - r)));
    const int y1 = std::min(h - 1, int(std::ceil(cy + r)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) m.at(x, y) = 1;
    return m;
}

}  // namespace

void SegmentConfig::validate() const {
    if (gauss_sigma < 0.0) throw ConfigInvalid("segment.gauss_sigma must be >= 0");
    if (snake.alpha < 0.0 || snake.beta < 0.0)
        throw ConfigInvalid("segment.snake alpha/beta must be >= 0");
    if (snake.gamma <= 0.0) throw ConfigInvalid("segment.snake.gamma must be > 0");
    if (snake.n_points < 4) throw ConfigInvalid("segment.snake.n_points must be >= 4");
    if (snake.max_iters < 1) throw ConfigInvalid("segment.snake.max_iters must be >= 1");
    if (chanvese.lambda1 <= 0.0 || chanvese.lambda2 <= 0.0)
        throw ConfigInvalid("segment.chanvese lambdas must be > 0");
    if (chanvese.smoothing_passes < 0)
        throw ConfigInvalid("segment.chanvese.smoothing_passes must be >= 0");
    if (chanvese.max_iters < 1) throw ConfigInvalid("segment.chanvese.max_iters must be >= 1");
    if (tophat_radius_px < 1) throw ConfigInvalid("segment.tophat_radius_px must be >= 1");
    if (flood_tolerance < 0) throw ConfigInvalid("segment.flood_tolerance must be >= 0");
    if (inner_init_scale <= 0.0 || inner_init_scale >= 1.0)
        throw ConfigInvalid("segment.inner_init_scale must be in (0, 1)");
    if (max_failed_fraction < 0.0 || max_failed_fraction > 1.0)
        throw ConfigInvalid("segment.max_failed_fraction must be in [0, 1]");
}

Image8 morph_contrast_enhance(const Image8& image, int radius_px) {
    if (radius_px < 1) throw BadRadius("top-hat radius must be >= 1");
    const Image8 opened = open_disk(image, radius_px);
    const Image8 closed = close_disk(image, radius_px);
    Image8 out(image.width(), image.height());
    for (std::size_t i = 0; i < image.size(); ++i) {
        const int white = int(image.pixels()[i]) - opened.pixels()[i];  // bright detail
        const int black = int(closed.pixels()[i]) - image.pixels()[i];  // dark detail
        out.pixels()[i] = static_cast<std::uint8_t>(
            std::clamp(int(image.pixels()[i]) + white - black, 0, 255));
    }
    return out;
}

Image8 compose_mask(const Contour& outer, const Contour& inner,
                    const std::optional<Mask2D>& resection, int width, int height) {
    for (const auto& p : inner.points())
        if (!outer.contains(p))
            throw ContainmentViolation("inner contour leaves the outer contour");

    const Mask2D outer_m = rasterize_contour(outer, width, height);
    const Mask2D inner_m = rasterize_contour(inner, width, height);
    Image8 mask(width, height, 0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            std::uint8_t c = 0;
            if (outer_m.at(x, y)) c = 1;
            if (inner_m.at(x, y) && outer_m.at(x, y)) c = 2;
            if (resection && resection->at(x, y) && outer_m.at(x, y)) c = 3;
            mask.at(x, y) = c;
        }
    return mask;
}

FrameSegmentation segment_frame(const Image8& image, const std::optional<FramePrior>& prior,
                                const SegmentConfig& cfg) {
    cfg.validate();
    const int w = image.width(), h = image.height();

    bool outer_conv = false, inner_conv = false;
    const Contour outer_init =
        prior ? prior->outer : rect_contour(cfg.init_rect, cfg.snake.n_points);
    const Contour outer =
        active_contour(image, outer_init, cfg.snake, cfg.gauss_sigma, &outer_conv);
    if (outer.area() < cfg.min_region_area_px)
        throw DegenerateContour("outer contour collapsed (area " +
                                std::to_string(outer.area()) + " px^2)");

    const Contour inner_init = prior ? prior->inner : outer.scaled(cfg.inner_init_scale);
    const Contour inner =
        active_contour(image, inner_init, cfg.snake, cfg.gauss_sigma, &inner_conv);
    if (inner.area() < cfg.min_region_area_px)
        throw DegenerateContour("inner contour collapsed");

    const Mask2D outer_m = rasterize_contour(outer, w, h);
    const Mask2D inner_m = rasterize_contour(inner, w, h);
    if (mask_iou(inner_m, outer_m) > 0.9)
        throw DegenerateContour("inner contour stuck to the outer boundary");

    // Resection: enhance, region-split around the urethral axis, then keep
    // the connected piece holding the seed. The evolution domain is the
    // inner region plus a margin so perforations past the inner boundary
    // still get picked up.
    const Image8 enhanced = morph_contrast_enhance(image, cfg.tophat_radius_px);
    const Vec2 seed = inner.centroid();
    const int sx = std::clamp(int(std::lround(seed.x)), 0, w - 1);
    const int sy = std::clamp(int(std::lround(seed.y)), 0, h - 1);

    const double r_inner = std::sqrt(inner.area() / 3.14159265358979323846);
    Mask2D domain = dilate_mask(inner_m, std::max(2, int(std::lround(0.2 * r_inner))));
    for (std::size_t i = 0; i < domain.size(); ++i)
        domain.pixels()[i] = domain.pixels()[i] && outer_m.pixels()[i];

    std::optional<Mask2D> resection_mask;
    std::optional<Contour> resection_contour;
    bool resection_conv = true;
    try {
        const Mask2D init = disk_mask(w, h, seed.x, seed.y, std::max(3.0, 0.3 * r_inner));
        const ChanVeseResult cv = morph_chan_vese(enhanced, init, cfg.chanvese, &domain);
        resection_conv = cv.converged;

        Image8 phase(w, h);
        for (std::size_t i = 0; i < phase.size(); ++i) phase.pixels()[i] = cv.mask.pixels()[i];
        Mask2D candidate = flood_fill(phase, sx, sy, 0);
        if (!phase.at(sx, sy)) {
            // seed landed in the outside phase; no cavity at the axis
            candidate = Mask2D(w, h);
        }
        for (std::size_t i = 0; i < candidate.size(); ++i)
            candidate.pixels()[i] = candidate.pixels()[i] && domain.pixels()[i];

        std::size_t cand_area = 0;
        for (auto v : candidate.pixels()) cand_area += v;
        // a "cavity" that reproduces the whole central zone is the zone
        // itself seen by the two-phase split, not a resection
        if (cand_area >= 4 && mask_iou(candidate, inner_m) <= 0.8) {
            resection_contour = boundary_contour(candidate);
            resection_mask = std::move(candidate);
        }
    } catch (const NoContrast&) {
        // homogeneous interior: nothing resected
    } catch (const DegenerateInit&) {
    }

    FrameSegmentation out{outer, inner, resection_contour,
                          compose_mask(outer, inner, resection_mask, w, h),
                          outer_conv && inner_conv && resection_conv};
    return out;
}

StackSegmentation segment_stack(const ImageStack& stack, const SegmentConfig& cfg) {
    cfg.validate();
    stack.validate();
    if (stack.slices.empty()) throw EmptyStack("cannot segment an empty stack");

    const int n = stack.manifest.slice_count;
    StackSegmentation out;
    out.volume.manifest = stack.manifest;
    out.volume.labels.assign(n, Image8(stack.manifest.pixel_width, stack.manifest.pixel_height));
    out.records.resize(n);

    std::optional<FramePrior> prior;
    int failures = 0;
    for (int k = 0; k < n; ++k) {
        SliceRecord& rec = out.records[k];
        rec.slice = k;
        try {
            const FrameSegmentation seg = segment_frame(stack.slices[k], prior, cfg);
            out.volume.labels[k] = seg.mask;
            rec.ok = true;
            rec.converged = seg.converged;
            rec.has_resection = seg.resection.has_value();
            prior = FramePrior{seg.outer, seg.inner};
        } catch (const Error& e) {
            rec.ok = false;
            rec.error = e.what();
            ++failures;
            // keep the last successful contours as the next slice's init
        }
    }

    if (failures > cfg.max_failed_fraction * n)
        throw FatalSegmentation(std::to_string(failures) + " of " + std::to_string(n) +
                                " slices failed to segment");

    // patch failed slices from the nearest successful one
    for (int k = 0; k < n; ++k) {
        if (out.records[k].ok) continue;
        int best = -1;
        for (int d = 1; d < n && best < 0; ++d) {
            if (k - d >= 0 && out.records[k - d].ok) best = k - d;
            else if (k + d < n && out.records[k + d].ok) best = k + d;
        }
        if (best >= 0) {
            out.volume.labels[k] = out.volume.labels[best];
            out.records[k].filled_from = best;
        }
    }

    out.volume.validate();
    return out;
}

}  // namespace uscan
