#include "uscan/ingest.hpp"

#include <cmath>

#include "uscan/image_ops.hpp"

namespace uscan {

void CaptureConfig::validate(int frame_width, int frame_height) const {
    if (gray_threshold <= 0.0 || gray_threshold >= 255.0)
        throw ConfigInvalid("capture.gray_threshold must be in (0, 255)");
    if (retain_count < 1) throw ConfigInvalid("capture.retain_count must be >= 1");
    if (frame_stride < 1) throw ConfigInvalid("capture.frame_stride must be >= 1");
    if (fps <= 0.0) throw ConfigInvalid("capture.fps must be positive");
    if (scan_length_mm <= 0.0) throw ConfigInvalid("capture.scan_length_mm must be positive");
    if (roi_w <= 0 || roi_h <= 0) throw RoiOutOfBounds("capture ROI has nonpositive size");
    if (roi_x < 0 || roi_y < 0 || roi_x + roi_w > frame_width || roi_y + roi_h > frame_height)
        throw RoiOutOfBounds("capture ROI exceeds the frame bounds");
}

std::optional<CaptureConfig> machine_profile(const std::string& name) {
    // ROI and trigger defaults per supported machine; pixel_size_mm still
    // has to come from calibration (the profiles carry a plausible value).
    CaptureConfig cfg;
    if (name == "sonoscape-e1") {
        cfg.roi_x = 165; cfg.roi_y = 120;
        cfg.roi_w = 950; cfg.roi_h = 600;
        cfg.gray_threshold = 18.0;
        cfg.retain_count = 85;
        cfg.pixel_size_mm = 0.085;
        cfg.source_id = "sonoscape-e1";
        return cfg;
    }
    if (name == "ge-logiq-p6") {
        cfg.roi_x = 262; cfg.roi_y = 104;
        cfg.roi_w = 755; cfg.roi_h = 620;
        cfg.gray_threshold = 22.0;
        cfg.retain_count = 130;
        cfg.pixel_size_mm = 0.08;
        cfg.source_id = "ge-logiq-p6";
        return cfg;
    }
    return std::nullopt;
}

std::vector<std::string> machine_profile_names() {
    return {"sonoscape-e1", "ge-logiq-p6"};
}

int detect_scan_start(const std::vector<Image8>& frames, const CaptureConfig& cfg) {
    if (frames.empty()) throw NoScanDetected("empty frame sequence");
    for (int i = 0; i < static_cast<int>(frames.size()); ++i)
        if (mean_gray(frames[i]) > cfg.gray_threshold) return i;
    throw NoScanDetected("no frame mean exceeded threshold " +
                         std::to_string(cfg.gray_threshold));
}

ImageStack assemble_stack(const std::vector<Image8>& frames, int start,
                          const CaptureConfig& cfg) {
    if (frames.empty()) throw InsufficientFrames("empty frame sequence");
    cfg.validate(frames.front().width(), frames.front().height());
    if (start < 0) throw InsufficientFrames("negative start index");

    const long long last = static_cast<long long>(start) +
                           static_cast<long long>(cfg.retain_count - 1) * cfg.frame_stride;
    if (last >= static_cast<long long>(frames.size()))
        throw InsufficientFrames("need frame " + std::to_string(last) + " but only " +
                                 std::to_string(frames.size()) + " frames captured");

    ImageStack stack;
    stack.manifest = ScanManifest::make(cfg.retain_count, cfg.roi_w, cfg.roi_h,
                                        cfg.pixel_size_mm, cfg.scan_length_mm,
                                        cfg.source_id, cfg.dynamic_range_db);
    stack.slices.reserve(cfg.retain_count);
    for (int i = 0; i < cfg.retain_count; ++i) {
        const Image8& frame = frames[start + static_cast<std::size_t>(i) * cfg.frame_stride];
        if (frame.width() != frames.front().width() || frame.height() != frames.front().height())
            throw DimensionMismatch("frame sizes vary within the sequence");
        Image8 crop(cfg.roi_w, cfg.roi_h);
        for (int y = 0; y < cfg.roi_h; ++y)
            for (int x = 0; x < cfg.roi_w; ++x)
                crop.at(x, y) = frame.at(cfg.roi_x + x, cfg.roi_y + y);
        stack.slices.push_back(std::move(crop));
    }
    stack.validate();
    return stack;
}

}  // namespace uscan
