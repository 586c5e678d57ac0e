#pragma once

#include <optional>
#include <string>
#include <vector>

#include "uscan/types.hpp"

namespace uscan {

/// Capture-side settings for turning a raw frame feed into an ImageStack.
struct CaptureConfig {
    double gray_threshold = 20.0;        // scan-start trigger on mean gray
    int roi_x = 0, roi_y = 0;            // crop rectangle
    int roi_w = 0, roi_h = 0;
    double fps = 30.0;
    double scan_length_mm = 60.0;
    int retain_count = 85;               // slices kept from the trigger on
    int frame_stride = 1;
    double pixel_size_mm = 0.0;          // in-plane, from the machine profile
    std::string source_id = "unknown";
    std::optional<double> dynamic_range_db;

    void validate(int frame_width, int frame_height) const;
};

/// Bundled per-machine defaults (ROI, trigger level, pixel scale).
std::optional<CaptureConfig> machine_profile(const std::string& name);
std::vector<std::string> machine_profile_names();

/// Index of the first frame whose mean gray value strictly exceeds
/// cfg.gray_threshold. Throws NoScanDetected when no frame does.
int detect_scan_start(const std::vector<Image8>& frames, const CaptureConfig& cfg);

/// Crop and subsample frames [start, start+stride, ...] into a stack of
/// cfg.retain_count slices. Throws InsufficientFrames / RoiOutOfBounds.
ImageStack assemble_stack(const std::vector<Image8>& frames, int start,
                          const CaptureConfig& cfg);

}  // namespace uscan
