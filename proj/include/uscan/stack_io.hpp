#pragma once

#include <filesystem>

#include "uscan/types.hpp"

namespace uscan {

/// On-disk stack layout: slice_0000.png .. slice_NNNN.png (8-bit gray)
/// plus manifest.json with every ScanManifest field. Label volumes use
/// the same layout with slice_0000_labels.png and raw class codes as
/// gray values.

void write_stack(const ImageStack& stack, const std::filesystem::path& dir);
ImageStack read_stack(const std::filesystem::path& dir);

void write_labels(const LabelVolume& vol, const std::filesystem::path& dir);
LabelVolume read_labels(const std::filesystem::path& dir);

/// Single-image helpers; read converts 16-bit and color inputs down to
/// 8-bit grayscale. Throws CorruptImage / IoFailure.
void write_png_gray(const Image8& img, const std::filesystem::path& file);
Image8 read_png_gray(const std::filesystem::path& file);

std::string manifest_to_json(const ScanManifest& m);
ScanManifest manifest_from_json(const std::string& text);

}  // namespace uscan
