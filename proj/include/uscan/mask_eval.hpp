#pragma once

#include <string>
#include <vector>

#include "uscan/types.hpp"

namespace uscan {

/// Intersection over union; 1.0 when both masks are empty so unresected
/// references do not poison averages. Throws DimensionMismatch.
double iou(const Mask2D& a, const Mask2D& b);

struct IouStats {
    double mean = 0.0;
    double std = 0.0;  // population std; 0 for a single sample
};

/// Per-class IoU over slices plus the per-slice foreground mean
/// ("overall" = mean over peripheral/central/resection per slice).
struct StackIouReport {
    std::vector<VoxelClass> classes;
    std::vector<IouStats> per_class;      // aligned with classes
    IouStats overall;
    std::vector<std::vector<double>> per_slice;  // [class][slice]
    std::vector<double> overall_per_slice;
};

StackIouReport stack_iou_stats(const LabelVolume& pred, const LabelVolume& ref,
                               const std::vector<VoxelClass>& classes = {
                                   VoxelClass::peripheral, VoxelClass::central,
                                   VoxelClass::resection});

/// Mean/std across several stack reports (one sample per stack).
struct DatasetIouReport {
    std::vector<VoxelClass> classes;
    std::vector<IouStats> per_class;
    IouStats overall;
};
DatasetIouReport dataset_iou_stats(const std::vector<StackIouReport>& stacks);

/// Rows like "method | overall | central | peripheral" rendered as an
/// aligned text table.
struct IouTableRow {
    std::string method;
    IouStats overall, central, peripheral;
};
std::string render_iou_table(const std::vector<IouTableRow>& rows);

/// Line-oriented key-value rendering of a stack report.
std::string render_iou_report(const StackIouReport& report);

}  // namespace uscan
