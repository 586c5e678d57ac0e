#include "uscan/mask_eval.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace uscan {

namespace {

IouStats stats_of(const std::vector<double>& xs) {
    IouStats s;
    if (xs.empty()) return s;
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - s.mean) * (x - s.mean);
    s.std = std::sqrt(var / xs.size());
    return s;
}

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

double iou(const Mask2D& a, const Mask2D& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw DimensionMismatch("iou: mask dimensions differ");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const bool pa = a.pixels()[i] != 0, pb = b.pixels()[i] != 0;
        inter += pa && pb;
        uni += pa || pb;
    }
    if (uni == 0) return 1.0;  // empty vs empty
    return double(inter) / double(uni);
}

StackIouReport stack_iou_stats(const LabelVolume& pred, const LabelVolume& ref,
                               const std::vector<VoxelClass>& classes) {
    if (pred.labels.empty() || ref.labels.empty())
        throw EmptyStack("iou statistics need at least one slice");
    if (pred.manifest.slice_count != ref.manifest.slice_count ||
        pred.manifest.pixel_width != ref.manifest.pixel_width ||
        pred.manifest.pixel_height != ref.manifest.pixel_height)
        throw DimensionMismatch("label volumes have different manifests");

    const int n = pred.manifest.slice_count;
    StackIouReport rep;
    rep.classes = classes;
    rep.per_slice.assign(classes.size(), std::vector<double>(n, 0.0));
    rep.overall_per_slice.assign(n, 0.0);

    for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t c = 0; c < classes.size(); ++c) {
            const double v = iou(pred.class_mask(k, classes[c]), ref.class_mask(k, classes[c]));
            rep.per_slice[c][k] = v;
            acc += v;
        }
        rep.overall_per_slice[k] = acc / double(classes.size());
    }

    for (std::size_t c = 0; c < classes.size(); ++c)
        rep.per_class.push_back(stats_of(rep.per_slice[c]));
    rep.overall = stats_of(rep.overall_per_slice);
    return rep;
}

DatasetIouReport dataset_iou_stats(const std::vector<StackIouReport>& stacks) {
    if (stacks.empty()) throw EmptyStack("no stack reports given");
    DatasetIouReport rep;
    rep.classes = stacks.front().classes;
    for (std::size_t c = 0; c < rep.classes.size(); ++c) {
        std::vector<double> means;
        for (const auto& s : stacks) means.push_back(s.per_class.at(c).mean);
        rep.per_class.push_back(stats_of(means));
    }
    std::vector<double> overall;
    for (const auto& s : stacks) overall.push_back(s.overall.mean);
    rep.overall = stats_of(overall);
    return rep;
}

std::string render_iou_table(const std::vector<IouTableRow>& rows) {
    std::ostringstream os;
    os << "Method        Overall IoU      Central IoU      Peripheral IoU\n";
    os << "------------  ---------------  ---------------  ---------------\n";
    for (const auto& r : rows) {
        auto cell = [](const IouStats& s) { return fmt2(s.mean) + " +/- " + fmt2(s.std); };
        os << r.method;
        for (std::size_t i = r.method.size(); i < 14; ++i) os << ' ';
        std::string c0 = cell(r.overall), c1 = cell(r.central), c2 = cell(r.peripheral);
        c0.resize(17, ' ');
        c1.resize(17, ' ');
        os << c0 << c1 << cell(r.peripheral) << "\n";
    }
    return os.str();
}

std::string render_iou_report(const StackIouReport& report) {
    std::ostringstream os;
    os << "# overall = per-slice mean IoU over foreground classes\n";
    os << "# std = population standard deviation over slices\n";
    os << "overall.mean " << report.overall.mean << "\n";
    os << "overall.std " << report.overall.std << "\n";
    for (std::size_t c = 0; c < report.classes.size(); ++c) {
        const char* name = class_name(report.classes[c]);
        os << "class." << name << ".mean " << report.per_class[c].mean << "\n";
        os << "class." << name << ".std " << report.per_class[c].std << "\n";
    }
    return os.str();
}

}  // namespace uscan
