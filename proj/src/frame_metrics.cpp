#include "uscan/frame_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "uscan/image_ops.hpp"

namespace uscan {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamp_unit(double v) {
    return std::min(1.0, std::max(v, std::numeric_limits<double>::min()));
}

MetricsReport::Aggregate aggregate(const std::vector<double>& xs) {
    MetricsReport::Aggregate a;
    if (xs.empty()) return a;
    a.min = *std::min_element(xs.begin(), xs.end());
    a.max = *std::max_element(xs.begin(), xs.end());
    double s = 0.0;
    for (double x : xs) s += x;
    a.mean = s / xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - a.mean) * (x - a.mean);
    a.std = std::sqrt(var / xs.size());
    return a;
}

}  // namespace

double circularity(const Contour& c) {
    const double area = c.area();
    const double per = c.perimeter();
    if (area <= 0.0 || per <= 0.0)
        throw DegenerateContour("circularity needs a contour with nonzero area and perimeter");
    return clamp_unit(4.0 * kPi * area / (per * per));
}

double smoothness(const Contour& c, int harmonics) {
    const int n = static_cast<int>(c.size());
    if (harmonics < 1) throw Error("smoothness needs at least one harmonic");
    if (n < 2 * harmonics + 1)
        throw TooFewPoints("smoothness with K harmonics needs at least 2K+1 contour points");

    const double raw = c.perimeter();
    if (raw <= 0.0) throw DegenerateContour("smoothness needs a nonzero perimeter");

    // complex DFT of the closed point chain; keep |k| <= K
    std::vector<std::complex<double>> coef(2 * harmonics + 1);
    for (int k = -harmonics; k <= harmonics; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (int j = 0; j < n; ++j) {
            const double ang = -2.0 * kPi * k * j / n;
            acc += std::complex<double>(c.points()[j].x, c.points()[j].y) *
                   std::complex<double>(std::cos(ang), std::sin(ang));
        }
        coef[k + harmonics] = acc / double(n);
    }

    double recon_per = 0.0;
    std::complex<double> prev;
    std::complex<double> first;
    for (int j = 0; j <= n; ++j) {
        const int jj = j % n;
        std::complex<double> p{0.0, 0.0};
        for (int k = -harmonics; k <= harmonics; ++k) {
            const double ang = 2.0 * kPi * k * jj / n;
            p += coef[k + harmonics] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        if (j == 0) first = p;
        else recon_per += std::abs(p - prev);
        prev = p;
    }
    (void)first;
    return clamp_unit(recon_per / raw);
}

PerforationResult perforation(const Image8& frame_mask, double pixel_size_mm) {
    const int w = frame_mask.width(), h = frame_mask.height();
    Mask2D central(w, h), resection(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            central.at(x, y) = frame_mask.at(x, y) == 2 ? 1 : 0;
            resection.at(x, y) = frame_mask.at(x, y) == 3 ? 1 : 0;
        }

    // The central zone is convex by anatomy, so its convex hull stands in
    // for the pre-resection central extent; resection pixels beyond it sit
    // in the peripheral shell.
    const std::vector<Vec2> hull = convex_hull_points(central);

    Mask2D overlap(w, h);
    std::size_t count = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            if (!resection.at(x, y)) continue;
            if (hull.empty() || !inside_convex(hull, {double(x), double(y)})) {
                overlap.at(x, y) = 1;
                ++count;
            }
        }

    PerforationResult out;
    out.area_mm2 = double(count) * pixel_size_mm * pixel_size_mm;
    if (count > 0) {
        auto [labels, comp_counts] = connected_components(overlap);
        out.site_count = static_cast<int>(comp_counts.size()) - 1;
    }
    return out;
}

MetricsReport metrics_stack(const LabelVolume& vol, int harmonics) {
    if (vol.labels.empty()) throw EmptyStack("metrics need at least one slice");
    vol.validate();

    MetricsReport rep;
    std::vector<double> circ, smooth, perf_area, perf_sites;

    for (int k = 0; k < vol.manifest.slice_count; ++k) {
        const Mask2D res = vol.class_mask(k, VoxelClass::resection);
        bool any = false;
        for (auto v : res.pixels())
            if (v) { any = true; break; }
        if (!any) {
            ++rep.skipped_frames;
            continue;
        }

        MetricsReport::FrameScores fs;
        fs.slice = k;

        // boundary of the largest resection component scores the shape
        const auto contour = boundary_contour(res);
        if (contour) {
            fs.circularity = circularity(*contour);
            const int max_k = (static_cast<int>(contour->size()) - 1) / 2;
            fs.smoothness = smoothness(*contour, std::min(harmonics, std::max(1, max_k)));
        } else {
            // region too small to trace; score it as a point-like blob
            fs.circularity = 1.0;
            fs.smoothness = 1.0;
        }

        const PerforationResult pf = perforation(vol.labels[k], vol.manifest.pixel_size_mm);
        fs.perforation_area_mm2 = pf.area_mm2;
        fs.perforation_sites = pf.site_count;

        circ.push_back(fs.circularity);
        smooth.push_back(fs.smoothness);
        perf_area.push_back(fs.perforation_area_mm2);
        perf_sites.push_back(fs.perforation_sites);
        rep.per_frame.push_back(fs);
    }

    rep.circularity = aggregate(circ);
    rep.smoothness = aggregate(smooth);
    rep.perforation_area_mm2 = aggregate(perf_area);
    rep.perforation_sites = aggregate(perf_sites);
    return rep;
}

std::string render_metrics_report(const MetricsReport& report, bool per_frame_table) {
    std::ostringstream os;
    os << "# circularity: 4*pi*A/P^2 of the resection boundary, (0,1]\n";
    os << "# smoothness: low-pass Fourier perimeter ratio, (0,1]\n";
    os << "# perforation: resection area inside the peripheral shell\n";
    os << "frames.scored " << report.per_frame.size() << "\n";
    os << "frames.skipped " << report.skipped_frames << "\n";
    auto emit = [&](const char* name, const MetricsReport::Aggregate& a) {
        os << name << ".mean " << a.mean << "\n";
        os << name << ".std " << a.std << "\n";
        os << name << ".min " << a.min << "\n";
        os << name << ".max " << a.max << "\n";
    };
    emit("circularity", report.circularity);
    emit("smoothness", report.smoothness);
    emit("perforation_area_mm2", report.perforation_area_mm2);
    emit("perforation_sites", report.perforation_sites);
    if (per_frame_table) {
        os << "# frame circularity smoothness perforation_area_mm2 perforation_sites\n";
        for (const auto& f : report.per_frame)
            os << f.slice << " " << f.circularity << " " << f.smoothness << " "
               << f.perforation_area_mm2 << " " << f.perforation_sites << "\n";
    }
    return os.str();
}

}  // namespace uscan
