#include "uscan/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace uscan {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 step over (seed, stream)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& rng) {
    return (rng() >> 11) * 0x1.0p-53;
}

// Box-Muller; avoids std::normal_distribution so streams are stable
// across standard library versions.
double normal01(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 <= 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

// Smooth periodic angular modulation used for cavity jaggedness: a few
// random harmonics with 1/m falloff, normalized to roughly unit range.
struct AngularNoise {
    std::array<double, 6> amp{};
    std::array<double, 6> phase{};
    std::array<double, 6> drift{};

    explicit AngularNoise(std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        for (std::size_t i = 0; i < amp.size(); ++i) {
            amp[i] = uniform01(rng) / double(i + 2);
            phase[i] = uniform01(rng) * 2.0 * kPi;
            drift[i] = (uniform01(rng) - 0.5) * 0.2;
        }
    }

    double eval(double theta, double z_mm) const {
        double v = 0.0;
        for (std::size_t i = 0; i < amp.size(); ++i)
            v += amp[i] * std::cos(double(i + 3) * theta + phase[i] + drift[i] * z_mm);
        return v;  // roughly within [-1, 1]
    }
};

// Boundary radius of an axis-aligned ellipse (a, b) in direction theta.
double ellipse_radius(double a, double b, double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    const double denom = std::sqrt(b * b * c * c + a * a * s * s);
    return denom > 0.0 ? a * b / denom : 0.0;
}

std::vector<double> resample_profile(const std::vector<double>& profile, int slice_count) {
    std::vector<double> out(slice_count, 0.0);
    if (profile.empty()) return out;
    if (profile.size() == 1) {
        std::fill(out.begin(), out.end(), profile[0]);
        return out;
    }
    for (int k = 0; k < slice_count; ++k) {
        const double t = slice_count == 1 ? 0.0
                                          : double(k) / double(slice_count - 1) *
                                                double(profile.size() - 1);
        const int i = std::min(static_cast<int>(t), static_cast<int>(profile.size()) - 2);
        const double f = t - i;
        out[k] = profile[i] * (1.0 - f) + profile[i + 1] * f;
    }
    return out;
}

}  // namespace

void PhantomSpec::validate() const {
    for (int i = 0; i < 3; ++i) {
        if (outer_radii_mm[i] <= 0.0 || central_radii_mm[i] <= 0.0)
            throw GeometryInvalid("phantom radii must be positive");
        if (central_radii_mm[i] >= outer_radii_mm[i])
            throw GeometryInvalid("central zone must lie strictly inside the outer zone");
    }
    if (channel_radius_mm < 0.0) throw GeometryInvalid("channel radius must be >= 0");
    if (speckle_sigma < 0.0) throw GeometryInvalid("speckle_sigma must be >= 0");
    for (int i = 0; i < kNumClasses; ++i) {
        if (intensities[i] < 0 || intensities[i] > 255)
            throw GeometryInvalid("class intensities must be 8-bit values");
        for (int j = i + 1; j < kNumClasses; ++j)
            if (std::abs(intensities[i] - intensities[j]) < 20)
                throw GeometryInvalid("class intensities must differ by at least 20 gray levels");
    }
    if (resection) {
        if (resection->radius_profile_mm.empty())
            throw GeometryInvalid("resection radius profile must not be empty");
        for (double r : resection->radius_profile_mm)
            if (r < 0.0) throw GeometryInvalid("resection radii must be >= 0");
        if (resection->jaggedness < 0.0)
            throw GeometryInvalid("resection jaggedness must be >= 0");
        for (const auto& p : resection->patches)
            if (p.depth_mm < 0.0 || p.slice_end < p.slice_begin)
                throw GeometryInvalid("perforation patch ranges must be ordered, depth >= 0");
    }
}

std::pair<ImageStack, LabelVolume> synth_phantom(const PhantomSpec& spec,
                                                 const ScanManifest& manifest) {
    spec.validate();
    manifest.validate();

    const int w = manifest.pixel_width;
    const int h = manifest.pixel_height;
    const int n = manifest.slice_count;
    const double px = manifest.pixel_size_mm;
    const double dz = manifest.slice_spacing_mm;
    const double cx0 = 0.5 * w * px;
    const double cy0 = 0.5 * h * px;
    const double cz0 = 0.5 * manifest.scan_length_mm;

    const auto [ao, bo, co] = spec.outer_radii_mm;
    const auto [ac, bc, cc] = spec.central_radii_mm;

    std::vector<double> cavity_profile(n, 0.0);
    if (spec.resection)
        cavity_profile = resample_profile(spec.resection->radius_profile_mm, n);
    const AngularNoise jag(mix_seed(spec.seed, 0xca4bULL));
    const double jag_amp = spec.resection ? spec.resection->jaggedness : 0.0;

    ImageStack stack;
    stack.manifest = manifest;
    stack.slices.assign(n, Image8(w, h));
    LabelVolume vol;
    vol.manifest = manifest;
    vol.labels.assign(n, Image8(w, h));

    for (int k = 0; k < n; ++k) {
        const double z = (k + 0.5) * dz - cz0;
        const double so2 = 1.0 - (z / co) * (z / co);          // outer scale^2 at this z
        const double sc2 = 1.0 - (z / cc) * (z / cc);          // central scale^2
        const double sc = sc2 > 0.0 ? std::sqrt(sc2) : 0.0;

        Image8& label = vol.labels[k];
        for (int y = 0; y < h; ++y) {
            const double dy = (y + 0.5) * px - cy0;
            for (int x = 0; x < w; ++x) {
                const double dx = (x + 0.5) * px - cx0;
                std::uint8_t cls = 0;
                const double qo = (dx / ao) * (dx / ao) + (dy / bo) * (dy / bo);
                if (so2 > 0.0 && qo <= so2) {
                    cls = 1;
                    const double qc = (dx / ac) * (dx / ac) + (dy / bc) * (dy / bc);
                    if (sc2 > 0.0 && qc <= sc2) cls = 2;

                    // carved space: urethral channel and cavity live inside
                    // the central zone's extent; perforation patches may
                    // push past its boundary into the shell
                    if (sc > 0.0) {
                        const double rho = std::hypot(dx, dy);
                        const double theta = std::atan2(dy, dx);
                        const double central_edge = sc * ellipse_radius(ac, bc, theta);
                        double r_carve = std::min(spec.channel_radius_mm, central_edge);
                        if (spec.resection) {
                            const double r_cav = cavity_profile[k] *
                                                 (1.0 + jag_amp * jag.eval(theta, z));
                            r_carve = std::max(r_carve, std::min(r_cav, central_edge));
                            for (const auto& p : spec.resection->patches) {
                                if (k < p.slice_begin || k >= p.slice_end) continue;
                                if (theta < p.angle_begin || theta > p.angle_end) continue;
                                const double outer_edge =
                                    std::sqrt(so2) * ellipse_radius(ao, bo, theta);
                                r_carve = std::max(
                                    r_carve, std::min(central_edge + p.depth_mm, outer_edge));
                            }
                        }
                        if (rho <= r_carve) cls = 3;
                    }
                }
                label.at(x, y) = cls;
            }
        }

        // render: class intensity times log-normal speckle (mean one)
        Image8& img = stack.slices[k];
        if (spec.speckle_sigma <= 0.0) {
            for (std::size_t i = 0; i < label.size(); ++i)
                img.pixels()[i] =
                    static_cast<std::uint8_t>(spec.intensities[label.pixels()[i]]);
        } else {
            std::mt19937_64 rng(mix_seed(spec.seed, 0x5eed0000ULL + k));
            const double sigma = spec.speckle_sigma;
            for (std::size_t i = 0; i < label.size(); ++i) {
                const double gain = std::exp(sigma * normal01(rng) - 0.5 * sigma * sigma);
                const double v = std::round(spec.intensities[label.pixels()[i]] * gain);
                img.pixels()[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
            }
        }
    }

    return {std::move(stack), std::move(vol)};
}

double ellipsoid_volume_mm3(const std::array<double, 3>& radii) {
    return 4.0 / 3.0 * kPi * radii[0] * radii[1] * radii[2];
}

double analytic_perforation_area_mm2(const PhantomSpec& spec, const ScanManifest& manifest,
                                     int slice) {
    if (!spec.resection) return 0.0;
    const double z = (slice + 0.5) * manifest.slice_spacing_mm - 0.5 * manifest.scan_length_mm;
    const auto [ac, bc, cc] = spec.central_radii_mm;
    const auto [ao, bo, co] = spec.outer_radii_mm;
    const double sc2 = 1.0 - (z / cc) * (z / cc);
    const double so2 = 1.0 - (z / co) * (z / co);
    if (sc2 <= 0.0) return 0.0;
    const double sc = std::sqrt(sc2);
    const double so = so2 > 0.0 ? std::sqrt(so2) : 0.0;

    double area = 0.0;
    for (const auto& p : spec.resection->patches) {
        if (slice < p.slice_begin || slice >= p.slice_end) continue;
        const int steps = 2048;
        const double dt = (p.angle_end - p.angle_begin) / steps;
        for (int i = 0; i < steps; ++i) {
            const double theta = p.angle_begin + (i + 0.5) * dt;
            const double r0 = sc * ellipse_radius(ac, bc, theta);
            const double r1 = std::min(r0 + p.depth_mm, so * ellipse_radius(ao, bo, theta));
            if (r1 > r0) area += 0.5 * (r1 * r1 - r0 * r0) * dt;
        }
    }
    return area;
}

}  // namespace uscan
