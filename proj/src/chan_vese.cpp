#include <array>
#include <cmath>

#include "uscan/image_ops.hpp"
#include "uscan/segment.hpp"

namespace uscan {

namespace {

// Four length-3 line segments through the center pixel: -, |, \, /.
constexpr std::array<std::array<std::array<int, 2>, 3>, 4> kLines{{
    {{{-1, 0}, {0, 0}, {1, 0}}},
    {{{0, -1}, {0, 0}, {0, 1}}},
    {{{-1, -1}, {0, 0}, {1, 1}}},
    {{{-1, 1}, {0, 0}, {1, -1}}},
}};

// sup-inf: pixel survives if some line through it is fully set.
// inf-sup: pixel appears if every line through it touches the set.
// Out-of-bounds samples fall back to the center value so borders do not
// bias the operator.
template <bool kSupInf>
Mask2D line_morph(const Mask2D& u) {
    const int w = u.width(), h = u.height();
    Mask2D out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint8_t center = u.at(x, y);
            std::uint8_t acc = kSupInf ? 0 : 1;
            for (const auto& line : kLines) {
                std::uint8_t line_val = kSupInf ? 1 : 0;
                for (const auto& d : line) {
                    const int nx = x + d[0], ny = y + d[1];
                    const std::uint8_t v =
                        (nx >= 0 && ny >= 0 && nx < w && ny < h) ? u.at(nx, ny) : center;
                    if constexpr (kSupInf)
                        line_val = std::min(line_val, v);  // inf along the line
                    else
                        line_val = std::max(line_val, v);  // sup along the line
                }
                if constexpr (kSupInf)
                    acc = std::max(acc, line_val);
                else
                    acc = std::min(acc, line_val);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

Mask2D sup_inf(const Mask2D& u) { return line_morph<true>(u); }
Mask2D inf_sup(const Mask2D& u) { return line_morph<false>(u); }

double region_energy(const ImageF& img, const Mask2D& u, const Mask2D* domain,
                     double c1, double c2) {
    double e = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (domain && !domain->pixels()[i]) continue;
        const double d = img.pixels()[i] - (u.pixels()[i] ? c1 : c2);
        e += d * d;
    }
    return e;
}

}  // namespace

ChanVeseResult morph_chan_vese(const Image8& image, const Mask2D& init_mask,
                               const ChanVeseParams& cfg, const Mask2D* domain) {
    if (image.width() != init_mask.width() || image.height() != init_mask.height())
        throw DimensionMismatch("chan-vese init mask size differs from image");
    if (domain &&
        (domain->width() != image.width() || domain->height() != image.height()))
        throw DimensionMismatch("chan-vese domain size differs from image");

    const ImageF img = to_float(image);
    const std::size_t npix = image.size();

    Mask2D u = init_mask;
    if (domain)
        for (std::size_t i = 0; i < npix; ++i)
            if (!domain->pixels()[i]) u.pixels()[i] = 0;

    std::size_t inside = 0, total = 0;
    for (std::size_t i = 0; i < npix; ++i) {
        if (domain && !domain->pixels()[i]) continue;
        ++total;
        inside += u.pixels()[i] ? 1 : 0;
    }
    if (inside == 0 || inside == total)
        throw DegenerateInit("chan-vese init mask is empty or covers the whole domain");

    auto means = [&](const Mask2D& m) {
        double s1 = 0.0, s2 = 0.0;
        std::size_t n1 = 0, n2 = 0;
        for (std::size_t i = 0; i < npix; ++i) {
            if (domain && !domain->pixels()[i]) continue;
            if (m.pixels()[i]) { s1 += img.pixels()[i]; ++n1; }
            else { s2 += img.pixels()[i]; ++n2; }
        }
        return std::pair<double, double>{n1 ? s1 / n1 : 0.0, n2 ? s2 / n2 : 0.0};
    };

    {
        const auto [c1, c2] = means(u);
        if (std::abs(c1 - c2) <= 1.0)
            throw NoContrast("region means differ by no more than one gray level");
    }

    ChanVeseResult res;
    Mask2D prev1 = u, prev2 = u;
    const int w = image.width(), h = image.height();
    long curv_calls = 0;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        const auto [c1, c2] = means(u);

        // flip boundary pixels by the sign of the region attraction
        Mask2D next = u;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (domain && !domain->at(x, y)) continue;
                const std::uint8_t c = u.at(x, y);
                const int gx = (x + 1 < w ? u.at(x + 1, y) : c) - (x > 0 ? u.at(x - 1, y) : c);
                const int gy = (y + 1 < h ? u.at(x, y + 1) : c) - (y > 0 ? u.at(x, y - 1) : c);
                if (gx == 0 && gy == 0) continue;
                const double I = img.at(x, y);
                const double aux = cfg.lambda1 * (I - c1) * (I - c1) -
                                   cfg.lambda2 * (I - c2) * (I - c2);
                if (aux < 0.0) next.at(x, y) = 1;
                else if (aux > 0.0) next.at(x, y) = 0;
            }
        }

        // alternating morphological curvature smoothing
        for (int s = 0; s < cfg.smoothing_passes; ++s) {
            if (curv_calls++ % 2 == 0)
                next = sup_inf(inf_sup(next));
            else
                next = inf_sup(sup_inf(next));
            if (domain)
                for (std::size_t i = 0; i < npix; ++i)
                    if (!domain->pixels()[i]) next.pixels()[i] = 0;
        }

        u = std::move(next);
        res.iterations = iter + 1;
        {
            const auto [e1, e2] = means(u);
            res.energy.push_back(region_energy(img, u, domain, e1, e2));
        }

        // fixpoint or 2-cycle from the alternating smoothing
        if (u == prev1 || u == prev2) {
            res.converged = true;
            break;
        }
        prev2 = std::move(prev1);
        prev1 = u;
    }

    res.mask = std::move(u);
    return res;
}

}  // namespace uscan
