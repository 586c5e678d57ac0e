#include "uscan/image_ops.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

namespace uscan {

namespace {

int reflect(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

// Sliding-window min or max along rows, window [x-r, x+r], clamped at the
// image edge. Monotonic deque, O(width) per row.
template <bool kMin>
void row_filter(const std::uint8_t* src, std::uint8_t* dst, int w, int r) {
    std::deque<int> q;
    auto better = [](std::uint8_t a, std::uint8_t b) { return kMin ? a <= b : a >= b; };
    int right = 0;
    for (int x = 0; x < w; ++x) {
        for (; right <= std::min(x + r, w - 1); ++right) {
            while (!q.empty() && better(src[right], src[q.back()])) q.pop_back();
            q.push_back(right);
        }
        while (q.front() < x - r) q.pop_front();
        dst[x] = src[q.front()];
    }
}

std::vector<int> disk_half_widths(int radius) {
    std::vector<int> hw(radius + 1);
    for (int dy = 0; dy <= radius; ++dy)
        hw[dy] = static_cast<int>(std::floor(std::sqrt(
            double(radius) * radius - double(dy) * dy)));
    return hw;
}

template <bool kMin>
Image8 disk_filter(const Image8& img, int radius) {
    if (radius < 1) throw BadRadius("disk radius must be >= 1");
    const int w = img.width(), h = img.height();
    const auto hw = disk_half_widths(radius);

    // Row-filtered copies per distinct half-width, shared across rows.
    std::map<int, Image8> by_halfwidth;
    for (int v : hw) {
        if (by_halfwidth.count(v)) continue;
        Image8 f(w, h);
        for (int y = 0; y < h; ++y)
            row_filter<kMin>(&img.at(0, y), &f.at(0, y), w, v);
        by_halfwidth.emplace(v, std::move(f));
    }

    Image8 out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t acc = kMin ? 255 : 0;
            for (int dy = -radius; dy <= radius; ++dy) {
                const int yy = std::clamp(y + dy, 0, h - 1);
                const std::uint8_t v = by_halfwidth.at(hw[std::abs(dy)]).at(x, yy);
                acc = kMin ? std::min(acc, v) : std::max(acc, v);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

}  // namespace

ImageF to_float(const Image8& img, double scale) {
    ImageF out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i)
        out.pixels()[i] = img.pixels()[i] * scale;
    return out;
}

Image8 to_u8_clamped(const ImageF& img) {
    Image8 out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double v = std::round(img.pixels()[i]);
        out.pixels()[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
    return out;
}

ImageF gaussian_blur(const ImageF& img, double sigma) {
    if (sigma <= 0.0) return img;
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i / sigma) * (i / sigma));
        sum += kernel[i + radius];
    }
    for (auto& k : kernel) k /= sum;

    const int w = img.width(), h = img.height();
    ImageF tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * img.at(reflect(x + i, w), y);
            tmp.at(x, y) = acc;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i)
                acc += kernel[i + radius] * tmp.at(x, reflect(y + i, h));
            out.at(x, y) = acc;
        }
    return out;
}

std::pair<ImageF, ImageF> sobel(const ImageF& img) {
    const int w = img.width(), h = img.height();
    ImageF gx(w, h), gy(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            auto s = [&](int dx, int dy) {
                return img.at(reflect(x + dx, w), reflect(y + dy, h));
            };
            gx.at(x, y) = ((s(1, -1) + 2 * s(1, 0) + s(1, 1)) -
                           (s(-1, -1) + 2 * s(-1, 0) + s(-1, 1))) / 8.0;
            gy.at(x, y) = ((s(-1, 1) + 2 * s(0, 1) + s(1, 1)) -
                           (s(-1, -1) + 2 * s(0, -1) + s(1, -1))) / 8.0;
        }
    }
    return {std::move(gx), std::move(gy)};
}

ImageF gradient_magnitude(const ImageF& img) {
    auto [gx, gy] = sobel(img);
    ImageF out(img.width(), img.height());
    for (std::size_t i = 0; i < out.size(); ++i)
        out.pixels()[i] = std::hypot(gx.pixels()[i], gy.pixels()[i]);
    return out;
}

Image8 erode_disk(const Image8& img, int radius) { return disk_filter<true>(img, radius); }
Image8 dilate_disk(const Image8& img, int radius) { return disk_filter<false>(img, radius); }

Image8 open_disk(const Image8& img, int radius) {
    return dilate_disk(erode_disk(img, radius), radius);
}
Image8 close_disk(const Image8& img, int radius) {
    return erode_disk(dilate_disk(img, radius), radius);
}

Mask2D flood_fill(const Image8& img, int seed_x, int seed_y, int tolerance) {
    if (!img.in_bounds(seed_x, seed_y))
        throw SeedOutOfBounds("flood fill seed (" + std::to_string(seed_x) + ", " +
                              std::to_string(seed_y) + ") outside image");
    const int w = img.width(), h = img.height();
    const int seed_val = img.at(seed_x, seed_y);
    Mask2D out(w, h);
    std::vector<std::pair<int, int>> stack{{seed_x, seed_y}};
    out.at(seed_x, seed_y) = 1;
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        constexpr int dx[] = {1, -1, 0, 0};
        constexpr int dy[] = {0, 0, 1, -1};
        for (int k = 0; k < 4; ++k) {
            const int nx = x + dx[k], ny = y + dy[k];
            if (!img.in_bounds(nx, ny) || out.at(nx, ny)) continue;
            if (std::abs(int(img.at(nx, ny)) - seed_val) <= tolerance) {
                out.at(nx, ny) = 1;
                stack.emplace_back(nx, ny);
            }
        }
    }
    return out;
}

Mask2D dilate_mask(const Mask2D& mask, int steps) {
    Mask2D cur = mask;
    for (int s = 0; s < steps; ++s) {
        Mask2D next = cur;
        for (int y = 0; y < cur.height(); ++y)
            for (int x = 0; x < cur.width(); ++x) {
                if (cur.at(x, y)) continue;
                if ((x > 0 && cur.at(x - 1, y)) || (x + 1 < cur.width() && cur.at(x + 1, y)) ||
                    (y > 0 && cur.at(x, y - 1)) || (y + 1 < cur.height() && cur.at(x, y + 1)))
                    next.at(x, y) = 1;
            }
        cur = std::move(next);
    }
    return cur;
}

Mask2D erode_mask(const Mask2D& mask, int steps) {
    Mask2D cur = mask;
    for (int s = 0; s < steps; ++s) {
        Mask2D next = cur;
        for (int y = 0; y < cur.height(); ++y)
            for (int x = 0; x < cur.width(); ++x) {
                if (!cur.at(x, y)) continue;
                const bool border = x == 0 || y == 0 || x + 1 == cur.width() ||
                                    y + 1 == cur.height();
                if (border || !cur.at(x - 1, y) || !cur.at(x + 1, y) ||
                    !cur.at(x, y - 1) || !cur.at(x, y + 1))
                    next.at(x, y) = 0;
            }
        cur = std::move(next);
    }
    return cur;
}

std::pair<Image2D<int>, std::vector<std::size_t>> connected_components(const Mask2D& mask) {
    const int w = mask.width(), h = mask.height();
    Image2D<int> labels(w, h, 0);
    std::vector<std::size_t> counts{0};  // index 0 unused
    int next = 0;
    std::vector<std::pair<int, int>> stack;
    for (int y0 = 0; y0 < h; ++y0) {
        for (int x0 = 0; x0 < w; ++x0) {
            if (!mask.at(x0, y0) || labels.at(x0, y0)) continue;
            ++next;
            counts.push_back(0);
            stack.assign(1, {x0, y0});
            labels.at(x0, y0) = next;
            while (!stack.empty()) {
                auto [x, y] = stack.back();
                stack.pop_back();
                ++counts[next];
                constexpr int dx[] = {1, -1, 0, 0};
                constexpr int dy[] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nx = x + dx[k], ny = y + dy[k];
                    if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                    if (!mask.at(nx, ny) || labels.at(nx, ny)) continue;
                    labels.at(nx, ny) = next;
                    stack.emplace_back(nx, ny);
                }
            }
        }
    }
    return {std::move(labels), std::move(counts)};
}

Mask2D largest_component(const Mask2D& mask) {
    auto [labels, counts] = connected_components(mask);
    Mask2D out(mask.width(), mask.height());
    if (counts.size() <= 1) return out;
    const int best = static_cast<int>(
        std::max_element(counts.begin() + 1, counts.end()) - counts.begin());
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            out.at(x, y) = labels.at(x, y) == best ? 1 : 0;
    return out;
}

Mask2D fill_holes(const Mask2D& mask) {
    const int w = mask.width(), h = mask.height();
    // flood the zero region reachable from the border
    Mask2D outside(w, h);
    std::vector<std::pair<int, int>> stack;
    auto push = [&](int x, int y) {
        if (x < 0 || y < 0 || x >= w || y >= h) return;
        if (mask.at(x, y) || outside.at(x, y)) return;
        outside.at(x, y) = 1;
        stack.emplace_back(x, y);
    };
    for (int x = 0; x < w; ++x) { push(x, 0); push(x, h - 1); }
    for (int y = 0; y < h; ++y) { push(0, y); push(w - 1, y); }
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        push(x + 1, y); push(x - 1, y); push(x, y + 1); push(x, y - 1);
    }
    Mask2D out(w, h);
    for (std::size_t i = 0; i < out.size(); ++i)
        out.pixels()[i] = (mask.pixels()[i] || !outside.pixels()[i]) ? 1 : 0;
    return out;
}

Mask2D rasterize_contour(const Contour& contour, int width, int height) {
    Mask2D out(width, height);
    const auto& pts = contour.points();
    const std::size_t n = pts.size();

    double ymin = pts[0].y, ymax = pts[0].y;
    for (const auto& p : pts) { ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y); }
    const int y0 = std::max(0, static_cast<int>(std::ceil(ymin)));
    const int y1 = std::min(height - 1, static_cast<int>(std::floor(ymax)));

    std::vector<double> xs;
    for (int y = y0; y <= y1; ++y) {
        xs.clear();
        const double fy = y;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2& a = pts[i];
            const Vec2& b = pts[(i + 1) % n];
            if ((a.y > fy) == (b.y > fy)) continue;  // half-open rule
            xs.push_back(a.x + (fy - a.y) / (b.y - a.y) * (b.x - a.x));
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
            const int xa = std::max(0, static_cast<int>(std::ceil(xs[i])));
            const int xb = std::min(width - 1, static_cast<int>(std::floor(xs[i + 1])));
            for (int x = xa; x <= xb; ++x) out.at(x, y) = 1;
        }
    }
    return out;
}

std::vector<std::vector<Vec2>> trace_boundaries(const Mask2D& mask) {
    // Marching squares on the padded mask. Cell (cx, cy) has the pixels
    // (cx-1, cy-1) .. (cx, cy) at its corners; crossings sit halfway
    // between pixel centers. Ambiguous saddles are split (no diagonal
    // connection), which matches 4-connected regions.
    const int w = mask.width(), h = mask.height();
    auto val = [&](int x, int y) -> int {
        return (x >= 0 && y >= 0 && x < w && y < h) ? (mask.at(x, y) ? 1 : 0) : 0;
    };

    // Directed segment per cell edge pattern, keyed by cell; each segment
    // goes from one cell-edge midpoint to another. We store segments as
    // (from, to) with the inside region kept on the left.
    struct Seg { Vec2 a, b; };
    std::map<std::pair<int, int>, std::vector<Seg>> segs_by_cell;

    for (int cy = 0; cy <= h; ++cy) {
        for (int cx = 0; cx <= w; ++cx) {
            const int tl = val(cx - 1, cy - 1), tr = val(cx, cy - 1);
            const int bl = val(cx - 1, cy), br = val(cx, cy);
            const int code = tl | (tr << 1) | (bl << 2) | (br << 3);
            if (code == 0 || code == 15) continue;

            // midpoints of the four cell edges, pixel-center coordinates
            const Vec2 top{cx - 0.5, cy - 1.0};
            const Vec2 bottom{cx - 0.5, double(cy)};
            const Vec2 left{cx - 1.0, cy - 0.5};
            const Vec2 right{double(cx), cy - 0.5};

            auto add = [&](Vec2 a, Vec2 b) {
                segs_by_cell[{cx, cy}].push_back({a, b});
            };
            switch (code) {
                case 1:  add(left, top); break;
                case 2:  add(top, right); break;
                case 3:  add(left, right); break;
                case 4:  add(bottom, left); break;
                case 5:  add(bottom, top); break;
                case 6:  add(top, right); add(bottom, left); break;  // split saddle
                case 7:  add(bottom, right); break;
                case 8:  add(right, bottom); break;
                case 9:  add(left, top); add(right, bottom); break;  // split saddle
                case 10: add(top, bottom); break;
                case 11: add(left, bottom); break;
                case 12: add(right, left); break;
                case 13: add(right, top); break;
                case 14: add(top, left); break;
                default: break;
            }
        }
    }

    // Chain segments into closed loops by matching endpoints.
    std::map<std::pair<long long, long long>, std::vector<std::pair<Vec2, bool>>> start_index;
    auto key = [](const Vec2& p) {
        return std::make_pair(static_cast<long long>(std::llround(p.x * 2)),
                              static_cast<long long>(std::llround(p.y * 2)));
    };
    std::vector<Seg> all;
    for (auto& [cell, v] : segs_by_cell)
        for (auto& s : v) all.push_back(s);

    std::map<std::pair<long long, long long>, std::vector<std::size_t>> by_start;
    for (std::size_t i = 0; i < all.size(); ++i) by_start[key(all[i].a)].push_back(i);

    std::vector<bool> used(all.size(), false);
    std::vector<std::vector<Vec2>> loops;
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (used[i]) continue;
        std::vector<Vec2> loop;
        std::size_t cur = i;
        while (!used[cur]) {
            used[cur] = true;
            loop.push_back(all[cur].a);
            const auto k = key(all[cur].b);
            auto it = by_start.find(k);
            std::size_t next = all.size();
            if (it != by_start.end())
                for (auto cand : it->second)
                    if (!used[cand]) { next = cand; break; }
            if (next == all.size()) break;  // loop closed (back to start)
            cur = next;
        }
        if (loop.size() >= 4) loops.push_back(std::move(loop));
    }
    return loops;
}

std::optional<Contour> boundary_contour(const Mask2D& mask) {
    const Mask2D big = largest_component(mask);
    auto loops = trace_boundaries(big);
    if (loops.empty()) return std::nullopt;
    // outer boundary = loop with the largest absolute area
    double best_area = -1.0;
    std::size_t best = 0;
    for (std::size_t i = 0; i < loops.size(); ++i) {
        double acc = 0.0;
        const auto& lp = loops[i];
        for (std::size_t j = 0; j < lp.size(); ++j) {
            const Vec2& a = lp[j];
            const Vec2& b = lp[(j + 1) % lp.size()];
            acc += a.x * b.y - b.x * a.y;
        }
        if (std::abs(acc) * 0.5 > best_area) {
            best_area = std::abs(acc) * 0.5;
            best = i;
        }
    }
    try {
        return Contour(loops[best]);
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::vector<Vec2> convex_hull_points(const Mask2D& mask) {
    std::vector<Vec2> pts;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (mask.at(x, y)) pts.push_back({double(x), double(y)});
    if (pts.size() < 3) return {};
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    };
    std::vector<Vec2> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
        hull[k++] = *it;
    }
    hull.resize(k - 1);
    return hull;
}

bool inside_convex(const std::vector<Vec2>& hull, const Vec2& p) {
    if (hull.size() < 3) return false;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Vec2& a = hull[i];
        const Vec2& b = hull[(i + 1) % hull.size()];
        if ((b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x) < -1e-9)
            return false;
    }
    return true;
}

double mean_gray(const Image8& img) {
    if (img.empty()) return 0.0;
    std::size_t acc = 0;
    for (auto v : img.pixels()) acc += v;
    return double(acc) / double(img.size());
}

}  // namespace uscan
