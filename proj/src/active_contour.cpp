#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "uscan/image_ops.hpp"
#include "uscan/segment.hpp"

namespace uscan {

namespace {

constexpr double kMaxPxMove = 1.0;

double bilinear(const ImageF& img, double x, double y) {
    const int w = img.width(), h = img.height();
    x = std::clamp(x, 0.0, double(w - 1));
    y = std::clamp(y, 0.0, double(h - 1));
    const int x0 = std::min(int(x), w - 2 < 0 ? 0 : w - 2);
    const int y0 = std::min(int(y), h - 2 < 0 ? 0 : h - 2);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0, fy = y - y0;
    return img.at(x0, y0) * (1 - fx) * (1 - fy) + img.at(x1, y0) * fx * (1 - fy) +
           img.at(x0, y1) * (1 - fx) * fy + img.at(x1, y1) * fx * fy;
}

// Resample the closed chain to n points uniformly spaced by arc length.
void resample_closed(std::vector<double>& xs, std::vector<double>& ys, int n) {
    const std::size_t m = xs.size();
    std::vector<double> cum(m + 1, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = (i + 1) % m;
        cum[i + 1] = cum[i] + std::hypot(xs[j] - xs[i], ys[j] - ys[i]);
    }
    const double total = cum[m];
    if (total <= 0.0) return;  // collapsed chain; leave as-is

    std::vector<double> nx(n), ny(n);
    std::size_t seg = 0;
    for (int i = 0; i < n; ++i) {
        const double target = total * i / n;
        while (seg + 1 < m + 1 && cum[seg + 1] < target) ++seg;
        const std::size_t a = seg % m;
        const std::size_t b = (seg + 1) % m;
        const double span = cum[seg + 1] - cum[seg];
        const double f = span > 0.0 ? (target - cum[seg]) / span : 0.0;
        nx[i] = xs[a] + f * (xs[b] - xs[a]);
        ny[i] = ys[a] + f * (ys[b] - ys[a]);
    }
    xs = std::move(nx);
    ys = std::move(ny);
}

// (alpha * second difference + beta * fourth difference) as a periodic
// matrix; the semi-implicit step solves (A + gamma I) x_new = gamma x + f.
Eigen::MatrixXd internal_energy_inverse(int n, const SnakeParams& p) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        auto w = [&](Eigen::MatrixXd& m, int off, double v) {
            m(i, ((i + off) % n + n) % n) += v;
        };
        w(a, -1, 1.0); w(a, 0, -2.0); w(a, 1, 1.0);
        w(b, -2, 1.0); w(b, -1, -4.0); w(b, 0, 6.0); w(b, 1, -4.0); w(b, 2, 1.0);
    }
    const Eigen::MatrixXd A = -p.alpha * a + p.beta * b;
    return (A + p.gamma * Eigen::MatrixXd::Identity(n, n)).inverse();
}

}  // namespace

Contour rect_contour(const Rect& r, int n_points) {
    if (n_points < 4) throw TooFewPoints("rectangle contour needs at least 4 points");
    const double per = 2.0 * (r.w + r.h);
    std::vector<Vec2> pts;
    pts.reserve(n_points);
    for (int i = 0; i < n_points; ++i) {
        double t = per * i / n_points;
        Vec2 p;
        if (t < r.w) p = {r.x + t, r.y};
        else if ((t -= r.w) < r.h) p = {r.x + r.w, r.y + t};
        else if ((t -= r.h) < r.w) p = {r.x + r.w - t, r.y + r.h};
        else p = {r.x, r.y + r.h - (t - r.w)};
        pts.push_back(p);
    }
    return Contour(std::move(pts));
}

Contour active_contour(const Image8& image, const Contour& init, const SnakeParams& params,
                       double gauss_sigma, bool* converged) {
    if (init.size() < 4) throw TooFewPoints("snake init needs at least 4 points");
    if (params.n_points < 4) throw TooFewPoints("snake needs at least 4 points");
    if (image.empty()) throw Error("active_contour: empty image");

    // Edge attraction: gradient magnitude of the smoothed image. The edge
    // map is smoothed again before differentiation so the bilinearly
    // sampled force field has no traps at pixel boundaries.
    const ImageF smooth = gaussian_blur(to_float(image, 1.0 / 255.0), gauss_sigma);
    const ImageF edge = gaussian_blur(gradient_magnitude(smooth), 1.0);
    const auto [fx, fy] = sobel(edge);

    const int n = params.n_points;
    std::vector<double> xs(n), ys(n);
    {
        std::vector<double> ix, iy;
        for (const auto& p : init.points()) {
            ix.push_back(p.x);
            iy.push_back(p.y);
        }
        resample_closed(ix, iy, n);
        xs = std::move(ix);
        ys = std::move(iy);
    }

    const Eigen::MatrixXd inv = internal_energy_inverse(n, params);
    Eigen::VectorXd x(n), y(n), gx(n), gy(n);
    for (int i = 0; i < n; ++i) { x[i] = xs[i]; y[i] = ys[i]; }

    // The displacement check compares against a short history of recent
    // states, so slow limit cycles (resampling slides points tangentially)
    // still count as converged.
    constexpr int kHistory = 10;
    std::vector<std::vector<double>> hist_x, hist_y;

    bool did_converge = false;
    for (int iter = 0; iter < params.max_iters; ++iter) {
        for (int i = 0; i < n; ++i) {
            const double rx = bilinear(fx, x[i], y[i]);
            const double ry = bilinear(fy, x[i], y[i]);
            // keep only the normal component; tangential force just slides
            // points along the chain and fights the resampling
            const int prev = (i + n - 1) % n, next = (i + 1) % n;
            double tx = x[next] - x[prev], ty = y[next] - y[prev];
            const double tlen = std::hypot(tx, ty);
            if (tlen > 1e-12) {
                tx /= tlen;
                ty /= tlen;
                const double tangential = rx * tx + ry * ty;
                gx[i] = rx - tangential * tx;
                gy[i] = ry - tangential * ty;
            } else {
                gx[i] = rx;
                gy[i] = ry;
            }
        }
        const Eigen::VectorXd xn = inv * (params.gamma * x + gx);
        const Eigen::VectorXd yn = inv * (params.gamma * y + gy);

        double max_step = 0.0;
        for (int i = 0; i < n; ++i) {
            const double dx = kMaxPxMove * std::tanh(xn[i] - x[i]);
            const double dy = kMaxPxMove * std::tanh(yn[i] - y[i]);
            x[i] = std::clamp(x[i] + dx, 0.0, double(image.width() - 1));
            y[i] = std::clamp(y[i] + dy, 0.0, double(image.height() - 1));
            max_step = std::max(max_step, std::max(std::abs(dx), std::abs(dy)));
        }
        if (!std::isfinite(max_step))
            throw NonFiniteEnergy("snake evolution produced non-finite displacement");

        // keep the chain uniformly sampled while it deforms
        for (int i = 0; i < n; ++i) { xs[i] = x[i]; ys[i] = y[i]; }
        resample_closed(xs, ys, n);
        for (int i = 0; i < n; ++i) { x[i] = xs[i]; y[i] = ys[i]; }

        double max_disp = max_step;
        for (std::size_t h = 0; h < hist_x.size(); ++h) {
            double d = 0.0;
            for (int i = 0; i < n; ++i)
                d = std::max(d, std::max(std::abs(x[i] - hist_x[h][i]),
                                         std::abs(y[i] - hist_y[h][i])));
            max_disp = std::min(max_disp, d);
        }
        if (hist_x.size() >= kHistory) {
            hist_x.erase(hist_x.begin());
            hist_y.erase(hist_y.begin());
        }
        hist_x.push_back(xs);
        hist_y.push_back(ys);

        if (max_disp < params.convergence_tol) {
            did_converge = true;
            break;
        }
    }
    if (converged) *converged = did_converge;

    std::vector<Vec2> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back({xs[i], ys[i]});
    return Contour(std::move(out));
}

}  // namespace uscan
