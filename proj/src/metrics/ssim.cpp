#include "swapforge/metrics/ssim.hpp"

#include <cmath>
#include <string>

#include "swapforge/errors.hpp"

namespace swapforge::metrics {

void SsimParams::validate() const {
    if (window < 3 || window % 2 == 0) throw InvalidArgument("SsimParams: window must be odd and >= 3");
    if (!(sigma > 0.0)) throw InvalidArgument("SsimParams: sigma must be positive");
    if (!(dynamic_range > 0.0)) throw InvalidArgument("SsimParams: dynamic_range must be positive");
}

std::vector<double> gaussian_taps(int window, double sigma) {
    std::vector<double> g(window);
    const int r = window / 2;
    double sum = 0.0;
    for (int i = 0; i < window; ++i) {
        g[i] = std::exp(-static_cast<double>((i - r) * (i - r)) / (2.0 * sigma * sigma));
        sum += g[i];
    }
    for (double& v : g) v /= sum;
    return g;
}

namespace detail {

namespace {

// Separable valid-mode correlation: (h, w) -> (h-k+1, w-k+1).
void filter_valid(std::span<const double> in, int h, int w, const std::vector<double>& g, std::vector<double>& tmp,
                  std::vector<double>& out) {
    const int k = static_cast<int>(g.size());
    const int oh = h - k + 1, ow = w - k + 1;
    tmp.assign(static_cast<std::size_t>(h) * ow, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            const double* row = in.data() + static_cast<std::size_t>(y) * w + x;
            for (int t = 0; t < k; ++t) s += g[t] * row[t];
            tmp[static_cast<std::size_t>(y) * ow + x] = s;
        }
    out.assign(static_cast<std::size_t>(oh) * ow, 0.0);
    for (int y = 0; y < oh; ++y)
        for (int t = 0; t < k; ++t) {
            const double gt = g[t];
            const double* row = tmp.data() + static_cast<std::size_t>(y + t) * ow;
            double* o = out.data() + static_cast<std::size_t>(y) * ow;
            for (int x = 0; x < ow; ++x) o[x] += gt * row[x];
        }
}

// Adjoint of filter_valid: (h-k+1, w-k+1) -> (h, w), scattered.
void filter_valid_adjoint(const std::vector<double>& in, int h, int w, const std::vector<double>& g,
                          std::vector<double>& tmp, std::vector<double>& out) {
    const int k = static_cast<int>(g.size());
    const int oh = h - k + 1, ow = w - k + 1;
    tmp.assign(static_cast<std::size_t>(h) * ow, 0.0);
    for (int y = 0; y < oh; ++y)
        for (int t = 0; t < k; ++t) {
            const double gt = g[t];
            const double* src = in.data() + static_cast<std::size_t>(y) * ow;
            double* dst = tmp.data() + static_cast<std::size_t>(y + t) * ow;
            for (int x = 0; x < ow; ++x) dst[x] += gt * src[x];
        }
    out.assign(static_cast<std::size_t>(h) * w, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            const double v = tmp[static_cast<std::size_t>(y) * ow + x];
            double* dst = out.data() + static_cast<std::size_t>(y) * w + x;
            for (int t = 0; t < k; ++t) dst[t] += g[t] * v;
        }
}

}  // namespace

double ssim_plane(std::span<const double> x, std::span<const double> y, int height, int width, const SsimParams& p,
                  std::span<double> grad_x, std::span<double> grad_y, double grad_scale) {
    const std::vector<double> g = gaussian_taps(p.window, p.sigma);
    const std::size_t n = static_cast<std::size_t>(height) * width;
    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    std::vector<double> tmp, mx, my, mxx, myy, mxy;
    filter_valid(x, height, width, g, tmp, mx);
    filter_valid(y, height, width, g, tmp, my);
    filter_valid(xx, height, width, g, tmp, mxx);
    filter_valid(yy, height, width, g, tmp, myy);
    filter_valid(xy, height, width, g, tmp, mxy);

    const double c1 = p.c1(), c2 = p.c2();
    const std::size_t m = mx.size();
    const bool want_grad = !grad_x.empty() || !grad_y.empty();
    std::vector<double> g_mx, g_my, g_mxx, g_myy, g_mxy;
    if (want_grad) {
        g_mx.resize(m);
        g_my.resize(m);
        g_mxx.resize(m);
        g_myy.resize(m);
        g_mxy.resize(m);
    }
    const double inv_m = 1.0 / static_cast<double>(m);
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double ux = mx[i], uy = my[i];
        const double vx = mxx[i] - ux * ux;
        const double vy = myy[i] - uy * uy;
        const double cxy = mxy[i] - ux * uy;
        const double a1 = 2.0 * ux * uy + c1, a2 = 2.0 * cxy + c2;
        const double b1 = ux * ux + uy * uy + c1, b2 = vx + vy + c2;
        const double s = (a1 * a2) / (b1 * b2);
        sum += s;
        if (want_grad) {
            // Partials of s w.r.t. the raw moments E[x], E[y], E[x^2], E[y^2], E[xy].
            const double w = grad_scale * inv_m;
            g_mx[i] = w * s * (2.0 * uy / a1 - 2.0 * uy / a2 - 2.0 * ux / b1 + 2.0 * ux / b2);
            g_my[i] = w * s * (2.0 * ux / a1 - 2.0 * ux / a2 - 2.0 * uy / b1 + 2.0 * uy / b2);
            g_mxx[i] = w * s * (-1.0 / b2);
            g_myy[i] = w * s * (-1.0 / b2);
            g_mxy[i] = w * s * (2.0 / a2);
        }
    }
    if (want_grad) {
        std::vector<double> bmx, bmy, bmxx, bmyy, bmxy;
        filter_valid_adjoint(g_mx, height, width, g, tmp, bmx);
        filter_valid_adjoint(g_my, height, width, g, tmp, bmy);
        filter_valid_adjoint(g_mxx, height, width, g, tmp, bmxx);
        filter_valid_adjoint(g_myy, height, width, g, tmp, bmyy);
        filter_valid_adjoint(g_mxy, height, width, g, tmp, bmxy);
        for (std::size_t i = 0; i < n; ++i) {
            if (!grad_x.empty()) grad_x[i] += bmx[i] + 2.0 * x[i] * bmxx[i] + y[i] * bmxy[i];
            if (!grad_y.empty()) grad_y[i] += bmy[i] + 2.0 * y[i] * bmyy[i] + x[i] * bmxy[i];
        }
    }
    return sum * inv_m;
}

}  // namespace detail

double ssim(const imaging::ImageBuf& x, const imaging::ImageBuf& y, const SsimParams& p) {
    p.validate();
    if (!x.same_shape(y)) throw InvalidArgument("ssim: shape mismatch");
    if (x.height() < p.window || x.width() < p.window) {
        throw InvalidArgument("ssim: window " + std::to_string(p.window) + " larger than image");
    }
    double total = 0.0;
    std::vector<double> xd(x.plane_size()), yd(x.plane_size());
    for (int c = 0; c < x.channels(); ++c) {
        auto xp = x.plane(c), yp = y.plane(c);
        for (std::size_t i = 0; i < xd.size(); ++i) {
            xd[i] = xp[i];
            yd[i] = yp[i];
        }
        total += detail::ssim_plane(xd, yd, x.height(), x.width(), p);
    }
    return total / x.channels();
}

double dssim(const imaging::ImageBuf& x, const imaging::ImageBuf& y, const SsimParams& p) {
    return (1.0 - ssim(x, y, p)) / 2.0;
}

}  // namespace swapforge::metrics
