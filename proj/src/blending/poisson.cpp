#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "swapforge/blending/blending.hpp"
#include "swapforge/errors.hpp"
#include "swapforge/imaging/morphology.hpp"

namespace swapforge::blending {

void SolverParams::validate() const {
    if (!(tol > 0.0)) throw InvalidArgument("SolverParams: tol must be > 0");
}

namespace {

constexpr int kDy[4] = {-1, 1, 0, 0};
constexpr int kDx[4] = {0, 0, -1, 1};

struct Region {
    int h = 0, w = 0;
    std::vector<int> index;            // pixel -> unknown, -1 outside
    std::vector<std::size_t> pixels;   // unknown -> pixel
    std::vector<std::array<int, 4>> nbr;  // unknown -> neighbouring unknown or -1
};

Region build_region(const imaging::MaskBuf& mask) {
    Region r;
    r.h = mask.height();
    r.w = mask.width();
    r.index.assign(mask.size(), -1);
    for (int y = 1; y + 1 < r.h; ++y)
        for (int x = 1; x + 1 < r.w; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * r.w + x;
            if (mask.data()[p] >= 0.5f) {
                r.index[p] = static_cast<int>(r.pixels.size());
                r.pixels.push_back(p);
            }
        }
    r.nbr.resize(r.pixels.size());
    for (std::size_t i = 0; i < r.pixels.size(); ++i) {
        const int y = static_cast<int>(r.pixels[i] / r.w), x = static_cast<int>(r.pixels[i] % r.w);
        for (int k = 0; k < 4; ++k) r.nbr[i][k] = r.index[static_cast<std::size_t>(y + kDy[k]) * r.w + x + kDx[k]];
    }
    return r;
}

// Dense view of the unknowns' bounding box with a one-pixel margin. Vectors
// live on this grid and are zero off the mask, so the operator is a plain
// masked stencil and row-major sums visit unknowns in index order.
struct Grid {
    int y0 = 0, x0 = 0, H = 0, W = 0;
    std::vector<double> mk;  // 1 on unknowns
    std::vector<std::size_t> cell;  // unknown -> grid cell
};

Grid build_grid(const Region& r) {
    Grid g;
    int y1 = 0, x1 = 0;
    g.y0 = r.h, g.x0 = r.w;
    for (std::size_t pix : r.pixels) {
        const int y = static_cast<int>(pix / r.w), x = static_cast<int>(pix % r.w);
        g.y0 = std::min(g.y0, y), g.x0 = std::min(g.x0, x);
        y1 = std::max(y1, y), x1 = std::max(x1, x);
    }
    g.y0 -= 1, g.x0 -= 1;
    g.H = y1 - g.y0 + 2, g.W = x1 - g.x0 + 2;
    g.mk.assign(static_cast<std::size_t>(g.H) * g.W, 0.0);
    g.cell.resize(r.pixels.size());
    for (std::size_t i = 0; i < r.pixels.size(); ++i) {
        const int y = static_cast<int>(r.pixels[i] / r.w), x = static_cast<int>(r.pixels[i] % r.w);
        g.cell[i] = static_cast<std::size_t>(y - g.y0) * g.W + (x - g.x0);
        g.mk[g.cell[i]] = 1.0;
    }
    return g;
}

// A x for the masked 5-point operator: 4 x_i - sum of neighbouring unknowns.
void apply_operator(const Grid& g, const std::vector<double>& x, std::vector<double>& out) {
    const std::size_t W = g.W;
    for (std::size_t y = 1; y + 1 < static_cast<std::size_t>(g.H); ++y) {
        const std::size_t row = y * W;
        const double* xc = x.data() + row;
        const double* m = g.mk.data() + row;
        double* o = out.data() + row;
        for (std::size_t c = 1; c + 1 < W; ++c)
            o[c] = m[c] * ((((4.0 * xc[c] - xc[c - W]) - xc[c + W]) - xc[c - 1]) - xc[c + 1]);
    }
}

// Four partial sums break the add latency chain.
double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    const std::size_t n = a.size(), m = n & ~std::size_t{3};
    for (std::size_t i = 0; i < m; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (std::size_t i = m; i < n; ++i) s0 += a[i] * b[i];
    return (s0 + s1) + (s2 + s3);
}

}  // namespace

imaging::ImageBuf poisson_blend(const imaging::ImageBuf& source, const imaging::ImageBuf& target,
                                const imaging::MaskBuf& mask, const SolverParams& params, SolveStats* stats) {
    params.validate();
    if (source.empty() || !source.same_shape(target)) throw InvalidArgument("poisson_blend: source/target shape mismatch");
    if (!mask.same_size(target)) throw InvalidArgument("poisson_blend: mask size differs from target");
    if (!mask.is_binary()) throw InvalidArgument("poisson_blend: mask must be binary");

    const Region r = build_region(mask);
    const std::size_t n = r.pixels.size();
    if (stats) *stats = SolveStats{n, 0, 0.0};
    imaging::ImageBuf out = target;
    if (n == 0) return out;
    const std::size_t max_iter = params.max_iter > 0 ? params.max_iter : 10 * n;
    const int w = r.w;

    const Grid g = build_grid(r);
    const std::size_t G = g.mk.size();
    std::vector<double> x(G), b(G), res(G), p(G), q(G);
    for (int c = 0; c < target.channels(); ++c) {
        const auto s = source.plane(c);
        const auto t = target.plane(c);
        std::fill(b.begin(), b.end(), 0.0);
        std::fill(res.begin(), res.end(), 0.0);
        std::fill(p.begin(), p.end(), 0.0);
        std::fill(q.begin(), q.end(), 0.0);
        // b = sum over neighbours of source differences plus Dirichlet values;
        // the initial residual uses the same difference form so that
        // source == target gives exactly zero.
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t pix = r.pixels[i];
            double bi = 0.0, ri = 0.0;
            for (int k = 0; k < 4; ++k) {
                const std::size_t qp = pix + static_cast<std::ptrdiff_t>(kDy[k]) * w + kDx[k];
                const double gs = static_cast<double>(s[pix]) - s[qp];
                bi += gs;
                if (r.nbr[i][k] < 0) bi += t[qp];
                ri += gs - (static_cast<double>(t[pix]) - t[qp]);
            }
            b[g.cell[i]] = bi;
            res[g.cell[i]] = ri;
            x[g.cell[i]] = t[pix];
        }
        const double bnorm = std::sqrt(dot(b, b));
        const double scale = bnorm > 0.0 ? bnorm : 1.0;
        double rnorm = std::sqrt(dot(res, res));
        std::size_t it = 0;
        if (rnorm / scale > params.tol) {
            // Jacobi preconditioner: the diagonal is 4 everywhere, so z = r/4
            // and z.r = |r|^2/4 exactly.
            for (std::size_t i = 0; i < G; ++i) p[i] = res[i] * 0.25;
            double rz = 0.25 * dot(res, res);
            while (it < max_iter) {
                apply_operator(g, p, q);
                const double alpha = rz / dot(p, q);
                for (std::size_t i = 0; i < G; ++i) {
                    x[i] += alpha * p[i];
                    res[i] -= alpha * q[i];
                }
                ++it;
                const double rr = dot(res, res);
                rnorm = std::sqrt(rr);
                if (rnorm / scale <= params.tol) break;
                const double rz_next = 0.25 * rr;
                const double beta = rz_next / rz;
                rz = rz_next;
                for (std::size_t i = 0; i < G; ++i) p[i] = 0.25 * res[i] + beta * p[i];
            }
            if (rnorm / scale > params.tol) {
                throw SolverFailure("poisson_blend: CG did not reach tol " + std::to_string(params.tol) + " in " +
                                        std::to_string(max_iter) + " iterations (residual " +
                                        std::to_string(rnorm / scale) + ")",
                                    rnorm / scale, it);
            }
        }
        if (stats) {
            stats->iterations += it;
            stats->residual = std::max(stats->residual, rnorm / scale);
        }
        auto o = out.plane(c);
        for (std::size_t i = 0; i < n; ++i) {
            const double v = params.clamp_output ? std::clamp(x[g.cell[i]], 0.0, 1.0) : x[g.cell[i]];
            o[r.pixels[i]] = static_cast<float>(v);
        }
    }
    return out;
}

}  // namespace swapforge::blending
