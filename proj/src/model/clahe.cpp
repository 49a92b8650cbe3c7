#include "swapforge/model/clahe.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "swapforge/errors.hpp"
#include "swapforge/imaging/color.hpp"

namespace swapforge::model {

namespace {

struct TileMap {
    bool identity = false;
    std::vector<double> lut;  // bin -> normalized value in [0,1]
};

// Equalizes a single plane of normalized values in [0,1].
std::vector<double> equalize_plane(const std::vector<double>& v, int h, int w, const ClaheParams& p) {
    const int nbins = p.bins;
    const int ty = std::min(p.tiles_y, h);
    const int tx = std::min(p.tiles_x, w);
    auto bin_of = [&](double x) { return std::clamp(static_cast<int>(x * nbins), 0, nbins - 1); };

    std::vector<TileMap> maps(static_cast<std::size_t>(ty) * tx);
    for (int by = 0; by < ty; ++by) {
        const int y0 = by * h / ty, y1 = (by + 1) * h / ty;
        for (int bx = 0; bx < tx; ++bx) {
            const int x0 = bx * w / tx, x1 = (bx + 1) * w / tx;
            std::vector<double> hist(nbins, 0.0);
            for (int y = y0; y < y1; ++y)
                for (int x = x0; x < x1; ++x) hist[bin_of(v[static_cast<std::size_t>(y) * w + x])] += 1.0;
            const double area = static_cast<double>((y1 - y0) * (x1 - x0));
            auto& m = maps[static_cast<std::size_t>(by) * tx + bx];
            const auto occupied = std::count_if(hist.begin(), hist.end(), [](double c) { return c > 0.0; });
            if (occupied <= 1) {
                m.identity = true;
                continue;
            }
            const double limit = std::max(1.0, p.clip_limit * area / nbins);
            double excess = 0.0;
            for (auto& c : hist) {
                if (c > limit) {
                    excess += c - limit;
                    c = limit;
                }
            }
            const double share = excess / nbins;
            for (auto& c : hist) c += share;
            m.lut.resize(nbins);
            double cdf = 0.0;
            for (int b = 0; b < nbins; ++b) {
                cdf += hist[b];
                m.lut[b] = std::clamp(cdf / area, 0.0, 1.0);
            }
        }
    }

    auto map_value = [&](const TileMap& m, double x) { return m.identity ? x : m.lut[bin_of(x)]; };

    std::vector<double> out(v.size());
    const double th = static_cast<double>(h) / ty;
    const double tw = static_cast<double>(w) / tx;
    for (int y = 0; y < h; ++y) {
        const double fy = (y + 0.5) / th - 0.5;
        int y0 = static_cast<int>(std::floor(fy));
        double wy = fy - y0;
        if (y0 < 0) {
            y0 = 0;
            wy = 0.0;
        }
        if (y0 >= ty - 1) {
            y0 = ty - 1;
            wy = 0.0;
        }
        const int y1 = std::min(y0 + 1, ty - 1);
        for (int x = 0; x < w; ++x) {
            const double fx = (x + 0.5) / tw - 0.5;
            int x0 = static_cast<int>(std::floor(fx));
            double wx = fx - x0;
            if (x0 < 0) {
                x0 = 0;
                wx = 0.0;
            }
            if (x0 >= tx - 1) {
                x0 = tx - 1;
                wx = 0.0;
            }
            const int x1 = std::min(x0 + 1, tx - 1);
            const double val = v[static_cast<std::size_t>(y) * w + x];
            const auto& m00 = maps[static_cast<std::size_t>(y0) * tx + x0];
            const auto& m01 = maps[static_cast<std::size_t>(y0) * tx + x1];
            const auto& m10 = maps[static_cast<std::size_t>(y1) * tx + x0];
            const auto& m11 = maps[static_cast<std::size_t>(y1) * tx + x1];
            if (m00.identity && m01.identity && m10.identity && m11.identity) {
                out[static_cast<std::size_t>(y) * w + x] = val;
                continue;
            }
            const double top = (1 - wx) * map_value(m00, val) + wx * map_value(m01, val);
            const double bot = (1 - wx) * map_value(m10, val) + wx * map_value(m11, val);
            out[static_cast<std::size_t>(y) * w + x] = (1 - wy) * top + wy * bot;
        }
    }
    return out;
}

}  // namespace

imaging::ImageBuf clahe(const imaging::ImageBuf& img, const ClaheParams& p) {
    if (img.empty()) throw InvalidArgument("clahe: empty image");
    if (img.channels() != 1 && img.channels() != 3) throw InvalidArgument("clahe: expected 1 or 3 channels");
    if (!(p.clip_limit > 0.0) || p.tiles_x < 1 || p.tiles_y < 1 || p.bins < 2) {
        throw InvalidArgument("clahe: clip_limit > 0, tiles >= 1 and bins >= 2 required");
    }
    const int h = img.height(), w = img.width();
    const std::size_t n = img.plane_size();

    if (img.channels() == 1) {
        std::vector<double> v(img.data().begin(), img.data().end());
        for (auto& x : v) x = std::clamp(x, 0.0, 1.0);
        const auto eq = equalize_plane(v, h, w, p);
        imaging::ImageBuf out = img;
        for (std::size_t i = 0; i < n; ++i)
            if (eq[i] != v[i]) out.data()[i] = static_cast<float>(eq[i]);
        out.clamp01();
        return out;
    }

    imaging::ImageBuf lab = imaging::rgb_to_lab(img);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::clamp(lab.plane(0)[i] / 100.0, 0.0, 1.0);
    const auto eq = equalize_plane(v, h, w, p);
    std::vector<bool> changed(n);
    for (std::size_t i = 0; i < n; ++i) {
        changed[i] = eq[i] != v[i];
        lab.plane(0)[i] = static_cast<float>(eq[i] * 100.0);
    }
    const imaging::ImageBuf rgb = imaging::lab_to_rgb(lab);
    imaging::ImageBuf out = img;
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < n; ++i)
            if (changed[i]) out.plane(c)[i] = rgb.plane(c)[i];
    return out;
}

}  // namespace swapforge::model
