#include "swapforge/imaging/morphology.hpp"

#include <algorithm>
#include <vector>

#include "swapforge/errors.hpp"

namespace swapforge::imaging {

namespace {

// One-dimensional erosion of a binary line via a prefix count of unset cells.
void erode_line(const std::vector<unsigned char>& in, std::vector<unsigned char>& out, int radius) {
    const int n = static_cast<int>(in.size());
    std::vector<int> zeros(n + 1, 0);
    for (int i = 0; i < n; ++i) zeros[i + 1] = zeros[i] + (in[i] ? 0 : 1);
    for (int i = 0; i < n; ++i) {
        const int lo = i - radius;
        const int hi = i + radius;
        out[i] = (lo >= 0 && hi < n && zeros[hi + 1] - zeros[lo] == 0) ? 1 : 0;
    }
}

}  // namespace

MaskBuf erode_mask(const MaskBuf& mask, int radius) {
    if (radius < 0) throw InvalidArgument("erode_mask: radius must be >= 0");
    const int h = mask.height();
    const int w = mask.width();
    if (radius == 0) return mask.binarized();

    std::vector<unsigned char> grid(static_cast<std::size_t>(h) * w);
    for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = mask.data()[i] >= 0.5f ? 1 : 0;

    std::vector<unsigned char> line, res;
    line.resize(w);
    res.resize(w);
    for (int y = 0; y < h; ++y) {
        std::copy_n(grid.begin() + static_cast<std::ptrdiff_t>(y) * w, w, line.begin());
        erode_line(line, res, radius);
        std::copy_n(res.begin(), w, grid.begin() + static_cast<std::ptrdiff_t>(y) * w);
    }
    line.resize(h);
    res.resize(h);
    for (int x = 0; x < w; ++x) {
        for (int y = 0; y < h; ++y) line[y] = grid[static_cast<std::size_t>(y) * w + x];
        erode_line(line, res, radius);
        for (int y = 0; y < h; ++y) grid[static_cast<std::size_t>(y) * w + x] = res[y];
    }

    MaskBuf out(h, w);
    for (std::size_t i = 0; i < grid.size(); ++i) out.data()[i] = grid[i] ? 1.0f : 0.0f;
    return out;
}

MaskBuf intersect_masks(const MaskBuf& a, const MaskBuf& b) {
    if (!a.same_size(b)) throw InvalidArgument("intersect_masks: dimension mismatch");
    MaskBuf out(a.height(), a.width());
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = std::min(a.data()[i], b.data()[i]);
    return out;
}

MaskBuf clear_border(const MaskBuf& mask, int width) {
    MaskBuf out = mask;
    for (int y = 0; y < mask.height(); ++y)
        for (int x = 0; x < mask.width(); ++x)
            if (y < width || x < width || y >= mask.height() - width || x >= mask.width() - width)
                out.at(y, x) = 0.0f;
    return out;
}

}  // namespace swapforge::imaging
