#include "swapforge/imaging/filters.hpp"

#include <algorithm>
#include <vector>

#include "swapforge/errors.hpp"

namespace swapforge::imaging {

ImageBuf laplacian(const ImageBuf& img) {
    if (img.channels() != 1) throw InvalidArgument("laplacian: expects a single-channel image");
    const int h = img.height();
    const int w = img.width();
    // Built through the raw vector so negative responses survive.
    std::vector<float> out(static_cast<std::size_t>(h) * w);
    for (int y = 0; y < h; ++y) {
        const int yu = std::max(y - 1, 0), yd = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            const int xl = std::max(x - 1, 0), xr = std::min(x + 1, w - 1);
            out[static_cast<std::size_t>(y) * w + x] =
                4.0f * img.at(0, y, x) - img.at(0, yu, x) - img.at(0, yd, x) - img.at(0, y, xl) -
                img.at(0, y, xr);
        }
    }
    return ImageBuf(h, w, 1, std::move(out));
}

ImageBuf box_blur(const ImageBuf& img, int radius) {
    if (radius < 0) throw InvalidArgument("box_blur: negative radius");
    ImageBuf tmp = img;
    ImageBuf out = img;
    const int h = img.height(), w = img.width();
    const float norm = 1.0f / static_cast<float>(2 * radius + 1);
    for (int c = 0; c < img.channels(); ++c) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                float s = 0.0f;
                for (int d = -radius; d <= radius; ++d) s += img.at(c, y, std::clamp(x + d, 0, w - 1));
                tmp.at(c, y, x) = s * norm;
            }
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                float s = 0.0f;
                for (int d = -radius; d <= radius; ++d) s += tmp.at(c, std::clamp(y + d, 0, h - 1), x);
                out.at(c, y, x) = s * norm;
            }
    }
    return out;
}

}  // namespace swapforge::imaging
