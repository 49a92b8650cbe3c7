#include "swapforge/imaging/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swapforge/errors.hpp"

namespace swapforge::imaging {

ImageBuf::ImageBuf(int height, int width, int channels, float fill)
    : height_(height), width_(width), channels_(channels) {
    if (height < 0 || width < 0 || channels < 0) {
        throw InvalidArgument("ImageBuf: negative dimension");
    }
    data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

ImageBuf::ImageBuf(int height, int width, int channels, std::vector<float> data)
    : height_(height), width_(width), channels_(channels), data_(std::move(data)) {
    if (height < 0 || width < 0 || channels < 0 ||
        data_.size() != static_cast<std::size_t>(height) * width * channels) {
        throw InvalidArgument("ImageBuf: data length does not match " + std::to_string(height) +
                              "x" + std::to_string(width) + "x" + std::to_string(channels));
    }
    for (float v : data_) {
        if (!std::isfinite(v)) throw InvalidArgument("ImageBuf: non-finite sample");
    }
}

void ImageBuf::clamp01() noexcept {
    for (float& v : data_) v = std::isfinite(v) ? std::clamp(v, 0.0f, 1.0f) : 0.0f;
}

MaskBuf::MaskBuf(int height, int width, float fill) : height_(height), width_(width) {
    if (height < 0 || width < 0) throw InvalidArgument("MaskBuf: negative dimension");
    data_.assign(static_cast<std::size_t>(height) * width, fill);
}

MaskBuf::MaskBuf(int height, int width, std::vector<float> data)
    : height_(height), width_(width), data_(std::move(data)) {
    if (height < 0 || width < 0 || data_.size() != static_cast<std::size_t>(height) * width) {
        throw InvalidArgument("MaskBuf: data length does not match dimensions");
    }
    for (float v : data_) {
        if (!(v >= 0.0f && v <= 1.0f)) throw InvalidArgument("MaskBuf: value outside [0,1]");
    }
}

bool MaskBuf::is_binary() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](float v) { return v == 0.0f || v == 1.0f; });
}

std::size_t MaskBuf::count_set() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(data_.begin(), data_.end(), [](float v) { return v >= 0.5f; }));
}

MaskBuf MaskBuf::binarized(float threshold) const {
    MaskBuf out(height_, width_);
    for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] >= threshold ? 1.0f : 0.0f;
    return out;
}

ImageBuf apply_mask(const ImageBuf& img, const MaskBuf& mask) {
    if (!mask.same_size(img)) throw InvalidArgument("apply_mask: mask size differs from image");
    ImageBuf out = img;
    const auto m = mask.data();
    for (int c = 0; c < img.channels(); ++c) {
        auto p = out.plane(c);
        for (std::size_t i = 0; i < p.size(); ++i) p[i] *= m[i];
    }
    return out;
}

ImageBuf crop(const ImageBuf& img, int y0, int x0, int h, int w) {
    if (y0 < 0 || x0 < 0 || h <= 0 || w <= 0 || y0 + h > img.height() || x0 + w > img.width()) {
        throw InvalidArgument("crop: window outside image");
    }
    ImageBuf out(h, w, img.channels());
    for (int c = 0; c < img.channels(); ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) out.at(c, y, x) = img.at(c, y0 + y, x0 + x);
    return out;
}

}  // namespace swapforge::imaging
