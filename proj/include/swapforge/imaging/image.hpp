#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace swapforge::imaging {

/// Planar floating-point image, samples nominally in [0,1].
/// Plane c occupies data[c*H*W, (c+1)*H*W), row-major within a plane.
class ImageBuf {
public:
    ImageBuf() = default;
    ImageBuf(int height, int width, int channels, float fill = 0.0f);
    ImageBuf(int height, int width, int channels, std::vector<float> data);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t plane_size() const noexcept { return static_cast<std::size_t>(height_) * width_; }
    std::size_t size() const noexcept { return data_.size(); }

    float& at(int c, int y, int x) noexcept { return data_[index(c, y, x)]; }
    float at(int c, int y, int x) const noexcept { return data_[index(c, y, x)]; }

    std::span<float> plane(int c) noexcept { return {data_.data() + c * plane_size(), plane_size()}; }
    std::span<const float> plane(int c) const noexcept {
        return {data_.data() + c * plane_size(), plane_size()};
    }
    std::span<float> data() noexcept { return data_; }
    std::span<const float> data() const noexcept { return data_; }

    bool same_shape(const ImageBuf& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
    }

    /// Clamps every sample to [0,1]; non-finite samples become 0.
    void clamp01() noexcept;

    bool operator==(const ImageBuf&) const = default;

private:
    std::size_t index(int c, int y, int x) const noexcept {
        return (static_cast<std::size_t>(c) * height_ + y) * width_ + x;
    }

    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<float> data_;
};

/// Single-plane coverage mask in [0,1]. Binary masks hold only 0 and 1.
class MaskBuf {
public:
    MaskBuf() = default;
    MaskBuf(int height, int width, float fill = 0.0f);
    MaskBuf(int height, int width, std::vector<float> data);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    bool empty() const noexcept { return data_.empty(); }
    std::size_t size() const noexcept { return data_.size(); }

    float& at(int y, int x) noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    float at(int y, int x) const noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    std::span<float> data() noexcept { return data_; }
    std::span<const float> data() const noexcept { return data_; }

    bool same_size(const MaskBuf& other) const noexcept {
        return height_ == other.height_ && width_ == other.width_;
    }
    bool same_size(const ImageBuf& img) const noexcept {
        return height_ == img.height() && width_ == img.width();
    }

    bool is_binary() const noexcept;
    /// Number of pixels with value >= 0.5.
    std::size_t count_set() const noexcept;
    /// Sets every value to 1 if >= threshold, else 0.
    MaskBuf binarized(float threshold = 0.5f) const;

    bool operator==(const MaskBuf&) const = default;

private:
    int height_ = 0;
    int width_ = 0;
    std::vector<float> data_;
};

/// Multiplies every channel of img by the mask (the X*M product).
ImageBuf apply_mask(const ImageBuf& img, const MaskBuf& mask);

/// Copy of img restricted to rows [y0, y0+h) and cols [x0, x0+w).
ImageBuf crop(const ImageBuf& img, int y0, int x0, int h, int w);

}  // namespace swapforge::imaging
