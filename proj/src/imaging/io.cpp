#include "swapforge/imaging/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "swapforge/errors.hpp"

namespace swapforge::imaging {

namespace fs = std::filesystem;

namespace {

std::uint8_t to_u8(float v) {
    const float c = std::isfinite(v) ? std::clamp(v, 0.0f, 1.0f) : 0.0f;
    return static_cast<std::uint8_t>(std::lround(c * 255.0f));
}

struct PngImage {
    png_image image{};
    PngImage() {
        std::memset(&image, 0, sizeof(image));
        image.version = PNG_IMAGE_VERSION;
    }
    ~PngImage() { png_image_free(&image); }
    PngImage(const PngImage&) = delete;
    PngImage& operator=(const PngImage&) = delete;
};

}  // namespace

ImageBuf read_png(const fs::path& path) {
    PngImage png;
    if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
        throw IoError("read_png: " + path.string() + ": " + png.image.message);
    }
    const bool gray = (png.image.format & PNG_FORMAT_FLAG_COLOR) == 0;
    png.image.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    const int channels = gray ? 1 : 3;
    const int h = static_cast<int>(png.image.height);
    const int w = static_cast<int>(png.image.width);
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(png.image));
    if (!png_image_finish_read(&png.image, nullptr, buf.data(), 0, nullptr)) {
        throw IoError("read_png: " + path.string() + ": " + png.image.message);
    }
    ImageBuf out(h, w, channels);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < channels; ++c)
                out.at(c, y, x) = buf[(static_cast<std::size_t>(y) * w + x) * channels + c] / 255.0f;
    return out;
}

namespace {

std::vector<std::uint8_t> interleave_u8(const ImageBuf& img, const char* who) {
    if (img.empty()) throw InvalidArgument(std::string(who) + ": empty image");
    if (img.channels() != 1 && img.channels() != 3) throw InvalidArgument(std::string(who) + ": expects 1 or 3 channels");
    const int h = img.height(), w = img.width(), ch = img.channels();
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(h) * w * ch);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c)
                buf[(static_cast<std::size_t>(y) * w + x) * ch + c] = to_u8(img.at(c, y, x));
    return buf;
}

void describe(PngImage& png, const ImageBuf& img) {
    png.image.width = static_cast<png_uint_32>(img.width());
    png.image.height = static_cast<png_uint_32>(img.height());
    png.image.format = img.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
}

}  // namespace

void write_png(const fs::path& path, const ImageBuf& img) {
    const auto buf = interleave_u8(img, "write_png");
    PngImage png;
    describe(png, img);
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    if (!png_image_write_to_file(&png.image, path.c_str(), 0, buf.data(), 0, nullptr)) {
        throw IoError("write_png: " + path.string() + ": " + png.image.message);
    }
}

std::string encode_png(const ImageBuf& img) {
    const auto buf = interleave_u8(img, "encode_png");
    PngImage png;
    describe(png, img);
    png_alloc_size_t size = 0;
    if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, buf.data(), 0, nullptr)) {
        throw IoError(std::string("encode_png: ") + png.image.message);
    }
    std::string out(size, '\0');
    if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, buf.data(), 0, nullptr)) {
        throw IoError(std::string("encode_png: ") + png.image.message);
    }
    out.resize(size);
    return out;
}

MaskBuf read_mask_png(const fs::path& path, bool binarize) {
    ImageBuf img = read_png(path);
    if (img.channels() != 1) {
        // Colour masks: any channel set counts.
        ImageBuf g(img.height(), img.width(), 1);
        for (std::size_t i = 0; i < g.plane_size(); ++i)
            g.plane(0)[i] = std::max({img.plane(0)[i], img.plane(1)[i], img.plane(2)[i]});
        img = std::move(g);
    }
    MaskBuf m(img.height(), img.width());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const float v = img.plane(0)[i];
        m.data()[i] = binarize ? (v >= 128.0f / 255.0f ? 1.0f : 0.0f) : v;
    }
    return m;
}

void write_mask_png(const fs::path& path, const MaskBuf& mask) {
    std::vector<float> data(mask.data().begin(), mask.data().end());
    write_png(path, ImageBuf(mask.height(), mask.width(), 1, std::move(data)));
}

Landmarks68 read_landmarks(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_landmarks: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IoError("read_landmarks: " + path.string() + ": " + e.what());
    }
    if (!j.is_array() || j.size() != kNumLandmarks) {
        throw InvalidArgument("read_landmarks: expected 68 [x, y] pairs in " + path.string());
    }
    Landmarks68 lm;
    for (std::size_t i = 0; i < kNumLandmarks; ++i) {
        const auto& p = j[i];
        if (!p.is_array() || p.size() != 2) throw InvalidArgument("read_landmarks: malformed point");
        lm[i] = {p[0].get<double>(), p[1].get<double>()};
    }
    if (!landmarks_finite(lm)) throw InvalidArgument("read_landmarks: non-finite coordinate");
    return lm;
}

void write_landmarks(const fs::path& path, const Landmarks68& lm) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& p : lm) j.push_back({p.x, p.y});
    write_file_atomic(path, j.dump() + "\n");
}

std::vector<float> read_f32_vector(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_f32_vector: cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % 4 != 0) throw IoError("read_f32_vector: size not a multiple of 4: " + path.string());
    std::vector<float> out(bytes.size() / 4);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint32_t u = 0;
        for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[4 * i + b])) << (8 * b);
        out[i] = std::bit_cast<float>(u);
    }
    return out;
}

void write_f32_vector(const fs::path& path, const std::vector<float>& values) {
    std::string bytes(values.size() * 4, '\0');
    for (std::size_t i = 0; i < values.size(); ++i) {
        const auto u = std::bit_cast<std::uint32_t>(values[i]);
        for (int b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<char>((u >> (8 * b)) & 0xff);
    }
    write_file_atomic(path, bytes);
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
}

}  // namespace swapforge::imaging
