#include "swapforge/curation/dedup.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "swapforge/errors.hpp"
#include "swapforge/imaging/color.hpp"

namespace swapforge::curation {

imaging::ImageBuf area_downsample(const imaging::ImageBuf& gray, int out_height, int out_width) {
    if (gray.channels() != 1) throw InvalidArgument("area_downsample: expects one channel");
    if (gray.empty() || out_height <= 0 || out_width <= 0) throw InvalidArgument("area_downsample: bad size");
    const double sy = static_cast<double>(gray.height()) / out_height;
    const double sx = static_cast<double>(gray.width()) / out_width;
    imaging::ImageBuf out(out_height, out_width, 1);
    for (int oy = 0; oy < out_height; ++oy) {
        const double y0 = oy * sy, y1 = (oy + 1) * sy;
        for (int ox = 0; ox < out_width; ++ox) {
            const double x0 = ox * sx, x1 = (ox + 1) * sx;
            double acc = 0.0, wsum = 0.0;
            for (int y = static_cast<int>(y0); y < std::min(gray.height(), static_cast<int>(std::ceil(y1))); ++y) {
                const double wy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
                if (wy <= 0.0) continue;
                for (int x = static_cast<int>(x0); x < std::min(gray.width(), static_cast<int>(std::ceil(x1))); ++x) {
                    const double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
                    if (wx <= 0.0) continue;
                    acc += wx * wy * gray.at(0, y, x);
                    wsum += wx * wy;
                }
            }
            out.at(0, oy, ox) = static_cast<float>(acc / wsum);
        }
    }
    return out;
}

std::uint64_t difference_hash(const imaging::ImageBuf& img) {
    const imaging::ImageBuf small = area_downsample(imaging::rgb_to_gray(img), 8, 9);
    std::uint64_t h = 0;
    int bit = 0;
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x, ++bit)
            if (small.at(0, y, x) > small.at(0, y, x + 1)) h |= std::uint64_t{1} << bit;
    return h;
}

int hamming_distance(std::uint64_t a, std::uint64_t b) noexcept { return std::popcount(a ^ b); }

std::string hash_to_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t hash_from_hex(const std::string& hex) {
    if (hex.size() != 16) throw InvalidArgument("hash_from_hex: expected 16 hex digits");
    return std::stoull(hex, nullptr, 16);
}

}  // namespace swapforge::curation
