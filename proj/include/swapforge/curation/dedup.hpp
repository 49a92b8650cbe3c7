#pragma once

#include <cstdint>
#include <string>

#include "swapforge/imaging/image.hpp"

namespace swapforge::curation {

/// 64-bit difference hash: grayscale area-downsample to 9x8, one bit per
/// horizontally adjacent pair (set when the left cell is brighter).
std::uint64_t difference_hash(const imaging::ImageBuf& img);

int hamming_distance(std::uint64_t a, std::uint64_t b) noexcept;

std::string hash_to_hex(std::uint64_t h);
std::uint64_t hash_from_hex(const std::string& hex);

/// Box-filter resample of a single-channel image with fractional overlap
/// weights.
imaging::ImageBuf area_downsample(const imaging::ImageBuf& gray, int out_height, int out_width);

}  // namespace swapforge::curation
