#pragma once

#include <filesystem>
#include <vector>

#include "swapforge/imaging/geometry.hpp"
#include "swapforge/imaging/image.hpp"

namespace swapforge::imaging {

/// Reads an 8-bit PNG as gray (1 channel) or RGB (3 channels); alpha is
/// dropped, palette images expand to RGB. Samples are v/255.
ImageBuf read_png(const std::filesystem::path& path);

/// Writes round(v*255) clamped to [0,255]. 1 or 3 channels.
void write_png(const std::filesystem::path& path, const ImageBuf& img);

/// PNG file contents for img, as write_png would produce.
std::string encode_png(const ImageBuf& img);

/// Loads a grayscale mask. With binarize, values >= 128/255 become 1.
MaskBuf read_mask_png(const std::filesystem::path& path, bool binarize = true);
void write_mask_png(const std::filesystem::path& path, const MaskBuf& mask);

/// JSON array of 68 [x, y] pairs.
Landmarks68 read_landmarks(const std::filesystem::path& path);
void write_landmarks(const std::filesystem::path& path, const Landmarks68& lm);

/// Raw little-endian float32 vector.
std::vector<float> read_f32_vector(const std::filesystem::path& path);
void write_f32_vector(const std::filesystem::path& path, const std::vector<float>& values);

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace swapforge::imaging
