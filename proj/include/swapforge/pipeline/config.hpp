#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include "swapforge/blending/blending.hpp"
#include "swapforge/model/swap_model.hpp"

namespace swapforge::pipeline {

/// Scalar value of the supported TOML subset.
using TomlValue = std::variant<std::string, long long, double, bool>;

/// Parses key = value pairs, [table] headers (dotted names allowed), basic
/// and literal strings, integers, floats, booleans and # comments. Keys are
/// returned fully qualified ("solver.tol"). Throws InvalidArgument with the
/// line number on anything else.
std::map<std::string, TomlValue> parse_toml(std::string_view text);

struct ConversionConfig {
    std::filesystem::path checkpoint;
    model::Identity target_identity = model::Identity::B;
    int squeeze_px = blending::kDefaultSqueezePx;
    bool conventional = false;
    blending::SolverParams solver;
    std::filesystem::path frames_dir;
    std::filesystem::path landmarks_dir;
    std::filesystem::path masks_dir;
    std::filesystem::path generated_masks_dir;  // optional, aligned-space masks
    std::filesystem::path out_dir;
    unsigned workers = 1;

    /// Throws InvalidArgument when inputs are missing or settings invalid.
    void validate() const;
};

/// Relative paths are resolved against `base_dir`.
ConversionConfig parse_conversion_config(std::string_view toml_text, const std::filesystem::path& base_dir = {});
ConversionConfig load_conversion_config(const std::filesystem::path& path);

}  // namespace swapforge::pipeline
