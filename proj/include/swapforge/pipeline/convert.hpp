#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swapforge/blending/blending.hpp"
#include "swapforge/imaging/geometry.hpp"
#include "swapforge/model/swap_model.hpp"
#include "swapforge/pipeline/config.hpp"

namespace swapforge::pipeline {

enum class FrameStatus { converted, skipped_no_face, skipped_empty_mask, error };

std::string_view to_string(FrameStatus s);

struct FrameResult {
    std::string frame_id;
    FrameStatus status = FrameStatus::error;
    std::optional<double> boundary_energy;  // of the blended aligned patch
    bool used_generated_mask = false;
    std::string message;
    std::map<std::string, double> timing_ms;  // per stage
};

struct ConvertOptions {
    model::Identity target_identity = model::Identity::B;
    int squeeze_px = blending::kDefaultSqueezePx;
    bool conventional = false;
    blending::SolverParams solver;
};

struct FrameOutput {
    imaging::ImageBuf image;       // converted frame (a copy of the input when skipped)
    imaging::MaskBuf frame_mask;   // blend mask in frame space; empty when skipped
    FrameResult result;
};

/// Align, run the target decoder, paste the output back into the aligned
/// canvas, blend it under the squeezed mask intersection and warp it back.
/// Only pixels under the frame-space blend mask change. `generated_mask`
/// is the generated face's mask in aligned 512x512 space; without it the
/// aligned driver mask stands in. Failures are reported, never thrown.
FrameOutput convert_frame(const imaging::ImageBuf& frame, const imaging::Landmarks68& lm,
                          const imaging::MaskBuf& driver_mask, const model::SwapModel<float>& model,
                          const ConvertOptions& opts, const imaging::MaskBuf* generated_mask = nullptr);

struct BatchSummary {
    std::vector<FrameResult> frames;
    std::map<std::string, std::size_t> counts;
    std::optional<double> mean_boundary_energy;

    /// Deterministic JSON (no timings).
    std::string to_json() const;
};

/// Converts every <id>.png under frames_dir, reading landmarks_dir/<id>.json,
/// masks_dir/<id>.png and, when configured, generated_masks_dir/<id>.png.
/// Writes out_dir/<id>.png for every readable frame and out_dir/summary.json.
/// A frame without landmarks is skipped_no_face.
BatchSummary convert_batch(const ConversionConfig& cfg);
/// Same with a model already in memory.
BatchSummary convert_batch(const ConversionConfig& cfg, const model::SwapModel<float>& model);

}  // namespace swapforge::pipeline
