#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "swapforge/nn/adam.hpp"
#include "swapforge/nn/layers.hpp"

namespace swapforge::nn {

// File layout:
//   8 bytes  magic "SWFCKPT1"
//   8 bytes  little-endian u64 header length
//   header   JSON {step, metadata, tensors: [{name, shape, offset}], moments}
//   payload  little-endian f32 values; offsets are in elements
// With moments, each tensor has companion "<name>#m" and "<name>#v" entries.

struct CheckpointTensor {
    Shape shape;
    std::vector<float> values;
};

struct Checkpoint {
    long step = 0;
    std::string metadata;  // JSON text owned by the caller (model config etc.)
    std::map<std::string, CheckpointTensor> tensors;
    bool has_moments = false;
    AdamState adam;  // hyperparameters always; m/v only with has_moments
};

template <typename T>
Checkpoint make_checkpoint(const ParamList<T>& params, long step, const std::string& metadata,
                           const AdamState* adam = nullptr);

/// Copies values into params by name; shapes must match exactly.
template <typename T>
void restore_parameters(const Checkpoint& ckpt, const ParamList<T>& params, AdamState* adam = nullptr);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace swapforge::nn
