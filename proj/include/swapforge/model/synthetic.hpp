#pragma once

#include <cstdint>
#include <filesystem>
#include <random>

#include "swapforge/imaging/geometry.hpp"
#include "swapforge/imaging/image.hpp"
#include "swapforge/model/swap_model.hpp"

namespace swapforge::model {

// Procedural two-identity faces: a shaded ellipse with eyes and a mouth,
// laid out on the canonical landmark template. Identity A is red-dominant,
// identity B blue-dominant. Region masks come out of the same geometry.

struct SyntheticOptions {
    int size = 256;
    double rotation_deg = 8.0;    // max |in-plane rotation|
    double scale_jitter = 0.06;   // relative
    double shift_jitter = 0.03;   // fraction of size
    double face_scale = 0.75;     // template-to-canvas scale relative to size/512
    bool cluttered_background = false;
};

struct SyntheticFace {
    imaging::ImageBuf image;
    imaging::MaskBuf face;
    imaging::MaskBuf eye;
    imaging::MaskBuf mouth;
    imaging::Landmarks68 landmarks;
};

SyntheticFace render_synthetic_face(Identity id, std::mt19937_64& rng, const SyntheticOptions& opt = {});

/// Writes <id>.png, <id>.json (landmarks), <id>_face.png, <id>_eye.png,
/// <id>_mouth.png and <id>.f32 (embedding) for `count` faces.
/// A `wrong_identity_fraction` of records are drawn from the other identity
/// with an embedding from its cluster, for exercising identity filtering.
void write_synthetic_faceset(const std::filesystem::path& dir, Identity id, int count, std::uint64_t seed,
                             const SyntheticOptions& opt = {}, double wrong_identity_fraction = 0.0,
                             int embedding_dim = 16);

}  // namespace swapforge::model
