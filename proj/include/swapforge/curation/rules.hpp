#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "swapforge/curation/manifest.hpp"

namespace swapforge::curation {

// Automatic stages only move records between pending and auto_rejected.
// Each stage re-evaluates the records it rejected itself, so re-running a
// stage with new thresholds or cluster selections can restore them; manual
// decisions (accepted / rejected) are never touched.

/// Records whose cluster is not in `kept` are rejected with
/// identity_cluster. Unclustered records (cluster_id -1) are ignored.
FacesetManifest filter_clusters(FacesetManifest manifest, const std::set<int>& kept);

/// First failing rule in the order [size, pose, blur] rejects a record.
/// Throws PreconditionError listing ids whose scores are missing.
FacesetManifest apply_quality_gates(FacesetManifest manifest);

struct DedupOptions {
    std::filesystem::path images_root;
    unsigned workers = 1;
};

/// Greedy near-duplicate removal in id order against earlier kept records,
/// using 64-bit difference hashes. Images that fail to load get load_error
/// set and are skipped.
FacesetManifest dedup(FacesetManifest manifest, const DedupOptions& opts);

struct ScoreOptions {
    std::filesystem::path images_root;
    unsigned workers = 1;
};

/// Fills blur_score (from the image), yaw / pitch and face_size (from the
/// landmarks). Load failures set load_error.
FacesetManifest score_records(FacesetManifest manifest, const ScoreOptions& opts);

/// Loads each record's embedding and runs k-means; sets cluster_id and
/// embedding_dim. Records without an embedding stay at -1.
FacesetManifest assign_clusters(FacesetManifest manifest, const std::filesystem::path& root, int k,
                                std::uint64_t seed);

/// Builds a manifest from a directory holding <id>.png with optional
/// <id>.json (landmarks), <id>_face.png, <id>_eye.png, <id>_mouth.png masks
/// and <id>.f32 embeddings. Paths are stored relative to `dir`.
FacesetManifest manifest_from_directory(const std::filesystem::path& dir, const std::string& identity);

std::string format_report(const FacesetManifest& m);

std::filesystem::path resolve_path(const std::filesystem::path& root, const std::string& rel);

}  // namespace swapforge::curation
