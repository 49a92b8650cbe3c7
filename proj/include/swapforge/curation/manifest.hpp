#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "swapforge/imaging/geometry.hpp"

namespace swapforge::curation {

enum class Status { pending, auto_rejected, accepted, rejected };
enum class RejectReason { none, blur, pose, size, identity_cluster, duplicate, manual };

std::string_view to_string(Status s);
std::string_view to_string(RejectReason r);
/// Throw InvalidArgument on unknown names.
Status parse_status(std::string_view s);
RejectReason parse_reason(std::string_view s);

bool is_auto_reason(RejectReason r) noexcept;
/// Reasons owned by apply_quality_gates.
bool is_gate_reason(RejectReason r) noexcept;

struct FaceRecord {
    std::string id;
    std::string image_path;  // relative to the images root
    std::optional<imaging::Landmarks68> landmarks;
    std::string face_mask_path;
    std::string eye_mask_path;
    std::string mouth_mask_path;
    std::string embedding_path;
    std::optional<double> blur_score;
    std::optional<double> yaw;
    std::optional<double> pitch;
    std::optional<double> face_size;
    int cluster_id = -1;
    Status status = Status::pending;
    RejectReason reject_reason = RejectReason::none;
    std::string dhash;       // hex, filled by dedup
    std::string load_error;  // last image load failure, if any

    bool kept() const noexcept { return status == Status::pending || status == Status::accepted; }
    bool operator==(const FaceRecord&) const = default;
};

struct Thresholds {
    double blur_min = 100.0;
    double yaw_max = 40.0;
    double pitch_max = 30.0;
    double size_min = 192.0;
    int dedup_hamming_max = 8;
    bool operator==(const Thresholds&) const = default;
};

inline constexpr std::size_t kDefaultFacesetMin = 4000;
inline constexpr std::size_t kDefaultFacesetMax = 8000;

struct FacesetManifest {
    std::string identity;
    Thresholds thresholds;
    std::set<int> kept_clusters;
    int embedding_dim = 0;
    std::vector<FaceRecord> records;

    const FaceRecord* find(std::string_view id) const;
    FaceRecord* find(std::string_view id);
    /// Throws InvalidArgument on duplicate ids or an auto_rejected record
    /// without an automatic reason.
    void validate() const;
    bool operator==(const FacesetManifest&) const = default;
};

struct CurationCounts {
    std::size_t total = 0;
    std::size_t accepted = 0;
    std::size_t pending = 0;
    std::size_t rejected = 0;  // manual
    std::map<std::string, std::size_t> auto_rejected_by_reason;

    std::size_t kept() const noexcept { return accepted + pending; }
    std::size_t auto_rejected() const noexcept;
    bool operator==(const CurationCounts&) const = default;
};

CurationCounts count_records(const FacesetManifest& m);

/// One record as a JSON object (the same form as a manifest line).
std::string record_to_json_text(const FaceRecord& r);

/// JSON Lines: a header object followed by one record object per line.
std::string serialize_manifest(const FacesetManifest& m);
FacesetManifest parse_manifest(std::string_view text);

FacesetManifest load_manifest(const std::filesystem::path& path);
/// Atomic (temp file + rename).
void save_manifest(const std::filesystem::path& path, const FacesetManifest& m);

}  // namespace swapforge::curation
