#include "swapforge/curation/rules.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "swapforge/curation/dedup.hpp"
#include "swapforge/curation/kmeans.hpp"
#include "swapforge/curation/pose.hpp"
#include "swapforge/curation/quality.hpp"
#include "swapforge/errors.hpp"
#include "swapforge/imaging/io.hpp"
#include "swapforge/parallel.hpp"

namespace swapforge::curation {

namespace fs = std::filesystem;

namespace {

bool owned_by(const FaceRecord& r, bool (*owns)(RejectReason)) {
    return r.status == Status::pending || (r.status == Status::auto_rejected && owns(r.reject_reason));
}

void reject(FaceRecord& r, RejectReason reason) {
    r.status = Status::auto_rejected;
    r.reject_reason = reason;
}

void restore(FaceRecord& r) {
    r.status = Status::pending;
    r.reject_reason = RejectReason::none;
}

}  // namespace

fs::path resolve_path(const fs::path& root, const std::string& rel) {
    const fs::path p(rel);
    return p.is_absolute() ? p : root / p;
}

FacesetManifest filter_clusters(FacesetManifest manifest, const std::set<int>& kept) {
    manifest.kept_clusters = kept;
    for (auto& r : manifest.records) {
        if (r.cluster_id < 0) continue;
        if (!owned_by(r, [](RejectReason x) { return x == RejectReason::identity_cluster; })) continue;
        if (kept.contains(r.cluster_id)) {
            if (r.status == Status::auto_rejected) restore(r);
        } else {
            reject(r, RejectReason::identity_cluster);
        }
    }
    return manifest;
}

FacesetManifest apply_quality_gates(FacesetManifest manifest) {
    std::vector<std::string> missing;
    for (const auto& r : manifest.records) {
        if (!owned_by(r, is_gate_reason)) continue;
        if (!r.blur_score || !r.yaw || !r.pitch || !r.face_size) missing.push_back(r.id);
    }
    if (!missing.empty()) {
        std::string ids;
        for (const auto& id : missing) ids += (ids.empty() ? "" : ", ") + id;
        throw PreconditionError("apply_quality_gates: missing scores for " + ids);
    }
    const Thresholds& t = manifest.thresholds;
    for (auto& r : manifest.records) {
        if (!owned_by(r, is_gate_reason)) continue;
        if (*r.face_size < t.size_min) {
            reject(r, RejectReason::size);
        } else if (std::abs(*r.yaw) > t.yaw_max || std::abs(*r.pitch) > t.pitch_max) {
            reject(r, RejectReason::pose);
        } else if (*r.blur_score < t.blur_min) {
            reject(r, RejectReason::blur);
        } else if (r.status == Status::auto_rejected) {
            restore(r);
        }
    }
    return manifest;
}

FacesetManifest dedup(FacesetManifest manifest, const DedupOptions& opts) {
    auto& recs = manifest.records;
    std::vector<std::size_t> order(recs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return recs[a].id < recs[b].id; });

    // Hashes are computed for every record that can act as a keeper.
    std::vector<std::uint64_t> hashes(recs.size(), 0);
    std::vector<char> ok(recs.size(), 0);
    parallel_for(recs.size(), opts.workers, [&](std::size_t i) {
        FaceRecord& r = recs[i];
        if (!r.kept()) return;
        if (!r.dhash.empty()) {
            hashes[i] = hash_from_hex(r.dhash);
            ok[i] = 1;
            return;
        }
        try {
            hashes[i] = difference_hash(imaging::read_png(resolve_path(opts.images_root, r.image_path)));
            r.dhash = hash_to_hex(hashes[i]);
            r.load_error.clear();
            ok[i] = 1;
        } catch (const std::exception& e) {
            r.load_error = e.what();
        }
    });

    std::vector<std::uint64_t> keepers;
    for (std::size_t idx : order) {
        FaceRecord& r = recs[idx];
        if (!ok[idx]) continue;
        const bool dup = std::any_of(keepers.begin(), keepers.end(), [&](std::uint64_t h) {
            return hamming_distance(h, hashes[idx]) <= manifest.thresholds.dedup_hamming_max;
        });
        if (dup && r.status == Status::pending) {
            reject(r, RejectReason::duplicate);
        } else {
            keepers.push_back(hashes[idx]);
        }
    }
    return manifest;
}

FacesetManifest score_records(FacesetManifest manifest, const ScoreOptions& opts) {
    parallel_for(manifest.records.size(), opts.workers, [&](std::size_t i) {
        FaceRecord& r = manifest.records[i];
        try {
            r.blur_score = blur_score(imaging::read_png(resolve_path(opts.images_root, r.image_path)));
            r.load_error.clear();
        } catch (const std::exception& e) {
            r.load_error = e.what();
        }
        if (r.landmarks) {
            r.face_size = face_size(*r.landmarks);
            try {
                const Pose p = estimate_pose(*r.landmarks);
                r.yaw = p.yaw;
                r.pitch = p.pitch;
            } catch (const NumericalDegeneracy& e) {
                r.load_error = e.what();
            }
        }
    });
    return manifest;
}

FacesetManifest assign_clusters(FacesetManifest manifest, const fs::path& root, int k, std::uint64_t seed) {
    std::vector<Embedding> emb;
    std::vector<std::size_t> owners;
    for (std::size_t i = 0; i < manifest.records.size(); ++i) {
        const auto& r = manifest.records[i];
        if (r.embedding_path.empty()) continue;
        emb.push_back(imaging::read_f32_vector(resolve_path(root, r.embedding_path)));
        owners.push_back(i);
    }
    if (emb.empty()) throw PreconditionError("assign_clusters: no record has an embedding");
    const KMeansResult res = kmeans_cluster(emb, k, seed);
    for (std::size_t j = 0; j < owners.size(); ++j) manifest.records[owners[j]].cluster_id = res.assignments[j];
    manifest.embedding_dim = static_cast<int>(emb.front().size());
    return manifest;
}

FacesetManifest manifest_from_directory(const fs::path& dir, const std::string& identity) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".png") continue;
        const std::string stem = entry.path().stem().string();
        const auto us = stem.rfind('_');
        if (us != std::string::npos) {
            const std::string suffix = stem.substr(us + 1);
            if (suffix == "face" || suffix == "eye" || suffix == "mouth") continue;
        }
        ids.push_back(stem);
    }
    std::sort(ids.begin(), ids.end());
    FacesetManifest m;
    m.identity = identity;
    for (const auto& id : ids) {
        FaceRecord r;
        r.id = id;
        r.image_path = id + ".png";
        if (fs::exists(dir / (id + ".json"))) r.landmarks = imaging::read_landmarks(dir / (id + ".json"));
        auto opt_path = [&](const std::string& name) { return fs::exists(dir / name) ? name : std::string{}; };
        r.face_mask_path = opt_path(id + "_face.png");
        r.eye_mask_path = opt_path(id + "_eye.png");
        r.mouth_mask_path = opt_path(id + "_mouth.png");
        r.embedding_path = opt_path(id + ".f32");
        m.records.push_back(std::move(r));
    }
    return m;
}

std::string format_report(const FacesetManifest& m) {
    const CurationCounts c = count_records(m);
    std::ostringstream out;
    out << "identity: " << (m.identity.empty() ? "-" : m.identity) << "\n";
    out << "total: " << c.total << "\n";
    out << "kept: " << c.kept() << " (accepted " << c.accepted << ", pending " << c.pending << ")\n";
    out << "rejected (manual): " << c.rejected << "\n";
    out << "auto_rejected: " << c.auto_rejected() << "\n";
    for (const auto& [reason, n] : c.auto_rejected_by_reason) out << "  " << reason << ": " << n << "\n";
    if (c.kept() < kDefaultFacesetMin || c.kept() > kDefaultFacesetMax) {
        out << "warning: kept count " << c.kept() << " is outside the recommended " << kDefaultFacesetMin << "-"
            << kDefaultFacesetMax << " band\n";
    }
    return out.str();
}

}  // namespace swapforge::curation
