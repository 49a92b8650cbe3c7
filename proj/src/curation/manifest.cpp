#include "swapforge/curation/manifest.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "swapforge/errors.hpp"
#include "swapforge/imaging/io.hpp"

namespace swapforge::curation {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Status, std::string_view>, 4> kStatusNames{{
    {Status::pending, "pending"},
    {Status::auto_rejected, "auto_rejected"},
    {Status::accepted, "accepted"},
    {Status::rejected, "rejected"},
}};

constexpr std::array<std::pair<RejectReason, std::string_view>, 7> kReasonNames{{
    {RejectReason::none, "none"},
    {RejectReason::blur, "blur"},
    {RejectReason::pose, "pose"},
    {RejectReason::size, "size"},
    {RejectReason::identity_cluster, "identity_cluster"},
    {RejectReason::duplicate, "duplicate"},
    {RejectReason::manual, "manual"},
}};

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> get_opt(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<double>();
}

std::string get_str(const json& j, const char* key) {
    return j.contains(key) && j[key].is_string() ? j[key].get<std::string>() : std::string{};
}

json record_to_json(const FaceRecord& r) {
    json j;
    j["kind"] = "record";
    j["id"] = r.id;
    j["image_path"] = r.image_path;
    if (r.landmarks) {
        json pts = json::array();
        for (const auto& p : *r.landmarks) pts.push_back({p.x, p.y});
        j["landmarks"] = pts;
    } else {
        j["landmarks"] = nullptr;
    }
    j["face_mask_path"] = r.face_mask_path;
    j["eye_mask_path"] = r.eye_mask_path;
    j["mouth_mask_path"] = r.mouth_mask_path;
    j["embedding_path"] = r.embedding_path;
    j["blur_score"] = opt(r.blur_score);
    j["yaw"] = opt(r.yaw);
    j["pitch"] = opt(r.pitch);
    j["face_size"] = opt(r.face_size);
    j["cluster_id"] = r.cluster_id;
    j["status"] = to_string(r.status);
    j["reject_reason"] = to_string(r.reject_reason);
    j["dhash"] = r.dhash;
    j["load_error"] = r.load_error;
    return j;
}

FaceRecord record_from_json(const json& j) {
    FaceRecord r;
    r.id = j.at("id").get<std::string>();
    r.image_path = get_str(j, "image_path");
    if (j.contains("landmarks") && j["landmarks"].is_array()) {
        const auto& pts = j["landmarks"];
        if (pts.size() != imaging::kNumLandmarks) throw InvalidArgument("manifest: record " + r.id + " needs 68 landmarks");
        imaging::Landmarks68 lm;
        for (std::size_t i = 0; i < lm.size(); ++i) lm[i] = {pts[i].at(0).get<double>(), pts[i].at(1).get<double>()};
        r.landmarks = lm;
    }
    r.face_mask_path = get_str(j, "face_mask_path");
    r.eye_mask_path = get_str(j, "eye_mask_path");
    r.mouth_mask_path = get_str(j, "mouth_mask_path");
    r.embedding_path = get_str(j, "embedding_path");
    r.blur_score = get_opt(j, "blur_score");
    r.yaw = get_opt(j, "yaw");
    r.pitch = get_opt(j, "pitch");
    r.face_size = get_opt(j, "face_size");
    r.cluster_id = j.value("cluster_id", -1);
    r.status = parse_status(j.value("status", std::string("pending")));
    r.reject_reason = parse_reason(j.value("reject_reason", std::string("none")));
    r.dhash = get_str(j, "dhash");
    r.load_error = get_str(j, "load_error");
    return r;
}

}  // namespace

std::string_view to_string(Status s) {
    for (const auto& [v, name] : kStatusNames)
        if (v == s) return name;
    return "pending";
}

std::string_view to_string(RejectReason r) {
    for (const auto& [v, name] : kReasonNames)
        if (v == r) return name;
    return "none";
}

Status parse_status(std::string_view s) {
    for (const auto& [v, name] : kStatusNames)
        if (name == s) return v;
    throw InvalidArgument("unknown status '" + std::string(s) + "'");
}

RejectReason parse_reason(std::string_view s) {
    for (const auto& [v, name] : kReasonNames)
        if (name == s) return v;
    throw InvalidArgument("unknown reject reason '" + std::string(s) + "'");
}

bool is_auto_reason(RejectReason r) noexcept {
    return r == RejectReason::blur || r == RejectReason::pose || r == RejectReason::size ||
           r == RejectReason::identity_cluster || r == RejectReason::duplicate;
}

bool is_gate_reason(RejectReason r) noexcept {
    return r == RejectReason::blur || r == RejectReason::pose || r == RejectReason::size;
}

const FaceRecord* FacesetManifest::find(std::string_view id) const {
    for (const auto& r : records)
        if (r.id == id) return &r;
    return nullptr;
}

FaceRecord* FacesetManifest::find(std::string_view id) {
    for (auto& r : records)
        if (r.id == id) return &r;
    return nullptr;
}

void FacesetManifest::validate() const {
    std::set<std::string_view> ids;
    for (const auto& r : records) {
        if (!ids.insert(r.id).second) throw InvalidArgument("manifest: duplicate record id '" + r.id + "'");
        const bool auto_rej = r.status == Status::auto_rejected;
        if (auto_rej != is_auto_reason(r.reject_reason)) {
            throw InvalidArgument("manifest: record '" + r.id + "' has status " + std::string(to_string(r.status)) +
                                  " with reason " + std::string(to_string(r.reject_reason)));
        }
    }
}

std::size_t CurationCounts::auto_rejected() const noexcept {
    std::size_t s = 0;
    for (const auto& [_, n] : auto_rejected_by_reason) s += n;
    return s;
}

CurationCounts count_records(const FacesetManifest& m) {
    CurationCounts c;
    for (RejectReason r : {RejectReason::blur, RejectReason::pose, RejectReason::size,
                           RejectReason::identity_cluster, RejectReason::duplicate}) {
        c.auto_rejected_by_reason[std::string(to_string(r))] = 0;
    }
    for (const auto& r : m.records) {
        ++c.total;
        switch (r.status) {
            case Status::accepted: ++c.accepted; break;
            case Status::pending: ++c.pending; break;
            case Status::rejected: ++c.rejected; break;
            case Status::auto_rejected: ++c.auto_rejected_by_reason[std::string(to_string(r.reject_reason))]; break;
        }
    }
    return c;
}

std::string record_to_json_text(const FaceRecord& r) { return record_to_json(r).dump(); }

std::string serialize_manifest(const FacesetManifest& m) {
    json header;
    header["kind"] = "header";
    header["identity"] = m.identity;
    header["thresholds"] = {{"blur_min", m.thresholds.blur_min},
                            {"yaw_max", m.thresholds.yaw_max},
                            {"pitch_max", m.thresholds.pitch_max},
                            {"size_min", m.thresholds.size_min},
                            {"dedup_hamming_max", m.thresholds.dedup_hamming_max}};
    header["kept_clusters"] = m.kept_clusters;
    header["embedding_dim"] = m.embedding_dim;
    std::string out = header.dump() + "\n";
    for (const auto& r : m.records) out += record_to_json(r).dump() + "\n";
    return out;
}

FacesetManifest parse_manifest(std::string_view text) {
    FacesetManifest m;
    std::istringstream in{std::string(text)};
    std::string line;
    bool have_header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw InvalidArgument("manifest line " + std::to_string(lineno) + ": " + e.what());
        }
        const std::string kind = j.value("kind", std::string(have_header ? "record" : "header"));
        if (kind == "header") {
            if (have_header) throw InvalidArgument("manifest: second header at line " + std::to_string(lineno));
            have_header = true;
            m.identity = j.value("identity", std::string{});
            if (j.contains("thresholds")) {
                const auto& t = j["thresholds"];
                m.thresholds.blur_min = t.value("blur_min", m.thresholds.blur_min);
                m.thresholds.yaw_max = t.value("yaw_max", m.thresholds.yaw_max);
                m.thresholds.pitch_max = t.value("pitch_max", m.thresholds.pitch_max);
                m.thresholds.size_min = t.value("size_min", m.thresholds.size_min);
                m.thresholds.dedup_hamming_max = t.value("dedup_hamming_max", m.thresholds.dedup_hamming_max);
            }
            if (j.contains("kept_clusters")) m.kept_clusters = j["kept_clusters"].get<std::set<int>>();
            m.embedding_dim = j.value("embedding_dim", 0);
        } else {
            try {
                m.records.push_back(record_from_json(j));
            } catch (const json::exception& e) {
                throw InvalidArgument("manifest line " + std::to_string(lineno) + ": " + e.what());
            }
        }
    }
    if (!have_header) throw InvalidArgument("manifest: missing header line");
    m.validate();
    return m;
}

FacesetManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_manifest(ss.str());
}

void save_manifest(const std::filesystem::path& path, const FacesetManifest& m) {
    m.validate();
    imaging::write_file_atomic(path, serialize_manifest(m));
}

}  // namespace swapforge::curation
