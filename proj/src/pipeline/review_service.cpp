#include "swapforge/pipeline/review_service.hpp"

#include <algorithm>
#include <regex>

#include "httplib.h"
#include "json.hpp"
#include "swapforge/curation/rules.hpp"
#include "swapforge/errors.hpp"
#include "swapforge/imaging/geometry.hpp"
#include "swapforge/imaging/io.hpp"

namespace swapforge::pipeline {

using nlohmann::json;
namespace fs = std::filesystem;

struct ReviewService::Http {
    httplib::Server server;
};

namespace {

ApiResponse error(int status, const std::string& code, const std::string& detail) {
    return {status, "application/json", json{{"error", code}, {"detail", detail}}.dump()};
}

ApiResponse ok(const json& j) { return {200, "application/json", j.dump()}; }

json counts_object(const curation::CurationCounts& c) {
    json by_reason = json::object();
    for (const auto& [k, v] : c.auto_rejected_by_reason) by_reason[k] = v;
    return {{"total", c.total},
            {"accepted", c.accepted},
            {"pending", c.pending},
            {"rejected", c.rejected},
            {"kept", c.kept()},
            {"auto_rejected", c.auto_rejected()},
            {"auto_rejected_by_reason", by_reason}};
}

json thresholds_object(const curation::Thresholds& t) {
    return {{"blur_min", t.blur_min},
            {"yaw_max", t.yaw_max},
            {"pitch_max", t.pitch_max},
            {"size_min", t.size_min},
            {"dedup_hamming_max", t.dedup_hamming_max}};
}

}  // namespace

std::string counts_json(const curation::CurationCounts& c) { return counts_object(c).dump(); }

ReviewService::ReviewService(ReviewOptions opts) : opts_(std::move(opts)), http_(std::make_unique<Http>()) {
    manifest_ = curation::load_manifest(opts_.manifest_path);
    if (opts_.images_root.empty()) opts_.images_root = opts_.manifest_path.parent_path();
}

ReviewService::~ReviewService() { stop(); }

curation::FacesetManifest ReviewService::snapshot() const {
    std::shared_lock lock(mutex_);
    return manifest_;
}

std::unique_lock<std::shared_timed_mutex> ReviewService::lock_writes() { return std::unique_lock(mutex_); }

ApiResponse ReviewService::handle(const std::string& method, const std::string& path,
                                  const std::map<std::string, std::string>& query, const std::string& body) {
    static const std::regex record_re("^/api/records/([^/]+)$");
    static const std::regex decision_re("^/api/records/([^/]+)/decision$");
    static const std::regex image_re("^/api/images/([^/]+)$");
    std::smatch m;
    try {
        if (method == "GET" && path == "/api/records") return list_records(query);
        if (method == "GET" && std::regex_match(path, m, record_re)) return get_record(m[1]);
        if (method == "GET" && std::regex_match(path, m, image_re)) return get_image(m[1], query);
        if (method == "POST" && std::regex_match(path, m, decision_re)) return post_decision(m[1], body);
        if (method == "PUT" && path == "/api/thresholds") return put_thresholds(body);
        if (method == "GET" && path == "/api/summary") return summary();
        if (path.rfind("/api/", 0) == 0) return error(404, "not_found", method + " " + path);
        return error(404, "not_found", path);
    } catch (const json::exception& e) {
        return error(400, "bad_request", e.what());
    } catch (const InvalidArgument& e) {
        return error(400, "bad_request", e.what());
    } catch (const PreconditionError& e) {
        return error(422, "precondition_failed", e.what());
    } catch (const std::exception& e) {
        return error(500, "internal", e.what());
    }
}

ApiResponse ReviewService::list_records(const std::map<std::string, std::string>& query) const {
    std::optional<curation::Status> status;
    std::optional<curation::RejectReason> reason;
    if (auto it = query.find("status"); it != query.end() && !it->second.empty()) {
        status = curation::parse_status(it->second);
    }
    if (auto it = query.find("reason"); it != query.end() && !it->second.empty()) {
        reason = curation::parse_reason(it->second);
    }
    std::shared_lock lock(mutex_);
    json arr = json::array();
    for (const auto& r : manifest_.records) {
        if (status && r.status != *status) continue;
        if (reason && r.reject_reason != *reason) continue;
        arr.push_back(json::parse(curation::record_to_json_text(r)));
    }
    const auto n = arr.size();
    return ok({{"records", std::move(arr)}, {"count", n}});
}

ApiResponse ReviewService::get_record(const std::string& id) const {
    std::shared_lock lock(mutex_);
    const auto* r = manifest_.find(id);
    if (!r) return error(404, "not_found", "unknown record id '" + id + "'");
    return ok(json::parse(curation::record_to_json_text(*r)));
}

ApiResponse ReviewService::get_image(const std::string& id, const std::map<std::string, std::string>& query) const {
    std::string rel;
    {
        std::shared_lock lock(mutex_);
        const auto* r = manifest_.find(id);
        if (!r) return error(404, "not_found", "unknown record id '" + id + "'");
        rel = r->image_path;
    }
    const fs::path path = curation::resolve_path(opts_.images_root, rel);
    if (!fs::is_regular_file(path)) return error(404, "image_missing", path.string());
    int size = 0;
    if (auto it = query.find("size"); it != query.end()) {
        try {
            size = std::stoi(it->second);
        } catch (const std::exception&) {
            return error(400, "bad_request", "size must be an integer");
        }
        if (size < 1) return error(400, "bad_request", "size must be >= 1");
    }
    auto img = imaging::read_png(path);
    const int side = std::max(img.height(), img.width());
    if (size > 0 && side > size) {
        const double f = static_cast<double>(size) / side;
        img = imaging::resize_bilinear(img, std::max(1, static_cast<int>(img.height() * f + 0.5)),
                                       std::max(1, static_cast<int>(img.width() * f + 0.5)));
    }
    return {200, "image/png", imaging::encode_png(img)};
}

ApiResponse ReviewService::post_decision(const std::string& id, const std::string& body) {
    const auto j = json::parse(body);
    if (!j.is_object() || !j.contains("status") || !j["status"].is_string()) {
        return error(400, "bad_request", "body must be {\"status\": accepted|rejected|pending}");
    }
    const auto status = curation::parse_status(j["status"].get<std::string>());
    if (status == curation::Status::auto_rejected) {
        return error(400, "bad_request", "auto_rejected is set by the curation stages only");
    }
    std::unique_lock lock(mutex_, std::defer_lock);
    if (!lock.try_lock_for(opts_.write_timeout)) return error(409, "busy", "manifest is being written");
    auto next = manifest_;
    auto* r = next.find(id);
    if (!r) return error(404, "not_found", "unknown record id '" + id + "'");
    r->status = status;
    r->reject_reason = status == curation::Status::rejected ? curation::RejectReason::manual : curation::RejectReason::none;
    const auto out = json::parse(curation::record_to_json_text(*r));
    curation::save_manifest(opts_.manifest_path, next);
    manifest_ = std::move(next);
    return ok(out);
}

ApiResponse ReviewService::put_thresholds(const std::string& body) {
    const auto j = json::parse(body);
    if (!j.is_object()) return error(400, "bad_request", "body must be a JSON object");
    std::unique_lock lock(mutex_, std::defer_lock);
    if (!lock.try_lock_for(opts_.write_timeout)) return error(409, "busy", "manifest is being written");
    auto next = manifest_;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number()) return error(400, "bad_request", "'" + k + "' must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) return error(400, "bad_request", "'" + k + "' must be finite");
        if (k == "blur_min") next.thresholds.blur_min = x;
        else if (k == "yaw_max") next.thresholds.yaw_max = x;
        else if (k == "pitch_max") next.thresholds.pitch_max = x;
        else if (k == "size_min") next.thresholds.size_min = x;
        else return error(400, "bad_request", "unknown threshold '" + k + "'");
    }
    next = curation::apply_quality_gates(std::move(next));
    curation::save_manifest(opts_.manifest_path, next);
    manifest_ = std::move(next);
    return ok({{"counts", counts_object(curation::count_records(manifest_))},
               {"thresholds", thresholds_object(manifest_.thresholds)}});
}

ApiResponse ReviewService::summary() const {
    std::shared_lock lock(mutex_);
    const auto c = curation::count_records(manifest_);
    return ok({{"identity", manifest_.identity},
               {"counts", counts_object(c)},
               {"thresholds", thresholds_object(manifest_.thresholds)},
               {"kept_clusters", manifest_.kept_clusters},
               {"target_band",
                {{"min", curation::kDefaultFacesetMin},
                 {"max", curation::kDefaultFacesetMax},
                 {"within", c.kept() >= curation::kDefaultFacesetMin && c.kept() <= curation::kDefaultFacesetMax}}}});
}

int ReviewService::bind(const std::string& host, int port) {
    auto& srv = http_->server;
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [k, v] : req.params) query.emplace(k, v);
        const auto r = handle(req.method, req.path, query, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    srv.Get("/api/.*", forward);
    srv.Post("/api/.*", forward);
    srv.Put("/api/.*", forward);
    if (!opts_.static_dir.empty() && !srv.set_mount_point("/", opts_.static_dir.string())) {
        throw IoError("review: static directory not found: " + opts_.static_dir.string());
    }
    if (port == 0) return srv.bind_to_any_port(host);
    if (!srv.bind_to_port(host, port)) throw IoError("review: cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void ReviewService::serve() { http_->server.listen_after_bind(); }

void ReviewService::stop() {
    if (http_ && http_->server.is_running()) http_->server.stop();
}

}  // namespace swapforge::pipeline
