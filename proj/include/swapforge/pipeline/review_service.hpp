#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "swapforge/curation/manifest.hpp"

namespace swapforge::pipeline {

struct ReviewOptions {
    std::filesystem::path manifest_path;
    std::filesystem::path images_root;  // defaults to the manifest's directory
    std::filesystem::path static_dir;   // optional UI assets served at /
    std::chrono::milliseconds write_timeout{250};
};

struct ApiResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// JSON API over a faceset manifest for the manual review step:
///   GET  /api/records?status=&reason=
///   GET  /api/records/{id}
///   GET  /api/images/{id}[?size=N]         PNG, longest side scaled to N
///   POST /api/records/{id}/decision        {"status": accepted|rejected|pending}
///   PUT  /api/thresholds                   {blur_min?, yaw_max?, pitch_max?, size_min?}
///   GET  /api/summary
/// Reads run concurrently. Writes are serialized, saved atomically before
/// the response, and answer 409 when the write lock stays busy for longer
/// than write_timeout. Errors are {"error", "detail"}.
class ReviewService {
public:
    explicit ReviewService(ReviewOptions opts);
    ~ReviewService();

    ReviewService(const ReviewService&) = delete;
    ReviewService& operator=(const ReviewService&) = delete;

    /// Transport-independent request handling.
    ApiResponse handle(const std::string& method, const std::string& path,
                       const std::map<std::string, std::string>& query, const std::string& body);

    curation::FacesetManifest snapshot() const;

    /// Holds the writer lock, e.g. while the manifest is maintained
    /// externally; writes requested meanwhile get 409.
    std::unique_lock<std::shared_timed_mutex> lock_writes();

    /// Binds the HTTP server; port 0 picks a free port. Returns the port.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    void serve();
    void stop();

private:
    ApiResponse list_records(const std::map<std::string, std::string>& query) const;
    ApiResponse get_record(const std::string& id) const;
    ApiResponse get_image(const std::string& id, const std::map<std::string, std::string>& query) const;
    ApiResponse post_decision(const std::string& id, const std::string& body);
    ApiResponse put_thresholds(const std::string& body);
    ApiResponse summary() const;

    ReviewOptions opts_;
    mutable std::shared_timed_mutex mutex_;
    curation::FacesetManifest manifest_;
    struct Http;
    std::unique_ptr<Http> http_;
};

/// Counts object shared by the service and CLI reports.
std::string counts_json(const curation::CurationCounts& c);

}  // namespace swapforge::pipeline
