#include <cstdio>
#include <random>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "scratch.hpp"
#include "swapforge/curation/manifest.hpp"
#include "swapforge/curation/rules.hpp"
#include "swapforge/model/synthetic.hpp"
#include "swapforge/pipeline/review_service.hpp"

using namespace swapforge;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path make_manifest(const ScratchDir& d) {
    model::SyntheticOptions opt;
    opt.size = 96;
    model::write_synthetic_faceset(d.path, model::Identity::A, 16, 81, opt, 0.0, 4);
    auto m = curation::manifest_from_directory(d.path, "A");
    m = curation::score_records(std::move(m), {d.path, 1});
    const fs::path p = d / "manifest.jsonl";
    curation::save_manifest(p, m);
    return p;
}

struct Running {
    pipeline::ReviewService svc;
    int port = 0;
    std::thread th;
    explicit Running(pipeline::ReviewOptions o) : svc(std::move(o)) {
        port = svc.bind("127.0.0.1", 0);
        th = std::thread([this] { svc.serve(); });
    }
    ~Running() {
        svc.stop();
        th.join();
    }
    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port);
        c.set_read_timeout(5, 0);
        return c;
    }
};

std::string run_cli(const std::string& args) {
    const std::string cmd = std::string(SWAPFORGE_CLI) + " " + args + " 2>&1";
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[512];
    while (fgets(buf, sizeof buf, p)) out += buf;
    const int rc = pclose(p);
    CHECK_MESSAGE(rc == 0, out);
    return out;
}

}  // namespace

TEST_CASE("review service read endpoints") {
    ScratchDir d("review_read");
    const auto path = make_manifest(d);
    const auto m = curation::load_manifest(path);
    Running r({path, d.path, {}, std::chrono::milliseconds(200)});
    auto c = r.client();

    auto res = c.Get("/api/records");
    REQUIRE(res);
    CHECK(res->status == 200);
    const auto all = json::parse(res->body);
    REQUIRE(all["count"] == m.records.size());
    for (std::size_t i = 0; i < m.records.size(); ++i)
        CHECK(all["records"][i] == json::parse(curation::record_to_json_text(m.records[i])));

    res = c.Get("/api/records/" + m.records[3].id);
    REQUIRE(res);
    CHECK(json::parse(res->body)["id"] == m.records[3].id);
    CHECK(json::parse(res->body)["blur_score"].get<double>() == doctest::Approx(*m.records[3].blur_score));

    res = c.Get("/api/records/nope");
    REQUIRE(res);
    CHECK(res->status == 404);
    CHECK(json::parse(res->body).contains("error"));

    res = c.Get("/api/images/" + m.records[0].id + "?size=40");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->get_header_value("Content-Type") == "image/png");
    CHECK(res->body.substr(1, 3) == "PNG");

    res = c.Get("/api/records?status=accepted");
    REQUIRE(res);
    CHECK(json::parse(res->body)["count"] == 0);
    res = c.Get("/api/records?status=bogus");
    REQUIRE(res);
    CHECK(res->status == 400);

    res = c.Get("/api/summary");
    REQUIRE(res);
    CHECK(json::parse(res->body)["counts"]["total"] == m.records.size());
}

TEST_CASE("decisions persist across a restart") {
    ScratchDir d("review_decide");
    const auto path = make_manifest(d);
    const auto ids = curation::load_manifest(path).records;
    {
        Running r({path, d.path, {}, std::chrono::milliseconds(200)});
        auto c = r.client();
        auto res = c.Post("/api/records/" + ids[1].id + "/decision", R"({"status":"rejected"})", "application/json");
        REQUIRE(res);
        CHECK(res->status == 200);
        res = c.Post("/api/records/" + ids[2].id + "/decision", R"({"status":"accepted"})", "application/json");
        REQUIRE(res);
        res = c.Get("/api/records/" + ids[1].id);
        REQUIRE(res);
        const auto rec = json::parse(res->body);
        CHECK(rec["status"] == "rejected");
        CHECK(rec["reject_reason"] == "manual");

        res = c.Post("/api/records/zzz/decision", R"({"status":"rejected"})", "application/json");
        REQUIRE(res);
        CHECK(res->status == 404);
        res = c.Post("/api/records/" + ids[1].id + "/decision", "{oops", "application/json");
        REQUIRE(res);
        CHECK(res->status == 400);
        res = c.Post("/api/records/" + ids[1].id + "/decision", R"({"status":"auto_rejected"})",
                     "application/json");
        REQUIRE(res);
        CHECK(res->status == 400);
    }
    const auto reloaded = curation::load_manifest(path);
    CHECK(reloaded.find(ids[1].id)->status == curation::Status::rejected);
    CHECK(reloaded.find(ids[2].id)->status == curation::Status::accepted);

    Running again({path, d.path, {}, std::chrono::milliseconds(200)});
    auto c = again.client();
    const auto res = c.Get("/api/records/" + ids[2].id);
    REQUIRE(res);
    CHECK(json::parse(res->body)["status"] == "accepted");
}

TEST_CASE("threshold recounts agree with the command line") {
    ScratchDir d("review_thresholds");
    const auto path = make_manifest(d);
    Running r({path, d.path, {}, std::chrono::milliseconds(200)});
    auto c = r.client();
    std::mt19937_64 rng(82);
    std::uniform_real_distribution<double> blur(0, 400), yaw(0, 20), pitch(0, 20), size(20, 90);
    for (int t = 0; t < 5; ++t) {
        const json body{{"blur_min", blur(rng)}, {"yaw_max", yaw(rng)}, {"pitch_max", pitch(rng)},
                        {"size_min", size(rng)}};
        const auto res = c.Put("/api/thresholds", body.dump(), "application/json");
        REQUIRE(res);
        REQUIRE(res->status == 200);
        const auto counts = json::parse(res->body)["counts"];

        const fs::path copy = d / ("cli_" + std::to_string(t) + ".jsonl");
        fs::copy_file(path, copy, fs::copy_options::overwrite_existing);
        char args[512];
        std::snprintf(args, sizeof args,
                      "curate gate --manifest %s --blur-min %.17g --yaw-max %.17g --pitch-max %.17g --size-min %.17g",
                      copy.c_str(), body["blur_min"].get<double>(), body["yaw_max"].get<double>(),
                      body["pitch_max"].get<double>(), body["size_min"].get<double>());
        run_cli(args);
        const auto cli = json::parse(run_cli("curate report --json --manifest " + copy.string()));
        CHECK(cli == counts);
    }
    const auto bad = c.Put("/api/thresholds", R"({"blur_min":"high"})", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    const auto unknown = c.Put("/api/thresholds", R"({"speed":1})", "application/json");
    REQUIRE(unknown);
    CHECK(unknown->status == 400);
}

TEST_CASE("writes report contention with 409") {
    ScratchDir d("review_busy");
    const auto path = make_manifest(d);
    const auto id = curation::load_manifest(path).records[0].id;
    Running r({path, d.path, {}, std::chrono::milliseconds(50)});
    auto c = r.client();
    {
        auto hold = r.svc.lock_writes();
        const auto res = c.Post("/api/records/" + id + "/decision", R"({"status":"accepted"})", "application/json");
        REQUIRE(res);
        CHECK(res->status == 409);
        const auto th = c.Put("/api/thresholds", R"({"blur_min":1})", "application/json");
        REQUIRE(th);
        CHECK(th->status == 409);
    }
    const auto res = c.Post("/api/records/" + id + "/decision", R"({"status":"accepted"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
}
