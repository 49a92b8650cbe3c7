#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "scratch.hpp"
#include "swapforge/alignment/face_template.hpp"
#include "swapforge/curation/dedup.hpp"
#include "swapforge/curation/kmeans.hpp"
#include "swapforge/curation/manifest.hpp"
#include "swapforge/curation/pose.hpp"
#include "swapforge/curation/quality.hpp"
#include "swapforge/curation/rules.hpp"
#include "swapforge/errors.hpp"
#include "swapforge/imaging/filters.hpp"
#include "swapforge/imaging/io.hpp"
#include "swapforge/model/synthetic.hpp"

using namespace swapforge;
using namespace swapforge::curation;
using imaging::ImageBuf;

TEST_CASE("blur_score closed forms") {
    CHECK(blur_score(ImageBuf(16, 16, 1, 0.4f)) == 0.0);
    ImageBuf impulse(3, 3, 1);
    impulse.at(0, 1, 1) = 1.0f / 255.0f;
    CHECK(blur_score(impulse) == doctest::Approx(20.0 / 9.0).epsilon(1e-9));
    CHECK_THROWS_AS(blur_score(ImageBuf()), InvalidArgument);
}

TEST_CASE("blur_score ignores constant offsets and orders blurred below sharp") {
    std::mt19937_64 rng(21);
    int correct = 0;
    for (int t = 0; t < 100; ++t) {
        const auto sharp = oracle::random_image(48, 48, 3, rng);
        const auto soft = imaging::box_blur(sharp, 1 + t % 3);
        if (blur_score(sharp) > blur_score(soft)) ++correct;
    }
    CHECK(correct == 100);

    auto img = oracle::random_image(32, 32, 1, rng);
    for (auto& v : img.data()) v *= 0.5f;
    auto shifted = img;
    for (auto& v : shifted.data()) v += 0.25f;
    CHECK(blur_score(shifted) == doctest::Approx(blur_score(img)).epsilon(1e-6));
}

TEST_CASE("face_size is the longest bounding-box side") {
    imaging::Landmarks68 lm{};
    for (std::size_t i = 0; i < lm.size(); ++i) lm[i] = {10.0 + i % 5, 20.0 + i % 7};
    lm[3] = {10, 250};
    CHECK(face_size(lm) == doctest::Approx(230.0));
}

TEST_CASE("estimate_pose recovers synthetic poses") {
    const auto& t3 = alignment::face_template_3d();
    const auto frontal = project_template(t3, {}, 500.0, {256, 256});
    const Pose p0 = estimate_pose(frontal);
    CHECK(std::abs(p0.yaw) < 1e-6);
    CHECK(std::abs(p0.pitch) < 1e-6);
    CHECK(std::abs(p0.roll) < 1e-6);

    const auto yaw20 = project_template(t3, {20.0, 0.0, 0.0}, 500.0, {300, 240});
    const Pose p = estimate_pose(yaw20);
    CHECK(std::abs(p.yaw - 20.0) <= 1.0);
    CHECK(std::abs(p.pitch) < 0.5);

    const Pose mixed{-15.0, 10.0, 5.0};
    const Pose q = estimate_pose(project_template(t3, mixed, 300.0, {100, 100}));
    CHECK(q.yaw == doctest::Approx(mixed.yaw).epsilon(1e-6));
    CHECK(q.pitch == doctest::Approx(mixed.pitch).epsilon(1e-6));
    CHECK(q.roll == doctest::Approx(mixed.roll).epsilon(1e-6));

    // Mirroring negates yaw.
    const Pose m = estimate_pose(imaging::mirror_landmarks(yaw20, 256.0));
    CHECK(m.yaw == doctest::Approx(-p.yaw).epsilon(1e-6));

    imaging::Landmarks68 line{};
    for (std::size_t i = 0; i < line.size(); ++i) line[i] = {double(i), 2.0 * i + 1};
    CHECK_THROWS_AS(estimate_pose(line), NumericalDegeneracy);
}

namespace {

std::vector<Embedding> blobs(std::mt19937_64& rng, int per, std::vector<int>& labels) {
    std::normal_distribution<float> noise(0.0f, 0.3f);
    std::vector<Embedding> out;
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < per; ++i) {
            Embedding e(8);
            for (int d = 0; d < 8; ++d) e[d] = noise(rng) + (d == c ? 10.0f : 0.0f);
            out.push_back(e);
            labels.push_back(c);
        }
    return out;
}

}  // namespace

TEST_CASE("kmeans recovers planted blobs") {
    std::mt19937_64 rng(22);
    std::vector<int> truth;
    const auto data = blobs(rng, 100, truth);
    const auto res = kmeans_cluster(data, 3, 5);
    CHECK(oracle::adjusted_rand_index(res.assignments, truth) >= 0.99);
    for (std::size_t i = 1; i < res.objective_history.size(); ++i)
        CHECK(res.objective_history[i] <= res.objective_history[i - 1] + 1e-9);
    CHECK(kmeans_cluster(data, 3, 5).assignments == res.assignments);
    CHECK(kDefaultClusters == 25);
}

TEST_CASE("kmeans edge cases") {
    std::mt19937_64 rng(23);
    std::vector<int> truth;
    const auto data = blobs(rng, 10, truth);
    const auto one = kmeans_cluster(data, 1, 1);
    for (int a : one.assignments) CHECK(a == 0);
    std::vector<Embedding> same(12, Embedding{1.0f, 2.0f});
    const auto dup = kmeans_cluster(same, 3, 1);
    CHECK(dup.objective_history.back() == 0.0);
    CHECK_THROWS_AS(kmeans_cluster(data, 0, 1), InvalidArgument);
    CHECK_THROWS_AS(kmeans_cluster(data, 31, 1), InvalidArgument);
    CHECK_THROWS_AS(kmeans_cluster({{1.0f}, {1.0f, 2.0f}}, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(kmeans_cluster({{NAN}}, 1, 1), InvalidArgument);
}

TEST_CASE("difference hash basics") {
    std::mt19937_64 rng(24);
    const auto img = oracle::random_image(40, 40, 3, rng);
    const auto h = difference_hash(img);
    CHECK(hash_from_hex(hash_to_hex(h)) == h);
    CHECK(hash_to_hex(h).size() == 16);
    CHECK(hamming_distance(h, h) == 0);
    CHECK(hamming_distance(0, ~std::uint64_t{0}) == 64);
    CHECK(difference_hash(ImageBuf(20, 20, 1, 0.5f)) == 0);
    ImageBuf ramp(8, 9, 1);
    for (int x = 0; x < 9; ++x)
        for (int y = 0; y < 8; ++y) ramp.at(0, y, x) = 1.0f - x / 9.0f;
    CHECK(difference_hash(ramp) == ~std::uint64_t{0});
}

TEST_CASE("dedup rejects exact duplicates and keeps independent noise") {
    std::mt19937_64 rng(25);
    int good = 0;
    for (int t = 0; t < 100; ++t) {
        ScratchDir dir("dedup");
        const auto a = oracle::random_image(32, 32, 3, rng);
        const auto b = oracle::random_image(32, 32, 3, rng);
        imaging::write_png(dir / "r0.png", a);
        imaging::write_png(dir / "r1.png", b);
        imaging::write_png(dir / "r2.png", a);
        auto m = manifest_from_directory(dir.path, "A");
        m = dedup(std::move(m), {dir.path, 1});
        const bool ok = m.records[0].status == Status::pending && m.records[1].status == Status::pending &&
                        m.records[2].status == Status::auto_rejected &&
                        m.records[2].reject_reason == RejectReason::duplicate;
        good += ok;
    }
    CHECK(good == 100);
}

namespace {

FacesetManifest scored_faceset(const ScratchDir& dir) {
    model::SyntheticOptions opt;
    opt.size = 128;
    model::write_synthetic_faceset(dir.path, model::Identity::A, 24, 9, opt, 0.25, 8);
    auto m = manifest_from_directory(dir.path, "A");
    m = score_records(std::move(m), {dir.path, 2});
    m.thresholds.size_min = 60;
    m.thresholds.blur_min = 5;
    return m;
}

}  // namespace

TEST_CASE("curation stages are idempotent and leave manual decisions alone") {
    ScratchDir dir("curation_idem");
    auto m = scored_faceset(dir);
    REQUIRE(m.records.size() == 24);
    for (const auto& r : m.records) {
        REQUIRE(r.blur_score.has_value());
        REQUIRE(r.yaw.has_value());
    }
    m.records[0].status = Status::rejected;
    m.records[0].reject_reason = RejectReason::manual;
    m.records[1].status = Status::accepted;

    const auto clustered = assign_clusters(m, dir.path, 2, 3);
    CHECK(assign_clusters(clustered, dir.path, 2, 3) == clustered);
    const auto filtered = filter_clusters(clustered, {0});
    CHECK(filter_clusters(filtered, {0}) == filtered);
    const auto gated = apply_quality_gates(filtered);
    CHECK(apply_quality_gates(gated) == gated);
    const auto deduped = dedup(gated, {dir.path, 1});
    CHECK(dedup(deduped, {dir.path, 2}) == deduped);

    for (const auto* s : {&filtered, &gated, &deduped}) {
        CHECK(s->records[0].status == Status::rejected);
        CHECK(s->records[0].reject_reason == RejectReason::manual);
        CHECK(s->records[1].status == Status::accepted);
    }
    std::size_t cluster_rejects = 0;
    for (const auto& r : filtered.records)
        if (r.reject_reason == RejectReason::identity_cluster) ++cluster_rejects;
    CHECK(cluster_rejects > 0);

    // Re-running a stage with looser settings restores what it rejected.
    const auto all = filter_clusters(filtered, {0, 1});
    for (const auto& r : all.records) CHECK(r.reject_reason != RejectReason::identity_cluster);
}

TEST_CASE("quality gates apply the first failing rule in size, pose, blur order") {
    FacesetManifest m;
    auto rec = [](std::string id, double blur, double yaw, double pitch, double size) {
        FaceRecord r;
        r.id = std::move(id);
        r.blur_score = blur;
        r.yaw = yaw;
        r.pitch = pitch;
        r.face_size = size;
        return r;
    };
    m.records = {rec("a", 500, 0, 0, 300), rec("b", 10, 50, 0, 100), rec("c", 10, 0, 35, 300),
                 rec("d", 10, 0, 0, 300), rec("e", 100, -40, 30, 192)};
    const auto g = apply_quality_gates(m);
    CHECK(g.records[0].status == Status::pending);
    CHECK(g.records[1].reject_reason == RejectReason::size);
    CHECK(g.records[2].reject_reason == RejectReason::pose);
    CHECK(g.records[3].reject_reason == RejectReason::blur);
    CHECK(g.records[4].status == Status::pending);  // boundaries are inclusive

    auto loose = g;
    loose.thresholds.blur_min = 5;
    const auto r = apply_quality_gates(loose);
    CHECK(r.records[3].status == Status::pending);
    CHECK(r.records[3].reject_reason == RejectReason::none);

    FacesetManifest missing;
    missing.records.push_back(FaceRecord{});
    missing.records[0].id = "x";
    CHECK_THROWS_AS(apply_quality_gates(missing), PreconditionError);
}

TEST_CASE("default thresholds and counts") {
    const Thresholds t;
    CHECK(t.blur_min == 100.0);
    CHECK(t.yaw_max == 40.0);
    CHECK(t.pitch_max == 30.0);
    CHECK(t.size_min == 192.0);
    FacesetManifest m;
    for (int i = 0; i < 4; ++i) {
        FaceRecord r;
        r.id = "r" + std::to_string(i);
        m.records.push_back(r);
    }
    m.records[1].status = Status::accepted;
    m.records[2].status = Status::rejected;
    m.records[2].reject_reason = RejectReason::manual;
    m.records[3].status = Status::auto_rejected;
    m.records[3].reject_reason = RejectReason::blur;
    const auto c = count_records(m);
    CHECK(c.total == 4);
    CHECK(c.kept() == 2);
    CHECK(c.rejected == 1);
    CHECK(c.auto_rejected() == 1);
    CHECK(c.auto_rejected_by_reason.at("blur") == 1);
}

TEST_CASE("manifest serialization round-trips") {
    ScratchDir dir("manifest_rt");
    auto m = scored_faceset(dir);
    m = assign_clusters(std::move(m), dir.path, 3, 1);
    m.kept_clusters = {0, 2};
    m.records[2].status = Status::auto_rejected;
    m.records[2].reject_reason = RejectReason::pose;
    m.records[3].dhash = "00ff00ff00ff00ff";
    const auto text = serialize_manifest(m);
    CHECK(parse_manifest(text) == m);
    save_manifest(dir / "m.jsonl", m);
    CHECK(load_manifest(dir / "m.jsonl") == m);
    CHECK_THROWS(parse_manifest("{not json"));

    auto bad = m;
    bad.records[1].id = bad.records[0].id;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
    CHECK(parse_status("accepted") == Status::accepted);
    CHECK(parse_reason("identity_cluster") == RejectReason::identity_cluster);
    CHECK_THROWS_AS(parse_status("nope"), InvalidArgument);
}
