#include <iostream>
#include <map>
#include <set>

#include "commands.hpp"
#include "swapforge/curation/kmeans.hpp"
#include "swapforge/curation/rules.hpp"
#include "swapforge/pipeline/review_service.hpp"

namespace swapforge::cli {

namespace fs = std::filesystem;

namespace {

struct CurateArgs {
    std::string manifest;
    std::string images_root;
    std::string dir;
    std::string identity;
    unsigned workers = 1;
    int k = curation::kDefaultClusters;
    std::uint64_t seed = 7;
    std::vector<int> keep;
    bool json = false;
};

fs::path images_root(const CurateArgs& a) {
    return a.images_root.empty() ? fs::path(a.manifest).parent_path() : fs::path(a.images_root);
}

}  // namespace

void add_curate(CLI::App& app) {
    auto args = std::make_shared<CurateArgs>();
    auto thresholds = std::make_shared<std::map<std::string, double>>();
    auto* curate = app.add_subcommand("curate", "Faceset curation stages on a manifest");
    curate->require_subcommand(1);

    auto manifest_opts = [&](CLI::App* sub) {
        sub->add_option("--manifest", args->manifest, "Manifest (JSON Lines)")->required();
        sub->add_option("--images-root", args->images_root, "Base for relative paths (default: manifest dir)");
    };

    auto* init = curate->add_subcommand("init", "Build a manifest from a directory of <id>.png files");
    init->add_option("--dir", args->dir, "Faceset directory")->required();
    init->add_option("--identity", args->identity, "Identity name")->required();
    init->add_option("--manifest", args->manifest, "Output manifest (default: <dir>/manifest.jsonl)");
    init->callback([args] {
        const fs::path out = args->manifest.empty() ? fs::path(args->dir) / "manifest.jsonl" : fs::path(args->manifest);
        auto m = curation::manifest_from_directory(args->dir, args->identity);
        if (out.parent_path() != fs::path(args->dir)) {
            // Keep paths valid relative to the manifest's own directory.
            const auto rel = fs::relative(args->dir, out.parent_path().empty() ? "." : out.parent_path());
            auto fix = [&](std::string& p) {
                if (!p.empty()) p = (rel / p).generic_string();
            };
            for (auto& r : m.records) {
                fix(r.image_path);
                fix(r.face_mask_path);
                fix(r.eye_mask_path);
                fix(r.mouth_mask_path);
                fix(r.embedding_path);
            }
        }
        curation::save_manifest(out, m);
        std::cout << "wrote " << out.string() << " with " << m.records.size() << " records\n";
    });

    auto* score = curate->add_subcommand("score", "Compute blur score, yaw/pitch and face size");
    manifest_opts(score);
    score->add_option("--workers", args->workers, "Worker threads (0 = all cores)");
    score->callback([args] {
        auto m = curation::load_manifest(args->manifest);
        m = curation::score_records(std::move(m), {images_root(*args), args->workers});
        curation::save_manifest(args->manifest, m);
        std::size_t failed = 0;
        for (const auto& r : m.records) failed += !r.load_error.empty();
        std::cout << "scored " << m.records.size() - failed << " records";
        if (failed) std::cout << " (" << failed << " failed to load)";
        std::cout << "\n";
    });

    auto* cluster = curate->add_subcommand("cluster", "k-means over embeddings; optional identity-cluster filter");
    manifest_opts(cluster);
    cluster->add_option("--k", args->k, "Number of clusters")->check(CLI::PositiveNumber);
    cluster->add_option("--seed", args->seed, "k-means++ seed");
    cluster->add_option("--keep", args->keep, "Cluster ids showing the person of interest")->delimiter(',');
    cluster->callback([args] {
        auto m = curation::load_manifest(args->manifest);
        m = curation::assign_clusters(std::move(m), images_root(*args), args->k, args->seed);
        std::map<int, std::size_t> sizes;
        for (const auto& r : m.records)
            if (r.cluster_id >= 0) ++sizes[r.cluster_id];
        if (!args->keep.empty()) m = curation::filter_clusters(std::move(m), {args->keep.begin(), args->keep.end()});
        curation::save_manifest(args->manifest, m);
        for (const auto& [c, n] : sizes) std::cout << "cluster " << c << ": " << n << "\n";
    });

    auto* filter = curate->add_subcommand("filter", "Reject records outside the kept clusters");
    manifest_opts(filter);
    filter->add_option("--keep", args->keep, "Kept cluster ids (default: the ids stored in the manifest)")
        ->delimiter(',');
    filter->callback([args] {
        auto m = curation::load_manifest(args->manifest);
        std::set<int> keep(args->keep.begin(), args->keep.end());
        if (keep.empty()) keep = m.kept_clusters;
        m = curation::filter_clusters(std::move(m), keep);
        curation::save_manifest(args->manifest, m);
        std::cout << "kept " << curation::count_records(m).kept() << " records\n";
    });

    auto* gate = curate->add_subcommand("gate", "Apply size, pose and blur thresholds");
    manifest_opts(gate);
    for (const char* name : {"blur-min", "yaw-max", "pitch-max", "size-min"}) {
        gate->add_option_function<double>(std::string("--") + name,
                                           [thresholds, key = std::string(name)](double v) { (*thresholds)[key] = v; },
                                           "Override the manifest threshold");
    }
    gate->callback([args, thresholds] {
        auto m = curation::load_manifest(args->manifest);
        for (const auto& [k, v] : *thresholds) {
            if (k == "blur-min") m.thresholds.blur_min = v;
            if (k == "yaw-max") m.thresholds.yaw_max = v;
            if (k == "pitch-max") m.thresholds.pitch_max = v;
            if (k == "size-min") m.thresholds.size_min = v;
        }
        m = curation::apply_quality_gates(std::move(m));
        curation::save_manifest(args->manifest, m);
        std::cout << "kept " << curation::count_records(m).kept() << " records\n";
    });

    auto* dedup = curate->add_subcommand("dedup", "Reject near-duplicates by difference hash");
    manifest_opts(dedup);
    dedup->add_option("--workers", args->workers, "Worker threads (0 = all cores)");
    dedup->add_option_function<int>(
        "--hamming-max", [thresholds](int v) { (*thresholds)["hamming-max"] = v; }, "Max Hamming distance");
    dedup->callback([args, thresholds] {
        auto m = curation::load_manifest(args->manifest);
        if (auto it = thresholds->find("hamming-max"); it != thresholds->end()) {
            m.thresholds.dedup_hamming_max = static_cast<int>(it->second);
        }
        m = curation::dedup(std::move(m), {images_root(*args), args->workers});
        curation::save_manifest(args->manifest, m);
        std::cout << "kept " << curation::count_records(m).kept() << " records\n";
    });

    auto* report = curate->add_subcommand("report", "Kept and rejected counts by reason");
    report->add_option("--manifest", args->manifest, "Manifest (JSON Lines)")->required();
    report->add_flag("--json", args->json, "Machine-readable counts");
    report->callback([args] {
        const auto m = curation::load_manifest(args->manifest);
        if (args->json) {
            std::cout << pipeline::counts_json(curation::count_records(m)) << "\n";
        } else {
            std::cout << curation::format_report(m);
        }
    });
}

}  // namespace swapforge::cli
