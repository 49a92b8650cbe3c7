#include <csignal>
#include <iostream>

#include "commands.hpp"
#include "swapforge/pipeline/convert.hpp"
#include "swapforge/pipeline/review_service.hpp"

namespace swapforge::cli {

namespace {

struct PipelineArgs {
    std::string config;
    int workers = -1;
    std::string manifest, images_root, static_dir, host = "127.0.0.1";
    int port = 8080;
};

pipeline::ReviewService* g_service = nullptr;

extern "C" void on_signal(int) {
    if (g_service) g_service->stop();
}

}  // namespace

void add_pipeline_commands(CLI::App& app) {
    auto args = std::make_shared<PipelineArgs>();

    auto* convert = app.add_subcommand("convert", "Swap faces across a directory of frames");
    convert->add_option("--config", args->config, "Conversion config (TOML)")->required()->check(CLI::ExistingFile);
    convert->add_option("--workers", args->workers, "Override the config's worker count (0 = all cores)");
    convert->callback([args] {
        auto cfg = pipeline::load_conversion_config(args->config);
        if (args->workers >= 0) cfg.workers = static_cast<unsigned>(args->workers);
        const auto summary = pipeline::convert_batch(cfg);
        std::cout << summary.frames.size() << " frames:";
        for (const auto& [k, v] : summary.counts) std::cout << " " << k << "=" << v;
        std::cout << "\n";
        for (const auto& f : summary.frames)
            if (f.status == pipeline::FrameStatus::error) std::cerr << f.frame_id << ": " << f.message << "\n";
        std::cout << "summary: " << (cfg.out_dir / "summary.json").string() << "\n";
    });

    auto* review = app.add_subcommand("review", "Serve the manual review API over a manifest");
    review->add_option("--manifest", args->manifest, "Manifest (JSON Lines)")->required()->check(CLI::ExistingFile);
    review->add_option("--images-root", args->images_root, "Base for relative image paths");
    review->add_option("--static", args->static_dir, "UI assets served at /")->check(CLI::ExistingDirectory);
    review->add_option("--host", args->host, "Bind address");
    review->add_option("--port", args->port, "Port (0 = any free port)")->check(CLI::Range(0, 65535));
    review->callback([args] {
        pipeline::ReviewOptions opts;
        opts.manifest_path = args->manifest;
        opts.images_root = args->images_root;
        opts.static_dir = args->static_dir;
        pipeline::ReviewService service(opts);
        const int port = service.bind(args->host, args->port);
        if (port < 0) throw std::runtime_error("cannot bind " + args->host);
        std::cout << "review service on http://" << args->host << ":" << port << "/api/summary" << std::endl;
        g_service = &service;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        service.serve();
        g_service = nullptr;
    });
}

}  // namespace swapforge::cli
