#include <iomanip>
#include <iostream>

#include "commands.hpp"
#include "json.hpp"
#include "swapforge/alignment/alignment.hpp"
#include "swapforge/blending/blending.hpp"
#include "swapforge/curation/rules.hpp"
#include "swapforge/imaging/io.hpp"
#include "swapforge/metrics/metrics.hpp"
#include "swapforge/model/synthetic.hpp"

namespace swapforge::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct ImageArgs {
    std::string a, b, masks;
    bool json = false;
    std::string source, target, driver_mask, generated_mask, out;
    int squeeze = blending::kDefaultSqueezePx;
    bool conventional = false, report_energy = false;
    double tol = 1e-6;
    std::string image, landmarks, mask, transform_out;
    std::string identity = "A";
    int count = 32, size = 256, embedding_dim = 16;
    std::uint64_t seed = 7;
    double wrong_fraction = 0.0;
    bool cluttered = false;
};

void add_metric(CLI::App& app, std::shared_ptr<ImageArgs> args) {
    auto* cmd = app.add_subcommand("metric", "MSE, SSIM, DSSIM and the masked regional loss of two images");
    cmd->add_option("--a", args->a, "First image")->required()->check(CLI::ExistingFile);
    cmd->add_option("--b", args->b, "Second image")->required()->check(CLI::ExistingFile);
    cmd->add_option("--masks", args->masks, "Directory with face.png, eye.png, mouth.png")->check(CLI::ExistingDirectory);
    cmd->add_flag("--json", args->json, "Print JSON");
    cmd->callback([args] {
        const auto a = imaging::read_png(args->a);
        const auto b = imaging::read_png(args->b);
        ordered_json j;
        j["mse"] = metrics::mse(a, b);
        j["ssim"] = metrics::ssim(a, b);
        j["dssim"] = metrics::dssim(a, b);
        j["recon_loss"] = metrics::recon_loss(a, b);
        if (!args->masks.empty()) {
            const fs::path d = args->masks;
            auto load = [&](const char* name, float fallback) {
                const auto p = d / name;
                return fs::exists(p) ? imaging::read_mask_png(p) : imaging::MaskBuf(a.height(), a.width(), fallback);
            };
            j["masked_loss"] = metrics::masked_loss(a, b, load("face.png", 1.0f), load("eye.png", 0.0f),
                                                    load("mouth.png", 0.0f));
        }
        if (args->json) {
            std::cout << j.dump(2) << "\n";
            return;
        }
        std::cout << std::setprecision(8);
        for (const auto& [k, v] : j.items()) std::cout << k << ": " << v.get<double>() << "\n";
    });
}

void add_blend(CLI::App& app, std::shared_ptr<ImageArgs> args) {
    auto* cmd = app.add_subcommand("blend", "Poisson-blend a generated face into a driver image");
    cmd->add_option("--source", args->source, "Generated face")->required()->check(CLI::ExistingFile);
    cmd->add_option("--target", args->target, "Driver image")->required()->check(CLI::ExistingFile);
    cmd->add_option("--driver-mask", args->driver_mask, "Driver face mask")->required()->check(CLI::ExistingFile);
    cmd->add_option("--generated-mask", args->generated_mask, "Generated face mask (default: driver mask)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--squeeze", args->squeeze, "Erosion radius in pixels")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--conventional", args->conventional, "Blend under the plain driver mask");
    cmd->add_option("--tol", args->tol, "Relative residual tolerance");
    cmd->add_option("--out", args->out, "Output PNG")->required();
    cmd->add_flag("--report-energy", args->report_energy, "Print the boundary energy of the result");
    cmd->callback([args] {
        blending::BlendJob job;
        job.source = imaging::read_png(args->source);
        job.target = imaging::read_png(args->target);
        job.driver_mask = imaging::read_mask_png(args->driver_mask);
        job.generated_mask =
            args->generated_mask.empty() ? job.driver_mask : imaging::read_mask_png(args->generated_mask);
        job.squeeze_px = args->squeeze;
        blending::SolverParams params;
        params.tol = args->tol;
        const auto out = blending::blend(job, args->conventional, params);
        imaging::write_png(args->out, out.image);
        std::cout << "blended " << out.stats.unknowns << " px in " << out.stats.iterations << " CG iterations\n";
        if (args->report_energy) {
            std::cout << std::setprecision(8) << "boundary_energy: " << blending::boundary_energy(out.image, out.mask)
                      << "\n";
        }
    });
}

void add_align(CLI::App& app, std::shared_ptr<ImageArgs> args) {
    auto* cmd = app.add_subcommand("align", "Align a face to the 512x512 canonical canvas");
    cmd->add_option("--image", args->image, "Input image")->required()->check(CLI::ExistingFile);
    cmd->add_option("--landmarks", args->landmarks, "68-point landmarks JSON")->required()->check(CLI::ExistingFile);
    cmd->add_option("--mask", args->mask, "Optional mask to warp alongside (nearest)")->check(CLI::ExistingFile);
    cmd->add_option("--out", args->out, "Aligned PNG; a .json sidecar holds the transform")->required();
    cmd->callback([args] {
        const auto img = imaging::read_png(args->image);
        const auto res = alignment::align_face(img, imaging::read_landmarks(args->landmarks));
        const fs::path out = args->out;
        imaging::write_png(out, res.aligned_image);
        ordered_json j;
        j["scale"] = res.transform.scale;
        j["rotation"] = res.transform.rotation;
        j["tx"] = res.transform.tx;
        j["ty"] = res.transform.ty;
        j["source_size"] = {img.height(), img.width()};
        fs::path sidecar = out;
        sidecar.replace_extension(".json");
        imaging::write_file_atomic(sidecar, j.dump(2) + "\n");
        fs::path lm_out = out;
        lm_out.replace_extension(".landmarks.json");
        imaging::write_landmarks(lm_out, res.aligned_landmarks);
        if (!args->mask.empty()) {
            fs::path mout = out;
            mout.replace_extension(".mask.png");
            const auto m = imaging::warp_similarity(imaging::read_mask_png(args->mask), res.transform,
                                                    alignment::kAlignedSize, alignment::kAlignedSize);
            imaging::write_mask_png(mout, m);
        }
        std::cout << "aligned: scale " << res.transform.scale << ", rotation " << res.transform.rotation << " rad\n";
    });
}

void add_synth(CLI::App& app, std::shared_ptr<ImageArgs> args) {
    auto* cmd = app.add_subcommand("synth", "Generate a synthetic faceset with landmarks, masks and embeddings");
    cmd->add_option("--out", args->out, "Output directory")->required();
    cmd->add_option("--identity", args->identity, "A (red-dominant) or B (blue-dominant)");
    cmd->add_option("--count", args->count, "Number of faces")->check(CLI::NonNegativeNumber);
    cmd->add_option("--size", args->size, "Image side in pixels")->check(CLI::Range(16, 4096));
    cmd->add_option("--seed", args->seed, "Random seed");
    cmd->add_option("--wrong-fraction", args->wrong_fraction, "Fraction of faces from the other identity")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--embedding-dim", args->embedding_dim, "Embedding length")->check(CLI::PositiveNumber);
    cmd->add_flag("--cluttered", args->cluttered, "High-frequency background clutter");
    cmd->callback([args] {
        model::SyntheticOptions opt;
        opt.size = args->size;
        opt.cluttered_background = args->cluttered;
        const auto id = model::parse_identity(args->identity);
        model::write_synthetic_faceset(args->out, id, args->count, args->seed, opt, args->wrong_fraction,
                                       args->embedding_dim);
        const fs::path manifest = fs::path(args->out) / "manifest.jsonl";
        curation::save_manifest(manifest, curation::manifest_from_directory(args->out, model::to_string(id)));
        std::cout << "wrote " << args->count << " faces and " << manifest.string() << "\n";
    });
}

}  // namespace

void add_image_commands(CLI::App& app) {
    auto args = std::make_shared<ImageArgs>();
    add_metric(app, args);
    add_blend(app, args);
    add_align(app, args);
    add_synth(app, args);
}

}  // namespace swapforge::cli
