#include <iomanip>
#include <iostream>

#include "commands.hpp"
#include "swapforge/curation/manifest.hpp"
#include "swapforge/model/trainer.hpp"

namespace swapforge::cli {

namespace fs = std::filesystem;

namespace {

struct TrainArgs {
    std::string faceset_a, faceset_b, profile = "toy", out;
    long steps = -1;
    std::uint64_t seed = 7;
    double lr = -1.0;
    int synthetic = 0;
    std::string resume;
    unsigned workers = 1;
    long log_every = 50;
};

std::vector<model::TrainSample> load_set(const std::string& manifest, int size, unsigned workers) {
    const auto m = curation::load_manifest(manifest);
    auto set = model::load_training_set(m, fs::path(manifest).parent_path(), size, workers);
    std::cout << manifest << ": " << set.size() << " training samples\n";
    return set;
}

}  // namespace

void add_train(CLI::App& app) {
    auto args = std::make_shared<TrainArgs>();
    auto* cmd = app.add_subcommand("train", "Train the dual-decoder swap model");
    cmd->add_option("--faceset-a", args->faceset_a, "Manifest of identity A");
    cmd->add_option("--faceset-b", args->faceset_b, "Manifest of identity B");
    cmd->add_option("--synthetic", args->synthetic, "Train on N generated faces per identity instead")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--profile", args->profile, "toy or paper_scale")->check(CLI::IsMember({"toy", "paper_scale"}));
    cmd->add_option("--out", args->out, "Output directory (loss.csv, previews/, model.ckpt)")->required();
    cmd->add_option("--steps", args->steps, "Override the profile's step count");
    cmd->add_option("--seed", args->seed, "Seed for initialisation, sampling and augmentation");
    cmd->add_option("--lr", args->lr, "Override the profile's learning rate");
    cmd->add_option("--resume", args->resume, "Continue from a checkpoint")->check(CLI::ExistingFile);
    cmd->add_option("--workers", args->workers, "Augmentation threads (0 = all cores)");
    cmd->add_option("--log-every", args->log_every, "Print losses every N steps")->check(CLI::PositiveNumber);
    cmd->callback([args] {
        auto cfg = model::TrainConfig::from_profile(args->profile);
        if (args->steps >= 0) cfg.steps = args->steps;
        if (args->lr >= 0) cfg.lr = args->lr;
        cfg.seed = args->seed;
        cfg.model.seed = args->seed;
        cfg.augment.seed = args->seed;
        cfg.augment.total_steps = cfg.steps;
        cfg.workers = args->workers;
        const int size = cfg.model.input_size;
        std::vector<model::TrainSample> a, b;
        if (args->synthetic > 0) {
            a = model::synthetic_training_set(model::Identity::A, args->synthetic, args->seed * 2 + 1, size);
            b = model::synthetic_training_set(model::Identity::B, args->synthetic, args->seed * 2 + 2, size);
        } else {
            if (args->faceset_a.empty() || args->faceset_b.empty()) {
                throw CLI::ValidationError("train", "--faceset-a and --faceset-b are required without --synthetic");
            }
            a = load_set(args->faceset_a, size, args->workers);
            b = load_set(args->faceset_b, size, args->workers);
        }
        model::Trainer trainer(cfg, std::move(a), std::move(b));
        if (!args->resume.empty()) trainer.resume(args->resume);
        std::cout << std::setprecision(6);
        trainer.run(args->out, [&](long step, const model::StepLosses& l) {
            if (step == 1 || step % args->log_every == 0 || step == cfg.steps) {
                std::cout << "step " << step << "  loss_A " << l.loss_a << "  loss_B " << l.loss_b << "  total "
                          << l.total << "\n";
            }
        });
        std::cout << "checkpoint: " << (fs::path(args->out) / "model.ckpt").string() << "\n";
    });
}

}  // namespace swapforge::cli
