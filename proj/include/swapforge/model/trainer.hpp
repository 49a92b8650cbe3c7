#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "swapforge/curation/manifest.hpp"
#include "swapforge/metrics/metrics.hpp"
#include "swapforge/model/augment.hpp"
#include "swapforge/model/swap_model.hpp"
#include "swapforge/model/synthetic.hpp"
#include "swapforge/nn/adam.hpp"

namespace swapforge::model {

inline constexpr long kFullScaleSteps = 1'000'000;
inline constexpr int kFullScaleBatchSize = 32;

/// One training example in model space (input_size x input_size).
struct TrainSample {
    imaging::ImageBuf image;
    imaging::MaskBuf face;
    imaging::MaskBuf eye;
    imaging::MaskBuf mouth;
};

/// Aligns a frame to the 512 canvas, takes the central 80% crop and
/// resamples image (bilinear) and masks (nearest) to `size`.
TrainSample prepare_sample(const imaging::ImageBuf& frame, const imaging::Landmarks68& lm,
                           const imaging::MaskBuf& face, const imaging::MaskBuf& eye, const imaging::MaskBuf& mouth,
                           int size);

/// Kept records with landmarks. Missing eye / mouth masks become empty
/// masks; a missing face mask becomes all-ones.
std::vector<TrainSample> load_training_set(const curation::FacesetManifest& manifest,
                                           const std::filesystem::path& images_root, int size, unsigned workers = 1);

std::vector<TrainSample> synthetic_training_set(Identity id, int count, std::uint64_t seed, int size,
                                                const SyntheticOptions& opt = {});

struct TrainConfig {
    std::string profile = "toy";
    ModelConfig model;
    int batch_size = 8;
    long steps = 2000;
    double lr = 1e-3;
    double adam_eps = nn::kDefaultAdamEpsilon;
    metrics::LossWeights loss;
    metrics::SsimParams ssim;
    AugmentConfig augment;
    long preview_every = 250;
    long checkpoint_every = 1000;
    std::uint64_t seed = 7;
    unsigned workers = 1;

    /// 64x64 desk-scale profile.
    static TrainConfig toy();
    /// Full-size hyperparameters: 256x256, batch 32, 1M steps, lr 5e-5.
    static TrainConfig paper_scale();
    static TrainConfig from_profile(const std::string& name);
    void validate() const;
};

template <typename T>
struct Batch {
    nn::Tensor<T> input;
    nn::Tensor<T> target;
    nn::Tensor<T> face;
    nn::Tensor<T> eye;
    nn::Tensor<T> mouth;
};

/// Augments the selected samples (per-sample seeds derived from seed, step,
/// identity and slot, so the result does not depend on `workers`).
template <typename T>
Batch<T> make_batch(const std::vector<TrainSample>& samples, std::span<const std::size_t> indices, long step,
                    Identity id, const AugmentConfig& aug, std::uint64_t seed, unsigned workers = 1);

struct StepLosses {
    double loss_a = 0.0;
    double loss_b = 0.0;
    double total = 0.0;
};

/// Reconstruction losses of both identities, summed, then one Adam update
/// over all parameters. Throws TrainingDivergence carrying opt.step + 1 on
/// a non-finite value.
template <typename T>
StepLosses train_step(const SwapModel<T>& model, const Batch<T>& a, const Batch<T>& b, const metrics::LossWeights& w,
                      nn::AdamState& opt, const metrics::SsimParams& ssim = {});

class Trainer {
public:
    Trainer(TrainConfig cfg, std::vector<TrainSample> set_a, std::vector<TrainSample> set_b);

    /// Runs one optimisation step and returns its losses.
    StepLosses step();
    long current_step() const noexcept { return opt_.step; }

    const TrainConfig& config() const noexcept { return cfg_; }
    const SwapModel<float>& model() const noexcept { return model_; }
    const nn::AdamState& optimizer() const noexcept { return opt_; }

    /// Grid of up to `rows` samples per identity: input | decoder A | decoder B.
    imaging::ImageBuf preview(int rows = 4) const;

    void save(const std::filesystem::path& path, bool with_moments = true) const;
    /// Restores weights and optimizer state (when present) from `path`.
    void resume(const std::filesystem::path& path);

    /// Runs the remaining steps. With a non-empty out_dir, writes loss.csv,
    /// previews/step_<n>.png and model.ckpt.
    std::vector<StepLosses> run(const std::filesystem::path& out_dir = {},
                                const std::function<void(long, const StepLosses&)>& on_step = {});

private:
    TrainConfig cfg_;
    std::vector<TrainSample> set_a_;
    std::vector<TrainSample> set_b_;
    SwapModel<float> model_;
    nn::ParamList<float> params_;
    nn::AdamState opt_;
};

/// Loads a model saved by Trainer::save.
SwapModel<float> load_model(const std::filesystem::path& checkpoint);

}  // namespace swapforge::model
