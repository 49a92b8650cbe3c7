#include "swapforge/model/trainer.hpp"

#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "json.hpp"
#include "swapforge/alignment/alignment.hpp"
#include "swapforge/curation/rules.hpp"
#include "swapforge/errors.hpp"
#include "swapforge/imaging/io.hpp"
#include "swapforge/metrics/loss_ad.hpp"
#include "swapforge/nn/checkpoint.hpp"
#include "swapforge/nn/ops.hpp"
#include "swapforge/parallel.hpp"

namespace swapforge::model {

namespace fs = std::filesystem;

TrainSample prepare_sample(const imaging::ImageBuf& frame, const imaging::Landmarks68& lm,
                           const imaging::MaskBuf& face, const imaging::MaskBuf& eye, const imaging::MaskBuf& mouth,
                           int size) {
    const auto aligned = alignment::align_face(frame, lm);
    auto warp_mask = [&](const imaging::MaskBuf& m) {
        if (!m.same_size(frame)) throw InvalidArgument("prepare_sample: mask size differs from frame");
        const auto a = imaging::warp_similarity(m, aligned.transform, alignment::kAlignedSize,
                                                alignment::kAlignedSize, imaging::Interp::nearest);
        return alignment::train_crop(a, size);
    };
    return {alignment::train_crop(aligned.aligned_image, size), warp_mask(face), warp_mask(eye), warp_mask(mouth)};
}

std::vector<TrainSample> load_training_set(const curation::FacesetManifest& manifest, const fs::path& images_root,
                                           int size, unsigned workers) {
    std::vector<const curation::FaceRecord*> recs;
    for (const auto& r : manifest.records)
        if (r.kept() && r.landmarks) recs.push_back(&r);
    std::vector<TrainSample> out(recs.size());
    parallel_for(recs.size(), workers, [&](std::size_t i) {
        const auto& r = *recs[i];
        const auto img = imaging::read_png(curation::resolve_path(images_root, r.image_path));
        auto load = [&](const std::string& p, float fallback) {
            if (p.empty()) return imaging::MaskBuf(img.height(), img.width(), fallback);
            return imaging::read_mask_png(curation::resolve_path(images_root, p));
        };
        out[i] = prepare_sample(img, *r.landmarks, load(r.face_mask_path, 1.0f), load(r.eye_mask_path, 0.0f),
                                load(r.mouth_mask_path, 0.0f), size);
    });
    return out;
}

std::vector<TrainSample> synthetic_training_set(Identity id, int count, std::uint64_t seed, int size,
                                                const SyntheticOptions& opt) {
    std::mt19937_64 rng(seed);
    std::vector<TrainSample> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const auto f = render_synthetic_face(id, rng, opt);
        out.push_back(prepare_sample(f.image, f.landmarks, f.face, f.eye, f.mouth, size));
    }
    return out;
}

TrainConfig TrainConfig::toy() {
    TrainConfig c;
    c.profile = "toy";
    c.augment.total_steps = c.steps;
    c.augment.seed = c.seed;
    return c;
}

TrainConfig TrainConfig::paper_scale() {
    TrainConfig c;
    c.profile = "paper_scale";
    c.model.input_size = 256;
    c.model.latent_dim = 512;
    c.model.encoder_base_channels = 32;
    c.model.decoder_base_channels = 64;
    c.batch_size = kFullScaleBatchSize;
    c.steps = kFullScaleSteps;
    c.lr = nn::kDefaultLearningRate;
    c.preview_every = 10000;
    c.checkpoint_every = 10000;
    c.augment.total_steps = c.steps;
    return c;
}

TrainConfig TrainConfig::from_profile(const std::string& name) {
    if (name == "toy") return toy();
    if (name == "paper_scale") return paper_scale();
    throw InvalidArgument("unknown training profile '" + name + "' (expected toy or paper_scale)");
}

void TrainConfig::validate() const {
    model.validate();
    augment.validate();
    loss.validate();
    ssim.validate();
    if (batch_size < 1) throw InvalidArgument("train: batch_size must be >= 1");
    if (steps < 0) throw InvalidArgument("train: steps must be >= 0");
    if (!(lr >= 0.0) || !(adam_eps > 0.0)) throw InvalidArgument("train: need lr >= 0 and adam_eps > 0");
    if (ssim.window > model.input_size) throw InvalidArgument("train: SSIM window exceeds the input size");
}

template <typename T>
Batch<T> make_batch(const std::vector<TrainSample>& samples, std::span<const std::size_t> indices, long step,
                    Identity id, const AugmentConfig& aug, std::uint64_t seed, unsigned workers) {
    if (indices.empty()) throw InvalidArgument("make_batch: empty index list");
    std::vector<AugmentedSample> out(indices.size());
    parallel_for(indices.size(), workers, [&](std::size_t slot) {
        const auto& s = samples.at(indices[slot]);
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(step), static_cast<std::uint64_t>(id), slot));
        out[slot] = augment(s.image, {s.face, s.eye, s.mouth}, step, aug, rng);
    });
    std::vector<imaging::ImageBuf> in, tg;
    std::vector<imaging::MaskBuf> mf, me, mm;
    for (auto& o : out) {
        in.push_back(std::move(o.input));
        tg.push_back(std::move(o.target));
        mf.push_back(std::move(o.masks[0]));
        me.push_back(std::move(o.masks[1]));
        mm.push_back(std::move(o.masks[2]));
    }
    return {metrics::images_to_tensor<T>(in), metrics::images_to_tensor<T>(tg), metrics::masks_to_tensor<T>(mf, 3),
            metrics::masks_to_tensor<T>(me, 3), metrics::masks_to_tensor<T>(mm, 3)};
}

template <typename T>
StepLosses train_step(const SwapModel<T>& model, const Batch<T>& a, const Batch<T>& b, const metrics::LossWeights& w,
                      nn::AdamState& opt, const metrics::SsimParams& ssim) {
    const auto params = model.parameters();
    nn::zero_grads(params);
    try {
        const auto out_a = model.forward(a.input, Identity::A);
        const auto out_b = model.forward(b.input, Identity::B);
        const auto loss_a = metrics::masked_loss(out_a, a.target, a.face, a.eye, a.mouth, w, ssim);
        const auto loss_b = metrics::masked_loss(out_b, b.target, b.face, b.eye, b.mouth, w, ssim);
        const auto total = nn::add(loss_a, loss_b);
        nn::backward(total);
        for (const auto& p : params) {
            if (!p.tensor.has_grad()) continue;
            for (T g : p.tensor.grad())
                if (!std::isfinite(g)) throw TrainingDivergence("non-finite gradient in " + p.name, opt.step + 1);
        }
        nn::adam_step(params, opt);
        return {static_cast<double>(loss_a.item()), static_cast<double>(loss_b.item()),
                static_cast<double>(total.item())};
    } catch (const TrainingDivergence& e) {
        if (e.step() >= 0) throw;
        throw TrainingDivergence(e.what(), opt.step + 1);
    }
}

namespace {

std::vector<std::size_t> draw_indices(std::size_t n, int count, std::uint64_t seed, long step, Identity id) {
    std::mt19937_64 rng(mix_seed(seed ^ 0xa11ce, static_cast<std::uint64_t>(step), static_cast<std::uint64_t>(id)));
    std::vector<std::size_t> idx(count);
    for (auto& i : idx) i = static_cast<std::size_t>((static_cast<double>(rng() >> 11) * 0x1.0p-53) * n);
    return idx;
}

std::string checkpoint_metadata(const TrainConfig& cfg) {
    nlohmann::json j;
    j["profile"] = cfg.profile;
    j["model"] = nlohmann::json::parse(cfg.model.to_json());
    j["batch_size"] = cfg.batch_size;
    j["steps"] = cfg.steps;
    return j.dump();
}

}  // namespace

Trainer::Trainer(TrainConfig cfg, std::vector<TrainSample> set_a, std::vector<TrainSample> set_b)
    : cfg_(std::move(cfg)), set_a_(std::move(set_a)), set_b_(std::move(set_b)) {
    cfg_.validate();
    if (set_a_.empty() || set_b_.empty()) throw InvalidArgument("Trainer: both training sets must be non-empty");
    const int s = cfg_.model.input_size;
    for (const auto* set : {&set_a_, &set_b_}) {
        for (const auto& smp : *set) {
            if (smp.image.height() != s || smp.image.width() != s || smp.image.channels() != 3) {
                throw InvalidArgument("Trainer: samples must be " + std::to_string(s) + "x" + std::to_string(s) +
                                      " RGB");
            }
        }
    }
    model_ = SwapModel<float>::build(cfg_.model);
    params_ = model_.parameters();
    opt_.lr = cfg_.lr;
    opt_.eps = cfg_.adam_eps;
}

StepLosses Trainer::step() {
    const long s = opt_.step;
    const auto ia = draw_indices(set_a_.size(), cfg_.batch_size, cfg_.seed, s, Identity::A);
    const auto ib = draw_indices(set_b_.size(), cfg_.batch_size, cfg_.seed, s, Identity::B);
    const auto ba = make_batch<float>(set_a_, ia, s, Identity::A, cfg_.augment, cfg_.seed, cfg_.workers);
    const auto bb = make_batch<float>(set_b_, ib, s, Identity::B, cfg_.augment, cfg_.seed, cfg_.workers);
    return train_step(model_, ba, bb, cfg_.loss, opt_, cfg_.ssim);
}

imaging::ImageBuf Trainer::preview(int rows) const {
    const int s = cfg_.model.input_size;
    std::vector<const TrainSample*> picks;
    for (const auto* set : {&set_a_, &set_b_})
        for (int i = 0; i < rows && i < static_cast<int>(set->size()); ++i) picks.push_back(&(*set)[i]);
    imaging::ImageBuf grid(s * static_cast<int>(picks.size()), 3 * s, 3);
    for (std::size_t r = 0; r < picks.size(); ++r) {
        const auto x = metrics::images_to_tensor<float>({picks[r]->image});
        const imaging::ImageBuf cols[3] = {picks[r]->image,
                                           metrics::tensor_to_image(model_.forward(x, Identity::A), 0),
                                           metrics::tensor_to_image(model_.forward(x, Identity::B), 0)};
        for (int c = 0; c < 3; ++c)
            for (int ch = 0; ch < 3; ++ch)
                for (int y = 0; y < s; ++y)
                    for (int xx = 0; xx < s; ++xx)
                        grid.at(ch, static_cast<int>(r) * s + y, c * s + xx) = cols[c].at(ch, y, xx);
    }
    return grid;
}

void Trainer::save(const fs::path& path, bool with_moments) const {
    const auto ckpt =
        nn::make_checkpoint(params_, opt_.step, checkpoint_metadata(cfg_), with_moments ? &opt_ : nullptr);
    nn::save_checkpoint(path, ckpt);
}

void Trainer::resume(const fs::path& path) {
    const auto ckpt = nn::load_checkpoint(path);
    const auto meta = nlohmann::json::parse(ckpt.metadata);
    if (ModelConfig::from_json(meta.at("model").dump()) != cfg_.model) {
        throw InvalidArgument("resume: checkpoint model config differs from the training config");
    }
    nn::restore_parameters(ckpt, params_, &opt_);
    opt_.lr = cfg_.lr;
    opt_.step = ckpt.step;
}

std::vector<StepLosses> Trainer::run(const fs::path& out_dir, const std::function<void(long, const StepLosses&)>& on_step) {
    std::vector<StepLosses> history;
    std::ofstream csv;
    if (!out_dir.empty()) {
        fs::create_directories(out_dir / "previews");
        const bool fresh = opt_.step == 0;
        csv.open(out_dir / "loss.csv", fresh ? std::ios::trunc : std::ios::app);
        if (!csv) throw IoError("cannot write " + (out_dir / "loss.csv").string());
        if (fresh) csv << "step,loss_A,loss_B,total\n";
        csv << std::setprecision(9);
    }
    while (opt_.step < cfg_.steps) {
        const auto l = step();
        history.push_back(l);
        const long s = opt_.step;
        if (on_step) on_step(s, l);
        if (out_dir.empty()) continue;
        csv << s << ',' << l.loss_a << ',' << l.loss_b << ',' << l.total << '\n';
        if (cfg_.preview_every > 0 && (s % cfg_.preview_every == 0 || s == cfg_.steps)) {
            std::ostringstream name;
            name << "step_" << std::setw(7) << std::setfill('0') << s << ".png";
            imaging::write_png(out_dir / "previews" / name.str(), preview());
        }
        if (cfg_.checkpoint_every > 0 && s % cfg_.checkpoint_every == 0) save(out_dir / "model.ckpt");
    }
    if (!out_dir.empty()) save(out_dir / "model.ckpt");
    return history;
}

SwapModel<float> load_model(const fs::path& checkpoint) {
    const auto ckpt = nn::load_checkpoint(checkpoint);
    const auto meta = nlohmann::json::parse(ckpt.metadata);
    if (!meta.contains("model")) throw IoError("checkpoint has no model config: " + checkpoint.string());
    auto m = SwapModel<float>::build(ModelConfig::from_json(meta["model"].dump()));
    nn::restore_parameters(ckpt, m.parameters());
    return m;
}

template Batch<float> make_batch<float>(const std::vector<TrainSample>&, std::span<const std::size_t>, long, Identity,
                                        const AugmentConfig&, std::uint64_t, unsigned);
template Batch<double> make_batch<double>(const std::vector<TrainSample>&, std::span<const std::size_t>, long,
                                          Identity, const AugmentConfig&, std::uint64_t, unsigned);
template StepLosses train_step(const SwapModel<float>&, const Batch<float>&, const Batch<float>&,
                               const metrics::LossWeights&, nn::AdamState&, const metrics::SsimParams&);
template StepLosses train_step(const SwapModel<double>&, const Batch<double>&, const Batch<double>&,
                               const metrics::LossWeights&, nn::AdamState&, const metrics::SsimParams&);

}  // namespace swapforge::model
