#include "swapforge/pipeline/convert.hpp"

#include <algorithm>
#include <chrono>

#include "json.hpp"
#include "swapforge/alignment/alignment.hpp"
#include "swapforge/errors.hpp"
#include "swapforge/imaging/color.hpp"
#include "swapforge/imaging/io.hpp"
#include "swapforge/imaging/morphology.hpp"
#include "swapforge/metrics/loss_ad.hpp"
#include "swapforge/model/trainer.hpp"
#include "swapforge/parallel.hpp"

namespace swapforge::pipeline {

namespace fs = std::filesystem;

std::string_view to_string(FrameStatus s) {
    switch (s) {
        case FrameStatus::converted: return "converted";
        case FrameStatus::skipped_no_face: return "skipped_no_face";
        case FrameStatus::skipped_empty_mask: return "skipped_empty_mask";
        case FrameStatus::error: return "error";
    }
    return "error";
}

namespace {

class StageTimer {
public:
    explicit StageTimer(FrameResult& r) : r_(r), t0_(std::chrono::steady_clock::now()) {}
    void lap(const char* stage) {
        const auto t = std::chrono::steady_clock::now();
        r_.timing_ms[stage] = std::chrono::duration<double, std::milli>(t - t0_).count();
        t0_ = t;
    }

private:
    FrameResult& r_;
    std::chrono::steady_clock::time_point t0_;
};

}  // namespace

FrameOutput convert_frame(const imaging::ImageBuf& frame, const imaging::Landmarks68& lm,
                          const imaging::MaskBuf& driver_mask, const model::SwapModel<float>& model,
                          const ConvertOptions& opts, const imaging::MaskBuf* generated_mask) {
    FrameOutput out;
    out.image = frame;
    auto& res = out.result;
    StageTimer timer(res);
    try {
        if (frame.channels() != 3) throw InvalidArgument("frame must be RGB");
        if (!driver_mask.same_size(frame)) throw InvalidArgument("driver mask size differs from frame");
        if (!imaging::landmarks_finite(lm)) throw InvalidArgument("non-finite landmarks");
        constexpr int kA = alignment::kAlignedSize;

        const auto aligned = alignment::align_face(frame, lm);
        timer.lap("align");

        const int s = model.config().input_size;
        const auto x = metrics::images_to_tensor<float>({alignment::train_crop(aligned.aligned_image, s)});
        const auto generated = metrics::tensor_to_image(model.forward(x, opts.target_identity), 0);
        timer.lap("forward");

        // Generated face back into the aligned canvas over the crop window.
        const auto win = alignment::central_crop_window(kA);
        const auto patch = imaging::resize_bilinear(generated, win.size, win.size);
        imaging::ImageBuf source = aligned.aligned_image;
        for (int c = 0; c < 3; ++c)
            for (int y = 0; y < win.size; ++y)
                for (int xx = 0; xx < win.size; ++xx) source.at(c, win.offset + y, win.offset + xx) = patch.at(c, y, xx);

        blending::BlendJob job;
        job.source = std::move(source);
        job.target = aligned.aligned_image;
        job.driver_mask = imaging::warp_similarity(driver_mask.binarized(), aligned.transform, kA, kA,
                                                   imaging::Interp::nearest);
        if (generated_mask) {
            if (generated_mask->height() != kA || generated_mask->width() != kA) {
                throw InvalidArgument("generated mask must be 512x512 (aligned space)");
            }
            job.generated_mask = generated_mask->binarized();
            res.used_generated_mask = true;
        } else {
            job.generated_mask = job.driver_mask;
        }
        job.squeeze_px = opts.squeeze_px;
        auto mask = opts.conventional ? blending::conventional_blend_mask(job) : blending::build_blend_mask(job);
        mask = imaging::clear_border(mask, 1);
        timer.lap("mask");
        if (mask.count_set() == 0) {
            res.status = FrameStatus::skipped_empty_mask;
            res.message = "blend mask is empty";
            return out;
        }

        const auto blended = blending::poisson_blend(job.source, job.target, mask, opts.solver);
        res.boundary_energy = blending::boundary_energy(blended, mask);
        timer.lap("blend");

        const auto inv = aligned.transform.inverse();
        out.frame_mask = imaging::warp_similarity(mask, inv, frame.height(), frame.width(), imaging::Interp::nearest);
        const auto back = imaging::warp_similarity(blended, inv, frame.height(), frame.width(), imaging::Interp::bilinear);
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < frame.plane_size(); ++i)
                if (out.frame_mask.data()[i] >= 0.5f) out.image.plane(c)[i] = back.plane(c)[i];
        timer.lap("composite");
        if (out.frame_mask.count_set() == 0) {
            res.status = FrameStatus::skipped_empty_mask;
            res.message = "blend mask vanished when warped to the frame";
            return out;
        }
        res.status = FrameStatus::converted;
    } catch (const std::exception& e) {
        out.image = frame;
        out.frame_mask = {};
        res.status = FrameStatus::error;
        res.boundary_energy.reset();
        res.message = e.what();
    }
    return out;
}

std::string BatchSummary::to_json() const {
    nlohmann::ordered_json j;
    j["frames"] = frames.size();
    nlohmann::ordered_json c = nlohmann::ordered_json::object();
    for (auto s : {FrameStatus::converted, FrameStatus::skipped_no_face, FrameStatus::skipped_empty_mask,
                   FrameStatus::error}) {
        const auto it = counts.find(std::string(to_string(s)));
        c[std::string(to_string(s))] = it == counts.end() ? 0 : it->second;
    }
    j["counts"] = c;
    j["mean_boundary_energy"] = mean_boundary_energy ? nlohmann::ordered_json(*mean_boundary_energy) : nullptr;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& f : frames) {
        nlohmann::ordered_json r;
        r["id"] = f.frame_id;
        r["status"] = to_string(f.status);
        r["boundary_energy"] = f.boundary_energy ? nlohmann::ordered_json(*f.boundary_energy) : nullptr;
        r["generated_mask"] = f.used_generated_mask;
        if (!f.message.empty()) r["message"] = f.message;
        arr.push_back(std::move(r));
    }
    j["results"] = arr;
    return j.dump(2) + "\n";
}

BatchSummary convert_batch(const ConversionConfig& cfg) {
    cfg.validate();
    auto model = model::load_model(cfg.checkpoint);
    return convert_batch(cfg, model);
}

BatchSummary convert_batch(const ConversionConfig& cfg, const model::SwapModel<float>& model) {
    cfg.solver.validate();
    if (cfg.frames_dir.empty() || !fs::is_directory(cfg.frames_dir)) {
        throw InvalidArgument("convert_batch: frames_dir not found: " + cfg.frames_dir.string());
    }
    // Private inference copy: no graph bookkeeping, and the caller's
    // parameters are left untouched.
    auto infer = model::SwapModel<float>::build(model.config());
    {
        const auto src = model.parameters();
        const auto dst = infer.parameters();
        for (std::size_t k = 0; k < src.size(); ++k) {
            auto t = dst[k].tensor;
            std::copy(src[k].tensor.data().begin(), src[k].tensor.data().end(), t.data().begin());
            t.set_requires_grad(false);
        }
    }

    std::vector<std::string> ids;
    for (const auto& e : fs::directory_iterator(cfg.frames_dir))
        if (e.is_regular_file() && e.path().extension() == ".png") ids.push_back(e.path().stem().string());
    std::sort(ids.begin(), ids.end());
    fs::create_directories(cfg.out_dir);

    ConvertOptions opts{cfg.target_identity, cfg.squeeze_px, cfg.conventional, cfg.solver};
    BatchSummary summary;
    summary.frames.resize(ids.size());
    parallel_for(ids.size(), cfg.workers, [&](std::size_t i) {
        const std::string& id = ids[i];
        FrameResult& res = summary.frames[i];
        imaging::ImageBuf frame;
        try {
            frame = imaging::read_png(cfg.frames_dir / (id + ".png"));
            if (frame.channels() == 1) frame = imaging::gray_to_rgb(frame);
        } catch (const std::exception& e) {
            res = {id, FrameStatus::error, std::nullopt, false, e.what(), {}};
            return;
        }
        const fs::path lm_path = cfg.landmarks_dir / (id + ".json");
        if (!fs::exists(lm_path)) {
            res = {id, FrameStatus::skipped_no_face, std::nullopt, false, "no landmarks", {}};
            imaging::write_png(cfg.out_dir / (id + ".png"), frame);
            return;
        }
        try {
            const auto lm = imaging::read_landmarks(lm_path);
            const auto driver = imaging::read_mask_png(cfg.masks_dir / (id + ".png"));
            std::optional<imaging::MaskBuf> gen;
            if (!cfg.generated_masks_dir.empty()) {
                const fs::path gp = cfg.generated_masks_dir / (id + ".png");
                if (fs::exists(gp)) gen = imaging::read_mask_png(gp);
            }
            auto out = convert_frame(frame, lm, driver, infer, opts, gen ? &*gen : nullptr);
            res = std::move(out.result);
            imaging::write_png(cfg.out_dir / (id + ".png"), out.image);
        } catch (const std::exception& e) {
            res = {id, FrameStatus::error, std::nullopt, false, e.what(), {}};
            imaging::write_png(cfg.out_dir / (id + ".png"), frame);
        }
        res.frame_id = id;
    });

    double energy = 0.0;
    std::size_t n_energy = 0;
    for (const auto& f : summary.frames) {
        ++summary.counts[std::string(to_string(f.status))];
        if (f.boundary_energy) {
            energy += *f.boundary_energy;
            ++n_energy;
        }
    }
    if (n_energy > 0) summary.mean_boundary_energy = energy / static_cast<double>(n_energy);
    imaging::write_file_atomic(cfg.out_dir / "summary.json", summary.to_json());
    return summary;
}

}  // namespace swapforge::pipeline
