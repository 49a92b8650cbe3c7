#include "swapforge/model/swap_model.hpp"

#include <random>

#include "json.hpp"
#include "swapforge/errors.hpp"
#include "swapforge/nn/ops.hpp"

namespace swapforge::model {

std::string to_string(Identity id) { return id == Identity::A ? "A" : "B"; }

Identity parse_identity(const std::string& s) {
    if (s == "A" || s == "a") return Identity::A;
    if (s == "B" || s == "b") return Identity::B;
    throw InvalidArgument("unknown identity '" + s + "' (expected A or B)");
}

void ModelConfig::validate() const {
    if (upscale_layers < 1) throw InvalidArgument("model: upscale_layers must be >= 1");
    if (encoder_layers < 1) throw InvalidArgument("model: encoder_layers must be >= 1");
    if (residual_blocks_per_upscale < 0) throw InvalidArgument("model: residual_blocks_per_upscale must be >= 0");
    const int factor = 1 << (upscale_layers + 1);
    if (input_size <= 0 || input_size % factor != 0) {
        throw InvalidArgument("model: input_size " + std::to_string(input_size) + " must be a positive multiple of " +
                              std::to_string(factor));
    }
    if (input_size % (1 << encoder_layers) != 0) {
        throw InvalidArgument("model: input_size must be divisible by 2^encoder_layers");
    }
    if (latent_dim == 0 || encoder_base_channels == 0 || decoder_base_channels == 0) {
        throw InvalidArgument("model: channel counts and latent_dim must be positive");
    }
    if (!(leaky_alpha >= 0.0 && leaky_alpha < 1.0)) throw InvalidArgument("model: leaky_alpha must be in [0,1)");
}

std::string ModelConfig::to_json() const {
    nlohmann::json j = {{"input_size", input_size},
                        {"latent_dim", latent_dim},
                        {"encoder_base_channels", encoder_base_channels},
                        {"decoder_base_channels", decoder_base_channels},
                        {"encoder_layers", encoder_layers},
                        {"upscale_layers", upscale_layers},
                        {"residual_blocks_per_upscale", residual_blocks_per_upscale},
                        {"leaky_alpha", leaky_alpha},
                        {"seed", seed}};
    return j.dump();
}

ModelConfig ModelConfig::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ModelConfig c;
    c.input_size = j.value("input_size", c.input_size);
    c.latent_dim = j.value("latent_dim", c.latent_dim);
    c.encoder_base_channels = j.value("encoder_base_channels", c.encoder_base_channels);
    c.decoder_base_channels = j.value("decoder_base_channels", c.decoder_base_channels);
    c.encoder_layers = j.value("encoder_layers", c.encoder_layers);
    c.upscale_layers = j.value("upscale_layers", c.upscale_layers);
    c.residual_blocks_per_upscale = j.value("residual_blocks_per_upscale", c.residual_blocks_per_upscale);
    c.leaky_alpha = j.value("leaky_alpha", c.leaky_alpha);
    c.seed = j.value("seed", c.seed);
    c.validate();
    return c;
}

template <typename T>
void Decoder<T>::collect(nn::ParamList<T>& params, const std::string& prefix) const {
    intermediate.collect(params, prefix + ".intermediate");
    for (std::size_t i = 0; i < upscalers.size(); ++i) {
        const std::string p = prefix + ".up" + std::to_string(i);
        upscalers[i].collect(params, p);
        for (std::size_t r = 0; r < residuals[i].size(); ++r) residuals[i][r].collect(params, p + ".res" + std::to_string(r));
    }
    out.collect(params, prefix + ".out");
}

namespace {

// Output channels of upscaler i out of n: base * 2^(n-2-i), never below base.
std::size_t upscaler_channels(std::size_t base, int i, int n) {
    const int e = n - 2 - i;
    return e > 0 ? base << e : base;
}

template <typename T>
Decoder<T> make_decoder(const ModelConfig& cfg, std::mt19937_64& rng) {
    Decoder<T> d;
    const std::size_t s = static_cast<std::size_t>(cfg.base_size());
    const std::size_t base = cfg.decoder_base_channels;
    d.intermediate_channels = 2 * upscaler_channels(base, 0, cfg.upscale_layers);
    d.intermediate = nn::Linear<T>::make(cfg.latent_dim, d.intermediate_channels * s * s, cfg.leaky_alpha, rng);
    std::size_t ch = d.intermediate_channels;
    for (int i = 0; i < cfg.upscale_layers; ++i) {
        const std::size_t out = upscaler_channels(base, i, cfg.upscale_layers);
        d.upscalers.push_back(nn::Upscaler<T>::make(ch, out, cfg.leaky_alpha, rng));
        std::vector<nn::ResidualBlock<T>> blocks;
        if (i + 1 < cfg.upscale_layers) {
            for (int r = 0; r < cfg.residual_blocks_per_upscale; ++r) {
                auto b = nn::ResidualBlock<T>::make(out, cfg.leaky_alpha, rng);
                b.alpha = static_cast<T>(cfg.leaky_alpha);
                blocks.push_back(std::move(b));
            }
        }
        d.residuals.push_back(std::move(blocks));
        d.upscalers.back().alpha = static_cast<T>(cfg.leaky_alpha);
        ch = out;
    }
    d.out = nn::Conv2d<T>::make(ch, 3, 3, 1, 1, 1.0, rng);
    return d;
}

}  // namespace

template <typename T>
SwapModel<T> SwapModel<T>::build(const ModelConfig& cfg) {
    cfg.validate();
    SwapModel m;
    m.cfg_ = cfg;
    std::mt19937_64 rng(cfg.seed);
    std::size_t ch = 3;
    for (int i = 0; i < cfg.encoder_layers; ++i) {
        const std::size_t out = cfg.encoder_base_channels << i;
        m.encoder_.push_back(nn::Conv2d<T>::make(ch, out, 3, 2, 1, cfg.leaky_alpha, rng));
        ch = out;
    }
    const std::size_t side = static_cast<std::size_t>(cfg.input_size >> cfg.encoder_layers);
    m.bottleneck_ = nn::Linear<T>::make(ch * side * side, cfg.latent_dim, 1.0, rng);
    m.decoders_[0] = make_decoder<T>(cfg, rng);
    m.decoders_[1] = make_decoder<T>(cfg, rng);
    return m;
}

template <typename T>
nn::Tensor<T> SwapModel<T>::encode(const nn::Tensor<T>& x) const {
    const auto S = static_cast<std::size_t>(cfg_.input_size);
    if (x.rank() != 4 || x.dim(1) != 3 || x.dim(2) != S || x.dim(3) != S) {
        throw InvalidArgument("SwapModel: expected input [N,3," + std::to_string(S) + "," + std::to_string(S) +
                              "], got " + nn::shape_to_string(x.shape()));
    }
    const T alpha = static_cast<T>(cfg_.leaky_alpha);
    nn::Tensor<T> h = x;
    for (const auto& conv : encoder_) h = nn::leaky_relu(conv(h), alpha);
    const std::size_t n = h.dim(0);
    h = nn::reshape(h, {n, h.numel() / n});
    return bottleneck_(h);
}

template <typename T>
nn::Tensor<T> SwapModel<T>::decode(const nn::Tensor<T>& latent, Identity id) const {
    const auto& d = decoders_[static_cast<int>(id)];
    const T alpha = static_cast<T>(cfg_.leaky_alpha);
    const std::size_t n = latent.dim(0);
    const auto s = static_cast<std::size_t>(cfg_.base_size());
    auto h = d.intermediate(latent);
    h = nn::reshape(h, {n, d.intermediate_channels, s, s});
    h = nn::leaky_relu(nn::nn_upsample(h, 2), alpha);
    for (std::size_t i = 0; i < d.upscalers.size(); ++i) {
        h = d.upscalers[i](h);
        for (const auto& block : d.residuals[i]) h = block(h);
    }
    return nn::sigmoid(d.out(h));
}

template <typename T>
nn::ParamList<T> SwapModel<T>::encoder_parameters() const {
    nn::ParamList<T> p;
    for (std::size_t i = 0; i < encoder_.size(); ++i) encoder_[i].collect(p, "encoder.conv" + std::to_string(i));
    bottleneck_.collect(p, "bottleneck");
    return p;
}

template <typename T>
nn::ParamList<T> SwapModel<T>::decoder_parameters(Identity id) const {
    nn::ParamList<T> p;
    decoders_[static_cast<int>(id)].collect(p, id == Identity::A ? "decoder_a" : "decoder_b");
    return p;
}

template <typename T>
nn::ParamList<T> SwapModel<T>::parameters() const {
    auto p = encoder_parameters();
    for (auto id : {Identity::A, Identity::B}) {
        auto d = decoder_parameters(id);
        p.insert(p.end(), d.begin(), d.end());
    }
    return p;
}

template struct Decoder<float>;
template struct Decoder<double>;
template class SwapModel<float>;
template class SwapModel<double>;

}  // namespace swapforge::model
