#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "swapforge/nn/layers.hpp"

namespace swapforge::model {

enum class Identity { A = 0, B = 1 };

std::string to_string(Identity id);
/// Accepts "A"/"B" in either case.
Identity parse_identity(const std::string& s);

struct ModelConfig {
    int input_size = 64;
    std::size_t latent_dim = 64;
    std::size_t encoder_base_channels = 8;
    std::size_t decoder_base_channels = 8;
    int encoder_layers = 4;
    int upscale_layers = 4;
    int residual_blocks_per_upscale = 2;
    double leaky_alpha = 0.1;
    std::uint64_t seed = 7;

    /// Spatial side of the intermediate block before its x2 upsample.
    int base_size() const noexcept { return input_size >> (upscale_layers + 1); }
    /// Throws InvalidArgument on inconsistent settings.
    void validate() const;

    std::string to_json() const;
    static ModelConfig from_json(const std::string& text);

    bool operator==(const ModelConfig&) const = default;
};

/// Per-identity half of the network: intermediate block and decoder.
template <typename T>
struct Decoder {
    nn::Linear<T> intermediate;
    std::size_t intermediate_channels = 0;
    std::vector<nn::Upscaler<T>> upscalers;
    std::vector<std::vector<nn::ResidualBlock<T>>> residuals;  // one list per upscaler
    nn::Conv2d<T> out;

    void collect(nn::ParamList<T>& params, const std::string& prefix) const;
};

/// Shared encoder and bottleneck feeding two identity decoders.
template <typename T>
class SwapModel {
public:
    static SwapModel build(const ModelConfig& cfg);

    const ModelConfig& config() const noexcept { return cfg_; }

    /// x [N,3,S,S] -> latent [N,latent_dim].
    nn::Tensor<T> encode(const nn::Tensor<T>& x) const;
    /// latent -> image [N,3,S,S] in (0,1).
    nn::Tensor<T> decode(const nn::Tensor<T>& latent, Identity id) const;
    nn::Tensor<T> forward(const nn::Tensor<T>& x, Identity id) const { return decode(encode(x), id); }

    /// Every trainable tensor, in a fixed order with stable names.
    nn::ParamList<T> parameters() const;
    nn::ParamList<T> encoder_parameters() const;
    nn::ParamList<T> decoder_parameters(Identity id) const;

    Decoder<T>& decoder(Identity id) noexcept { return decoders_[static_cast<int>(id)]; }

private:
    ModelConfig cfg_;
    std::vector<nn::Conv2d<T>> encoder_;
    nn::Linear<T> bottleneck_;
    std::array<Decoder<T>, 2> decoders_;
};

}  // namespace swapforge::model
