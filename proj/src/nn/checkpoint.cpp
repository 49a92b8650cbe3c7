#include "swapforge/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "swapforge/errors.hpp"
#include "swapforge/imaging/io.hpp"

namespace swapforge::nn {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'S', 'W', 'F', 'C', 'K', 'P', 'T', '1'};

void put_u64(std::string& out, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint64_t get_u64(const std::string& in, std::size_t pos) {
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
    return v;
}

void put_f32(std::string& out, float f) {
    const auto u = std::bit_cast<std::uint32_t>(f);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((u >> (8 * b)) & 0xff));
}

float get_f32(const std::string& in, std::size_t pos) {
    std::uint32_t u = 0;
    for (int b = 0; b < 4; ++b) u |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + b])) << (8 * b);
    return std::bit_cast<float>(u);
}

}  // namespace

template <typename T>
Checkpoint make_checkpoint(const ParamList<T>& params, long step, const std::string& metadata, const AdamState* adam) {
    Checkpoint c;
    c.step = step;
    c.metadata = metadata;
    for (std::size_t k = 0; k < params.size(); ++k) {
        const auto& p = params[k];
        CheckpointTensor t;
        t.shape = p.tensor.shape();
        t.values.assign(p.tensor.data().begin(), p.tensor.data().end());
        c.tensors[p.name] = std::move(t);
        if (adam && adam->m.size() == params.size()) {
            c.tensors[p.name + "#m"] = {t.shape, std::vector<float>(adam->m[k].begin(), adam->m[k].end())};
            c.tensors[p.name + "#v"] = {t.shape, std::vector<float>(adam->v[k].begin(), adam->v[k].end())};
            c.has_moments = true;
        }
    }
    if (adam) {
        c.adam.lr = adam->lr;
        c.adam.beta1 = adam->beta1;
        c.adam.beta2 = adam->beta2;
        c.adam.eps = adam->eps;
        c.adam.step = adam->step;
    }
    return c;
}

template <typename T>
void restore_parameters(const Checkpoint& ckpt, const ParamList<T>& params, AdamState* adam) {
    for (const auto& p : params) {
        auto it = ckpt.tensors.find(p.name);
        if (it == ckpt.tensors.end()) throw InvalidArgument("checkpoint: missing tensor " + p.name);
        if (it->second.shape != p.tensor.shape()) {
            throw InvalidArgument("checkpoint: shape mismatch for " + p.name + ": " + shape_to_string(it->second.shape) +
                                  " vs " + shape_to_string(p.tensor.shape()));
        }
        Tensor<T> t = p.tensor;
        std::copy(it->second.values.begin(), it->second.values.end(), t.data().begin());
    }
    if (adam) {
        adam->lr = ckpt.adam.lr;
        adam->beta1 = ckpt.adam.beta1;
        adam->beta2 = ckpt.adam.beta2;
        adam->eps = ckpt.adam.eps;
        adam->step = ckpt.adam.step;
        adam->m.clear();
        adam->v.clear();
        if (ckpt.has_moments) {
            for (const auto& p : params) {
                const auto& m = ckpt.tensors.at(p.name + "#m").values;
                const auto& v = ckpt.tensors.at(p.name + "#v").values;
                adam->m.emplace_back(m.begin(), m.end());
                adam->v.emplace_back(v.begin(), v.end());
            }
        }
    }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    json header;
    header["step"] = ckpt.step;
    header["metadata"] = ckpt.metadata.empty() ? json::object() : json::parse(ckpt.metadata);
    header["moments"] = ckpt.has_moments;
    header["adam"] = {{"lr", ckpt.adam.lr},
                      {"beta1", ckpt.adam.beta1},
                      {"beta2", ckpt.adam.beta2},
                      {"eps", ckpt.adam.eps},
                      {"step", ckpt.adam.step}};
    json tensors = json::array();
    std::size_t offset = 0;
    for (const auto& [name, t] : ckpt.tensors) {
        tensors.push_back({{"name", name}, {"shape", t.shape}, {"offset", offset}});
        offset += t.values.size();
    }
    header["tensors"] = tensors;
    const std::string htext = header.dump();
    std::string out(kMagic, sizeof kMagic);
    put_u64(out, htext.size());
    out += htext;
    out.reserve(out.size() + offset * 4);
    for (const auto& [_, t] : ckpt.tensors)
        for (float v : t.values) put_f32(out, v);
    imaging::write_file_atomic(path, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kMagic, 8) != 0) {
        throw IoError("not a checkpoint file: " + path.string());
    }
    const std::uint64_t hlen = get_u64(bytes, 8);
    if (16 + hlen > bytes.size()) throw IoError("truncated checkpoint header: " + path.string());
    const json header = json::parse(bytes.substr(16, hlen));
    const std::size_t base = 16 + hlen;
    Checkpoint c;
    c.step = header.value("step", 0L);
    c.metadata = header.value("metadata", json::object()).dump();
    c.has_moments = header.value("moments", false);
    if (header.contains("adam")) {
        const auto& a = header["adam"];
        c.adam.lr = a.value("lr", c.adam.lr);
        c.adam.beta1 = a.value("beta1", c.adam.beta1);
        c.adam.beta2 = a.value("beta2", c.adam.beta2);
        c.adam.eps = a.value("eps", c.adam.eps);
        c.adam.step = a.value("step", 0L);
    }
    for (const auto& t : header.at("tensors")) {
        CheckpointTensor ct;
        ct.shape = t.at("shape").get<Shape>();
        const std::size_t off = t.at("offset").get<std::size_t>();
        const std::size_t n = numel(ct.shape);
        if (base + (off + n) * 4 > bytes.size()) throw IoError("truncated checkpoint payload: " + path.string());
        ct.values.resize(n);
        for (std::size_t i = 0; i < n; ++i) ct.values[i] = get_f32(bytes, base + (off + i) * 4);
        c.tensors[t.at("name").get<std::string>()] = std::move(ct);
    }
    return c;
}

template Checkpoint make_checkpoint(const ParamList<float>&, long, const std::string&, const AdamState*);
template Checkpoint make_checkpoint(const ParamList<double>&, long, const std::string&, const AdamState*);
template void restore_parameters(const Checkpoint&, const ParamList<float>&, AdamState*);
template void restore_parameters(const Checkpoint&, const ParamList<double>&, AdamState*);

}  // namespace swapforge::nn
